#ifndef CPID_SWIG_HPP_
#define CPID_SWIG_HPP_

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cpid/admg.hpp"
#include "cpid/decision_process.hpp"
#include "cpid/separation.hpp"

namespace cpid {

// Dynamic single-world intervention graph. Each intervened decision A_t is
// split into a natural half `A_t-` (incoming edges, no children) and an
// intervened half `A_t+` (outgoing edges, parents = mapped S_t).
class Swig {
public:
    const Admg& graph() const { return *graph_; }
    const std::shared_ptr<const Admg>& graph_ptr() const { return graph_; }
    const std::set<int>& intervened() const { return intervened_; }
    bool is_intervened(int t) const { return intervened_.count(t) > 0; }

    Vertex minus(int t) const;  // throws InvalidTimes when t is not intervened
    Vertex plus(int t) const;
    // Image of a base vertex: split decisions map to their natural half.
    Vertex natural(Vertex base) const { return natural_.at(base); }
    // Image used when a base vertex acts as a cause: split decisions map to the
    // intervened half.
    Vertex causal(Vertex base) const { return causal_.at(base); }
    VertexSet natural(const VertexSet& base) const;
    VertexSet causal(const VertexSet& base) const;
    const VertexSet& policy_parents(int t) const { return policy_parents_.at(t); }

    static std::string minus_name(const std::string& base) { return base + "-"; }
    static std::string plus_name(const std::string& base) { return base + "+"; }

private:
    friend Swig build_swig(const DecisionProcess& p, const std::set<int>& intervened);
    std::shared_ptr<const Admg> graph_;
    std::set<int> intervened_;
    std::map<int, Vertex> minus_, plus_;
    std::vector<Vertex> natural_, causal_;
    std::map<int, VertexSet> policy_parents_;
};

Swig build_swig(const DecisionProcess& p, const std::set<int>& intervened);

// Intervention on times t..T, i.e. the graph of the sub-policy starting at t.
std::set<int> times_from(int t, int horizon);

// True when the query sets are m-connected in the SWIG.
bool swig_query(const Swig& s, const SeparationQuery& q);
// Labels are resolved in the SWIG graph, e.g. "A1-" or "A[2]+".
bool swig_query(const Swig& s, const std::vector<std::string>& left,
                const std::vector<std::string>& right, const std::vector<std::string>& given);

std::string to_dot(const Admg& g);

}  // namespace cpid

#endif  // CPID_SWIG_HPP_
