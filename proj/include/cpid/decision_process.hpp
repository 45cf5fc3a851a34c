#ifndef CPID_DECISION_PROCESS_HPP_
#define CPID_DECISION_PROCESS_HPP_

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cpid/admg.hpp"
#include "cpid/template.hpp"

namespace cpid {

struct Violation {
    int t = 0;
    int k = 0;  // earlier decision time for pairwise criteria, else 0
    std::string message;
    std::string witness;  // rendered walk, may be empty
};

struct Verdict {
    Verdict() = default;
    explicit Verdict(std::string n) : name(std::move(n)) {}
    std::string name;
    bool pass = true;
    std::vector<Violation> violations;
    void fail(Violation v) {
        pass = false;
        violations.push_back(std::move(v));
    }
};

// Temporal overlay X1, A1, ..., XT, AT, X_{T+1} on a graph, with states and
// rewards. Times are 1-based in every accessor.
class DecisionProcess {
public:
    DecisionProcess(std::shared_ptr<const Admg> graph, std::vector<VertexSet> x,
                    std::vector<Vertex> actions, std::vector<VertexSet> states,
                    std::vector<VertexSet> rewards);

    int horizon() const { return static_cast<int>(actions_.size()); }
    const Admg& graph() const { return *graph_; }
    const std::shared_ptr<const Admg>& graph_ptr() const { return graph_; }

    const VertexSet& x(int t) const;
    Vertex action(int t) const;
    const VertexSet& state(int t) const;  // S_{T+1} is empty
    const VertexSet& reward(int t) const;

    VertexSet history(int t) const;        // X1 ∪ A1 ∪ ... ∪ X_t
    VertexSet actions_upto(int t) const;   // A_1..A_t (empty for t <= 0)
    VertexSet states_upto(int t) const;    // S_1 ∪ ... ∪ S_t
    VertexSet innovation(int t) const;     // (R_t ∪ S_t) ∩ X_t
    std::vector<VertexSet> innovations() const;  // index 0 is N_1
    int time_of(Vertex v) const;           // t with v ∈ X_t or v = A_t
    bool is_action(Vertex v) const;

    DecisionProcess with_states(std::vector<VertexSet> states) const;
    const std::vector<VertexSet>& states() const { return states_; }

    std::string describe_set(const VertexSet& s) const;

private:
    void validate() const;

    std::shared_ptr<const Admg> graph_;
    std::vector<VertexSet> x_;
    std::vector<Vertex> actions_;
    std::vector<VertexSet> states_;
    std::vector<VertexSet> rewards_;
    std::vector<int> time_of_;
    std::vector<bool> is_action_;
    VertexSet empty_;
};

Verdict check_nested_states(const DecisionProcess& p);
bool check_dtr_shape(const DecisionProcess& p);

// Template processes: per-action lag patterns, rewards by base name.
struct TemplateAnnotation {
    int horizon = 1;  // number of periods
    std::map<std::string, std::vector<LagRef>> states;
    std::vector<std::string> rewards;
};

// Decision times are (period, action) pairs in order; with m actions per
// period the process horizon is m * periods.
DecisionProcess unroll_process(const RolledTemplate& tmpl, const TemplateAnnotation& ann);
// Resolves a pattern list to the state set of action `base` in `period`.
VertexSet resolve_state(const RolledTemplate& tmpl, const Admg& g, const std::string& action,
                        int period, const std::vector<LagRef>& pattern);

}  // namespace cpid

#endif  // CPID_DECISION_PROCESS_HPP_
