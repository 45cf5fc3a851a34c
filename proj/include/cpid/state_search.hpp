#ifndef CPID_STATE_SEARCH_HPP_
#define CPID_STATE_SEARCH_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpid/decision_process.hpp"
#include "cpid/template.hpp"

namespace cpid {

struct StateSearchOptions {
    int max_lag = 2;
    int max_size = 3;
    std::size_t max_candidates = 200000;  // BudgetExceeded above this
    int horizon = 0;                      // template check horizon; 0 picks one
    int threads = 1;
};

struct StateProposal {
    std::vector<LagRef> pattern;        // template search
    std::vector<VertexSet> sets;        // explicit search, one per decision
    std::vector<std::string> labels;    // sorted display labels
    std::size_t cardinality = 0;
    bool minimal = true;
};

struct StateSearchResult {
    std::vector<StateProposal> proposals;
    std::size_t candidates = 0;
    int horizon = 0;
    bool full_history_valid = false;  // reported separately, never a proposal
};

// Uniform lag patterns for every action of the template. Lag-0 candidates are
// non-action vertices that precede the first action of a period.
StateSearchResult find_valid_states(const RolledTemplate& tmpl,
                                    const std::vector<std::string>& rewards,
                                    const StateSearchOptions& opt);

// Per-decision subsets of the observed history, ignoring any states already in `p`.
StateSearchResult find_valid_states(const DecisionProcess& p, const StateSearchOptions& opt);

// Assumptions 1-3 in one call.
bool passes_all(const DecisionProcess& p);

nlohmann::json to_json(const StateSearchResult& r, const Admg* g = nullptr);

}  // namespace cpid

#endif  // CPID_STATE_SEARCH_HPP_
