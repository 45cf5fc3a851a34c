#ifndef CPID_IDENTIFY_HPP_
#define CPID_IDENTIFY_HPP_

#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpid/admg.hpp"
#include "cpid/decision_process.hpp"

namespace cpid {

// (S̄_{t-1} ∪ Ā_{t-1}) \ S_t m-separated from N_{t+1} given S_t, every t.
Verdict check_memorylessness(const DecisionProcess& p);
// No back-door path A_k ... N_{t+1} open under ancestral blocking by S_k, k <= t.
Verdict check_dynamic_backdoor(const DecisionProcess& p);
// No unblocked confounding walk N_{t+1} ... A_k given S_k in the SWIG that
// intervenes on k+1..T, k <= t.
Verdict check_dynamic_unconfoundedness(const DecisionProcess& p);
// Back-door check restricted to k = t.
Verdict check_per_time_backdoor(const DecisionProcess& p);
// Full-SWIG criterion for DTR-shaped processes; throws NotDtrShape otherwise.
Verdict check_sequential_ignorability(const DecisionProcess& p);
// No bidirected edge at any decision, and pa(A_t) ⊆ S_t.
Verdict check_randomized_decisions(const DecisionProcess& p);
// Every (mapped) state vertex has a directed path to the final reward in the
// fully intervened SWIG.
bool check_state_reward_paths(const DecisionProcess& p);

struct IdentReport {
    Verdict nested;
    Verdict memoryless;
    Verdict backdoor;
    Verdict unconfounded;  // weaker sufficient replacement for `backdoor`
    bool overall() const { return nested.pass && memoryless.pass && backdoor.pass; }
    bool identified() const { return nested.pass && memoryless.pass && unconfounded.pass; }
};

IdentReport identify(const DecisionProcess& p);

nlohmann::json to_json(const Verdict& v);
nlohmann::json to_json(const IdentReport& r);
std::string to_text(const Verdict& v);

// Standard latent projection onto `keep`.
Admg latent_project(const Admg& g, const VertexSet& keep);

// Graph over named groups of vertices ("constructs"), listed in temporal
// order. C -> D when C comes first and some member of C is a parent of, or is
// itself, a member of D. Vertices not covered by any construct are dropped.
struct Construct {
    std::string name;
    VertexSet members;
    bool latent = false;
};
Admg construct_projection(const Admg& g, const std::vector<Construct>& constructs);

}  // namespace cpid

#endif  // CPID_IDENTIFY_HPP_
