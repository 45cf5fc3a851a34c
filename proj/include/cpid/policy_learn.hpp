#ifndef CPID_POLICY_LEARN_HPP_
#define CPID_POLICY_LEARN_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpid/simulator.hpp"
#include "cpid/template.hpp"

namespace cpid {

// S_t built from lagged vertices of the episode history, e.g. "A1@1,Dhat@1,B1,Dhat".
struct StateDefinition {
    std::vector<LagRef> components;
    static StateDefinition parse(std::string_view text);
    std::string to_string() const;
};

// What to learn: state, the decision vertices (one joint action), the reward.
struct LearnSetup {
    StateDefinition state;
    std::vector<std::string> actions;
    std::string reward = "R";
    std::vector<std::string> latent;  // never allowed in the state
};

// Count-based tables. Indices: state s in the product of component domains,
// action a in the product of action domains, pair = s * n_actions + a.
struct EmpiricalModel {
    std::vector<std::vector<double>> state_domains, action_domains;
    std::size_t n_states = 0, n_actions = 0;
    std::vector<std::uint64_t> state_visits;  // n(s)
    std::vector<std::uint64_t> visits;        // n(s, a)
    std::vector<double> reward_sum;           // sum of r over (s, a)
    double reward_sd = 0;                     // pooled within-pair standard deviation
    std::vector<std::size_t> row_start;       // CSR over pairs
    std::vector<std::uint32_t> next_state;
    std::vector<double> prob;                 // P(s' | s, a)
    double min_reward = 0;

    bool visited(std::size_t s, std::size_t a) const { return visits[s * n_actions + a] > 0; }
    double mean_reward(std::size_t s, std::size_t a) const;
    double behaviour(std::size_t s, std::size_t a) const;  // P(a | s); 0 for unseen s
    double transition(std::size_t s, std::size_t a, std::size_t s2) const;
};

constexpr std::size_t kMaxStates = 1000000;

EmpiricalModel extract_transitions(const std::vector<Episode>& episodes, const SimSpec& spec,
                                   const LearnSetup& setup, int threads = 1);
// Dense tables P[s][a][s'], R[s][a]; every pair counts as visited once.
EmpiricalModel model_from_tables(const std::vector<std::vector<std::vector<double>>>& P,
                                 const std::vector<std::vector<double>>& R);

struct PiOptions {
    double gamma = 0.99;
    double epsilon = 0.0;  // exploration floor of the returned policy
    double tol = 1e-9;
    int max_iterations = 1000;
    int min_visits = 1;  // pairs seen fewer times are treated as unvisited
    double lcb = 0;      // rewards enter as mean - lcb * sd / sqrt(n)
};

struct LearnedPolicy {
    StateDefinition state;
    std::vector<std::string> actions;
    std::vector<std::vector<double>> state_domains, action_domains;
    std::vector<std::uint32_t> greedy;  // per state
    std::vector<bool> seen;             // state visited in the training data
    std::vector<double> value;          // V under the empirical model
    double epsilon = 0;
    double gamma = 0.99;
    double lcb = 0;
    int min_visits = 1;
    int iterations = 0;
    double residual = 0;  // max Bellman residual of `value`

    std::vector<double> distribution(std::size_t s) const;
    std::vector<double> action_values(std::size_t a) const;  // joint index -> per-vertex values
    nlohmann::json to_json() const;
    static LearnedPolicy from_json(const nlohmann::json& j);
};

// `trace`, when given, receives V after each evaluation step.
LearnedPolicy policy_iteration(const EmpiricalModel& model, const PiOptions& opt = {},
                               std::vector<std::vector<double>>* trace = nullptr);
// Tags the policy with the names it was learned for.
LearnedPolicy learn_policy(const std::vector<Episode>& episodes, const SimSpec& spec, const LearnSetup& setup,
                           const PiOptions& opt = {}, int threads = 1);

struct EvalOptions {
    int episodes = 2000;
    int horizon = 100;
    std::uint64_t seed = 1;
    int threads = 1;
    std::string reward = "R";
};

struct EvalReport {
    int episodes = 0, horizon = 0;
    double mean = 0, sd = 0;
    double null_mean = 0, null_sd = 0;
    double regret = 0;  // percent, negative = worse than null
    double regret_lo = 0, regret_hi = 0;  // paired 95% interval
    std::uint64_t unvisited_queries = 0;
    std::uint64_t queries = 0;
    std::vector<double> values, null_values;     // per episode cumulative reward
    std::vector<double> curve, null_curve;       // mean cumulative reward by t
    nlohmann::json to_json() const;
    std::string episodes_csv() const;  // episode, value, null_value
    std::string curve_csv() const;     // t, policy, null
};

// Runs the policy in place of its action kernels and a null run on the same
// seeds. A null `policy` evaluates the null policy against itself.
EvalReport evaluate_policy(const SimSpec& spec, const LearnedPolicy* policy, const EvalOptions& opt);

double regret_percent(double value, double null_value);

}  // namespace cpid

#endif  // CPID_POLICY_LEARN_HPP_
