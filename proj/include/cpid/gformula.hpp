#ifndef CPID_GFORMULA_HPP_
#define CPID_GFORMULA_HPP_

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpid/decision_process.hpp"

namespace cpid {

struct Variable {
    std::string name;
    std::vector<double> values;  // domain, index order is the table order
};

// Joint table over finite domains, row-major with the last variable fastest.
class TabularDistribution {
public:
    TabularDistribution() = default;
    // Throws InvalidDistribution unless entries are in [0,1] and sum to 1 within `tol`.
    TabularDistribution(std::vector<Variable> vars, std::vector<double> probs, double tol = 1e-9);
    // Rescales non-negative weights to total 1.
    static TabularDistribution from_weights(std::vector<Variable> vars, std::vector<double> w);

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<double>& probs() const { return probs_; }
    std::size_t cells() const { return probs_.size(); }
    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t index(const std::string& name) const;  // throws InvalidDistribution

    // Mixed-radix helpers over the variable order.
    std::vector<std::size_t> digits(std::size_t cell) const;
    std::size_t cell(const std::vector<std::size_t>& digits) const;
    double prob(const std::vector<std::size_t>& digits) const { return probs_[cell(digits)]; }

    // Marginal over `names` in the given order.
    TabularDistribution marginal(const std::vector<std::string>& names) const;
    // Same variables in a different order.
    TabularDistribution reorder(const std::vector<std::string>& names) const;
    double max_abs_diff(const TabularDistribution& other) const;  // same variables required

private:
    std::vector<Variable> vars_;
    std::vector<double> probs_;
};

std::size_t domain_cells(const std::vector<Variable>& vars);

// g_t(a_t | s_t) as a table indexed [state cell][action index]; `natural`
// leaves the decision to its own mechanism (the null policy at t).
struct DecisionRule {
    bool natural = true;
    std::vector<std::string> state;  // order of the state cell encoding
    std::string action;
    std::vector<double> probs;
};

struct Policy {
    std::vector<DecisionRule> rules;  // rules[t-1]
    const DecisionRule& at(int t) const { return rules.at(static_cast<std::size_t>(t - 1)); }
};

Policy null_policy(int horizon);
// Deterministic rule built from `choose(state values) -> action value`.
DecisionRule deterministic_rule(const TabularDistribution& domains, const DecisionProcess& p, int t,
                                const std::function<double(const std::vector<double>&)>& choose);
// Rule whose table is read off P(a_t | s_t); uniform where P(s_t) = 0.
DecisionRule observed_rule(const TabularDistribution& P, const DecisionProcess& p, int t);

struct Utility {
    enum class Kind { Discounted, Table };
    Kind kind = Kind::Discounted;
    double gamma = 0.99;
    std::vector<std::string> vars;   // table form
    std::vector<double> table;       // indexed like a joint over `vars`

    static Utility discounted(double gamma);  // throws InvalidParams outside (0,1)
    static Utility constant(double c);
};

struct GFormulaOptions {
    bool unsafe = false;             // skip the identification precondition
    bool strict_positivity = false;  // P(a_t | s_t) > 0 everywhere, not only on g's support
    std::size_t max_cells = std::size_t{1} << 24;
};

// Variables of the identified joint: N_1, A_1, ..., A_T, N_{T+1}.
std::vector<std::string> joint_variables(const DecisionProcess& p);

// Closed product P(n_{T+1}|a_T,s_T) Π g(a_t|s_t) P(n_t|a_{t-1},s_{t-1}).
TabularDistribution identify_joint(const TabularDistribution& P, const DecisionProcess& p,
                                   const Policy& g, const GFormulaOptions& opt = {});
// Same law built backwards one decision at a time, one table per step.
TabularDistribution identify_joint_recursive(const TabularDistribution& P, const DecisionProcess& p,
                                             const Policy& g, const GFormulaOptions& opt = {});

double expected_utility(const TabularDistribution& joint, const DecisionProcess& p, const Utility& u);
double policy_value(const TabularDistribution& P, const DecisionProcess& p, const Policy& g,
                    const Utility& u, const GFormulaOptions& opt = {});

// CSV: header of variable names plus a final `p` column.
TabularDistribution distribution_from_csv(const std::string& text);
std::string to_csv(const TabularDistribution& d);
// CSV: `t`, variable columns (blank when unused at that t), `p`. Times with no
// rows keep their natural mechanism.
Policy policy_from_csv(const std::string& text, const TabularDistribution& domains,
                       const DecisionProcess& p);
// CSV: reward variable columns plus a final `u` column.
Utility utility_from_csv(const std::string& text, const TabularDistribution& domains);

nlohmann::json to_json(const TabularDistribution& d);

}  // namespace cpid

#endif  // CPID_GFORMULA_HPP_
