#ifndef CPID_SIMULATOR_HPP_
#define CPID_SIMULATOR_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cpid/template.hpp"

namespace cpid {

struct LaggedName {
    int lag = 0;
    std::string name;
    bool operator==(const LaggedName&) const = default;
};

// lhs op rhs with op in {<, >}; rhs is a lagged variable or a constant.
struct Indicator {
    LaggedName lhs;
    char op = '<';
    std::optional<LaggedName> rhs;
    double constant = 0;
};

// (intercept + value * prod(variables)) * prod(indicators)
struct Term {
    double intercept = 0;
    double value = 0;
    std::vector<LaggedName> variables;
    std::vector<Indicator> indicators;
};

struct Branch {
    double weight = 1;
    std::vector<Term> terms;
};

enum class KernelType { Uniform, Linear, Poisson };

struct Kernel {
    KernelType type = KernelType::Uniform;
    std::vector<double> sample_domain;
    double noise = 0;
    std::vector<Branch> branches;     // `terms` is one branch of weight 1
    std::optional<std::vector<Term>> cap;
    std::optional<double> initial;    // value for lags before the first period
};

struct SimVertex {
    std::string name;
    Kernel kernel;
    std::map<int, std::vector<std::string>> dependencies;
};

class SimSpec {
public:
    SimSpec() = default;
    // Validates and fixes the sampling order.
    SimSpec(std::vector<SimVertex> vertices, int burn_in = 10);

    const std::vector<SimVertex>& vertices() const { return vertices_; }
    const std::vector<std::size_t>& order() const { return order_; }
    std::size_t index(std::string_view name) const;  // throws SchemaError
    std::optional<std::size_t> find(std::string_view name) const;
    int max_lag() const { return max_lag_; }
    int burn_in() const { return burn_in_; }
    double initial_value(std::size_t v) const;

    SimSpec with_vertex(SimVertex v) const;  // replace by name

    struct Compiled;
    const Compiled& compiled() const { return *compiled_; }

private:
    std::shared_ptr<const Compiled> compiled_;
    std::vector<SimVertex> vertices_;
    std::vector<std::size_t> order_;
    int max_lag_ = 0;
    int burn_in_ = 10;
};

SimSpec parse_spec(std::string_view yaml_text);
std::string to_yaml(const SimSpec& spec);

// values[t-1][v] for recorded periods t = 1..T, vertices in declaration order.
struct Episode {
    std::vector<std::string> names;
    std::vector<std::vector<double>> values;
    int horizon = 0;
    std::uint64_t seed = 0;
    std::uint64_t index = 0;
    double at(int t, std::string_view name) const;
};

// View of the past handed to a decision hook. `lag` 0 reads the current period.
class History {
public:
    History(const std::vector<std::vector<double>>& rows, std::size_t now) : rows_(rows), now_(now) {}
    double at(int lag, std::size_t v) const { return rows_[now_ - static_cast<std::size_t>(lag)][v]; }

private:
    const std::vector<std::vector<double>>& rows_;
    std::size_t now_;
};

// Replaces the kernels of some vertices from period 1 on. Given the history and
// a uniform stream, writes values for `vertices` (in order) into `out`.
struct Intervention {
    std::vector<std::size_t> vertices;
    std::function<void(const History&, double u, std::vector<double>& out)> choose;
};

Episode run_episode(const SimSpec& spec, int horizon, std::uint64_t seed, std::uint64_t index = 0,
                    const Intervention* g = nullptr);
std::vector<Episode> run_episodes(const SimSpec& spec, int episodes, int horizon, std::uint64_t seed,
                                  int threads = 1, const Intervention* g = nullptr);

// Columns: episode, seed, t, then vertices in declaration order.
std::string episodes_csv(const std::vector<Episode>& eps);

// Dependency structure as a rolled template; `latent` names are marked hidden.
RolledTemplate dependency_template(const SimSpec& spec, const std::set<std::string>& latent,
                                   const std::vector<std::string>& actions);

struct PricingParams {
    int C = 6;
    double p_D = 1, p_Dhat = 0.25;
    double p_B1 = 0.15, beta1[5] = {1, -0.65, 0.5, 0, 0};
    double p_B2 = 0.15, beta2[5] = {1, -0.65, 0.2, 0, 0};
    double p_A1 = 0.15, p_Ac1 = 1, alpha1[5] = {1, 1, 1, 0, 0}, xi1[2] = {-1, 1};
    double p_A2 = 0.15, p_Ac2 = 1, alpha2[5] = {1, 0, 0, 1, 0}, xi2[2] = {0, 0};
    double B_bar = 3, P_bar = 1;  // thresholds of the price rule
    int burn_in = 10;
};

PricingParams pricing_params_from_json(const std::string& json_text);  // throws InvalidParams
// Vertices: D, Dhat, B1, B2, R, Ac1, Ac2, A1, A2.
SimSpec pricing_env(const PricingParams& p);

}  // namespace cpid

#endif  // CPID_SIMULATOR_HPP_
