#ifndef CPID_NPSEM_HPP_
#define CPID_NPSEM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpid/gformula.hpp"

namespace cpid {

// Structural equation V = f(pa(V), E) stored as its induced kernel
// P(V | pa(V)); shared latent parents carry correlated noise.
struct SemVariable {
    std::string name;
    std::vector<double> values;
    std::vector<std::size_t> parents;  // indices of earlier variables
    std::vector<double> cpt;           // [parent cell][value], parents row-major
    bool latent = false;
};

class Npsem {
public:
    explicit Npsem(std::vector<SemVariable> vars);  // validates order and kernels

    const std::vector<SemVariable>& variables() const { return vars_; }
    std::size_t index(const std::string& name) const;  // throws SchemaError
    std::vector<Variable> observed() const;

private:
    std::vector<SemVariable> vars_;
};

// {"variables":[{"name":..,"values":[..],"parents":[..],"cpt":[[..],..],"latent":bool}]}
Npsem npsem_from_json(const nlohmann::json& j);

// Exact law of the observed variables; under `g` when given (decisions with a
// non-natural rule draw from it given their state values under g).
TabularDistribution npsem_exact(const Npsem& sem, const DecisionProcess* p = nullptr,
                                const Policy* g = nullptr);

struct OracleResult {
    TabularDistribution law;  // empirical, over the observed variables
    std::size_t draws = 0;
};

// Forward simulation of V(g), chunked into fixed seeded streams so the result
// does not depend on `threads`.
OracleResult npsem_oracle(const Npsem& sem, const DecisionProcess& p, const Policy& g,
                          std::size_t draws, std::uint64_t seed, int threads = 1);

}  // namespace cpid

#endif  // CPID_NPSEM_HPP_
