#include "cpid/npsem.hpp"

#include <cmath>
#include <set>
#include <thread>

#include "cpid/errors.hpp"
#include "cpid/rng.hpp"

namespace cpid {

Npsem::Npsem(std::vector<SemVariable> vars) : vars_(std::move(vars)) {
    std::set<std::string> names;
    for (std::size_t i = 0; i < vars_.size(); ++i) {
        const auto& v = vars_[i];
        if (!names.insert(v.name).second) throw SchemaError("variables/" + v.name + ": duplicate name");
        if (v.values.empty()) throw SchemaError("variables/" + v.name + ": empty domain");
        std::size_t rows = 1;
        for (std::size_t pa : v.parents) {
            if (pa >= i) throw SchemaError("variables/" + v.name + ": parent declared later");
            rows *= vars_[pa].values.size();
        }
        if (v.cpt.size() != rows * v.values.size())
            throw SchemaError("variables/" + v.name + "/cpt: expected " + std::to_string(rows) + " rows of " +
                              std::to_string(v.values.size()));
        for (std::size_t r = 0; r < rows; ++r) {
            double tot = 0;
            for (std::size_t k = 0; k < v.values.size(); ++k) {
                double x = v.cpt[r * v.values.size() + k];
                if (!(x >= 0)) throw SchemaError("variables/" + v.name + "/cpt: negative entry");
                tot += x;
            }
            if (std::abs(tot - 1) > 1e-9)
                throw SchemaError("variables/" + v.name + "/cpt/" + std::to_string(r) + ": row does not sum to 1");
        }
    }
}

std::size_t Npsem::index(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return i;
    throw SchemaError("structural model has no variable " + name);
}

std::vector<Variable> Npsem::observed() const {
    std::vector<Variable> out;
    for (const auto& v : vars_)
        if (!v.latent) out.push_back({v.name, v.values});
    return out;
}

Npsem npsem_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("variables") || !j["variables"].is_array())
        throw SchemaError("/variables: expected an array");
    std::vector<SemVariable> vars;
    std::size_t i = 0;
    for (const auto& e : j["variables"]) {
        std::string path = "/variables/" + std::to_string(i++);
        try {
            SemVariable v;
            v.name = e.at("name").get<std::string>();
            v.values = e.at("values").get<std::vector<double>>();
            v.latent = e.value("latent", false);
            for (const auto& pn : e.value("parents", std::vector<std::string>{})) {
                bool found = false;
                for (std::size_t k = 0; k < vars.size(); ++k)
                    if (vars[k].name == pn) {
                        v.parents.push_back(k);
                        found = true;
                    }
                if (!found) throw SchemaError(path + "/parents: unknown or later variable " + pn);
            }
            for (const auto& row : e.at("cpt")) {
                auto r = row.get<std::vector<double>>();
                if (r.size() != v.values.size()) throw SchemaError(path + "/cpt: row width mismatch");
                v.cpt.insert(v.cpt.end(), r.begin(), r.end());
            }
            vars.push_back(std::move(v));
        } catch (const nlohmann::json::exception& ex) {
            throw SchemaError(path + ": " + ex.what());
        }
    }
    return Npsem(std::move(vars));
}

namespace {

// Per-variable sampling plan: either the structural kernel or a policy rule.
struct Plan {
    const DecisionRule* rule = nullptr;
    std::vector<std::size_t> state;  // SEM indices of the rule's state, in rule order
};

std::vector<Plan> plans(const Npsem& sem, const DecisionProcess* p, const Policy* g) {
    std::vector<Plan> out(sem.variables().size());
    if (!p || !g) return out;
    if (static_cast<int>(g->rules.size()) != p->horizon())
        throw InvalidDistribution("policy length does not match the horizon");
    for (int t = 1; t <= p->horizon(); ++t) {
        const DecisionRule& r = g->at(t);
        if (r.natural) continue;
        std::size_t a = sem.index(r.action);
        out[a].rule = &r;
        for (const auto& s : r.state) {
            std::size_t si = sem.index(s);
            if (si >= a) throw SchemaError("state variable " + s + " is not before " + r.action);
            out[a].state.push_back(si);
        }
        std::size_t cells = sem.variables()[a].values.size();
        for (std::size_t si : out[a].state) cells *= sem.variables()[si].values.size();
        if (r.probs.size() != cells) throw InvalidDistribution("rule for " + r.action + " has the wrong size");
    }
    return out;
}

// Kernel row offset for variable i given current value indices.
std::size_t row_of(const Npsem& sem, const Plan& plan, std::size_t i, const std::vector<std::size_t>& x) {
    const auto& v = sem.variables()[i];
    std::size_t r = 0;
    if (plan.rule) {
        for (std::size_t s : plan.state) r = r * sem.variables()[s].values.size() + x[s];
    } else {
        for (std::size_t pa : v.parents) r = r * sem.variables()[pa].values.size() + x[pa];
    }
    return r * v.values.size();
}

const std::vector<double>& kernel(const Npsem& sem, const Plan& plan, std::size_t i) {
    return plan.rule ? plan.rule->probs : sem.variables()[i].cpt;
}

std::size_t observed_cell(const Npsem& sem, const std::vector<std::size_t>& x) {
    std::size_t c = 0;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!sem.variables()[i].latent) c = c * sem.variables()[i].values.size() + x[i];
    return c;
}

}  // namespace

TabularDistribution npsem_exact(const Npsem& sem, const DecisionProcess* p, const Policy* g) {
    const auto pl = plans(sem, p, g);
    const auto obs = sem.observed();
    std::vector<double> w(domain_cells(obs), 0.0);
    const std::size_t n = sem.variables().size();
    std::vector<std::size_t> x(n, 0);
    auto rec = [&](auto&& self, std::size_t i, double mass) -> void {
        if (mass == 0) return;
        if (i == n) {
            w[observed_cell(sem, x)] += mass;
            return;
        }
        const auto& k = kernel(sem, pl[i], i);
        std::size_t row = row_of(sem, pl[i], i, x);
        for (std::size_t v = 0; v < sem.variables()[i].values.size(); ++v) {
            x[i] = v;
            self(self, i + 1, mass * k[row + v]);
        }
    };
    rec(rec, 0, 1.0);
    return TabularDistribution::from_weights(obs, std::move(w));
}

OracleResult npsem_oracle(const Npsem& sem, const DecisionProcess& p, const Policy& g,
                          std::size_t draws, std::uint64_t seed, int threads) {
    const auto pl = plans(sem, &p, &g);
    const auto obs = sem.observed();
    const std::size_t cells = domain_cells(obs);
    constexpr std::size_t kChunk = 1 << 16;
    const std::size_t chunks = (draws + kChunk - 1) / kChunk;
    std::vector<std::vector<std::uint64_t>> counts(chunks, std::vector<std::uint64_t>(cells, 0));
    auto run = [&](std::size_t c) {
        CounterRng rng(seed, 0x5e3, c);
        std::vector<std::size_t> x(sem.variables().size());
        std::vector<double> weights;
        const std::size_t m = std::min(kChunk, draws - c * kChunk);
        for (std::size_t d = 0; d < m; ++d) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                const auto& k = kernel(sem, pl[i], i);
                std::size_t row = row_of(sem, pl[i], i, x);
                weights.assign(k.begin() + static_cast<std::ptrdiff_t>(row),
                               k.begin() + static_cast<std::ptrdiff_t>(row + sem.variables()[i].values.size()));
                x[i] = rng.categorical(weights);
            }
            ++counts[c][observed_cell(sem, x)];
        }
    };
    const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, chunks));
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) run(c);
    } else {
        std::vector<std::thread> pool;
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&, w] {
                for (std::size_t c = w; c < chunks; c += workers) run(c);
            });
        for (auto& t : pool) t.join();
    }
    std::vector<double> total(cells, 0.0);
    for (const auto& cc : counts)
        for (std::size_t i = 0; i < cells; ++i) total[i] += static_cast<double>(cc[i]);
    return {TabularDistribution::from_weights(obs, std::move(total)), draws};
}

}  // namespace cpid
