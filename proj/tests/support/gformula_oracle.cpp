#include "gformula_oracle.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "cpid/text.hpp"
#include "fixtures.hpp"

namespace cpid::testing {

Npsem load_sem(const std::string& name) {
    return npsem_from_json(nlohmann::json::parse(read_file(fixture_path("sem/" + name + ".json"))));
}

namespace {

using Assignment = std::map<std::string, double>;

double mass(const TabularDistribution& P, const Assignment& a) {
    double total = 0;
    for (std::size_t c = 0; c < P.cells(); ++c) {
        auto d = P.digits(c);
        bool match = true;
        for (std::size_t i = 0; i < d.size() && match; ++i) {
            auto it = a.find(P.variables()[i].name);
            if (it != a.end() && it->second != P.variables()[i].values[d[i]]) match = false;
        }
        if (match) total += P.probs()[c];
    }
    return total;
}

double cond(const TabularDistribution& P, const Assignment& target, const Assignment& given) {
    Assignment both = given;
    both.insert(target.begin(), target.end());
    double den = mass(P, given);
    return den > 0 ? mass(P, both) / den : std::numeric_limits<double>::quiet_NaN();
}

double rule_prob(const TabularDistribution& P, const DecisionRule& r, const Assignment& a) {
    std::size_t cell = 0;
    for (const auto& n : r.state) {
        const auto& v = P.variables()[P.index(n)];
        std::size_t k = 0;
        while (v.values[k] != a.at(n)) ++k;
        cell = cell * v.values.size() + k;
    }
    const auto& av = P.variables()[P.index(r.action)];
    std::size_t k = 0;
    while (av.values[k] != a.at(r.action)) ++k;
    return r.probs[cell * av.values.size() + k];
}

}  // namespace

TabularDistribution sequential_g_formula(const TabularDistribution& P, const DecisionProcess& p,
                                        const Policy& g) {
    const Admg& G = p.graph();
    const int T = p.horizon();
    std::vector<std::vector<std::string>> x(static_cast<std::size_t>(T));
    for (int t = 1; t <= T; ++t)
        for (Vertex v : p.x(t))
            if (!G.is_latent(v)) x[static_cast<std::size_t>(t - 1)].push_back(G.name(v));
    std::vector<std::string> out_names;
    for (int t = 1; t <= T; ++t) {
        for (const auto& n : x[static_cast<std::size_t>(t - 1)]) out_names.push_back(n);
        out_names.push_back(G.name(p.action(t)));
    }
    for (Vertex r : p.reward(T + 1)) out_names.push_back(G.name(r));

    std::vector<Variable> out;
    for (const auto& n : out_names) out.push_back(P.variables()[P.index(n)]);
    std::vector<double> w(domain_cells(out), 0.0);
    for (std::size_t c = 0; c < w.size(); ++c) {
        std::size_t rest = c;
        Assignment a;
        for (std::size_t i = out.size(); i-- > 0;) {
            a[out[i].name] = out[i].values[rest % out[i].values.size()];
            rest /= out[i].values.size();
        }
        Assignment past;
        double prod = 1;
        for (int t = 1; t <= T && prod > 0; ++t) {
            Assignment xt;
            for (const auto& n : x[static_cast<std::size_t>(t - 1)]) xt[n] = a[n];
            prod *= cond(P, xt, past);
            past.insert(xt.begin(), xt.end());
            const DecisionRule& r = g.at(t);
            std::string an = G.name(p.action(t));
            prod *= r.natural ? cond(P, {{an, a[an]}}, past) : rule_prob(P, r, a);
            past[an] = a[an];
        }
        if (prod > 0) {
            Assignment rt;
            for (Vertex r : p.reward(T + 1)) rt[G.name(r)] = a[G.name(r)];
            prod *= cond(P, rt, past);
        }
        w[c] = prod;
    }
    return TabularDistribution::from_weights(out, w);
}

double max_z(const TabularDistribution& truth, const TabularDistribution& empirical, std::size_t n) {
    std::vector<std::string> names;
    for (const auto& v : truth.variables()) names.push_back(v.name);
    TabularDistribution e = empirical.marginal(names);
    double worst = 0;
    for (std::size_t c = 0; c < truth.cells(); ++c) {
        double p = truth.probs()[c], q = e.probs()[c];
        double se = std::sqrt(p * (1 - p) / static_cast<double>(n));
        if (se == 0) {
            if (q != p) return std::numeric_limits<double>::infinity();
            continue;
        }
        worst = std::max(worst, std::abs(q - p) / se);
    }
    return worst;
}

}  // namespace cpid::testing
