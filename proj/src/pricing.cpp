#include <cmath>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "cpid/errors.hpp"
#include "cpid/simulator.hpp"

namespace cpid {

namespace {

std::vector<double> range(int lo, int hi) {
    std::vector<double> out;
    for (int i = lo; i <= hi; ++i) out.push_back(i);
    return out;
}

void check_prob(double p, const char* name) {
    if (!(p >= 0 && p <= 1)) throw InvalidParams(std::string(name) + " must lie in [0,1]");
}

// Dependencies are exactly the lagged variables the terms read.
std::map<int, std::vector<std::string>> deps_of(const std::vector<const std::vector<Term>*>& groups) {
    std::map<int, std::set<std::string>> acc;
    auto add = [&](const LaggedName& x) { acc[x.lag].insert(x.name); };
    for (const auto* g : groups)
        for (const auto& t : *g) {
            for (const auto& v : t.variables) add(v);
            for (const auto& ind : t.indicators) {
                add(ind.lhs);
                if (ind.rhs) add(*ind.rhs);
            }
        }
    std::map<int, std::vector<std::string>> out;
    for (auto& [lag, s] : acc) out[lag] = {s.begin(), s.end()};
    return out;
}

SimVertex uniform_vertex(const std::string& name, std::vector<double> dom, double init) {
    SimVertex v{name, {}, {}};
    v.kernel.type = KernelType::Uniform;
    v.kernel.sample_domain = std::move(dom);
    v.kernel.initial = init;
    return v;
}

SimVertex bookings(int i, const PricingParams& p, const double* beta, double noise) {
    const std::string A = "A" + std::to_string(i), Ac = "Ac" + std::to_string(i);
    std::vector<Term> terms{{beta[0], 0, {}, {}}};
    if (beta[1] != 0) terms.push_back({0, beta[1], {{1, A}, {1, A}}, {}});
    if (beta[2] != 0) terms.push_back({0, beta[2], {{i, "D"}, {1, A}, {1, A}}, {}});
    if (beta[3] != 0) terms.push_back({beta[3], 0, {}, {{{1, A}, '<', LaggedName{1, Ac}, 0}}});
    if (beta[4] != 0) terms.push_back({beta[4], 0, {}, {{{1, A}, '>', LaggedName{2, A}, 0}}});
    SimVertex v{"B" + std::to_string(i), {}, {}};
    v.kernel.type = KernelType::Poisson;
    v.kernel.sample_domain = range(0, p.C);
    v.kernel.noise = noise;
    v.kernel.initial = 0;
    v.kernel.branches = {{1.0, terms}};
    if (i == 2) v.kernel.cap = std::vector<Term>{{static_cast<double>(p.C), -1, {{1, "B1"}}, {}}};
    std::vector<const std::vector<Term>*> groups{&v.kernel.branches[0].terms};
    if (v.kernel.cap) groups.push_back(&*v.kernel.cap);
    v.dependencies = deps_of(groups);
    return v;
}

SimVertex price(int i, const double* alpha, const double* xi, double p_A, double p_Ac, const PricingParams& p) {
    const std::vector<Indicator> sold{{{0, "B1"}, '>', std::nullopt, p.B_bar}, {{1, "A1"}, '>', std::nullopt, p.P_bar}};
    std::vector<Term> rule{{alpha[0], 0, {}, {}}};
    if (alpha[1] != 0) rule.push_back({0, alpha[1], {{0, "Dhat"}}, {}});
    if (alpha[2] != 0) rule.push_back({alpha[2], 0, {}, sold});
    if (alpha[3] != 0) rule.push_back({0, alpha[3], {{1, "A1"}}, sold});
    if (alpha[4] != 0) rule.push_back({0, alpha[4], {{1, "A2"}}, {}});
    std::vector<Term> follow{{xi[0], 0, {}, {}}};
    if (xi[1] != 0) follow.push_back({0, xi[1], {{0, "Ac1"}}, {}});
    SimVertex v{"A" + std::to_string(i), {}, {}};
    v.kernel.type = KernelType::Linear;
    v.kernel.sample_domain = {1, 2, 3};
    v.kernel.noise = p_A;
    v.kernel.initial = 2;
    if (p_Ac > 0) v.kernel.branches.push_back({p_Ac, rule});
    if (p_Ac < 1) v.kernel.branches.push_back({1 - p_Ac, follow});
    std::vector<const std::vector<Term>*> groups;
    for (const auto& b : v.kernel.branches) groups.push_back(&b.terms);
    v.dependencies = deps_of(groups);
    return v;
}

}  // namespace

SimSpec pricing_env(const PricingParams& p) {
    if (p.C < 0) throw InvalidParams("C must be a non-negative integer");
    check_prob(p.p_D, "p_D");
    check_prob(p.p_Dhat, "p_Dhat");
    check_prob(p.p_B1, "p_B1");
    check_prob(p.p_B2, "p_B2");
    check_prob(p.p_A1, "p_A1");
    check_prob(p.p_A2, "p_A2");
    check_prob(p.p_Ac1, "p_Ac1");
    check_prob(p.p_Ac2, "p_Ac2");
    for (const double* arr : {p.beta1, p.beta2, p.alpha1, p.alpha2})
        for (int k = 0; k < 5; ++k)
            if (!std::isfinite(arr[k])) throw InvalidParams("coefficients must be finite");
    if (!std::isfinite(p.B_bar) || !std::isfinite(p.P_bar)) throw InvalidParams("thresholds must be finite");
    if (p.burn_in < 0) throw InvalidParams("burn_in must be non-negative");

    std::vector<SimVertex> vs;

    // demand: resampled w.p. p_D, else carried over
    if (p.p_D >= 1) {
        vs.push_back(uniform_vertex("D", {0, 1}, 0));
    } else {
        SimVertex d{"D", {}, {{1, {"D"}}}};
        d.kernel = {KernelType::Linear, {0, 1}, p.p_D, {{1.0, {{0, 1, {{1, "D"}}, {}}}}}, std::nullopt, 0.0};
        vs.push_back(d);
    }
    if (p.p_Dhat <= 0) {
        vs.push_back(uniform_vertex("Dhat", {0, 1}, 0));
    } else {
        SimVertex dh{"Dhat", {}, {{0, {"D"}}}};
        dh.kernel = {KernelType::Linear, {0, 1}, 1 - p.p_Dhat, {{1.0, {{0, 1, {{0, "D"}}, {}}}}}, std::nullopt, 0.0};
        vs.push_back(dh);
    }
    vs.push_back(bookings(1, p, p.beta1, p.p_B1));
    vs.push_back(bookings(2, p, p.beta2, p.p_B2));

    SimVertex r{"R", {}, {}};
    r.kernel.type = KernelType::Linear;
    r.kernel.sample_domain = range(0, 6 * p.C);
    r.kernel.initial = 0;
    r.kernel.branches = {{1.0, {{0, 1, {{1, "A2"}, {0, "B2"}}, {}}, {0, 1, {{1, "A1"}, {0, "B1"}}, {}}}}};
    r.dependencies = deps_of({&r.kernel.branches[0].terms});
    vs.push_back(r);

    vs.push_back(uniform_vertex("Ac1", {1, 2, 3}, 2));
    vs.push_back(uniform_vertex("Ac2", {1, 2, 3}, 2));
    vs.push_back(price(1, p.alpha1, p.xi1, p.p_A1, p.p_Ac1, p));
    vs.push_back(price(2, p.alpha2, p.xi2, p.p_A2, p.p_Ac2, p));
    return SimSpec(std::move(vs), p.burn_in);
}

PricingParams pricing_params_from_json(const std::string& json_text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(std::string("malformed parameter file: ") + e.what());
    }
    if (!j.is_object()) throw InvalidParams("parameter file must be a JSON object");
    PricingParams p;
    auto arr = [&](const nlohmann::json& v, double* dst, std::size_t n, const std::string& key) {
        if (!v.is_array() || v.size() != n)
            throw InvalidParams(key + " must be an array of " + std::to_string(n) + " numbers");
        for (std::size_t i = 0; i < n; ++i) dst[i] = v[i].get<double>();
    };
    const std::map<std::string, double*> scalars{
        {"p_D", &p.p_D},   {"p_Dhat", &p.p_Dhat}, {"p_B1", &p.p_B1},   {"p_B2", &p.p_B2},   {"p_A1", &p.p_A1},
        {"p_A2", &p.p_A2}, {"p_Ac1", &p.p_Ac1},   {"p_Ac2", &p.p_Ac2}, {"B_bar", &p.B_bar}, {"P_bar", &p.P_bar}};
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "C") {
                double c = v.get<double>();
                if (c != std::floor(c)) throw InvalidParams("C must be an integer");
                p.C = static_cast<int>(c);
            } else if (key == "burn_in") {
                p.burn_in = v.get<int>();
            } else if (auto it = scalars.find(key); it != scalars.end()) {
                *it->second = v.get<double>();
            } else if (key == "beta1") {
                arr(v, p.beta1, 5, key);
            } else if (key == "beta2") {
                arr(v, p.beta2, 5, key);
            } else if (key == "alpha1") {
                arr(v, p.alpha1, 5, key);
            } else if (key == "alpha2") {
                arr(v, p.alpha2, 5, key);
            } else if (key == "xi1") {
                arr(v, p.xi1, 2, key);
            } else if (key == "xi2") {
                arr(v, p.xi2, 2, key);
            } else if (key == "name" || key == "graph" || key == "degree" || key == "states") {
                // descriptive fields used by the reproduce driver
            } else {
                throw InvalidParams("unknown parameter '" + key + "'");
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(std::string("bad parameter value: ") + e.what());
    }
    pricing_env(p);  // validation
    return p;
}

}  // namespace cpid
