#include "cpid/policy_learn.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <tuple>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "cpid/errors.hpp"
#include "cpid/text.hpp"

namespace cpid {

namespace {

std::vector<double> sorted_domain(const SimVertex& v) {
    auto d = v.kernel.sample_domain;
    std::sort(d.begin(), d.end());
    d.erase(std::unique(d.begin(), d.end()), d.end());
    return d;
}

std::size_t value_index(const std::vector<double>& dom, double x, const std::string& what) {
    auto it = std::lower_bound(dom.begin(), dom.end(), x - 1e-9);
    if (it == dom.end() || std::abs(*it - x) > 1e-9)
        throw InvalidParams(what + " takes value outside its domain");
    return static_cast<std::size_t>(it - dom.begin());
}

std::size_t product_size(const std::vector<std::vector<double>>& doms, const char* what) {
    std::size_t n = 1;
    for (const auto& d : doms) {
        if (d.empty() || n > kMaxStates / d.size())
            throw StateSpaceTooLarge(std::string(what) + " space exceeds " + std::to_string(kMaxStates));
        n *= d.size();
    }
    return n;
}

// Resolved state/action layout against a spec.
struct Layout {
    std::vector<std::size_t> state_v;
    std::vector<int> state_lag;
    std::vector<std::size_t> action_v;
    std::size_t reward_v = 0;
    std::vector<std::vector<double>> state_domains, action_domains;
    std::size_t n_states = 1, n_actions = 1;
    int max_lag = 0;

    template <class Get>
    std::size_t state_of(Get&& get) const {
        std::size_t s = 0;
        for (std::size_t i = 0; i < state_v.size(); ++i)
            s = s * state_domains[i].size() +
                value_index(state_domains[i], get(state_lag[i], state_v[i]), "state component");
        return s;
    }
    template <class Get>
    std::size_t action_of(Get&& get) const {
        std::size_t a = 0;
        for (std::size_t i = 0; i < action_v.size(); ++i)
            a = a * action_domains[i].size() + value_index(action_domains[i], get(0, action_v[i]), "action");
        return a;
    }
};

Layout layout(const SimSpec& spec, const StateDefinition& sd, const std::vector<std::string>& actions,
              const std::string& reward, const std::vector<std::string>& latent = {}) {
    Layout L;
    if (actions.empty()) throw InvalidParams("no action vertex given");
    for (const auto& a : actions) {
        L.action_v.push_back(spec.index(a));
        L.action_domains.push_back(sorted_domain(spec.vertices()[L.action_v.back()]));
    }
    const auto& order = spec.order();
    auto pos = [&](std::size_t v) { return std::find(order.begin(), order.end(), v) - order.begin(); };
    auto first_action = std::min_element(L.action_v.begin(), L.action_v.end(),
                                         [&](std::size_t a, std::size_t b) { return pos(a) < pos(b); });
    for (const auto& c : sd.components) {
        if (std::find(latent.begin(), latent.end(), c.base) != latent.end())
            throw InvalidParams("state component " + to_string(c) + " is latent");
        std::size_t v = spec.index(c.base);
        if (c.lag < 0) throw InvalidParams("negative lag in state component");
        if (c.lag == 0 && pos(v) >= pos(*first_action))
            throw InvalidParams("state component " + c.base + " is not available before the decision");
        L.state_v.push_back(v);
        L.state_lag.push_back(c.lag);
        L.state_domains.push_back(sorted_domain(spec.vertices()[v]));
        L.max_lag = std::max(L.max_lag, c.lag);
    }
    L.reward_v = spec.index(reward);
    L.n_states = product_size(L.state_domains, "state");
    L.n_actions = product_size(L.action_domains, "action");
    if (L.n_states * L.n_actions > 16 * kMaxStates) throw StateSpaceTooLarge("state-action space too large");
    return L;
}

struct Obs {
    std::size_t pair;
    std::uint32_t next;
    double r;
    bool operator<(const Obs& o) const { return std::tie(pair, next, r) < std::tie(o.pair, o.next, o.r); }
};

EmpiricalModel build_model(std::vector<Obs>& obs, std::vector<std::vector<double>> sdom,
                           std::vector<std::vector<double>> adom, std::size_t nS, std::size_t nA) {
    std::sort(obs.begin(), obs.end());
    EmpiricalModel m;
    m.state_domains = std::move(sdom);
    m.action_domains = std::move(adom);
    m.n_states = nS;
    m.n_actions = nA;
    m.state_visits.assign(nS, 0);
    m.visits.assign(nS * nA, 0);
    m.reward_sum.assign(nS * nA, 0.0);
    m.row_start.assign(nS * nA + 1, 0);
    m.min_reward = obs.empty() ? 0.0 : obs.front().r;
    for (const auto& o : obs) {
        ++m.visits[o.pair];
        ++m.state_visits[o.pair / nA];
        m.reward_sum[o.pair] += o.r;
        m.min_reward = std::min(m.min_reward, o.r);
    }
    double ss = 0;
    for (const auto& o : obs) {
        double d = o.r - m.reward_sum[o.pair] / static_cast<double>(m.visits[o.pair]);
        ss += d * d;
    }
    m.reward_sd = obs.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(obs.size()));
    std::size_t i = 0;
    for (std::size_t p = 0; p < nS * nA; ++p) {
        m.row_start[p] = m.next_state.size();
        while (i < obs.size() && obs[i].pair == p) {
            std::size_t j = i;
            while (j < obs.size() && obs[j].pair == p && obs[j].next == obs[i].next) ++j;
            m.next_state.push_back(obs[i].next);
            m.prob.push_back(static_cast<double>(j - i) / static_cast<double>(m.visits[p]));
            i = j;
        }
    }
    m.row_start[nS * nA] = m.next_state.size();
    return m;
}

}  // namespace

StateDefinition StateDefinition::parse(std::string_view text) {
    StateDefinition d;
    d.components = parse_lag_list(text);
    return d;
}

std::string StateDefinition::to_string() const {
    std::vector<std::string> parts;
    for (const auto& c : components) parts.push_back(cpid::to_string(c));
    return join(parts, ",");
}

double EmpiricalModel::mean_reward(std::size_t s, std::size_t a) const {
    std::size_t p = s * n_actions + a;
    return visits[p] ? reward_sum[p] / static_cast<double>(visits[p]) : min_reward;
}

double EmpiricalModel::behaviour(std::size_t s, std::size_t a) const {
    return state_visits[s] ? static_cast<double>(visits[s * n_actions + a]) / static_cast<double>(state_visits[s])
                           : 0.0;
}

double EmpiricalModel::transition(std::size_t s, std::size_t a, std::size_t s2) const {
    std::size_t p = s * n_actions + a;
    for (std::size_t k = row_start[p]; k < row_start[p + 1]; ++k)
        if (next_state[k] == s2) return prob[k];
    return 0.0;
}

EmpiricalModel extract_transitions(const std::vector<Episode>& episodes, const SimSpec& spec,
                                   const LearnSetup& setup, int threads) {
    if (episodes.empty()) throw InvalidParams("no episodes to learn from");
    const Layout L = layout(spec, setup.state, setup.actions, setup.reward, setup.latent);
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(episodes.size())));
    std::vector<std::vector<Obs>> parts(static_cast<std::size_t>(workers));
    auto work = [&](int w) {
        auto& out = parts[static_cast<std::size_t>(w)];
        for (std::size_t e = static_cast<std::size_t>(w); e < episodes.size(); e += static_cast<std::size_t>(workers)) {
            const auto& ep = episodes[e];
            auto getter = [&](int t) {
                return [&ep, t](int lag, std::size_t v) { return ep.values[static_cast<std::size_t>(t - 1 - lag)][v]; };
            };
            for (int t = 1 + L.max_lag; t < ep.horizon; ++t) {
                std::size_t s = L.state_of(getter(t));
                std::size_t a = L.action_of(getter(t));
                std::size_t s2 = L.state_of(getter(t + 1));
                out.push_back({s * L.n_actions + a, static_cast<std::uint32_t>(s2),
                               ep.values[static_cast<std::size_t>(t)][L.reward_v]});
            }
        }
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    std::vector<Obs> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return build_model(all, L.state_domains, L.action_domains, L.n_states, L.n_actions);
}

EmpiricalModel model_from_tables(const std::vector<std::vector<std::vector<double>>>& P,
                                 const std::vector<std::vector<double>>& R) {
    const std::size_t nS = P.size();
    if (!nS || P[0].empty() || R.size() != nS) throw InvalidParams("empty or mismatched tables");
    const std::size_t nA = P[0].size();
    EmpiricalModel m;
    m.state_domains = {std::vector<double>(nS)};
    std::iota(m.state_domains[0].begin(), m.state_domains[0].end(), 0.0);
    m.action_domains = {std::vector<double>(nA)};
    std::iota(m.action_domains[0].begin(), m.action_domains[0].end(), 0.0);
    m.n_states = nS;
    m.n_actions = nA;
    m.state_visits.assign(nS, nA);
    m.visits.assign(nS * nA, 1);
    m.reward_sum.assign(nS * nA, 0.0);
    m.min_reward = R[0].at(0);
    for (std::size_t s = 0; s < nS; ++s) {
        if (P[s].size() != nA || R[s].size() != nA) throw InvalidParams("ragged tables");
        for (std::size_t a = 0; a < nA; ++a) {
            std::size_t p = s * nA + a;
            m.reward_sum[p] = R[s][a];
            m.min_reward = std::min(m.min_reward, R[s][a]);
            m.row_start.push_back(m.next_state.size());
            double tot = 0;
            for (std::size_t s2 = 0; s2 < nS; ++s2) {
                double q = P[s][a].at(s2);
                if (q < 0) throw InvalidParams("negative transition probability");
                tot += q;
                if (q > 0) {
                    m.next_state.push_back(static_cast<std::uint32_t>(s2));
                    m.prob.push_back(q);
                }
            }
            if (std::abs(tot - 1) > 1e-9) throw InvalidParams("transition row does not sum to 1");
        }
    }
    m.row_start.push_back(m.next_state.size());
    return m;
}

namespace {

struct Knobs {
    double gamma;
    std::uint64_t min_visits;
    double lcb;
};

double reward_of(const EmpiricalModel& m, std::size_t s, std::size_t a, const Knobs& k) {
    std::size_t p = s * m.n_actions + a;
    return m.mean_reward(s, a) - k.lcb * m.reward_sd / std::sqrt(static_cast<double>(m.visits[p]));
}

// Solves (I - gamma P_pi) V = r_pi; unvisited pairs are absorbing at the
// minimum observed reward.
std::vector<double> evaluate(const EmpiricalModel& m, const std::vector<std::uint32_t>& pi, const Knobs& k) {
    const double gamma = k.gamma;
    const std::uint64_t min_visits = k.min_visits;
    const std::size_t nS = m.n_states;
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(nS));
    for (std::size_t s = 0; s < nS; ++s) {
        const auto i = static_cast<Eigen::Index>(s);
        std::size_t p = s * m.n_actions + pi[s];
        trip.emplace_back(i, i, 1.0);
        if (m.visits[p] >= min_visits) {
            rhs[i] = reward_of(m, s, pi[s], k);
            for (std::size_t k = m.row_start[p]; k < m.row_start[p + 1]; ++k)
                trip.emplace_back(i, static_cast<Eigen::Index>(m.next_state[k]), -gamma * m.prob[k]);
        } else {
            rhs[i] = m.min_reward;
            trip.emplace_back(i, i, -gamma);
        }
    }
    Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(nS), static_cast<Eigen::Index>(nS));
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NoConvergence("policy evaluation: singular system");
    Eigen::VectorXd v = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw NoConvergence("policy evaluation: solve failed");
    return {v.data(), v.data() + v.size()};
}

double q_value(const EmpiricalModel& m, const std::vector<double>& V, std::size_t s, std::size_t a, const Knobs& k) {
    std::size_t p = s * m.n_actions + a;
    if (m.visits[p] < k.min_visits) return m.min_reward + k.gamma * V[s];
    double q = reward_of(m, s, a, k);
    for (std::size_t j = m.row_start[p]; j < m.row_start[p + 1]; ++j) q += k.gamma * m.prob[j] * V[m.next_state[j]];
    return q;
}

}  // namespace

LearnedPolicy policy_iteration(const EmpiricalModel& m, const PiOptions& opt,
                               std::vector<std::vector<double>>* trace) {
    if (!(opt.gamma >= 0 && opt.gamma < 1)) throw InvalidParams("gamma must lie in [0,1)");
    if (!(opt.epsilon >= 0 && opt.epsilon <= 1)) throw InvalidParams("epsilon must lie in [0,1]");
    if (!(opt.lcb >= 0 && std::isfinite(opt.lcb))) throw InvalidParams("lcb must be a finite non-negative number");
    if (opt.min_visits < 1) throw InvalidParams("min_visits must be at least 1");
    const std::size_t nS = m.n_states, nA = m.n_actions;
    const Knobs kn{opt.gamma, static_cast<std::uint64_t>(opt.min_visits), opt.lcb};
    std::vector<std::uint32_t> pi(nS, 0);
    std::vector<double> V;
    auto close = [&](double a, double b) { return std::abs(a - b) <= opt.tol * (1 + std::abs(b)); };
    int it = 0;
    for (;; ++it) {
        if (it >= opt.max_iterations) throw NoConvergence("policy iteration hit the iteration cap");
        V = evaluate(m, pi, kn);
        if (trace) trace->push_back(V);
        bool changed = false;
        for (std::size_t s = 0; s < nS; ++s) {
            double cur = q_value(m, V, s, pi[s], kn);
            std::uint32_t best = pi[s];
            double bq = cur;
            for (std::size_t a = 0; a < nA; ++a) {
                double q = q_value(m, V, s, a, kn);
                if (q > bq && !close(q, bq)) {
                    bq = q;
                    best = static_cast<std::uint32_t>(a);
                }
            }
            if (best != pi[s]) {
                pi[s] = best;
                changed = true;
            }
        }
        if (!changed) break;
    }
    // lowest label among the maximisers
    for (std::size_t s = 0; s < nS; ++s) {
        double bq = q_value(m, V, s, pi[s], kn);
        for (std::size_t a = 0; a < pi[s]; ++a)
            if (close(q_value(m, V, s, a, kn), bq)) {
                pi[s] = static_cast<std::uint32_t>(a);
                break;
            }
    }
    V = evaluate(m, pi, kn);

    LearnedPolicy out;
    out.state_domains = m.state_domains;
    out.action_domains = m.action_domains;
    out.greedy = pi;
    out.seen.resize(nS);
    for (std::size_t s = 0; s < nS; ++s) out.seen[s] = m.state_visits[s] > 0;
    out.epsilon = opt.epsilon;
    out.gamma = opt.gamma;
    out.lcb = opt.lcb;
    out.min_visits = opt.min_visits;
    out.iterations = it + 1;
    double res = 0;
    for (std::size_t s = 0; s < nS; ++s) res = std::max(res, std::abs(V[s] - q_value(m, V, s, pi[s], kn)));
    out.residual = res;
    out.value = std::move(V);
    return out;
}

LearnedPolicy learn_policy(const std::vector<Episode>& episodes, const SimSpec& spec, const LearnSetup& setup,
                           const PiOptions& opt, int threads) {
    auto pol = policy_iteration(extract_transitions(episodes, spec, setup, threads), opt);
    pol.state = setup.state;
    pol.actions = setup.actions;
    return pol;
}

std::vector<double> LearnedPolicy::distribution(std::size_t s) const {
    const std::size_t nA = greedy.empty() ? 0 : product_size(action_domains, "action");
    std::vector<double> d(nA, 1.0 / static_cast<double>(nA));
    if (!seen.at(s)) return d;
    for (auto& x : d) x = epsilon / static_cast<double>(nA);
    d[greedy[s]] += 1 - epsilon;
    return d;
}

std::vector<double> LearnedPolicy::action_values(std::size_t a) const {
    std::vector<double> out(action_domains.size());
    for (std::size_t i = action_domains.size(); i-- > 0;) {
        out[i] = action_domains[i][a % action_domains[i].size()];
        a /= action_domains[i].size();
    }
    return out;
}

nlohmann::json LearnedPolicy::to_json() const {
    nlohmann::json j;
    j["state"] = state.to_string();
    j["actions"] = actions;
    j["state_domains"] = state_domains;
    j["action_domains"] = action_domains;
    j["greedy"] = greedy;
    std::vector<int> s(seen.begin(), seen.end());
    j["seen"] = s;
    j["value"] = value;
    j["epsilon"] = epsilon;
    j["gamma"] = gamma;
    j["lcb"] = lcb;
    j["min_visits"] = min_visits;
    j["iterations"] = iterations;
    j["residual"] = residual;
    j["assumptions"] = {{"unvisited_pairs", "absorbing at the minimum observed reward"},
                        {"tie_break", "lowest action label"},
                        {"unseen_states", "uniform action at evaluation time"}};
    return j;
}

LearnedPolicy LearnedPolicy::from_json(const nlohmann::json& j) {
    try {
        LearnedPolicy p;
        p.state = StateDefinition::parse(j.at("state").get<std::string>());
        p.actions = j.at("actions").get<std::vector<std::string>>();
        p.state_domains = j.at("state_domains").get<std::vector<std::vector<double>>>();
        p.action_domains = j.at("action_domains").get<std::vector<std::vector<double>>>();
        p.greedy = j.at("greedy").get<std::vector<std::uint32_t>>();
        auto s = j.at("seen").get<std::vector<int>>();
        p.seen.assign(s.begin(), s.end());
        p.value = j.value("value", std::vector<double>{});
        p.epsilon = j.value("epsilon", 0.0);
        p.gamma = j.value("gamma", 0.99);
        p.lcb = j.value("lcb", 0.0);
        p.min_visits = j.value("min_visits", 1);
        p.iterations = j.value("iterations", 0);
        p.residual = j.value("residual", 0.0);
        std::size_t nS = product_size(p.state_domains, "state");
        std::size_t nA = product_size(p.action_domains, "action");
        if (p.greedy.size() != nS || p.seen.size() != nS) throw InvalidParams("policy table size mismatch");
        for (auto a : p.greedy)
            if (a >= nA) throw InvalidParams("policy action out of range");
        if (p.state.components.size() != p.state_domains.size() || p.actions.size() != p.action_domains.size())
            throw InvalidParams("policy layout mismatch");
        return p;
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(std::string("malformed policy: ") + e.what());
    }
}

double regret_percent(double value, double null_value) {
    if (null_value == 0) throw InvalidParams("null policy value is zero; regret undefined");
    return (value - null_value) / null_value * 100.0;
}

namespace {

void summarise(const std::vector<double>& xs, double& mean, double& sd) {
    const double n = static_cast<double>(xs.size());
    mean = n ? std::accumulate(xs.begin(), xs.end(), 0.0) / n : 0.0;
    double ss = 0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    sd = n > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
}

void cumulative(const std::vector<Episode>& eps, std::size_t rv, std::vector<double>& totals,
                std::vector<double>& curve) {
    totals.assign(eps.size(), 0.0);
    curve.assign(eps.empty() ? 0 : static_cast<std::size_t>(eps[0].horizon), 0.0);
    for (std::size_t e = 0; e < eps.size(); ++e) {
        double c = 0;
        for (std::size_t t = 0; t < eps[e].values.size(); ++t) {
            c += eps[e].values[t][rv];
            curve[t] += c;
        }
        totals[e] = c;
    }
    for (auto& x : curve) x /= static_cast<double>(std::max<std::size_t>(1, eps.size()));
}

}  // namespace

EvalReport evaluate_policy(const SimSpec& spec, const LearnedPolicy* policy, const EvalOptions& opt) {
    if (opt.episodes < 1 || opt.horizon < 1) throw InvalidParams("need at least one episode and one period");
    const std::size_t rv = spec.index(opt.reward);
    EvalReport rep;
    rep.episodes = opt.episodes;
    rep.horizon = opt.horizon;
    auto null_eps = run_episodes(spec, opt.episodes, opt.horizon, opt.seed, opt.threads);
    std::vector<Episode> pol_eps;
    if (policy) {
        const Layout L = layout(spec, policy->state, policy->actions, opt.reward);
        if (L.state_domains != policy->state_domains || L.action_domains != policy->action_domains)
            throw InvalidParams("policy domains do not match the simulation spec");
        std::atomic<std::uint64_t> unseen{0}, queries{0};
        Intervention g;
        g.vertices = L.action_v;
        g.choose = [&](const History& h, double u, std::vector<double>& out) {
            std::size_t s = L.state_of([&](int lag, std::size_t v) { return h.at(lag, v); });
            ++queries;
            if (!policy->seen[s]) ++unseen;
            auto d = policy->distribution(s);
            std::size_t a = d.size() - 1;
            double acc = 0;
            for (std::size_t k = 0; k < d.size(); ++k) {
                acc += d[k];
                if (u < acc) {
                    a = k;
                    break;
                }
            }
            out = policy->action_values(a);
        };
        pol_eps = run_episodes(spec, opt.episodes, opt.horizon, opt.seed, opt.threads, &g);
        rep.unvisited_queries = unseen.load();
        rep.queries = queries.load();
    } else {
        pol_eps = null_eps;
    }
    cumulative(pol_eps, rv, rep.values, rep.curve);
    cumulative(null_eps, rv, rep.null_values, rep.null_curve);
    summarise(rep.values, rep.mean, rep.sd);
    summarise(rep.null_values, rep.null_mean, rep.null_sd);
    rep.regret = regret_percent(rep.mean, rep.null_mean);
    std::vector<double> diff(rep.values.size());
    for (std::size_t e = 0; e < diff.size(); ++e) diff[e] = rep.values[e] - rep.null_values[e];
    double dm, dsd;
    summarise(diff, dm, dsd);
    double half = 1.96 * dsd / std::sqrt(static_cast<double>(diff.size()));
    rep.regret_lo = (dm - half) / rep.null_mean * 100.0;
    rep.regret_hi = (dm + half) / rep.null_mean * 100.0;
    return rep;
}

nlohmann::json EvalReport::to_json() const {
    return {{"episodes", episodes},
            {"horizon", horizon},
            {"mean", mean},
            {"sd", sd},
            {"null_mean", null_mean},
            {"null_sd", null_sd},
            {"regret_percent", regret},
            {"regret_ci95", {regret_lo, regret_hi}},
            {"queries", queries},
            {"unvisited_state_queries", unvisited_queries}};
}

std::string EvalReport::episodes_csv() const {
    std::string out = "episode,value,null_value\n";
    for (std::size_t e = 0; e < values.size(); ++e)
        out += std::to_string(e) + "," + std::to_string(values[e]) + "," + std::to_string(null_values[e]) + "\n";
    return out;
}

std::string EvalReport::curve_csv() const {
    std::string out = "t,policy,null\n";
    for (std::size_t t = 0; t < curve.size(); ++t)
        out += std::to_string(t + 1) + "," + std::to_string(curve[t]) + "," + std::to_string(null_curve[t]) + "\n";
    return out;
}

}  // namespace cpid
