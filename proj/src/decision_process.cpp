#include "cpid/decision_process.hpp"

#include <algorithm>

#include "cpid/errors.hpp"
#include "cpid/text.hpp"

namespace cpid {

DecisionProcess::DecisionProcess(std::shared_ptr<const Admg> graph, std::vector<VertexSet> x,
                                 std::vector<Vertex> actions, std::vector<VertexSet> states,
                                 std::vector<VertexSet> rewards)
    : graph_(std::move(graph)), x_(std::move(x)), actions_(std::move(actions)),
      states_(std::move(states)), rewards_(std::move(rewards)) {
    if (!graph_) throw InvalidProcess("null graph");
    const std::size_t T = actions_.size();
    if (T < 1) throw InvalidProcess("a decision process needs at least one decision");
    if (x_.size() != T + 1) throw InvalidProcess("expected T+1 X-blocks");
    if (states_.empty()) states_.assign(T, {});
    if (rewards_.empty()) rewards_.assign(T + 1, {});
    if (states_.size() != T) throw InvalidProcess("expected one state set per decision");
    if (rewards_.size() != T + 1) throw InvalidProcess("expected T+1 reward sets");

    const Admg& g = *graph_;
    time_of_.assign(g.size(), 0);
    is_action_.assign(g.size(), false);
    for (std::size_t t = 0; t <= T; ++t) {
        for (Vertex v : x_[t]) {
            g.check_vertex(v);
            if (time_of_[v]) throw InvalidProcess("vertex '" + g.name(v) + "' in two blocks");
            time_of_[v] = static_cast<int>(t + 1);
        }
        if (t < T) {
            Vertex a = actions_[t];
            g.check_vertex(a);
            if (time_of_[a]) throw InvalidProcess("vertex '" + g.name(a) + "' in two blocks");
            time_of_[a] = static_cast<int>(t + 1);
            is_action_[a] = true;
        }
    }
    for (Vertex v = 0; v < g.size(); ++v)
        if (!time_of_[v]) throw InvalidProcess("vertex '" + g.name(v) + "' not in any block");
    validate();
}

void DecisionProcess::validate() const {
    const Admg& g = *graph_;
    auto order = [&](Vertex v) { return 2 * time_of_[v] - (is_action_[v] ? 1 : 2); };
    for (const auto& e : g.directed_edges())
        if (order(e.tail) > order(e.head))
            throw InvalidProcess("edge " + g.name(e.tail) + " -> " + g.name(e.head) +
                                 " points backward in block order");
    for (Vertex a : actions_)
        if (g.is_latent(a)) throw InvalidProcess("decision '" + g.name(a) + "' is latent");
    for (int t = 1; t <= horizon(); ++t) {
        VertexSet h = history(t);
        for (Vertex v : state(t)) {
            g.check_vertex(v);
            if (!h.count(v))
                throw InvalidProcess("state S_" + std::to_string(t) + " contains '" + g.name(v) +
                                     "' which is not observed before " + g.name(action(t)));
            if (g.is_latent(v))
                throw InvalidProcess("state S_" + std::to_string(t) + " contains latent '" +
                                     g.name(v) + "'");
        }
    }
    for (int t = 1; t <= horizon() + 1; ++t)
        for (Vertex v : reward(t)) {
            g.check_vertex(v);
            bool ok = x(t).count(v) || (t > 1 && v == action(t - 1));
            if (!ok)
                throw InvalidProcess("reward R_" + std::to_string(t) + " contains '" + g.name(v) +
                                     "' outside X_t and A_{t-1}");
        }
}

const VertexSet& DecisionProcess::x(int t) const {
    if (t < 1 || t > horizon() + 1) throw InvalidTimes("X-block index " + std::to_string(t));
    return x_[t - 1];
}

Vertex DecisionProcess::action(int t) const {
    if (t < 1 || t > horizon()) throw InvalidTimes("decision index " + std::to_string(t));
    return actions_[t - 1];
}

const VertexSet& DecisionProcess::state(int t) const {
    if (t == horizon() + 1) return empty_;
    if (t < 1 || t > horizon()) throw InvalidTimes("state index " + std::to_string(t));
    return states_[t - 1];
}

const VertexSet& DecisionProcess::reward(int t) const {
    if (t < 1 || t > horizon() + 1) throw InvalidTimes("reward index " + std::to_string(t));
    return rewards_[t - 1];
}

VertexSet DecisionProcess::history(int t) const {
    VertexSet out;
    for (int s = 1; s <= t; ++s) {
        out.insert(x(s).begin(), x(s).end());
        if (s < t) out.insert(action(s));
    }
    return out;
}

VertexSet DecisionProcess::actions_upto(int t) const {
    VertexSet out;
    for (int s = 1; s <= std::min(t, horizon()); ++s) out.insert(action(s));
    return out;
}

VertexSet DecisionProcess::states_upto(int t) const {
    VertexSet out;
    for (int s = 1; s <= std::min(t, horizon()); ++s) out.insert(state(s).begin(), state(s).end());
    return out;
}

VertexSet DecisionProcess::innovation(int t) const {
    VertexSet out;
    for (const auto* s : {&reward(t), &state(t)})
        for (Vertex v : *s)
            if (x(t).count(v)) out.insert(v);
    return out;
}

std::vector<VertexSet> DecisionProcess::innovations() const {
    std::vector<VertexSet> out;
    for (int t = 1; t <= horizon() + 1; ++t) out.push_back(innovation(t));
    return out;
}

int DecisionProcess::time_of(Vertex v) const { return time_of_.at(v); }
bool DecisionProcess::is_action(Vertex v) const { return is_action_.at(v); }

DecisionProcess DecisionProcess::with_states(std::vector<VertexSet> states) const {
    return DecisionProcess(graph_, x_, actions_, std::move(states), rewards_);
}

std::string DecisionProcess::describe_set(const VertexSet& s) const {
    return "{" + join(graph_->names(s), ", ") + "}";
}

Verdict check_nested_states(const DecisionProcess& p) {
    Verdict v{"nested-states"};
    for (int t = 2; t <= p.horizon(); ++t) {
        VertexSet allowed = p.state(t - 1);
        allowed.insert(p.action(t - 1));
        allowed.insert(p.x(t).begin(), p.x(t).end());
        for (Vertex s : p.state(t))
            if (!allowed.count(s))
                v.fail({t, 0,
                        "S_" + std::to_string(t) + " contains " + p.graph().name(s) +
                            " which is not in S_" + std::to_string(t - 1) + " ∪ A_" +
                            std::to_string(t - 1) + " ∪ X_" + std::to_string(t),
                        ""});
    }
    return v;
}

bool check_dtr_shape(const DecisionProcess& p) {
    for (int t = 1; t <= p.horizon(); ++t) {
        VertexSet seen;
        for (Vertex v : p.history(t))
            if (!p.graph().is_latent(v)) seen.insert(v);
        if (p.state(t) != seen) return false;
        if (!p.reward(t).empty()) return false;
    }
    return true;
}

VertexSet resolve_state(const RolledTemplate& tmpl, const Admg& g, const std::string& action,
                        int period, const std::vector<LagRef>& pattern) {
    const std::size_t apos = tmpl.position(action);
    VertexSet out;
    for (const auto& r : pattern) {
        const auto& tv = tmpl.vertex(r.base);
        if (tv.latent) throw InvalidProcess("state pattern uses latent '" + r.base + "'");
        if (r.lag == 0 && tmpl.position(r.base) >= apos)
            throw InvalidProcess("state pattern " + to_string(r) + " is not observed before " +
                                 action);
        int s = period - r.lag;
        if (s < 1) continue;
        out.insert(g.index(RolledTemplate::rolled_name(r.base, s)));
    }
    return out;
}

DecisionProcess unroll_process(const RolledTemplate& tmpl, const TemplateAnnotation& ann) {
    const auto acts = tmpl.actions();
    if (acts.empty()) throw InvalidProcess("template has no action vertex");
    for (const auto& [a, _] : ann.states)
        if (std::find(acts.begin(), acts.end(), a) == acts.end())
            throw InvalidProcess("state pattern given for non-action '" + a + "'");
    const int periods = ann.horizon;
    auto g = std::make_shared<const Admg>(tmpl.unroll(periods));
    const int m = static_cast<int>(acts.size());
    const int T = periods * m;
    std::vector<VertexSet> x(T + 1);
    std::vector<Vertex> actions(T);
    std::vector<VertexSet> states(T);
    std::vector<VertexSet> rewards(T + 1);
    std::vector<bool> is_reward(tmpl.period().size(), false);
    for (const auto& r : ann.rewards) is_reward[tmpl.position(r)] = true;

    for (int p = 1; p <= periods + 1; ++p) {
        int before = 0;  // actions already seen in this period
        for (std::size_t i = 0; i < tmpl.period().size(); ++i) {
            const auto& tv = tmpl.period()[i];
            auto id = g->find(RolledTemplate::rolled_name(tv.base, p));
            if (!id) continue;
            int j = (p - 1) * m + before + 1;
            if (tv.action) {
                actions[j - 1] = *id;
                if (is_reward[i]) rewards[j].insert(*id);
                auto it = ann.states.find(tv.base);
                if (it != ann.states.end())
                    states[j - 1] = resolve_state(tmpl, *g, tv.base, p, it->second);
                ++before;
            } else {
                x[j - 1].insert(*id);
                if (is_reward[i]) {
                    if (tv.latent) throw InvalidProcess("reward '" + tv.base + "' is latent");
                    rewards[j - 1].insert(*id);
                }
            }
        }
    }
    return DecisionProcess(g, std::move(x), std::move(actions), std::move(states),
                           std::move(rewards));
}

}  // namespace cpid
