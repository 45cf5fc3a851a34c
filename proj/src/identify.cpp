#include "cpid/identify.hpp"

#include <algorithm>

#include "cpid/errors.hpp"
#include "cpid/separation.hpp"
#include "cpid/swig.hpp"

namespace cpid {

namespace {

std::string sub(const char* sym, int t) { return std::string(sym) + "_" + std::to_string(t); }

}  // namespace

Verdict check_memorylessness(const DecisionProcess& p) {
    Verdict v{"memorylessness"};
    const Admg& g = p.graph();
    for (int t = 1; t <= p.horizon(); ++t) {
        VertexSet past = p.states_upto(t - 1);
        VertexSet acts = p.actions_upto(t - 1);
        past.insert(acts.begin(), acts.end());
        for (Vertex s : p.state(t)) past.erase(s);
        VertexSet innov = p.innovation(t + 1);
        if (past.empty() || innov.empty()) continue;
        SeparationQuery q{past, innov, p.state(t)};
        if (auto w = find_connection(g, q, WalkKind::Any, Blocking::Walk))
            v.fail({t, 0,
                    "past " + p.describe_set(past) + " is m-connected to " + sub("N", t + 1) +
                        " = " + p.describe_set(innov) + " given " + sub("S", t),
                    w->render(g)});
    }
    return v;
}

namespace {

Verdict backdoor_impl(const DecisionProcess& p, bool per_time_only, std::string name) {
    Verdict v{std::move(name)};
    const Admg& g = p.graph();
    for (int k = 1; k <= p.horizon(); ++k) {
        int last = per_time_only ? k : p.horizon();
        for (int t = k; t <= last; ++t) {
            VertexSet innov = p.innovation(t + 1);
            if (innov.empty()) continue;
            SeparationQuery q{{p.action(k)}, innov, p.state(k)};
            if (auto w = find_connection(g, q, WalkKind::Backdoor, Blocking::Ancestral))
                v.fail({t, k,
                        "back-door path from " + g.name(p.action(k)) + " to " + sub("N", t + 1) +
                            " open given " + sub("S", k),
                        w->render(g)});
        }
    }
    return v;
}

}  // namespace

Verdict check_dynamic_backdoor(const DecisionProcess& p) {
    return backdoor_impl(p, false, "dynamic-backdoor");
}

Verdict check_per_time_backdoor(const DecisionProcess& p) {
    return backdoor_impl(p, true, "per-time-backdoor");
}

Verdict check_dynamic_unconfoundedness(const DecisionProcess& p) {
    Verdict v{"dynamic-unconfoundedness"};
    for (int k = 1; k <= p.horizon(); ++k) {
        Swig s = build_swig(p, times_from(k + 1, p.horizon()));
        const Admg& h = s.graph();
        VertexSet given = s.natural(p.state(k));
        Vertex a = s.natural(p.action(k));
        for (int t = k; t <= p.horizon(); ++t) {
            VertexSet innov = s.natural(p.innovation(t + 1));
            if (innov.empty()) continue;
            SeparationQuery q{{a}, innov, given};
            if (auto w = find_connection(h, q, WalkKind::Confounding, Blocking::Walk))
                v.fail({t, k,
                        "confounding walk between " + sub("N", t + 1) + " and " +
                            p.graph().name(p.action(k)) + " given " + sub("S", k) +
                            (k < p.horizon() ? " in the graph intervening on " + std::to_string(k + 1) + ".." +
                                                   std::to_string(p.horizon())
                                             : std::string(" with no later intervention")),
                        w->render(h)});
        }
    }
    return v;
}

Verdict check_sequential_ignorability(const DecisionProcess& p) {
    if (!check_dtr_shape(p))
        throw NotDtrShape("sequential ignorability needs full-history states and no intermediate rewards");
    Verdict v{"sequential-ignorability"};
    const int T = p.horizon();
    Swig s = build_swig(p, times_from(1, T));
    const Admg& h = s.graph();
    VertexSet final_reward;
    for (Vertex r : p.reward(T + 1))
        if (!p.is_action(r)) final_reward.insert(s.natural(r));
    if (final_reward.empty()) return v;
    for (int t = 1; t <= T; ++t) {
        VertexSet given = s.causal(p.state(t));
        for (int j = 1; j < t; ++j) given.insert(s.minus(j));
        SeparationQuery q{final_reward, {s.minus(t)}, given};
        if (auto w = find_connection(h, q, WalkKind::Any, Blocking::Walk))
            v.fail({t, 0,
                    "final reward m-connected to " + h.name(s.minus(t)) + " given history",
                    w->render(h)});
    }
    return v;
}

bool check_state_reward_paths(const DecisionProcess& p) {
    const int T = p.horizon();
    Swig s = build_swig(p, times_from(1, T));
    const Admg& h = s.graph();
    VertexSet final_reward;
    for (Vertex r : p.reward(T + 1))
        if (!p.is_action(r)) final_reward.insert(s.natural(r));
    const VertexSet reaches = h.ancestors(final_reward);
    for (Vertex v : p.states_upto(T))
        if (!reaches.count(s.causal(v))) return false;
    return true;
}

Verdict check_randomized_decisions(const DecisionProcess& p) {
    Verdict v{"randomized-decisions"};
    // Latent noise feeding a single decision is not confounding; judge the
    // observed projection instead of the raw graph.
    const Admg& raw = p.graph();
    Admg g = latent_project(raw, raw.observed());
    for (int t = 1; t <= p.horizon(); ++t) {
        Vertex a = g.index(raw.name(p.action(t)));
        VertexSet st;
        for (Vertex s : p.state(t)) st.insert(g.index(raw.name(s)));
        for (Vertex b : g.siblings(a))
            v.fail({t, 0, "bidirected edge at decision " + g.name(a),
                    g.name(a) + " <-> " + g.name(b)});
        for (Vertex u : g.parents(a))
            if (!st.count(u))
                v.fail({t, 0, "parent " + g.name(u) + " of " + g.name(a) + " not in " + sub("S", t),
                        g.name(u) + " -> " + g.name(a)});
    }
    return v;
}

IdentReport identify(const DecisionProcess& p) {
    return {check_nested_states(p), check_memorylessness(p), check_dynamic_backdoor(p),
            check_dynamic_unconfoundedness(p)};
}

nlohmann::json to_json(const Verdict& v) {
    nlohmann::json j;
    j["name"] = v.name;
    j["pass"] = v.pass;
    j["violations"] = nlohmann::json::array();
    for (const auto& x : v.violations) {
        nlohmann::json e{{"t", x.t}, {"message", x.message}};
        if (x.k) e["k"] = x.k;
        if (!x.witness.empty()) e["witness"] = x.witness;
        j["violations"].push_back(std::move(e));
    }
    return j;
}

nlohmann::json to_json(const IdentReport& r) {
    return {{"overall", r.overall()},
            {"identified", r.identified()},
            {"checks",
             {to_json(r.nested), to_json(r.memoryless), to_json(r.backdoor),
              to_json(r.unconfounded)}}};
}

std::string to_text(const Verdict& v) {
    std::string out = v.name + ": " + (v.pass ? "PASS" : "FAIL") + "\n";
    for (const auto& x : v.violations) {
        out += "  t=" + std::to_string(x.t);
        if (x.k) out += " k=" + std::to_string(x.k);
        out += "  " + x.message + "\n";
        if (!x.witness.empty()) out += "    witness: " + x.witness + "\n";
    }
    return out;
}

Admg latent_project(const Admg& g, const VertexSet& keep) {
    for (Vertex v : keep) g.check_vertex(v);
    const std::size_t n = g.size();
    std::vector<bool> kept(n, false);
    for (Vertex v : keep) kept[v] = true;

    // Dropped vertices reachable backwards from v through dropped vertices only.
    auto hidden_ancestors = [&](Vertex v) {
        VertexSet out;
        std::vector<Vertex> stack{v};
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            for (Vertex w : g.parents(u))
                if (!kept[w] && out.insert(w).second) stack.push_back(w);
        }
        return out;
    };
    // Kept vertices reachable forwards from v through dropped vertices only.
    auto directed_reach = [&](Vertex v) {
        VertexSet out;
        VertexSet seen;
        std::vector<Vertex> stack{v};
        while (!stack.empty()) {
            Vertex u = stack.back();
            stack.pop_back();
            for (Vertex w : g.children(u)) {
                if (kept[w]) out.insert(w);
                else if (seen.insert(w).second) stack.push_back(w);
            }
        }
        return out;
    };

    Admg::Builder b;
    for (Vertex v : keep) b.vertex(g.name(v), g.is_latent(v));
    std::vector<VertexSet> hid(n);
    for (Vertex v : keep) {
        hid[v] = hidden_ancestors(v);
        hid[v].insert(v);
        for (Vertex w : directed_reach(v)) b.directed(g.name(v), g.name(w));
    }
    for (auto i = keep.begin(); i != keep.end(); ++i) {
        for (auto j = std::next(i); j != keep.end(); ++j) {
            const VertexSet& hi = hid[*i];
            const VertexSet& hj = hid[*j];
            bool linked = false;
            for (Vertex x : hi) {
                if (x != *i && hj.count(x)) linked = true;
                for (Vertex y : g.siblings(x))
                    if (hj.count(y)) linked = true;
                if (linked) break;
            }
            if (linked) b.bidirected(g.name(*i), g.name(*j));
        }
    }
    return b.build();
}

Admg construct_projection(const Admg& g, const std::vector<Construct>& constructs) {
    Admg::Builder b;
    for (const auto& c : constructs) {
        for (Vertex v : c.members) g.check_vertex(v);
        b.vertex(c.name, c.latent);
    }
    for (std::size_t i = 0; i < constructs.size(); ++i) {
        for (std::size_t j = i + 1; j < constructs.size(); ++j) {
            const auto& from = constructs[i].members;
            const auto& to = constructs[j].members;
            bool edge = false;
            for (Vertex u : from) {
                if (to.count(u)) edge = true;
                for (Vertex w : g.children(u))
                    if (to.count(w)) edge = true;
                if (edge) break;
            }
            if (edge) b.directed(constructs[i].name, constructs[j].name);
        }
    }
    for (std::size_t i = 0; i < constructs.size(); ++i)
        for (std::size_t j = i + 1; j < constructs.size(); ++j) {
            bool edge = false;
            for (Vertex u : constructs[i].members)
                for (Vertex w : g.siblings(u))
                    if (constructs[j].members.count(w)) edge = true;
            if (edge) b.bidirected(constructs[i].name, constructs[j].name);
        }
    return b.build();
}

}  // namespace cpid
