#include "cpid/swig.hpp"

#include "cpid/errors.hpp"

namespace cpid {

Vertex Swig::minus(int t) const {
    auto it = minus_.find(t);
    if (it == minus_.end()) throw InvalidTimes("decision " + std::to_string(t) + " not intervened");
    return it->second;
}

Vertex Swig::plus(int t) const {
    auto it = plus_.find(t);
    if (it == plus_.end()) throw InvalidTimes("decision " + std::to_string(t) + " not intervened");
    return it->second;
}

VertexSet Swig::natural(const VertexSet& base) const {
    VertexSet out;
    for (Vertex v : base) out.insert(natural_.at(v));
    return out;
}

VertexSet Swig::causal(const VertexSet& base) const {
    VertexSet out;
    for (Vertex v : base) out.insert(causal_.at(v));
    return out;
}

std::set<int> times_from(int t, int horizon) {
    std::set<int> out;
    for (int s = std::max(t, 1); s <= horizon; ++s) out.insert(s);
    return out;
}

Swig build_swig(const DecisionProcess& p, const std::set<int>& intervened) {
    const Admg& g = p.graph();
    for (int t : intervened)
        if (t < 1 || t > p.horizon())
            throw InvalidTimes("intervened time " + std::to_string(t) + " outside [1, " +
                               std::to_string(p.horizon()) + "]");
    std::vector<bool> split(g.size(), false);
    for (int t : intervened) split[p.action(t)] = true;

    Admg::Builder b;
    std::vector<std::string> natural_name(g.size()), causal_name(g.size());
    for (Vertex v = 0; v < g.size(); ++v) {
        const std::string& n = g.name(v);
        if (split[v]) {
            natural_name[v] = Swig::minus_name(n);
            causal_name[v] = Swig::plus_name(n);
            for (const auto& s : {natural_name[v], causal_name[v]})
                if (g.find(s)) throw InvalidGraph("split label '" + s + "' collides with a vertex");
            b.vertex(natural_name[v]);
            b.vertex(causal_name[v]);
        } else {
            natural_name[v] = causal_name[v] = n;
            b.vertex(n, g.is_latent(v));
        }
    }
    for (const auto& e : g.directed_edges()) b.directed(causal_name[e.tail], natural_name[e.head]);
    for (const auto& e : g.bidirected_edges()) b.bidirected(natural_name[e.a], natural_name[e.b]);
    for (int t : intervened)
        for (Vertex s : p.state(t)) b.directed(causal_name[s], causal_name[p.action(t)]);

    Swig out;
    out.graph_ = std::make_shared<const Admg>(b.build());
    out.intervened_ = intervened;
    const Admg& h = *out.graph_;
    out.natural_.resize(g.size());
    out.causal_.resize(g.size());
    for (Vertex v = 0; v < g.size(); ++v) {
        out.natural_[v] = h.index(natural_name[v]);
        out.causal_[v] = h.index(causal_name[v]);
    }
    for (int t : intervened) {
        Vertex a = p.action(t);
        out.minus_[t] = out.natural_[a];
        out.plus_[t] = out.causal_[a];
        out.policy_parents_[t] = out.causal(p.state(t));
    }
    return out;
}

bool swig_query(const Swig& s, const SeparationQuery& q) { return m_connected(s.graph(), q); }

bool swig_query(const Swig& s, const std::vector<std::string>& left,
                const std::vector<std::string>& right, const std::vector<std::string>& given) {
    const Admg& g = s.graph();
    return swig_query(s, SeparationQuery{g.indices(left), g.indices(right), g.indices(given)});
}

std::string to_dot(const Admg& g) {
    std::string out = "digraph G {\n";
    for (Vertex v = 0; v < g.size(); ++v)
        out += "  \"" + g.name(v) + "\"" + (g.is_latent(v) ? " [style=dashed]" : "") + ";\n";
    for (const auto& e : g.directed_edges())
        out += "  \"" + g.name(e.tail) + "\" -> \"" + g.name(e.head) + "\";\n";
    for (const auto& e : g.bidirected_edges())
        out += "  \"" + g.name(e.a) + "\" -> \"" + g.name(e.b) +
               "\" [dir=both, style=dashed, constraint=false];\n";
    out += "}\n";
    return out;
}

}  // namespace cpid
