#include "cpid/separation.hpp"

#include <algorithm>
#include <deque>
#include <functional>

#include "cpid/errors.hpp"

namespace cpid {

void validate(const Admg& g, const SeparationQuery& q) {
    for (const auto* s : {&q.left, &q.right, &q.given})
        for (Vertex v : *s) g.check_vertex(v);
    if (q.left.empty() || q.right.empty()) throw InvalidQuery("left and right sets must be non-empty");
    auto overlap = [&](const VertexSet& a, const VertexSet& b, const char* what) {
        for (Vertex v : a)
            if (b.count(v))
                throw InvalidQuery(std::string(what) + " overlap at '" + g.name(v) + "'");
    };
    overlap(q.left, q.right, "left/right");
    overlap(q.left, q.given, "left/given");
    overlap(q.right, q.given, "right/given");
}

std::string Witness::render(const Admg& g) const {
    if (vertices.empty()) return {};
    std::string out = g.name(vertices[0]);
    for (std::size_t i = 0; i < steps.size(); ++i) {
        switch (steps[i]) {
            case Step::Forward: out += " -> "; break;
            case Step::Backward: out += " <- "; break;
            case Step::Bidirected: out += " <-> "; break;
        }
        out += g.name(vertices[i + 1]);
    }
    return out;
}

namespace {

struct Incident {
    Vertex to;
    Step step;
    bool head_here;   // arrowhead at the vertex we leave from
    bool head_there;  // arrowhead at `to`
};

template <typename F>
void for_each_incident(const Admg& g, Vertex v, F&& f) {
    for (Vertex w : g.children(v)) f(Incident{w, Step::Forward, false, true});
    for (Vertex w : g.parents(v)) f(Incident{w, Step::Backward, true, false});
    for (Vertex w : g.siblings(v)) f(Incident{w, Step::Bidirected, true, true});
}

bool first_edge_ok(WalkKind kind, const Incident& e) {
    switch (kind) {
        case WalkKind::Any: return true;
        case WalkKind::Directed: return e.step == Step::Forward;
        default: return e.head_here;
    }
}

bool end_ok(WalkKind kind, bool head_at_end) {
    return (kind == WalkKind::Confounding || kind == WalkKind::ConfoundingArc) ? head_at_end : true;
}

struct Context {
    const Admg& g;
    const SeparationQuery& q;
    WalkKind kind;
    Blocking blocking;
    std::vector<bool> in_given, in_right, open_collider;

    Context(const Admg& graph, const SeparationQuery& query, WalkKind k, Blocking b)
        : g(graph), q(query), kind(k), blocking(b),
          in_given(graph.size(), false), in_right(graph.size(), false),
          open_collider(graph.size(), false) {
        for (Vertex v : q.given) in_given[v] = true;
        for (Vertex v : q.right) in_right[v] = true;
        const VertexSet open = blocking == Blocking::Walk ? q.given : g.ancestors(q.given);
        for (Vertex v : open) open_collider[v] = true;
    }

    // Can a walk arriving at v (head_in) continue along an edge with head_here?
    bool transit(Vertex v, bool head_in, bool head_out) const {
        if (head_in && head_out) {
            if (kind == WalkKind::ConfoundingArc || kind == WalkKind::Directed) return false;
            return open_collider[v];
        }
        return !in_given[v];
    }
};

// Breadth-first search over (vertex, arrived-with-arrowhead) states.
std::optional<Witness> reach(const Context& c, const VertexSet& sources,
                             const std::vector<bool>& forbidden) {
    const std::size_t n = c.g.size();
    struct Parent {
        std::size_t state;  // npos for a source
        Vertex origin;
        Step step;
    };
    constexpr std::size_t none = static_cast<std::size_t>(-1);
    std::vector<bool> seen(2 * n, false);
    std::vector<Parent> parent(2 * n, Parent{none, 0, Step::Forward});
    std::deque<std::size_t> queue;

    auto witness = [&](std::size_t state) {
        Witness w;
        std::vector<Step> steps;
        std::size_t s = state;
        while (true) {
            w.vertices.push_back(s / 2);
            steps.push_back(parent[s].step);
            if (parent[s].state == none) {
                w.vertices.push_back(parent[s].origin);
                break;
            }
            s = parent[s].state;
        }
        std::reverse(w.vertices.begin(), w.vertices.end());
        std::reverse(steps.begin(), steps.end());
        w.steps = std::move(steps);
        return w;
    };

    // Yields the state when the arrival completes a connection.
    auto arrive = [&](Vertex w, bool head, Parent from) -> std::optional<std::size_t> {
        if (forbidden[w]) return std::nullopt;
        std::size_t s = 2 * w + (head ? 1 : 0);
        if (seen[s]) return std::nullopt;
        seen[s] = true;
        parent[s] = from;
        if (c.in_right[w]) {
            if (end_ok(c.kind, head)) return s;
            return std::nullopt;  // endpoints appear once on a simple walk
        }
        queue.push_back(s);
        return std::nullopt;
    };

    for (Vertex src : sources) {
        std::optional<std::size_t> hit;
        for_each_incident(c.g, src, [&](const Incident& e) {
            if (hit || !first_edge_ok(c.kind, e)) return;
            hit = arrive(e.to, e.head_there, Parent{none, src, e.step});
        });
        if (hit) return witness(*hit);
    }
    while (!queue.empty()) {
        std::size_t s = queue.front();
        queue.pop_front();
        Vertex v = s / 2;
        bool head_in = s % 2;
        std::optional<std::size_t> hit;
        for_each_incident(c.g, v, [&](const Incident& e) {
            if (hit) return;
            if (c.kind == WalkKind::Directed && e.step != Step::Forward) return;
            if (!c.transit(v, head_in, e.head_here)) return;
            hit = arrive(e.to, e.head_there, Parent{s, 0, e.step});
        });
        if (hit) return witness(*hit);
    }
    return std::nullopt;
}

}  // namespace

std::optional<Witness> find_connection(const Admg& g, const SeparationQuery& q, WalkKind kind,
                                       Blocking blocking) {
    validate(g, q);
    std::vector<bool> forbidden(g.size(), false);
    if (kind == WalkKind::Any || kind == WalkKind::Directed || kind == WalkKind::Backdoor) {
        // Every arrival at K completes these kinds, so a multi-target search is exact.
        Context c(g, q, kind, blocking);
        if (kind != WalkKind::Backdoor) {
            // Any connecting walk has a suffix that starts at its last visit to J.
            for (Vertex v : q.left) forbidden[v] = true;
            return reach(c, q.left, forbidden);
        }
        for (Vertex src : q.left) {
            forbidden[src] = true;
            if (auto w = reach(c, {src}, forbidden)) return w;
            forbidden[src] = false;
        }
        return std::nullopt;
    }
    // Confounding kinds need an arrowhead at the far endpoint, which must not be
    // passed through earlier: search one (source, target) pair at a time.
    for (Vertex src : q.left) {
        forbidden[src] = true;
        for (Vertex dst : q.right) {
            SeparationQuery single{q.left, {dst}, q.given};
            Context c(g, single, kind, blocking);
            if (auto w = reach(c, {src}, forbidden)) return w;
        }
        forbidden[src] = false;
    }
    return std::nullopt;
}

bool exists_path(const Admg& g, const SeparationQuery& q, WalkKind kind, Blocking blocking) {
    return find_connection(g, q, kind, blocking).has_value();
}

bool m_connected(const Admg& g, const SeparationQuery& q) {
    return exists_path(g, q, WalkKind::Any, Blocking::Walk);
}

bool oracle_exists_path(const Admg& g, const SeparationQuery& q, WalkKind kind) {
    validate(g, q);
    if (g.size() > 16) throw GraphTooLarge("path enumeration limited to 16 vertices");
    const VertexSet anc = g.ancestors(q.given);
    std::vector<bool> on_path(g.size(), false);

    // Interior vertex v with arrowhead marks on its two path edges.
    auto interior_open = [&](Vertex v, bool head_in, bool head_out) {
        bool collider = head_in && head_out;
        if (collider) {
            if (kind == WalkKind::ConfoundingArc || kind == WalkKind::Directed) return false;
            return anc.count(v) > 0;
        }
        return q.given.count(v) == 0;
    };

    std::function<bool(Vertex, bool)> extend = [&](Vertex v, bool head_in) -> bool {
        bool found = false;
        for_each_incident(g, v, [&](const Incident& e) {
            if (found || on_path[e.to]) return;
            if (kind == WalkKind::Directed && e.step != Step::Forward) return;
            if (!interior_open(v, head_in, e.head_here)) return;
            if (q.right.count(e.to) && end_ok(kind, e.head_there)) {
                found = true;
                return;
            }
            on_path[e.to] = true;
            found = extend(e.to, e.head_there);
            on_path[e.to] = false;
        });
        return found;
    };

    for (Vertex src : q.left) {
        on_path[src] = true;
        bool found = false;
        for_each_incident(g, src, [&](const Incident& e) {
            if (found || !first_edge_ok(kind, e)) return;
            if (q.right.count(e.to) && end_ok(kind, e.head_there)) {
                found = true;
                return;
            }
            on_path[e.to] = true;
            found = extend(e.to, e.head_there);
            on_path[e.to] = false;
        });
        on_path[src] = false;
        if (found) return true;
    }
    return false;
}

bool oracle_m_connected(const Admg& g, const SeparationQuery& q) {
    return oracle_exists_path(g, q, WalkKind::Any);
}

std::string to_string(WalkKind k) {
    switch (k) {
        case WalkKind::Any: return "any";
        case WalkKind::Backdoor: return "backdoor";
        case WalkKind::Confounding: return "confounding";
        case WalkKind::ConfoundingArc: return "confounding-arc";
        case WalkKind::Directed: return "directed";
    }
    return "any";
}

WalkKind parse_walk_kind(const std::string& s) {
    for (auto k : {WalkKind::Any, WalkKind::Backdoor, WalkKind::Confounding,
                   WalkKind::ConfoundingArc, WalkKind::Directed})
        if (to_string(k) == s) return k;
    throw InvalidQuery("unknown walk kind '" + s + "'");
}

std::string to_string(Blocking b) { return b == Blocking::Walk ? "walk" : "ancestral"; }

Blocking parse_blocking(const std::string& s) {
    if (s == "walk") return Blocking::Walk;
    if (s == "ancestral") return Blocking::Ancestral;
    throw InvalidQuery("unknown blocking rule '" + s + "'");
}

}  // namespace cpid
