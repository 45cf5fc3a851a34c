#include "cpid/admg.hpp"

#include <algorithm>
#include <charconv>
#include <functional>
#include <queue>

#include "cpid/errors.hpp"

namespace cpid {

std::pair<std::string, std::optional<int>> split_time_suffix(std::string_view name) {
    if (name.size() >= 3 && name.back() == ']') {
        auto open = name.rfind('[');
        if (open != std::string_view::npos && open > 0) {
            auto digits = name.substr(open + 1, name.size() - open - 2);
            int t = 0;
            auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), t);
            if (ec == std::errc() && ptr == digits.data() + digits.size() && !digits.empty() &&
                t >= 0) {
                return {std::string(name.substr(0, open)), t};
            }
        }
    }
    return {std::string(name), std::nullopt};
}

Admg::Builder& Admg::Builder::vertex(std::string name, bool latent) {
    vertices_.emplace_back(std::move(name), latent);
    return *this;
}

Admg::Builder& Admg::Builder::directed(std::string tail, std::string head) {
    directed_.emplace_back(std::move(tail), std::move(head));
    return *this;
}

Admg::Builder& Admg::Builder::bidirected(std::string a, std::string b) {
    bidirected_.emplace_back(std::move(a), std::move(b));
    return *this;
}

namespace {

// Finds one directed cycle among vertices that Kahn's algorithm could not place.
std::vector<Vertex> find_cycle(const std::vector<std::vector<Vertex>>& ch,
                               const std::vector<bool>& placed) {
    const std::size_t n = ch.size();
    std::vector<int> color(n, 0);
    std::vector<Vertex> stack;
    std::vector<Vertex> cycle;
    std::function<bool(Vertex)> dfs = [&](Vertex v) {
        color[v] = 1;
        stack.push_back(v);
        for (Vertex w : ch[v]) {
            if (placed[w]) continue;
            if (color[w] == 1) {
                auto it = std::find(stack.begin(), stack.end(), w);
                cycle.assign(it, stack.end());
                cycle.push_back(w);
                return true;
            }
            if (color[w] == 0 && dfs(w)) return true;
        }
        stack.pop_back();
        color[v] = 2;
        return false;
    };
    for (Vertex v = 0; v < n; ++v)
        if (!placed[v] && color[v] == 0 && dfs(v)) break;
    return cycle;
}

}  // namespace

Admg Admg::Builder::build() const {
    Admg g;
    for (const auto& [name, latent] : vertices_) {
        if (name.empty()) throw InvalidGraph("empty vertex name");
        if (g.by_name_.count(name)) throw InvalidGraph("duplicate vertex '" + name + "'");
        auto [base, time] = split_time_suffix(name);
        (void)base;
        g.by_name_.emplace(name, g.labels_.size());
        g.labels_.push_back(VertexLabel{name, time, latent});
    }
    const std::size_t n = g.labels_.size();
    g.pa_.assign(n, {});
    g.ch_.assign(n, {});
    g.sib_.assign(n, {});

    std::set<DirectedEdge> dir;
    for (const auto& [t, h] : directed_) {
        Vertex a = g.index(t), b = g.index(h);
        if (a == b) throw SelfLoop("self-loop on '" + t + "'");
        dir.insert({a, b});
    }
    std::set<BidirectedEdge> bi;
    for (const auto& [x, y] : bidirected_) {
        Vertex a = g.index(x), b = g.index(y);
        if (a == b) throw SelfLoop("bidirected self-loop on '" + x + "'");
        bi.insert({std::min(a, b), std::max(a, b)});
    }
    g.directed_.assign(dir.begin(), dir.end());
    g.bidirected_.assign(bi.begin(), bi.end());
    for (const auto& e : g.directed_) {
        g.ch_[e.tail].push_back(e.head);
        g.pa_[e.head].push_back(e.tail);
    }
    for (const auto& e : g.bidirected_) {
        g.sib_[e.a].push_back(e.b);
        g.sib_[e.b].push_back(e.a);
    }
    for (auto* lists : {&g.pa_, &g.ch_, &g.sib_})
        for (auto& l : *lists) std::sort(l.begin(), l.end());

    // Kahn with smallest-declaration-index first.
    std::vector<std::size_t> indeg(n);
    for (Vertex v = 0; v < n; ++v) indeg[v] = g.pa_[v].size();
    std::priority_queue<Vertex, std::vector<Vertex>, std::greater<>> ready;
    for (Vertex v = 0; v < n; ++v)
        if (indeg[v] == 0) ready.push(v);
    std::vector<bool> placed(n, false);
    while (!ready.empty()) {
        Vertex v = ready.top();
        ready.pop();
        placed[v] = true;
        g.topo_.push_back(v);
        for (Vertex w : g.ch_[v])
            if (--indeg[w] == 0) ready.push(w);
    }
    if (g.topo_.size() != n) {
        std::string msg = "directed cycle:";
        for (Vertex v : find_cycle(g.ch_, placed)) msg += " " + g.labels_[v].name;
        throw CycleError(msg);
    }
    return g;
}

Vertex Admg::index(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) throw UnknownVertex("unknown vertex '" + std::string(name) + "'");
    return it->second;
}

std::optional<Vertex> Admg::find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
}

VertexSet Admg::indices(const std::vector<std::string>& names) const {
    VertexSet out;
    for (const auto& n : names) out.insert(index(n));
    return out;
}

std::vector<std::string> Admg::names(const VertexSet& s) const {
    std::vector<std::string> out;
    out.reserve(s.size());
    for (Vertex v : s) out.push_back(name(v));
    return out;
}

VertexSet Admg::all() const {
    VertexSet out;
    for (Vertex v = 0; v < size(); ++v) out.insert(out.end(), v);
    return out;
}

VertexSet Admg::observed() const {
    VertexSet out;
    for (Vertex v = 0; v < size(); ++v)
        if (!labels_[v].latent) out.insert(out.end(), v);
    return out;
}

void Admg::check_vertex(Vertex v) const {
    if (v >= size()) throw UnknownVertex("vertex index " + std::to_string(v) + " out of range");
}

bool Admg::has_directed(Vertex tail, Vertex head) const {
    const auto& c = ch_.at(tail);
    return std::binary_search(c.begin(), c.end(), head);
}

bool Admg::has_bidirected(Vertex a, Vertex b) const {
    const auto& s = sib_.at(a);
    return std::binary_search(s.begin(), s.end(), b);
}

VertexSet Admg::parents(const VertexSet& s) const {
    VertexSet out;
    for (Vertex v : s) {
        check_vertex(v);
        out.insert(pa_[v].begin(), pa_[v].end());
    }
    return out;
}

VertexSet Admg::children(const VertexSet& s) const {
    VertexSet out;
    for (Vertex v : s) {
        check_vertex(v);
        out.insert(ch_[v].begin(), ch_[v].end());
    }
    return out;
}

namespace {

VertexSet closure(const VertexSet& seed, const std::vector<std::vector<Vertex>>& next,
                  std::size_t n) {
    std::vector<bool> seen(n, false);
    std::vector<Vertex> stack(seed.begin(), seed.end());
    VertexSet out;
    for (Vertex v : seed) seen[v] = true;
    while (!stack.empty()) {
        Vertex v = stack.back();
        stack.pop_back();
        out.insert(v);
        for (Vertex w : next[v])
            if (!seen[w]) {
                seen[w] = true;
                stack.push_back(w);
            }
    }
    return out;
}

}  // namespace

VertexSet Admg::ancestors(const VertexSet& s) const {
    for (Vertex v : s) check_vertex(v);
    return closure(s, pa_, size());
}

VertexSet Admg::descendants(const VertexSet& s) const {
    for (Vertex v : s) check_vertex(v);
    return closure(s, ch_, size());
}

std::vector<VertexSet> Admg::districts() const {
    std::vector<bool> seen(size(), false);
    std::vector<VertexSet> out;
    for (Vertex v = 0; v < size(); ++v) {
        if (seen[v]) continue;
        VertexSet d = closure({v}, sib_, size());
        for (Vertex w : d) seen[w] = true;
        out.push_back(std::move(d));
    }
    return out;
}

Admg build_graph(const std::vector<std::string>& vertices,
                 const std::vector<std::pair<std::string, std::string>>& directed,
                 const std::vector<std::pair<std::string, std::string>>& bidirected,
                 const std::vector<std::string>& latent) {
    std::set<std::string> lat(latent.begin(), latent.end());
    Admg::Builder b;
    for (const auto& v : vertices) b.vertex(v, lat.count(v) > 0);
    for (const auto& l : lat)
        if (std::find(vertices.begin(), vertices.end(), l) == vertices.end())
            throw UnknownVertex("latent marker on undeclared vertex '" + l + "'");
    for (const auto& [t, h] : directed) b.directed(t, h);
    for (const auto& [x, y] : bidirected) b.bidirected(x, y);
    return b.build();
}

}  // namespace cpid
