#ifndef CPID_ADMG_HPP_
#define CPID_ADMG_HPP_

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace cpid {

using Vertex = std::size_t;
using VertexSet = std::set<Vertex>;

enum class EdgeType { Directed, Bidirected };

struct DirectedEdge {
    Vertex tail;
    Vertex head;
    bool operator==(const DirectedEdge&) const = default;
    auto operator<=>(const DirectedEdge&) const = default;
};

// Stored with a < b.
struct BidirectedEdge {
    Vertex a;
    Vertex b;
    bool operator==(const BidirectedEdge&) const = default;
    auto operator<=>(const BidirectedEdge&) const = default;
};

// Label of a vertex. `time` is parsed from a trailing "[t]" when present.
struct VertexLabel {
    std::string name;
    std::optional<int> time;
    bool latent = false;
};

// Splits "B1[3]" into ("B1", 3). Names without a bracket suffix yield nullopt.
std::pair<std::string, std::optional<int>> split_time_suffix(std::string_view name);

// Immutable acyclic directed mixed graph. Vertices are indexed in declaration
// order; all relation queries are const and thread-safe.
class Admg {
public:
    class Builder {
    public:
        Builder& vertex(std::string name, bool latent = false);
        Builder& directed(std::string tail, std::string head);
        Builder& bidirected(std::string a, std::string b);
        Admg build() const;

    private:
        std::vector<std::pair<std::string, bool>> vertices_;
        std::vector<std::pair<std::string, std::string>> directed_;
        std::vector<std::pair<std::string, std::string>> bidirected_;
    };

    Admg() = default;

    std::size_t size() const { return labels_.size(); }
    const std::string& name(Vertex v) const { return labels_.at(v).name; }
    const VertexLabel& label(Vertex v) const { return labels_.at(v); }
    bool is_latent(Vertex v) const { return labels_.at(v).latent; }

    Vertex index(std::string_view name) const;  // throws UnknownVertex
    std::optional<Vertex> find(std::string_view name) const;
    VertexSet indices(const std::vector<std::string>& names) const;
    std::vector<std::string> names(const VertexSet& s) const;
    VertexSet all() const;
    VertexSet observed() const;

    const std::vector<Vertex>& parents(Vertex v) const { return pa_.at(v); }
    const std::vector<Vertex>& children(Vertex v) const { return ch_.at(v); }
    const std::vector<Vertex>& siblings(Vertex v) const { return sib_.at(v); }
    bool has_directed(Vertex tail, Vertex head) const;
    bool has_bidirected(Vertex a, Vertex b) const;

    VertexSet parents(const VertexSet& s) const;
    VertexSet children(const VertexSet& s) const;
    VertexSet ancestors(const VertexSet& s) const;
    VertexSet descendants(const VertexSet& s) const;
    std::vector<VertexSet> districts() const;
    const std::vector<Vertex>& topological_order() const { return topo_; }

    const std::vector<DirectedEdge>& directed_edges() const { return directed_; }
    const std::vector<BidirectedEdge>& bidirected_edges() const { return bidirected_; }

    void check_vertex(Vertex v) const;

private:
    std::vector<VertexLabel> labels_;
    std::unordered_map<std::string, Vertex> by_name_;
    std::vector<std::vector<Vertex>> pa_, ch_, sib_;
    std::vector<DirectedEdge> directed_;      // sorted
    std::vector<BidirectedEdge> bidirected_;  // sorted
    std::vector<Vertex> topo_;
};

// Convenience constructor mirroring the textual edge-list form.
Admg build_graph(const std::vector<std::string>& vertices,
                 const std::vector<std::pair<std::string, std::string>>& directed,
                 const std::vector<std::pair<std::string, std::string>>& bidirected,
                 const std::vector<std::string>& latent = {});

}  // namespace cpid

#endif  // CPID_ADMG_HPP_
