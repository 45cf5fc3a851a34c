#ifndef CPID_SEPARATION_HPP_
#define CPID_SEPARATION_HPP_

#include <optional>
#include <string>
#include <vector>

#include "cpid/admg.hpp"

namespace cpid {

struct SeparationQuery {
    VertexSet left;   // J
    VertexSet right;  // K
    VertexSet given;  // L
};

// Throws InvalidQuery when J, K, L overlap or J/K is empty; UnknownVertex on bad ids.
void validate(const Admg& g, const SeparationQuery& q);

enum class WalkKind {
    Any,
    Backdoor,        // first edge has an arrowhead at the left endpoint
    Confounding,     // arrowheads at both endpoints, colliders allowed
    ConfoundingArc,  // arrowheads at both endpoints, no colliders
    Directed,        // left -> ... -> right
};

enum class Blocking {
    Walk,       // collider open iff in L
    Ancestral,  // collider open iff in an(L)
};

// How consecutive walk vertices are joined, read left to right.
enum class Step { Forward, Backward, Bidirected };  // a -> b, a <- b, a <-> b

struct Witness {
    std::vector<Vertex> vertices;
    std::vector<Step> steps;  // steps.size() == vertices.size() - 1
    std::string render(const Admg& g) const;
};

// Walk blocking, any walk: the m-connection relation.
bool m_connected(const Admg& g, const SeparationQuery& q);
inline bool m_separated(const Admg& g, const SeparationQuery& q) { return !m_connected(g, q); }

// Reachability-based search for an unblocked walk of the given kind that never
// returns to its starting vertex. With walk blocking this decides the walk
// criterion; with ancestral blocking it agrees with path enumeration.
bool exists_path(const Admg& g, const SeparationQuery& q, WalkKind kind,
                 Blocking blocking = Blocking::Ancestral);
std::optional<Witness> find_connection(const Admg& g, const SeparationQuery& q, WalkKind kind,
                                       Blocking blocking = Blocking::Ancestral);

// Exhaustive simple-path enumeration with ancestral blocking. |V| <= 16.
bool oracle_m_connected(const Admg& g, const SeparationQuery& q);
bool oracle_exists_path(const Admg& g, const SeparationQuery& q, WalkKind kind);

std::string to_string(WalkKind k);
WalkKind parse_walk_kind(const std::string& s);
std::string to_string(Blocking b);
Blocking parse_blocking(const std::string& s);

}  // namespace cpid

#endif  // CPID_SEPARATION_HPP_
