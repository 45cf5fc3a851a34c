#ifndef CPID_TEMPLATE_HPP_
#define CPID_TEMPLATE_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "cpid/admg.hpp"

namespace cpid {

// "B1@2" -> {B1, 2}; "B1" -> {B1, 0}.
struct LagRef {
    std::string base;
    int lag = 0;
    bool operator==(const LagRef&) const = default;
    auto operator<=>(const LagRef&) const = default;
};

LagRef parse_lag_ref(std::string_view text);
std::vector<LagRef> parse_lag_list(std::string_view text);  // comma separated
std::string to_string(const LagRef& r);

struct TemplateVertex {
    std::string base;
    bool latent = false;
    bool action = false;
};

// Edge from `from` at period t-lag into `to` at period t.
struct TemplateEdge {
    std::string from;
    int lag = 0;
    std::string to;
    EdgeType type = EdgeType::Directed;
};

// One repeating period of a time-homogeneous graph. Vertex order inside the
// period is the within-period causal order; action vertices split the period
// into segments.
class RolledTemplate {
public:
    RolledTemplate() = default;
    RolledTemplate(std::vector<TemplateVertex> period, std::vector<TemplateEdge> edges);

    // T full periods plus the pre-action segment of period T+1.
    Admg unroll(int horizon) const;

    const std::vector<TemplateVertex>& period() const { return period_; }
    const std::vector<TemplateEdge>& edges() const { return edges_; }
    std::size_t position(std::string_view base) const;  // throws UnknownVertex
    bool contains(std::string_view base) const;
    const TemplateVertex& vertex(std::string_view base) const;
    std::vector<std::string> actions() const;
    // Number of leading vertices present in the final (T+1) period.
    std::size_t final_period_size() const;
    int max_lag() const;

    static std::string rolled_name(std::string_view base, int t);

private:
    std::vector<TemplateVertex> period_;
    std::vector<TemplateEdge> edges_;
};

}  // namespace cpid

#endif  // CPID_TEMPLATE_HPP_
