#include "cpid/template.hpp"

#include <algorithm>
#include <charconv>
#include <set>

#include "cpid/errors.hpp"
#include "cpid/text.hpp"

namespace cpid {

LagRef parse_lag_ref(std::string_view text) {
    auto s = trim(text);
    if (s.empty()) throw ParseError("empty lag reference");
    auto at = s.find('@');
    if (at == std::string_view::npos) return {std::string(s), 0};
    auto base = trim(s.substr(0, at));
    auto digits = trim(s.substr(at + 1));
    int lag = -1;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), lag);
    if (base.empty() || ec != std::errc() || ptr != digits.data() + digits.size() || lag < 0)
        throw ParseError("malformed lag reference '" + std::string(s) + "'");
    return {std::string(base), lag};
}

std::vector<LagRef> parse_lag_list(std::string_view text) {
    std::vector<LagRef> out;
    for (auto part : split(text, ',')) {
        if (trim(part).empty()) continue;
        out.push_back(parse_lag_ref(part));
    }
    return out;
}

std::string to_string(const LagRef& r) {
    return r.lag == 0 ? r.base : r.base + "@" + std::to_string(r.lag);
}

RolledTemplate::RolledTemplate(std::vector<TemplateVertex> period,
                               std::vector<TemplateEdge> edges)
    : period_(std::move(period)), edges_(std::move(edges)) {
    std::set<std::string> seen;
    for (const auto& v : period_) {
        if (v.base.empty() || v.base.find_first_of("[]@,+- \t") != std::string::npos)
            throw InvalidTemplate("invalid template vertex name '" + v.base + "'");
        if (!seen.insert(v.base).second)
            throw InvalidTemplate("duplicate template vertex '" + v.base + "'");
        if (v.action && v.latent)
            throw InvalidTemplate("action '" + v.base + "' cannot be latent");
    }
    for (const auto& e : edges_) {
        if (e.lag < 0) throw InvalidTemplate("negative lag on edge into '" + e.to + "'");
        std::size_t pf = position(e.from), pt = position(e.to);
        if (e.lag == 0) {
            if (pf == pt) throw SelfLoop("self-loop on '" + e.from + "'");
            if (e.type == EdgeType::Directed && pf > pt)
                throw InvalidTemplate("lag-0 edge " + e.from + " -> " + e.to +
                                      " violates within-period order");
        }
    }
}

std::size_t RolledTemplate::position(std::string_view base) const {
    for (std::size_t i = 0; i < period_.size(); ++i)
        if (period_[i].base == base) return i;
    throw UnknownVertex("unknown template vertex '" + std::string(base) + "'");
}

bool RolledTemplate::contains(std::string_view base) const {
    return std::any_of(period_.begin(), period_.end(),
                       [&](const TemplateVertex& v) { return v.base == base; });
}

const TemplateVertex& RolledTemplate::vertex(std::string_view base) const {
    return period_[position(base)];
}

std::vector<std::string> RolledTemplate::actions() const {
    std::vector<std::string> out;
    for (const auto& v : period_)
        if (v.action) out.push_back(v.base);
    return out;
}

std::size_t RolledTemplate::final_period_size() const {
    for (std::size_t i = 0; i < period_.size(); ++i)
        if (period_[i].action) return i;
    return period_.size();
}

int RolledTemplate::max_lag() const {
    int m = 0;
    for (const auto& e : edges_) m = std::max(m, e.lag);
    return m;
}

std::string RolledTemplate::rolled_name(std::string_view base, int t) {
    return std::string(base) + "[" + std::to_string(t) + "]";
}

Admg RolledTemplate::unroll(int horizon) const {
    if (horizon < 1) throw InvalidHorizon("horizon must be >= 1, got " + std::to_string(horizon));
    const std::size_t last = final_period_size();
    auto present = [&](std::size_t pos, int t) {
        return t >= 1 && t <= horizon + 1 && (t <= horizon || pos < last);
    };
    Admg::Builder b;
    for (int t = 1; t <= horizon + 1; ++t)
        for (std::size_t i = 0; i < period_.size(); ++i)
            if (present(i, t)) b.vertex(rolled_name(period_[i].base, t), period_[i].latent);
    for (int t = 1; t <= horizon + 1; ++t) {
        for (const auto& e : edges_) {
            int s = t - e.lag;
            if (!present(position(e.to), t) || !present(position(e.from), s)) continue;
            if (e.type == EdgeType::Directed)
                b.directed(rolled_name(e.from, s), rolled_name(e.to, t));
            else
                b.bidirected(rolled_name(e.from, s), rolled_name(e.to, t));
        }
    }
    return b.build();
}

}  // namespace cpid
