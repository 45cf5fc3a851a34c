#include "cpid/graph_io.hpp"

#include "cpid/errors.hpp"
#include "cpid/text.hpp"

namespace cpid {

namespace {

struct Line {
    int number;
    std::vector<std::string_view> tokens;
};

std::vector<Line> tokenize(std::string_view text) {
    std::vector<Line> out;
    int n = 0;
    for (auto raw : split(text, '\n')) {
        ++n;
        auto hash = raw.find('#');
        if (hash != std::string_view::npos) raw = raw.substr(0, hash);
        auto toks = split_ws(raw);
        if (!toks.empty()) out.push_back({n, std::move(toks)});
    }
    return out;
}

[[noreturn]] void fail(const Line& l, const std::string& what) {
    throw ParseError("line " + std::to_string(l.number) + ": " + what);
}

}  // namespace

Admg parse_graph_text(std::string_view text) {
    Admg::Builder b;
    for (const auto& l : tokenize(text)) {
        const auto& t = l.tokens;
        if ((t[0] == "vertex" || t[0] == "latent") && t.size() == 2) {
            b.vertex(std::string(t[1]), t[0] == "latent");
        } else if (t[0] == "edge" && t.size() == 4 && t[2] == "->") {
            b.directed(std::string(t[1]), std::string(t[3]));
        } else if (t[0] == "edge" && t.size() == 4 && t[2] == "<->") {
            b.bidirected(std::string(t[1]), std::string(t[3]));
        } else if (t[0] == "template") {
            fail(l, "template given where an explicit graph was expected");
        } else {
            fail(l, "unrecognized declaration");
        }
    }
    return b.build();
}

std::string to_text(const Admg& g) {
    std::string out;
    for (Vertex v = 0; v < g.size(); ++v)
        out += (g.is_latent(v) ? "latent " : "vertex ") + g.name(v) + "\n";
    for (const auto& e : g.directed_edges())
        out += "edge " + g.name(e.tail) + " -> " + g.name(e.head) + "\n";
    for (const auto& e : g.bidirected_edges())
        out += "edge " + g.name(e.a) + " <-> " + g.name(e.b) + "\n";
    return out;
}

Admg graph_from_json(const nlohmann::json& j) {
    try {
        Admg::Builder b;
        std::set<std::string> latent;
        if (j.contains("latent"))
            for (const auto& v : j.at("latent")) latent.insert(v.get<std::string>());
        for (const auto& v : j.at("vertices")) {
            auto name = v.get<std::string>();
            b.vertex(name, latent.erase(name) > 0);
        }
        if (!latent.empty())
            throw UnknownVertex("latent marker on undeclared vertex '" + *latent.begin() + "'");
        if (j.contains("directed"))
            for (const auto& e : j.at("directed"))
                b.directed(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        if (j.contains("bidirected"))
            for (const auto& e : j.at("bidirected"))
                b.bidirected(e.at(0).get<std::string>(), e.at(1).get<std::string>());
        return b.build();
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("graph JSON: ") + e.what());
    }
}

nlohmann::json to_json(const Admg& g) {
    nlohmann::json j;
    j["vertices"] = nlohmann::json::array();
    j["latent"] = nlohmann::json::array();
    j["directed"] = nlohmann::json::array();
    j["bidirected"] = nlohmann::json::array();
    for (Vertex v = 0; v < g.size(); ++v) {
        j["vertices"].push_back(g.name(v));
        if (g.is_latent(v)) j["latent"].push_back(g.name(v));
    }
    for (const auto& e : g.directed_edges())
        j["directed"].push_back({g.name(e.tail), g.name(e.head)});
    for (const auto& e : g.bidirected_edges())
        j["bidirected"].push_back({g.name(e.a), g.name(e.b)});
    return j;
}

RolledTemplate parse_template_text(std::string_view text) {
    auto lines = tokenize(text);
    if (lines.empty() || lines[0].tokens.size() != 1 || lines[0].tokens[0] != "template")
        throw ParseError("template file must start with 'template'");
    std::vector<TemplateVertex> period;
    std::vector<TemplateEdge> edges;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto& l = lines[i];
        const auto& t = l.tokens;
        if ((t[0] == "vertex" || t[0] == "latent" || t[0] == "action") && t.size() == 2) {
            period.push_back({std::string(t[1]), t[0] == "latent", t[0] == "action"});
        } else if (t[0] == "edge" && t.size() == 4 && (t[2] == "->" || t[2] == "<->")) {
            LagRef from = parse_lag_ref(t[1]);
            LagRef to = parse_lag_ref(t[3]);
            if (to.lag != 0) fail(l, "edge head must be at lag 0");
            edges.push_back({from.base, from.lag, to.base,
                             t[2] == "->" ? EdgeType::Directed : EdgeType::Bidirected});
        } else {
            fail(l, "unrecognized template declaration");
        }
    }
    return RolledTemplate(std::move(period), std::move(edges));
}

std::string to_text(const RolledTemplate& t) {
    std::string out = "template\n";
    for (const auto& v : t.period())
        out += std::string(v.action ? "action " : v.latent ? "latent " : "vertex ") + v.base + "\n";
    for (const auto& e : t.edges())
        out += "edge " + to_string(LagRef{e.from, e.lag}) +
               (e.type == EdgeType::Directed ? " -> " : " <-> ") + e.to + "\n";
    return out;
}

GraphSource parse_graph_source(std::string_view text) {
    auto body = trim(text);
    if (!body.empty() && body.front() == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(body);
        } catch (const nlohmann::json::exception& e) {
            throw ParseError(std::string("graph JSON: ") + e.what());
        }
        return graph_from_json(j);
    }
    auto lines = tokenize(text);
    if (!lines.empty() && lines[0].tokens[0] == "template") return parse_template_text(text);
    return parse_graph_text(text);
}

GraphSource load_graph_source(const std::string& path) {
    return parse_graph_source(read_file(path));
}

}  // namespace cpid
