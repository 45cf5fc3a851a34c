#include "cpid/process_io.hpp"

#include "cpid/errors.hpp"
#include "cpid/text.hpp"

namespace cpid {

namespace {

std::vector<std::string> strings(const nlohmann::json& j) {
    std::vector<std::string> out;
    for (const auto& v : j) out.push_back(v.get<std::string>());
    return out;
}

int time_key(const std::string& key) {
    try {
        std::size_t used = 0;
        int t = std::stoi(key, &used);
        if (used == key.size()) return t;
    } catch (const std::exception&) {
    }
    throw ParseError("time key '" + key + "' is not an integer");
}

std::map<int, std::vector<std::string>> parse_explicit_states(std::string_view text) {
    std::map<int, std::vector<std::string>> out;
    for (auto part : split(text, ';')) {
        part = trim(part);
        if (part.empty()) continue;
        auto eq = part.find('=');
        if (eq == std::string_view::npos)
            throw ParseError("explicit state override needs 't=V,...' entries");
        std::vector<std::string> names;
        for (auto n : split(part.substr(eq + 1), ','))
            if (!trim(n).empty()) names.emplace_back(trim(n));
        out[time_key(std::string(trim(part.substr(0, eq))))] = names;
    }
    return out;
}

}  // namespace

DecisionProcess process_from_json(std::shared_ptr<const Admg> g, const nlohmann::json& j) {
    try {
        std::vector<VertexSet> x;
        std::vector<Vertex> actions;
        bool expect_x = true;
        for (const auto& b : j.at("blocks")) {
            if (expect_x) {
                if (!b.is_array()) throw ParseError("blocks must alternate [X...] and \"A\"");
                x.push_back(g->indices(strings(b)));
            } else {
                if (!b.is_string()) throw ParseError("blocks must alternate [X...] and \"A\"");
                actions.push_back(g->index(b.get<std::string>()));
            }
            expect_x = !expect_x;
        }
        if (expect_x) throw ParseError("blocks must end with an X-block");
        const std::size_t T = actions.size();
        std::vector<VertexSet> states(T), rewards(T + 1);
        if (j.contains("states"))
            for (const auto& [key, val] : j.at("states").items()) {
                int t = time_key(key);
                if (t < 1 || t > static_cast<int>(T)) throw InvalidProcess("state time " + key);
                states[t - 1] = g->indices(strings(val));
            }
        if (j.contains("rewards"))
            for (const auto& [key, val] : j.at("rewards").items()) {
                int t = time_key(key);
                if (t < 1 || t > static_cast<int>(T) + 1) throw InvalidProcess("reward time " + key);
                rewards[t - 1] = g->indices(strings(val));
            }
        return DecisionProcess(std::move(g), std::move(x), std::move(actions), std::move(states),
                               std::move(rewards));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("process JSON: ") + e.what());
    }
}

TemplateAnnotation annotation_from_json(const nlohmann::json& j) {
    try {
        TemplateAnnotation a;
        a.horizon = j.value("horizon", 3);
        if (j.contains("states"))
            for (const auto& [key, val] : j.at("states").items()) {
                std::vector<LagRef> refs;
                for (const auto& s : val) refs.push_back(parse_lag_ref(s.get<std::string>()));
                a.states[key] = refs;
            }
        if (j.contains("rewards")) a.rewards = strings(j.at("rewards"));
        return a;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("process JSON: ") + e.what());
    }
}

LoadedProcess load_process(const GraphSource& src, const nlohmann::json& j,
                           const ProcessOverrides& ov) {
    if (const auto* tmpl = std::get_if<RolledTemplate>(&src)) {
        TemplateAnnotation ann = annotation_from_json(j);
        if (ov.horizon) ann.horizon = *ov.horizon;
        if (ov.state) {
            const std::string& s = *ov.state;
            if (s.find('=') == std::string::npos) {
                auto refs = parse_lag_list(s);
                ann.states.clear();
                for (const auto& a : tmpl->actions()) ann.states[a] = refs;
            } else {
                for (auto part : split(s, ';')) {
                    part = trim(part);
                    if (part.empty()) continue;
                    auto eq = part.find('=');
                    if (eq == std::string_view::npos)
                        throw ParseError("state override entries look like 'A=X@1,Y'");
                    ann.states[std::string(trim(part.substr(0, eq)))] =
                        parse_lag_list(part.substr(eq + 1));
                }
            }
        }
        DecisionProcess p = unroll_process(*tmpl, ann);
        return {src, ann, std::move(p)};
    }
    const Admg& g = std::get<Admg>(src);
    if (ov.horizon) throw InvalidProcess("--horizon only applies to template graphs");
    auto shared = std::make_shared<const Admg>(g);
    DecisionProcess p = process_from_json(shared, j);
    if (ov.state) {
        std::vector<VertexSet> states(p.horizon());
        for (const auto& [t, names] : parse_explicit_states(*ov.state)) {
            if (t < 1 || t > p.horizon()) throw InvalidProcess("state time " + std::to_string(t));
            states[t - 1] = g.indices(names);
        }
        p = p.with_states(std::move(states));
    }
    return {src, std::nullopt, std::move(p)};
}

LoadedProcess load_process_files(const std::string& graph_path, const std::string& process_path,
                                 const ProcessOverrides& ov) {
    GraphSource src = load_graph_source(graph_path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_file(process_path));
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(process_path + ": " + e.what());
    }
    return load_process(src, j, ov);
}

nlohmann::json to_json(const DecisionProcess& p) {
    const Admg& g = p.graph();
    nlohmann::json blocks = nlohmann::json::array();
    nlohmann::json states = nlohmann::json::object();
    nlohmann::json rewards = nlohmann::json::object();
    for (int t = 1; t <= p.horizon() + 1; ++t) {
        blocks.push_back(g.names(p.x(t)));
        if (t <= p.horizon()) {
            blocks.push_back(g.name(p.action(t)));
            states[std::to_string(t)] = g.names(p.state(t));
        }
        if (!p.reward(t).empty()) rewards[std::to_string(t)] = g.names(p.reward(t));
    }
    return {{"blocks", blocks}, {"states", states}, {"rewards", rewards}};
}

}  // namespace cpid
