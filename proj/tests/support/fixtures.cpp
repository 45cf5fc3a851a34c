#include "fixtures.hpp"

#include "cpid/graph_io.hpp"
#include "cpid/text.hpp"

namespace cpid::testing {

std::string fixture_path(const std::string& relative) {
    return std::string(CPID_FIXTURE_DIR) + "/" + relative;
}

Admg load_graph(const std::string& name) {
    return parse_graph_text(read_file(fixture_path("graphs/" + name + ".graph")));
}

RolledTemplate load_template(const std::string& name) {
    return parse_template_text(read_file(fixture_path("graphs/" + name + ".graph")));
}

}  // namespace cpid::testing

#include "cpid/identify.hpp"
#include "processes.hpp"

namespace cpid::testing {

DecisionProcess fig6_projected_process() {
    DecisionProcess p = load_fixture_process("fig6a", "fig6a");
    const Admg& g = p.graph();
    const int T = p.horizon();
    auto v = [&](const std::string& base, int t) { return g.index(base + "[" + std::to_string(t) + "]"); };
    auto tag = [](const char* n, int t) { return n + std::to_string(t); };
    std::vector<Construct> cs;
    for (int t = 1; t <= T + 1; ++t) {
        if (t > 1) cs.push_back({tag("R", t), {v("R", t)}, false});
        VertexSet s{v("L", t)};
        if (t > 1) s.insert(v("A", t - 1));
        cs.push_back({tag("S", t), s, false});
        cs.push_back({tag("U", t), {v("U", t)}, true});
        if (t <= T) cs.push_back({tag("A", t), {v("A", t)}, false});
    }
    auto h = std::make_shared<const Admg>(construct_projection(g, cs));
    std::vector<VertexSet> x, states, rewards;
    std::vector<Vertex> acts;
    for (int t = 1; t <= T + 1; ++t) {
        VertexSet blk{h->index(tag("S", t)), h->index(tag("U", t))};
        VertexSet rew;
        if (t > 1) {
            blk.insert(h->index(tag("R", t)));
            rew.insert(h->index(tag("R", t)));
        }
        x.push_back(blk);
        rewards.push_back(rew);
        if (t <= T) {
            acts.push_back(h->index(tag("A", t)));
            states.push_back({h->index(tag("S", t))});
        }
    }
    return DecisionProcess(h, x, acts, states, rewards);
}

DecisionProcess load_fixture_process(const std::string& graph, const std::string& process,
                                     const ProcessOverrides& ov) {
    return load_process_files(fixture_path("graphs/" + graph + ".graph"),
                              fixture_path("process/" + process + ".json"), ov)
        .process;
}

}  // namespace cpid::testing
