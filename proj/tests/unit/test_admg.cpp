#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "cpid/admg.hpp"
#include "cpid/errors.hpp"
#include "cpid/graph_io.hpp"
#include "fixtures.hpp"
#include "random_graphs.hpp"

using namespace cpid;
using cpid::testing::load_graph;
using cpid::testing::load_template;

namespace {

std::vector<std::string> names(const Admg& g, const VertexSet& s) { return g.names(s); }

std::vector<std::string> order_names(const Admg& g) {
    std::vector<std::string> out;
    for (Vertex v : g.topological_order()) out.push_back(g.name(v));
    return out;
}

bool edges_forward(const Admg& g) {
    std::vector<std::size_t> pos(g.size());
    const auto& order = g.topological_order();
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (const auto& e : g.directed_edges())
        if (pos[e.tail] >= pos[e.head]) return false;
    return true;
}

}  // namespace

TEST(Admg, Fig4aBuilds) {
    Admg g = load_graph("fig4a");
    ASSERT_EQ(g.size(), 5u);
    ASSERT_EQ(g.directed_edges().size(), 6u);
    ASSERT_EQ(g.bidirected_edges().size(), 1u);
}

TEST(Admg, SingleVertex) {
    Admg g = build_graph({"V1"}, {}, {});
    ASSERT_EQ(g.size(), 1u);
    ASSERT_EQ(order_names(g), std::vector<std::string>{"V1"});
}

TEST(Admg, TwoCycleRejected) {
    EXPECT_THROW(build_graph({"A", "B"}, {{"A", "B"}, {"B", "A"}}, {}), CycleError);
}

TEST(Admg, UnknownVertexAndSelfLoop) {
    EXPECT_THROW(build_graph({"A"}, {{"A", "B"}}, {}), UnknownVertex);
    EXPECT_THROW(build_graph({"A"}, {{"A", "A"}}, {}), SelfLoop);
    EXPECT_THROW(build_graph({"A"}, {}, {{"A", "A"}}), SelfLoop);
    EXPECT_THROW(build_graph({"A", "A"}, {}, {}), InvalidGraph);
}

TEST(Admg, AncestorsOfR3) {
    Admg g = load_graph("fig4a");
    auto an = g.ancestors({g.index("R3")});
    std::vector<std::string> expect{"L1", "A1", "L2", "A2", "R3"};
    ASSERT_EQ(names(g, an), expect);
    ASSERT_TRUE(g.ancestors({}).empty());
}

TEST(Admg, ParentsIgnoreBidirected) {
    Admg g = load_graph("fig4a");
    ASSERT_EQ(names(g, g.parents(VertexSet{g.index("A2")})), std::vector<std::string>{"L2"});
    ASSERT_EQ(names(g, g.children(VertexSet{g.index("A1")})), std::vector<std::string>{"L2"});
    ASSERT_EQ(names(g, g.descendants({g.index("L2")})),
              (std::vector<std::string>{"L2", "A2", "R3"}));
}

TEST(Admg, DistrictsFig4a) {
    Admg g = load_graph("fig4a");
    auto d = g.districts();
    ASSERT_EQ(d.size(), 4u);
    std::vector<std::vector<std::string>> got;
    for (const auto& s : d) got.push_back(names(g, s));
    std::sort(got.begin(), got.end());
    std::vector<std::vector<std::string>> expect{{"A1", "A2"}, {"L1"}, {"L2"}, {"R3"}};
    ASSERT_EQ(got, expect);
}

TEST(Admg, DistrictsChainOfBidirected) {
    Admg g = build_graph({"C", "A", "B"}, {}, {{"C", "A"}, {"C", "B"}});
    ASSERT_EQ(g.districts().size(), 1u);
    Admg h = build_graph({"X", "Y"}, {{"X", "Y"}}, {});
    ASSERT_EQ(h.districts().size(), 2u);
}

TEST(Admg, TopologicalOrderFig4a) {
    Admg g = load_graph("fig4a");
    ASSERT_EQ(order_names(g), (std::vector<std::string>{"L1", "A1", "L2", "A2", "R3"}));
}

TEST(Admg, TopologicalOrderDeclarationTieBreak) {
    Admg g = build_graph({"C", "B", "A"}, {{"B", "A"}}, {});
    ASSERT_EQ(order_names(g), (std::vector<std::string>{"C", "B", "A"}));
    Admg h = build_graph({"C", "A", "B"}, {{"B", "A"}}, {});
    ASSERT_EQ(order_names(h), (std::vector<std::string>{"C", "B", "A"}));
}

TEST(Admg, TimeSuffix) {
    auto [base, t] = split_time_suffix("A1[3]");
    ASSERT_EQ(base, "A1");
    ASSERT_EQ(t, 3);
    ASSERT_FALSE(split_time_suffix("A1").second.has_value());
    ASSERT_FALSE(split_time_suffix("A[x]").second.has_value());
}

TEST(Template, Fig1UnrollT2) {
    Admg g = load_template("fig1").unroll(2);
    ASSERT_EQ(g.size(), 8u);
    ASSERT_TRUE(g.has_directed(g.index("A1[1]"), g.index("B1[2]")));
    ASSERT_TRUE(g.has_directed(g.index("A1[1]"), g.index("A1[2]")));
    ASSERT_TRUE(g.has_directed(g.index("B1[3]"), g.index("R[3]")));
    ASSERT_FALSE(g.find("A1[3]").has_value());
    ASSERT_EQ(g.label(g.index("B1[2]")).time, 2);
}

TEST(Template, HorizonOneIsOneBlock) {
    Admg g = load_template("fig1").unroll(1);
    ASSERT_EQ(g.size(), 5u);
    EXPECT_THROW(load_template("fig1").unroll(0), InvalidHorizon);
}

TEST(Template, Fig2bLagTwoEdge) {
    Admg g = load_template("fig2b").unroll(3);
    ASSERT_TRUE(g.has_directed(g.index("A1[1]"), g.index("B1[3]")));
    ASSERT_TRUE(g.has_directed(g.index("A1[2]"), g.index("B1[4]")));
}

TEST(Template, RejectsBackwardSamePeriodEdge) {
    EXPECT_THROW(RolledTemplate({{"X", false, false}, {"A", false, true}}, {{"A", 0, "X"}}),
                 InvalidTemplate);
    EXPECT_THROW(RolledTemplate({{"X", false, false}}, {{"X", -1, "X"}}), InvalidTemplate);
}

TEST(Template, Stationarity) {
    // unroll(T) restricted to periods 1..T-1 matches unroll(T-1) on those periods.
    for (const char* name : {"fig1", "fig2a", "fig2b", "fig2c", "fig6a", "fig7"}) {
        RolledTemplate tmpl = load_template(name);
        for (int T = 2; T <= 5; ++T) {
            Admg big = tmpl.unroll(T), small = tmpl.unroll(T - 1);
            auto in_range = [](const Admg& g, Vertex v, int last) {
                return *g.label(v).time <= last;
            };
            std::set<std::pair<std::string, std::string>> eb, es;
            for (const auto& e : big.directed_edges())
                if (in_range(big, e.head, T - 1)) eb.insert({big.name(e.tail), big.name(e.head)});
            for (const auto& e : small.directed_edges())
                if (in_range(small, e.head, T - 1)) es.insert({small.name(e.tail), small.name(e.head)});
            ASSERT_EQ(eb, es) << name << " T=" << T;
        }
    }
}

TEST(GraphIo, TextRoundTripIsByteStable) {
    Admg g = load_graph("fig4a");
    std::string text = to_text(g);
    ASSERT_EQ(to_text(parse_graph_text(text)), text);
    ASSERT_EQ(to_text(graph_from_json(to_json(g))), text);
}

TEST(GraphIo, TemplateRoundTrip) {
    RolledTemplate t = load_template("fig2c");
    std::string text = to_text(t);
    ASSERT_EQ(to_text(parse_template_text(text)), text);
}

TEST(GraphIo, ParseErrors) {
    EXPECT_THROW(parse_graph_text("vertex A\nedge A => B\n"), ParseError);
    EXPECT_THROW(parse_graph_text("vertex A\nedge A -> B\n"), UnknownVertex);
    EXPECT_THROW(parse_graph_source("{\"vertices\": 3}"), ParseError);
}

TEST(GraphIo, LatentFlag) {
    Admg g = parse_graph_text("vertex A\nlatent U\nedge U -> A\n");
    ASSERT_TRUE(g.is_latent(g.index("U")));
    ASSERT_EQ(g.observed(), VertexSet{g.index("A")});
}

TEST(AdmgProperty, RelationsOnRandomGraphs) {
    cpid::testing::Rng rng(7);
    for (int iter = 0; iter < 300; ++iter) {
        Admg g = cpid::testing::random_admg(rng, 2 + iter % 8, 0.3, 0.3);
        ASSERT_TRUE(edges_forward(g));
        VertexSet covered;
        std::size_t total = 0;
        for (const auto& d : g.districts()) {
            total += d.size();
            covered.insert(d.begin(), d.end());
        }
        ASSERT_EQ(total, g.size());
        ASSERT_EQ(covered, g.all());
        for (Vertex v = 0; v < g.size(); ++v) {
            ASSERT_TRUE(g.ancestors({v}).count(v));
            ASSERT_TRUE(g.ancestors(g.descendants({v})).count(v));
        }
    }
}

TEST(AdmgProperty, PermutedDeclarationKeepsEdgesForward) {
    cpid::testing::Rng rng(11);
    for (int iter = 0; iter < 100; ++iter) {
        Admg g = cpid::testing::random_admg(rng, 7, 0.35, 0.2);
        std::vector<std::string> vs;
        for (Vertex v = 0; v < g.size(); ++v) vs.push_back(g.name(v));
        std::shuffle(vs.begin(), vs.end(), rng);
        std::vector<std::pair<std::string, std::string>> d, b;
        for (const auto& e : g.directed_edges()) d.push_back({g.name(e.tail), g.name(e.head)});
        for (const auto& e : g.bidirected_edges()) b.push_back({g.name(e.a), g.name(e.b)});
        Admg h = build_graph(vs, d, b);
        ASSERT_TRUE(edges_forward(h));
    }
}
