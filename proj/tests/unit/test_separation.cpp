#include <gtest/gtest.h>

#include "cpid/errors.hpp"
#include "cpid/separation.hpp"
#include "fixtures.hpp"
#include "random_graphs.hpp"

using namespace cpid;
using cpid::testing::load_graph;
using cpid::testing::load_template;

namespace {

SeparationQuery q(const Admg& g, std::vector<std::string> j, std::vector<std::string> k,
                  std::vector<std::string> l) {
    return {g.indices(j), g.indices(k), g.indices(l)};
}

}  // namespace

TEST(Separation, Fig4aBackdoorThroughBidirected) {
    Admg g = load_graph("fig4a");
    auto query = q(g, {"R3"}, {"A1"}, {"L1"});
    ASSERT_TRUE(m_connected(g, query));
    ASSERT_TRUE(oracle_m_connected(g, query));
    // With L2 also given, only the bidirected route remains.
    auto w = find_connection(g, q(g, {"R3"}, {"A1"}, {"L1", "L2"}), WalkKind::Any, Blocking::Walk);
    ASSERT_TRUE(w.has_value());
    ASSERT_EQ(w->render(g), "R3 <- A2 <-> A1");
}

TEST(Separation, IsolatedLeftIsSeparated) {
    Admg g = build_graph({"A", "B", "C"}, {{"B", "C"}}, {});
    ASSERT_FALSE(m_connected(g, q(g, {"A"}, {"C"}, {})));
}

TEST(Separation, Fig5MemorylessnessSeparation) {
    Admg g = load_graph("fig5");
    ASSERT_FALSE(m_connected(g, q(g, {"R3"}, {"L1"}, {"A1", "L2"})));
    ASSERT_FALSE(oracle_m_connected(g, q(g, {"R3"}, {"L1"}, {"A1", "L2"})));
}

TEST(Separation, Fig5BackdoorOpen) {
    Admg g = load_graph("fig5");
    auto w = find_connection(g, q(g, {"A1"}, {"R3"}, {}), WalkKind::Backdoor, Blocking::Ancestral);
    ASSERT_TRUE(w.has_value());
    ASSERT_EQ(w->render(g), "A1 <-> R3");
}

TEST(Separation, OverlappingSetsRejected) {
    Admg g = load_graph("fig4a");
    EXPECT_THROW(exists_path(g, q(g, {"A1"}, {"A1"}, {}), WalkKind::Backdoor), InvalidQuery);
    EXPECT_THROW(m_connected(g, q(g, {"A1"}, {"R3"}, {"A1"})), InvalidQuery);
    EXPECT_THROW(m_connected(g, SeparationQuery{{}, {0}, {}}), InvalidQuery);
}

TEST(Separation, Fig2cColliderOpenedByState) {
    // t = 3: A[2] <-> C[2] <-> B1[3], C[2] conditioned on.
    Admg g = load_template("fig2c").unroll(3);
    auto query = q(g, {"A1[2]"}, {"B1[3]"}, {"A1[1]", "C[2]"});
    ASSERT_TRUE(exists_path(g, query, WalkKind::Backdoor, Blocking::Ancestral));
    ASSERT_TRUE(oracle_exists_path(g, query, WalkKind::Backdoor));
    auto without = q(g, {"A1[2]"}, {"B1[3]"}, {"A1[1]"});
    ASSERT_FALSE(exists_path(g, without, WalkKind::Backdoor, Blocking::Ancestral));
    ASSERT_FALSE(oracle_exists_path(g, without, WalkKind::Backdoor));
}

TEST(Separation, AdjacentAlwaysConnected) {
    cpid::testing::Rng rng(3);
    for (int i = 0; i < 50; ++i) {
        Admg g = cpid::testing::random_admg(rng, 6, 0.4, 0.3);
        for (const auto& e : g.directed_edges())
            ASSERT_TRUE(oracle_m_connected(g, {{e.tail}, {e.head}, {}}));
        for (const auto& e : g.bidirected_edges())
            ASSERT_TRUE(m_connected(g, {{e.a}, {e.b}, {}}));
    }
}

TEST(Separation, ExhaustiveFig4aAgreement) {
    Admg g = load_graph("fig4a");
    int checked = 0;
    for (Vertex j = 0; j < g.size(); ++j)
        for (Vertex k = 0; k < g.size(); ++k) {
            if (j == k) continue;
            VertexSet rest;
            for (Vertex v = 0; v < g.size(); ++v)
                if (v != j && v != k) rest.insert(v);
            std::vector<Vertex> r(rest.begin(), rest.end());
            for (unsigned mask = 0; mask < (1u << r.size()); ++mask) {
                VertexSet l;
                for (std::size_t i = 0; i < r.size(); ++i)
                    if (mask >> i & 1u) l.insert(r[i]);
                SeparationQuery query{{j}, {k}, l};
                ASSERT_EQ(m_connected(g, query), oracle_m_connected(g, query));
                ++checked;
            }
        }
    ASSERT_EQ(checked, 5 * 4 * 8);
}

TEST(Separation, OracleGuard) {
    cpid::testing::Rng rng(1);
    Admg g = cpid::testing::random_admg(rng, 17, 0.1, 0.1);
    EXPECT_THROW(oracle_m_connected(g, {{0}, {1}, {}}), GraphTooLarge);
}

TEST(SeparationProperty, AllKindsMatchPathEnumeration) {
    cpid::testing::Rng rng(2024);
    for (int iter = 0; iter < 400; ++iter) {
        Admg g = cpid::testing::random_admg(rng, 3 + iter % 6, 0.3, 0.3);
        for (int r = 0; r < 10; ++r) {
            auto query = cpid::testing::random_query(rng, g);
            for (auto kind : {WalkKind::Any, WalkKind::Backdoor, WalkKind::Confounding,
                              WalkKind::ConfoundingArc, WalkKind::Directed}) {
                bool oracle = oracle_exists_path(g, query, kind);
                ASSERT_EQ(exists_path(g, query, kind, Blocking::Ancestral), oracle)
                    << to_string(kind) << " ancestral";
                ASSERT_EQ(exists_path(g, query, kind, Blocking::Walk), oracle)
                    << to_string(kind) << " walk";
            }
        }
    }
}

TEST(SeparationProperty, SymmetryAndMonotonicity) {
    cpid::testing::Rng rng(99);
    for (int iter = 0; iter < 300; ++iter) {
        Admg g = cpid::testing::random_admg(rng, 7, 0.3, 0.3);
        auto query = cpid::testing::random_query(rng, g, 3);
        bool c = m_connected(g, query);
        ASSERT_EQ(c, m_connected(g, {query.right, query.left, query.given}));
        if (!c) {
            for (Vertex j : query.left)
                for (Vertex k : query.right) ASSERT_FALSE(m_connected(g, {{j}, {k}, query.given}));
        }
        // Adding a bidirected edge keeps existing connections.
        if (c) {
            Admg::Builder b;
            for (Vertex v = 0; v < g.size(); ++v) b.vertex(g.name(v));
            for (const auto& e : g.directed_edges()) b.directed(g.name(e.tail), g.name(e.head));
            for (const auto& e : g.bidirected_edges()) b.bidirected(g.name(e.a), g.name(e.b));
            b.bidirected(g.name(0), g.name(g.size() - 1));
            ASSERT_TRUE(m_connected(b.build(), query));
        }
    }
}

TEST(SeparationProperty, WitnessIsAValidWalk) {
    cpid::testing::Rng rng(5);
    for (int iter = 0; iter < 200; ++iter) {
        Admg g = cpid::testing::random_admg(rng, 7, 0.3, 0.3);
        auto query = cpid::testing::random_query(rng, g);
        auto w = find_connection(g, query, WalkKind::Any, Blocking::Walk);
        if (!w) continue;
        ASSERT_TRUE(query.left.count(w->vertices.front()));
        ASSERT_TRUE(query.right.count(w->vertices.back()));
        for (std::size_t i = 0; i < w->steps.size(); ++i) {
            Vertex a = w->vertices[i], b = w->vertices[i + 1];
            switch (w->steps[i]) {
                case Step::Forward: ASSERT_TRUE(g.has_directed(a, b)); break;
                case Step::Backward: ASSERT_TRUE(g.has_directed(b, a)); break;
                case Step::Bidirected: ASSERT_TRUE(g.has_bidirected(a, b)); break;
            }
        }
    }
}
