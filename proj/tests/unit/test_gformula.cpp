#include <gtest/gtest.h>

#include <cmath>

#include "cpid/errors.hpp"
#include "cpid/gformula.hpp"
#include "cpid/npsem.hpp"
#include "gformula_oracle.hpp"
#include "processes.hpp"

using namespace cpid;
using cpid::testing::load_fixture_process;
using cpid::testing::load_sem;

namespace {

struct Instance {
    Npsem sem;
    DecisionProcess p;
    TabularDistribution P;
};

Instance instance(const std::string& name) {
    Npsem sem = load_sem(name);
    DecisionProcess p = load_fixture_process(name, name);
    TabularDistribution P = npsem_exact(sem);
    return {std::move(sem), std::move(p), std::move(P)};
}

// Stochastic rule favouring the action that matches the parity of the state.
DecisionRule parity_rule(const TabularDistribution& P, const DecisionProcess& p, int t) {
    DecisionRule r = observed_rule(P, p, t);
    const std::size_t na = P.variables()[P.index(r.action)].values.size();
    for (std::size_t s = 0; s * na < r.probs.size(); ++s)
        for (std::size_t a = 0; a < na; ++a)
            r.probs[s * na + a] = (a == (s + t) % na ? 0.7 : 0.3 / static_cast<double>(na - 1));
    return r;
}

Policy parity_policy(const Instance& in) {
    Policy g = null_policy(in.p.horizon());
    for (int t = 1; t <= in.p.horizon(); ++t) g.rules[t - 1] = parity_rule(in.P, in.p, t);
    return g;
}

TabularDistribution truth(const Instance& in, const Policy& g) {
    return npsem_exact(in.sem, &in.p, &g).marginal(joint_variables(in.p));
}

const char* kSems[] = {"sem_confounded", "sem_pricing", "sem_markov"};

}  // namespace

TEST(GFormula, NullPolicyIsTheObservedMarginal) {
    for (const char* name : kSems) {
        Instance in = instance(name);
        TabularDistribution q = identify_joint(in.P, in.p, null_policy(in.p.horizon()));
        EXPECT_LT(q.max_abs_diff(in.P.marginal(joint_variables(in.p))), 1e-12) << name;
    }
}

TEST(GFormula, MatchesInterventionalLawExactly) {
    for (const char* name : kSems) {
        Instance in = instance(name);
        Policy g = parity_policy(in);
        TabularDistribution q = identify_joint(in.P, in.p, g);
        EXPECT_LT(q.max_abs_diff(truth(in, g)), 1e-12) << name;
    }
}

TEST(GFormula, DeterministicPolicy) {
    Instance in = instance("sem_pricing");
    Policy g = null_policy(2);
    g.rules[0] = deterministic_rule(in.P, in.p, 1, [](const std::vector<double>& s) { return s[0] ? 3.0 : 1.0; });
    g.rules[1] = deterministic_rule(in.P, in.p, 2, [](const std::vector<double>&) { return 2.0; });
    EXPECT_LT(identify_joint(in.P, in.p, g).max_abs_diff(truth(in, g)), 1e-12);
}

TEST(GFormula, RecursionEqualsProduct) {
    for (const char* name : kSems) {
        Instance in = instance(name);
        for (const Policy& g : {null_policy(in.p.horizon()), parity_policy(in)}) {
            auto a = identify_joint(in.P, in.p, g);
            auto b = identify_joint_recursive(in.P, in.p, g);
            EXPECT_LT(a.max_abs_diff(b), 1e-12) << name;
        }
    }
}

TEST(GFormula, SequentialFormMatchesOnDtrProcesses) {
    for (const char* name : {"sem_confounded", "sem_fig4a"}) {
        Instance in = instance(name);
        ASSERT_TRUE(check_dtr_shape(in.p));
        Policy g = parity_policy(in);
        auto a = identify_joint(in.P, in.p, g);
        auto b = cpid::testing::sequential_g_formula(in.P, in.p, g);
        EXPECT_LT(a.max_abs_diff(b), 1e-12) << name;
    }
}

TEST(GFormula, OracleAgrees) {
    Instance in = instance("sem_markov");
    Policy g = parity_policy(in);
    const std::size_t n = 200000;
    auto est = npsem_oracle(in.sem, in.p, g, n, 7);
    EXPECT_EQ(est.draws, n);
    EXPECT_LT(cpid::testing::max_z(identify_joint(in.P, in.p, g), est.law, n), 4.5);
}

TEST(GFormula, OracleIndependentOfThreads) {
    Instance in = instance("sem_pricing");
    Policy g = parity_policy(in);
    auto a = npsem_oracle(in.sem, in.p, g, 150000, 11, 1);
    auto b = npsem_oracle(in.sem, in.p, g, 150000, 11, 3);
    EXPECT_EQ(a.law.probs(), b.law.probs());
}

TEST(GFormula, OracleNullPolicyConverges) {
    Instance in = instance("sem_confounded");
    const std::size_t n = 100000;
    auto est = npsem_oracle(in.sem, in.p, null_policy(2), n, 3);
    EXPECT_LT(cpid::testing::max_z(in.P, est.law, n), 4.0);
}

TEST(GFormula, Fig4SemIdentifiedPair) {
    Instance in = instance("sem_fig4a");
    Policy g = parity_policy(in);
    EXPECT_LT(identify_joint(in.P, in.p, g).max_abs_diff(truth(in, g)), 1e-12);
}

TEST(GFormula, Fig4SemFirstOnlyIsRefusedAndWrong) {
    Instance in = instance("sem_fig4a");
    Policy g = null_policy(2);
    g.rules[0] = parity_rule(in.P, in.p, 1);
    EXPECT_THROW(identify_joint(in.P, in.p, g), PreconditionFailed);
    GFormulaOptions forced;
    forced.unsafe = true;
    auto q = identify_joint(in.P, in.p, g, forced);
    EXPECT_GT(q.max_abs_diff(truth(in, g)), 0.02);
}

TEST(GFormula, RefusesUnidentifiedProcess) {
    Instance in = instance("sem_markov");
    ProcessOverrides ov;
    ov.state = "1=;2=B2;3=B3";
    DecisionProcess q = load_fixture_process("sem_markov", "sem_markov", ov);
    EXPECT_THROW(identify_joint(in.P, q, parity_policy(in)), PreconditionFailed);
}

TEST(GFormula, RefusesRewardOutsideState) {
    auto g = std::make_shared<const Admg>(build_graph({"X1", "A1", "X2", "A2", "X3"},
                                                      {{"X1", "A1"}, {"A1", "X2"}, {"X2", "A2"}, {"A2", "X3"}}, {}));
    DecisionProcess p(g, {{0}, {2}, {4}}, {1, 3}, {{0}, {}}, {{}, {2}, {4}});
    std::vector<Variable> vars;
    for (const char* n : {"X1", "A1", "X2", "A2", "X3"}) vars.push_back({n, {0, 1}});
    auto P = TabularDistribution::from_weights(vars, std::vector<double>(32, 1.0));
    GFormulaOptions opt;
    opt.unsafe = true;
    EXPECT_THROW(identify_joint(P, p, null_policy(2), opt), PreconditionFailed);
}

TEST(GFormula, LazyPositivity) {
    // A never takes value 1 when X = 0.
    auto graph = std::make_shared<const Admg>(build_graph({"X", "A", "R"}, {{"X", "A"}, {"A", "R"}}, {}));
    DecisionProcess p(graph, {{0}, {2}}, {1}, {{0}}, {{}, {2}});
    std::vector<Variable> vars{{"X", {0, 1}}, {"A", {0, 1}}, {"R", {0, 1}}};
    TabularDistribution P(vars, {0.25, 0.25, 0, 0, 0.1, 0.15, 0.05, 0.2});
    Policy always_one = null_policy(1);
    always_one.rules[0] = deterministic_rule(P, p, 1, [](const std::vector<double>&) { return 1.0; });
    EXPECT_THROW(identify_joint(P, p, always_one), PositivityViolation);
    Policy match = null_policy(1);
    match.rules[0] = deterministic_rule(P, p, 1, [](const std::vector<double>& s) { return s[0]; });
    EXPECT_NO_THROW(identify_joint(P, p, match));
    GFormulaOptions strict;
    strict.strict_positivity = true;
    EXPECT_THROW(identify_joint(P, p, match, strict), PositivityViolation);
}

TEST(GFormula, ShrinkingSupportKeepsPositivity) {
    Instance in = instance("sem_pricing");
    Policy g = parity_policy(in);
    ASSERT_NO_THROW(identify_joint(in.P, in.p, g));
    for (int t = 1; t <= 2; ++t) {
        Policy h = g;
        auto& r = h.rules[t - 1];
        const std::size_t na = 3;
        for (std::size_t s = 0; s * na < r.probs.size(); ++s) {
            for (std::size_t a = 0; a < na; ++a) r.probs[s * na + a] = a == s % na ? 1.0 : 0.0;
        }
        EXPECT_NO_THROW(identify_joint(in.P, in.p, h));
    }
}

TEST(GFormula, DomainCap) {
    Instance in = instance("sem_markov");
    GFormulaOptions opt;
    opt.max_cells = 64;
    EXPECT_THROW(identify_joint(in.P, in.p, null_policy(3), opt), DomainTooLarge);
}

TEST(GFormula, OutputIsDistribution) {
    for (const char* name : kSems) {
        Instance in = instance(name);
        auto q = identify_joint(in.P, in.p, parity_policy(in));
        double tot = 0;
        for (double x : q.probs()) {
            EXPECT_GE(x, 0);
            tot += x;
        }
        EXPECT_NEAR(tot, 1, 1e-9);
    }
}

TEST(PolicyValue, Utilities) {
    Instance in = instance("sem_confounded");
    Policy g = parity_policy(in);
    EXPECT_NEAR(policy_value(in.P, in.p, g, Utility::constant(1)), 1.0, 1e-12);
    auto joint = truth(in, g);
    double r3 = joint.marginal({"R3"}).probs()[1];
    EXPECT_NEAR(policy_value(in.P, in.p, g, Utility::discounted(0.99)), std::pow(0.99, 3) * r3, 1e-12);
    EXPECT_THROW(Utility::discounted(1.0), InvalidParams);
    EXPECT_THROW(Utility::discounted(0.0), InvalidParams);
}

TEST(PolicyValue, DegenerateTrajectory) {
    auto graph = std::make_shared<const Admg>(build_graph({"X", "A", "R"}, {{"X", "A"}, {"A", "R"}}, {}));
    DecisionProcess p(graph, {{0}, {2}}, {1}, {{0}}, {{}, {2}});
    std::vector<Variable> vars{{"X", {0, 1}}, {"A", {0, 1}}, {"R", {0, 5}}};
    TabularDistribution P(vars, {0, 0, 0, 0, 0, 0, 0, 1});
    Policy g = null_policy(1);
    g.rules[0] = deterministic_rule(P, p, 1, [](const std::vector<double>&) { return 1.0; });
    Utility u = utility_from_csv("R,u\n0,0\n5,42\n", P);
    EXPECT_DOUBLE_EQ(policy_value(P, p, g, u), 42.0);
}

TEST(GFormulaIo, DistributionCsvRoundTrip) {
    Instance in = instance("sem_pricing");
    auto text = to_csv(in.P);
    auto back = distribution_from_csv(text);
    EXPECT_LT(back.max_abs_diff(in.P), 1e-15);
    EXPECT_THROW(distribution_from_csv("X,p\n0,0.5\n1,0.4\n"), InvalidDistribution);
    EXPECT_THROW(distribution_from_csv("X,p\n0,zero\n"), ParseError);
}

TEST(GFormulaIo, PolicyCsv) {
    Instance in = instance("sem_confounded");
    std::string text =
        "t,L1,A1,L2,A2,p\n"
        "1,0,0,,,0.2\n1,0,1,,,0.8\n1,1,0,,,1\n";
    Policy g = policy_from_csv(text, in.P, in.p);
    EXPECT_FALSE(g.at(1).natural);
    EXPECT_TRUE(g.at(2).natural);
    EXPECT_DOUBLE_EQ(g.at(1).probs[1], 0.8);
    EXPECT_THROW(policy_from_csv("t,L1,A1,p\n1,0,0,1\n", in.P, in.p), InvalidDistribution);
    EXPECT_THROW(policy_from_csv("t,L1,A1,p\n1,0,0,0.5\n1,1,0,1\n", in.P, in.p), InvalidDistribution);
}
