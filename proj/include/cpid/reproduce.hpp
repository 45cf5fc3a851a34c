#ifndef CPID_REPRODUCE_HPP_
#define CPID_REPRODUCE_HPP_

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cpid/policy_learn.hpp"

namespace cpid {

// One pricing scenario file: parameters plus the state sets to learn with.
struct PricingScenario {
    std::string name, graph;
    std::optional<double> degree;
    PricingParams params;
    std::string baseline_state;                  // A1@1,Dhat@1,B1,Dhat
    std::optional<std::string> identified_state;  // only where one exists
};

PricingScenario load_pricing_scenario(const std::string& path);

// Latent vertices of the pricing environment: demand and competitor prices.
std::vector<std::string> pricing_latent();
LearnSetup pricing_setup(const std::string& state);

struct Table1Options {
    std::string fixture_dir;  // holds pricing/<name>.json
    std::vector<std::string> scenarios = {"basic",   "trend_0.1",    "trend_0.5",    "trend_0.9",   "retro_1",
                                          "retro_2", "retro_4",      "competitor_1", "competitor_3", "competitor_5"};
    int episodes = 2000, horizon = 100;            // training data
    int eval_episodes = 2000, eval_horizon = 100;  // paired evaluation
    std::uint64_t seed = 20240601;
    int threads = 1;
    PiOptions pi;
};

struct PolicyResult {
    std::string state;
    double mean = 0, sd = 0, regret = 0, regret_lo = 0, regret_hi = 0;
    std::uint64_t unvisited_queries = 0;
};

struct Table1Row {
    std::string name, graph;
    std::optional<double> degree;
    double null_mean = 0, null_sd = 0;
    PolicyResult baseline;
    std::optional<PolicyResult> identified;
};

struct Claim {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct Table1Report {
    std::vector<Table1Row> rows;
    std::vector<Claim> claims;
    bool all_pass() const;
    const Table1Row* find(const std::string& name) const;
    nlohmann::json to_json() const;
    std::string to_text() const;
};

Table1Row run_scenario(const PricingScenario& sc, const Table1Options& opt);
// Claims are evaluated on whichever of the needed rows are present.
std::vector<Claim> table1_claims(const std::vector<Table1Row>& rows);
Table1Report reproduce_table1(const Table1Options& opt);

}  // namespace cpid

#endif  // CPID_REPRODUCE_HPP_
