#ifndef CPID_TEST_RANDOM_GRAPHS_HPP_
#define CPID_TEST_RANDOM_GRAPHS_HPP_

#include <random>

#include "cpid/admg.hpp"
#include "cpid/decision_process.hpp"
#include "cpid/separation.hpp"

namespace cpid::testing {

using Rng = std::mt19937_64;

// Vertices V0..V{n-1}; directed edges only point to higher indices.
Admg random_admg(Rng& rng, int n, double p_directed, double p_bidirected);

// Disjoint non-empty J and K, possibly empty L.
SeparationQuery random_query(Rng& rng, const Admg& g, int max_size = 2);

struct ProcessOptions {
    int min_horizon = 1;
    int max_horizon = 3;
    int max_block = 2;         // vertices per X-block
    double p_directed = 0.35;
    double p_bidirected = 0.15;
    double p_latent = 0.15;    // chance a non-decision vertex is latent
    double p_state = 0.5;      // inclusion chance per candidate state vertex
    bool nested = true;        // draw S_t ⊆ S_{t-1} ∪ A_{t-1} ∪ X_t
    bool allow_prev_action = true;
    bool dtr = false;          // full-history states, reward only at T+1
    bool intermediate_rewards = true;
};

DecisionProcess random_process(Rng& rng, const ProcessOptions& opt);

}  // namespace cpid::testing

#endif  // CPID_TEST_RANDOM_GRAPHS_HPP_
