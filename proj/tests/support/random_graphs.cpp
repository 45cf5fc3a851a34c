#include "random_graphs.hpp"

#include <algorithm>
#include <memory>

namespace cpid::testing {

namespace {

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

}  // namespace

Admg random_admg(Rng& rng, int n, double p_directed, double p_bidirected) {
    Admg::Builder b;
    for (int i = 0; i < n; ++i) b.vertex("V" + std::to_string(i));
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            if (coin(rng, p_directed)) b.directed("V" + std::to_string(i), "V" + std::to_string(j));
            if (coin(rng, p_bidirected))
                b.bidirected("V" + std::to_string(i), "V" + std::to_string(j));
        }
    return b.build();
}

SeparationQuery random_query(Rng& rng, const Admg& g, int max_size) {
    std::vector<Vertex> order(g.size());
    for (Vertex v = 0; v < g.size(); ++v) order[v] = v;
    std::shuffle(order.begin(), order.end(), rng);
    const int n = static_cast<int>(g.size());
    int j = uniform_int(rng, 1, std::min(max_size, n - 1));
    int k = uniform_int(rng, 1, std::min(max_size, n - j));
    int l = uniform_int(rng, 0, n - j - k);
    SeparationQuery q;
    int i = 0;
    for (; i < j; ++i) q.left.insert(order[i]);
    for (; i < j + k; ++i) q.right.insert(order[i]);
    for (; i < j + k + l; ++i) q.given.insert(order[i]);
    return q;
}

DecisionProcess random_process(Rng& rng, const ProcessOptions& opt) {
    const int T = uniform_int(rng, opt.min_horizon, opt.max_horizon);
    struct Node {
        std::string name;
        int time;
        bool action;
        bool latent;
    };
    std::vector<Node> nodes;
    std::vector<std::vector<int>> xblocks(T + 1);
    std::vector<int> actions(T);
    for (int t = 1; t <= T + 1; ++t) {
        int size = uniform_int(rng, t == T + 1 ? 1 : 0, opt.max_block);
        for (int i = 0; i < size; ++i) {
            bool latent = !opt.dtr && coin(rng, opt.p_latent);
            xblocks[t - 1].push_back(static_cast<int>(nodes.size()));
            nodes.push_back({"X" + std::to_string(t) + "_" + std::to_string(i), t, false, latent});
        }
        if (t <= T) {
            actions[t - 1] = static_cast<int>(nodes.size());
            nodes.push_back({"A" + std::to_string(t), t, true, false});
        }
    }
    Admg::Builder b;
    for (const auto& n : nodes) b.vertex(n.name, n.latent);
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            if (coin(rng, opt.p_directed)) b.directed(nodes[i].name, nodes[j].name);
            if (coin(rng, opt.p_bidirected)) b.bidirected(nodes[i].name, nodes[j].name);
        }
    auto g = std::make_shared<const Admg>(b.build());
    std::vector<VertexSet> x(T + 1);
    std::vector<Vertex> a(T);
    for (int t = 0; t <= T; ++t)
        for (int id : xblocks[t]) x[t].insert(static_cast<Vertex>(id));
    for (int t = 0; t < T; ++t) a[t] = static_cast<Vertex>(actions[t]);

    std::vector<VertexSet> rewards(T + 1);
    for (int t = 1; t <= T + 1; ++t) {
        if (opt.dtr || !opt.intermediate_rewards) {
            if (t <= T) continue;
        }
        for (Vertex v : x[t - 1])
            if (!g->is_latent(v) && coin(rng, 0.5)) rewards[t - 1].insert(v);
        if (t == T + 1 && rewards[t - 1].empty())
            for (Vertex v : x[t - 1])
                if (!g->is_latent(v)) {
                    rewards[t - 1].insert(v);
                    break;
                }
    }

    std::vector<VertexSet> states(T);
    for (int t = 1; t <= T; ++t) {
        VertexSet pool;
        if (opt.dtr) {
            for (int s = 1; s <= t; ++s) {
                pool.insert(x[s - 1].begin(), x[s - 1].end());
                if (s < t) pool.insert(a[s - 1]);
            }
            states[t - 1] = pool;
            continue;
        }
        if (opt.nested && t > 1) {
            pool = states[t - 2];
            if (opt.allow_prev_action) pool.insert(a[t - 2]);
            pool.insert(x[t - 1].begin(), x[t - 1].end());
        } else {
            for (int s = 1; s <= t; ++s) {
                pool.insert(x[s - 1].begin(), x[s - 1].end());
                if (s < t && (opt.allow_prev_action || s < t - 1)) pool.insert(a[s - 1]);
            }
        }
        for (Vertex v : pool)
            if (!g->is_latent(v) && coin(rng, opt.p_state)) states[t - 1].insert(v);
    }
    return DecisionProcess(g, std::move(x), std::move(a), std::move(states), std::move(rewards));
}

}  // namespace cpid::testing
