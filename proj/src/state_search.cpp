#include "cpid/state_search.hpp"

#include <algorithm>
#include <thread>

#include "cpid/errors.hpp"
#include "cpid/identify.hpp"

namespace cpid {

bool passes_all(const DecisionProcess& p) {
    return check_nested_states(p).pass && check_memorylessness(p).pass &&
           check_dynamic_backdoor(p).pass;
}

namespace {

std::size_t binom(std::size_t n, std::size_t k) {
    if (k > n) return 0;
    long double r = 1;
    for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return static_cast<std::size_t>(r + 0.5L);
}

// All index subsets of {0..n-1} with exactly k elements, lexicographic.
std::vector<std::vector<std::size_t>> combinations(std::size_t n, std::size_t k) {
    std::vector<std::vector<std::size_t>> out;
    if (k > n) return out;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        out.push_back(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    return out;
}

bool is_subset(const std::vector<std::size_t>& small, const std::vector<std::size_t>& big) {
    return std::includes(big.begin(), big.end(), small.begin(), small.end());
}

template <typename F>
void parallel_for(std::size_t n, int threads, F&& f) {
    std::size_t workers = std::max(1, threads);
    workers = std::min<std::size_t>(workers, std::max<std::size_t>(n, 1));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) f(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            try {
                for (std::size_t i = w; i < n; i += workers) f(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    for (auto& th : pool) th.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

bool label_less(const StateProposal& a, const StateProposal& b) {
    if (a.cardinality != b.cardinality) return a.cardinality < b.cardinality;
    return a.labels < b.labels;
}

}  // namespace

StateSearchResult find_valid_states(const RolledTemplate& tmpl,
                                    const std::vector<std::string>& rewards,
                                    const StateSearchOptions& opt) {
    const auto acts = tmpl.actions();
    if (acts.empty()) throw InvalidProcess("template has no action vertex");
    if (opt.max_lag < 0 || opt.max_size < 0) throw InvalidProcess("negative search bounds");
    const std::size_t first_action = tmpl.position(acts.front());

    std::vector<LagRef> cands;
    for (std::size_t i = 0; i < tmpl.period().size(); ++i) {
        const auto& v = tmpl.period()[i];
        if (v.latent) continue;
        for (int lag = 0; lag <= opt.max_lag; ++lag) {
            if (lag == 0 && (v.action || i >= first_action)) continue;
            cands.push_back({v.base, lag});
        }
    }
    std::size_t total = 0;
    for (int k = 0; k <= opt.max_size; ++k) total += binom(cands.size(), k);
    if (total > opt.max_candidates)
        throw BudgetExceeded(std::to_string(total) + " candidate state patterns exceed the cap of " +
                             std::to_string(opt.max_candidates));

    StateSearchResult res;
    res.horizon = opt.horizon > 0 ? opt.horizon : opt.max_lag + tmpl.max_lag() + 2;
    auto process_for = [&](const std::vector<LagRef>& pattern) {
        TemplateAnnotation ann;
        ann.horizon = res.horizon;
        ann.rewards = rewards;
        for (const auto& a : acts) ann.states[a] = pattern;
        return unroll_process(tmpl, ann);
    };

    std::vector<std::vector<std::size_t>> valid;
    for (int k = 0; k <= opt.max_size && k <= static_cast<int>(cands.size()); ++k) {
        auto level = combinations(cands.size(), k);
        std::vector<char> ok(level.size(), 0);
        parallel_for(level.size(), opt.threads, [&](std::size_t i) {
            for (const auto& v : valid)
                if (is_subset(v, level[i])) return;
            std::vector<LagRef> pattern;
            for (std::size_t c : level[i]) pattern.push_back(cands[c]);
            ok[i] = passes_all(process_for(pattern));
        });
        res.candidates += level.size();
        for (std::size_t i = 0; i < level.size(); ++i)
            if (ok[i]) valid.push_back(level[i]);
    }
    for (const auto& v : valid) {
        StateProposal p;
        for (std::size_t c : v) {
            p.pattern.push_back(cands[c]);
            p.labels.push_back(to_string(cands[c]));
        }
        std::sort(p.labels.begin(), p.labels.end());
        p.cardinality = v.size();
        res.proposals.push_back(std::move(p));
    }
    std::stable_sort(res.proposals.begin(), res.proposals.end(), label_less);

    DecisionProcess base = process_for({});
    std::vector<VertexSet> full;
    for (int t = 1; t <= base.horizon(); ++t) {
        VertexSet h;
        for (Vertex v : base.history(t))
            if (!base.graph().is_latent(v)) h.insert(v);
        full.push_back(std::move(h));
    }
    res.full_history_valid = passes_all(base.with_states(full));
    return res;
}

StateSearchResult find_valid_states(const DecisionProcess& p, const StateSearchOptions& opt) {
    const Admg& g = p.graph();
    const int T = p.horizon();
    std::vector<std::vector<Vertex>> cands(T);
    long double total = 1;
    for (int t = 1; t <= T; ++t) {
        for (Vertex v : p.history(t))
            if (!g.is_latent(v)) cands[t - 1].push_back(v);
        std::size_t c = 0;
        for (int k = 0; k <= opt.max_size; ++k) c += binom(cands[t - 1].size(), k);
        total *= static_cast<long double>(c);
    }
    if (total > static_cast<long double>(opt.max_candidates))
        throw BudgetExceeded("state assignments exceed the cap of " +
                             std::to_string(opt.max_candidates));

    StateSearchResult res;
    res.horizon = T;
    std::vector<std::vector<VertexSet>> valid;
    std::vector<VertexSet> current(T);
    auto recurse = [&](auto&& self, int t) -> void {
        if (t > T) {
            ++res.candidates;
            if (passes_all(p.with_states(current))) valid.push_back(current);
            return;
        }
        VertexSet allowed;
        if (t > 1) {
            allowed = current[t - 2];
            allowed.insert(p.action(t - 1));
            allowed.insert(p.x(t).begin(), p.x(t).end());
        }
        const auto& cs = cands[t - 1];
        for (int k = 0; k <= opt.max_size; ++k)
            for (const auto& idx : combinations(cs.size(), k)) {
                VertexSet s;
                bool nested = true;
                for (std::size_t i : idx) {
                    s.insert(cs[i]);
                    if (t > 1 && !allowed.count(cs[i])) nested = false;
                }
                if (!nested) continue;
                current[t - 1] = std::move(s);
                self(self, t + 1);
            }
    };
    recurse(recurse, 1);

    auto contained = [&](const std::vector<VertexSet>& a, const std::vector<VertexSet>& b) {
        for (int t = 0; t < T; ++t)
            if (!std::includes(b[t].begin(), b[t].end(), a[t].begin(), a[t].end())) return false;
        return true;
    };
    for (const auto& v : valid) {
        bool minimal = true;
        for (const auto& w : valid)
            if (&w != &v && w != v && contained(w, v)) minimal = false;
        if (!minimal) continue;
        StateProposal prop;
        prop.sets = v;
        for (int t = 0; t < T; ++t)
            for (Vertex x : v[t]) {
                prop.labels.push_back(std::to_string(t + 1) + ":" + g.name(x));
                ++prop.cardinality;
            }
        std::sort(prop.labels.begin(), prop.labels.end());
        res.proposals.push_back(std::move(prop));
    }
    std::stable_sort(res.proposals.begin(), res.proposals.end(), label_less);

    std::vector<VertexSet> full;
    for (int t = 1; t <= T; ++t) {
        VertexSet h;
        for (Vertex v : p.history(t))
            if (!g.is_latent(v)) h.insert(v);
        full.push_back(std::move(h));
    }
    res.full_history_valid = passes_all(p.with_states(full));
    return res;
}

nlohmann::json to_json(const StateSearchResult& r, const Admg* g) {
    nlohmann::json j;
    j["horizon"] = r.horizon;
    j["candidates_checked"] = r.candidates;
    j["full_history_valid"] = r.full_history_valid;
    j["proposals"] = nlohmann::json::array();
    for (const auto& p : r.proposals) {
        nlohmann::json e{{"cardinality", p.cardinality}, {"minimal", p.minimal}, {"labels", p.labels}};
        if (!p.sets.empty() && g) {
            nlohmann::json sets = nlohmann::json::object();
            for (std::size_t t = 0; t < p.sets.size(); ++t) sets[std::to_string(t + 1)] = g->names(p.sets[t]);
            e["states"] = sets;
        }
        j["proposals"].push_back(std::move(e));
    }
    return j;
}

}  // namespace cpid
