#include <charconv>
#include <cstdlib>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "cpid/errors.hpp"
#include "cpid/gformula.hpp"
#include "cpid/graph_io.hpp"
#include "cpid/identify.hpp"
#include "cpid/manifest.hpp"
#include "cpid/policy_learn.hpp"
#include "cpid/process_io.hpp"
#include "cpid/reproduce.hpp"
#include "cpid/separation.hpp"
#include "cpid/state_search.hpp"
#include "cpid/swig.hpp"
#include "cpid/text.hpp"

#ifndef CPID_FIXTURE_DIR
#define CPID_FIXTURE_DIR "fixtures"
#endif

using namespace cpid;
using nlohmann::json;

namespace {

constexpr int kOk = 0, kCheckFailed = 1, kUsage = 2;

// Options shared by every subcommand.
struct Common {
    bool json = false;
    int threads = 0;
    std::optional<std::uint64_t> seed;
    std::string out;
};

int default_threads() { return std::max(1u, std::thread::hardware_concurrency()); }

// --seed beats CPID_SEED beats the built-in default.
std::uint64_t resolve_seed(const Common& c, std::uint64_t fallback) {
    if (c.seed) return *c.seed;
    if (const char* env = std::getenv("CPID_SEED")) {
        try {
            std::size_t used = 0;
            auto v = std::stoull(env, &used);
            if (used == std::string(env).size()) return v;
        } catch (const std::exception&) {
        }
        throw InvalidParams("CPID_SEED is not an unsigned integer");
    }
    return fallback;
}

int threads_of(const Common& c) { return c.threads > 0 ? c.threads : default_threads(); }

void emit(const Common& c, const std::string& text) {
    if (c.out.empty() || c.out == "-")
        std::cout << text;
    else
        write_file(c.out, text);
}

void emit_json(const Common& c, json body, const RunManifest& m) {
    body["manifest"] = m.to_json();
    emit(c, body.dump(2) + "\n");
}

std::vector<std::string> names_of(const std::string& csv) {
    std::vector<std::string> out;
    for (auto part : split(csv, ','))
        if (auto t = trim(part); !t.empty()) out.emplace_back(t);
    return out;
}

Admg graph_for_query(const std::string& path, std::optional<int> horizon) {
    auto src = load_graph_source(path);
    if (auto* g = std::get_if<Admg>(&src)) {
        if (horizon) throw InvalidParams("--horizon only applies to template graphs");
        return *g;
    }
    return std::get<RolledTemplate>(src).unroll(horizon.value_or(3));
}

SimSpec load_spec(const std::string& path, RunManifest& m) {
    const std::string text = read_file(path);
    m.add_input(path, text);
    if (path.size() >= 5 && path.substr(path.size() - 5) == ".json") return pricing_env(pricing_params_from_json(text));
    return parse_spec(text);
}

bool is_pricing(const std::string& path) { return path.size() >= 5 && path.substr(path.size() - 5) == ".json"; }

void add_common(CLI::App* app, Common& c, bool seeded) {
    app->add_flag("--json", c.json, "machine-readable output");
    app->add_option("--threads", c.threads, "worker threads (default: all cores)")->check(CLI::NonNegativeNumber);
    if (seeded) app->add_option("--seed", c.seed, "random seed (CPID_SEED overrides the default)");
}

std::string verdict_text(const IdentReport& r) {
    std::string out;
    for (const Verdict* v : {&r.nested, &r.memoryless, &r.backdoor, &r.unconfounded}) out += to_text(*v);
    out += std::string("overall: ") + (r.overall() ? "PASS" : "FAIL") + "\n";
    if (!r.overall() && r.identified()) out += "identified through the weaker unconfoundedness check\n";
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal identification checks for sequential decision processes, plus the pricing simulator."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(RunManifest::version()));

    std::string command_line = "cpid";
    for (int i = 1; i < argc; ++i) command_line += std::string(" ") + argv[i];

    Common c;
    int rc = kOk;
    std::function<int()> run;

    // msep
    auto* msep = app.add_subcommand("msep", "m-separation query on a graph");
    std::string g_path, p_path, left, right, given, kind = "any", blocking = "walk";
    std::optional<int> horizon;
    bool witness = false;
    msep->add_option("GRAPH", g_path, "graph or template file")->required()->check(CLI::ExistingFile);
    msep->add_option("--left", left, "comma-separated vertices")->required();
    msep->add_option("--right", right, "comma-separated vertices")->required();
    msep->add_option("--given", given, "comma-separated vertices");
    msep->add_option("--kind", kind, "any|backdoor|confounding|confounding-arc|directed");
    msep->add_option("--blocking", blocking, "walk|ancestral");
    msep->add_option("--horizon", horizon, "periods to unroll a template");
    msep->add_flag("--witness", witness, "print one connecting walk");
    add_common(msep, c, false);
    msep->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            m.add_file(g_path);
            Admg g = graph_for_query(g_path, horizon);
            SeparationQuery q{g.indices(names_of(left)), g.indices(names_of(right)), g.indices(names_of(given))};
            validate(g, q);
            auto wk = parse_walk_kind(kind);
            auto bl = parse_blocking(blocking);
            auto w = find_connection(g, q, wk, bl);
            if (c.json) {
                json j{{"connected", w.has_value()}, {"kind", to_string(wk)}, {"blocking", to_string(bl)}};
                if (witness && w) j["witness"] = w->render(g);
                emit_json(c, j, m);
            } else {
                std::string s = w ? "connected\n" : "separated\n";
                if (witness && w) s += w->render(g) + "\n";
                emit(c, s);
            }
            return kOk;
        };
    });

    // swig
    auto* swig = app.add_subcommand("swig", "build the single-world graph for intervened decision times");
    std::string intervene, emit_fmt = "text", state_override;
    std::optional<int> from;
    swig->add_option("GRAPH", g_path)->required()->check(CLI::ExistingFile);
    swig->add_option("PROCESS", p_path)->required()->check(CLI::ExistingFile);
    swig->add_option("--intervene", intervene, "comma-separated decision times");
    swig->add_option("--from", from, "intervene at t and every later time");
    swig->add_option("--emit", emit_fmt, "text|json|dot")->check(CLI::IsMember({"text", "json", "dot"}));
    swig->add_option("--left", left);
    swig->add_option("--right", right);
    swig->add_option("--given", given);
    swig->add_option("--state", state_override);
    swig->add_option("--horizon", horizon);
    add_common(swig, c, false);
    swig->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            m.add_file(g_path);
            m.add_file(p_path);
            ProcessOverrides ov;
            if (!state_override.empty()) ov.state = state_override;
            ov.horizon = horizon;
            auto lp = load_process_files(g_path, p_path, ov);
            std::set<int> times;
            if (from) times = times_from(*from, lp.process.horizon());
            for (const auto& t : names_of(intervene)) {
                int v = 0;
                auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
                if (ec != std::errc() || end != t.data() + t.size())
                    throw InvalidParams("--intervene takes decision times such as 1,2; got '" + t + "'");
                times.insert(v);
            }
            Swig s = build_swig(lp.process, times);
            std::optional<bool> connected;
            if (!left.empty() || !right.empty()) {
                if (left.empty() || right.empty()) throw InvalidQuery("--left and --right go together");
                connected = swig_query(s, names_of(left), names_of(right), names_of(given));
            }
            if (c.json || emit_fmt == "json") {
                json j{{"intervened", std::vector<int>(times.begin(), times.end())}, {"graph", to_json(s.graph())}};
                if (connected) j["connected"] = *connected;
                emit_json(c, j, m);
            } else if (emit_fmt == "dot") {
                emit(c, to_dot(s.graph()));
            } else {
                std::string out = to_text(s.graph());
                if (connected) out += *connected ? "connected\n" : "separated\n";
                emit(c, out);
            }
            return kOk;
        };
    });

    // identify
    auto* ident = app.add_subcommand("identify", "check the identification assumptions for a state choice");
    ident->add_option("GRAPH", g_path)->required()->check(CLI::ExistingFile);
    ident->add_option("PROCESS", p_path)->required()->check(CLI::ExistingFile);
    ident->add_option("--state", state_override, "state pattern, e.g. \"A1@1\" or \"A2=B1;A1=A1@1\"");
    ident->add_option("--horizon", horizon);
    add_common(ident, c, false);
    ident->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            m.add_file(g_path);
            m.add_file(p_path);
            ProcessOverrides ov;
            if (!state_override.empty()) ov.state = state_override;
            ov.horizon = horizon;
            auto lp = load_process_files(g_path, p_path, ov);
            auto r = identify(lp.process);
            if (c.json)
                emit_json(c, to_json(r), m);
            else
                emit(c, verdict_text(r));
            return r.overall() ? kOk : kCheckFailed;
        };
    });

    // find-states
    auto* find = app.add_subcommand("find-states", "enumerate minimal valid state sets");
    StateSearchOptions so;
    find->add_option("GRAPH", g_path)->required()->check(CLI::ExistingFile);
    find->add_option("PROCESS", p_path)->required()->check(CLI::ExistingFile);
    find->add_option("--max-lag", so.max_lag)->check(CLI::NonNegativeNumber);
    find->add_option("--max-size", so.max_size)->check(CLI::NonNegativeNumber);
    find->add_option("--max-candidates", so.max_candidates);
    find->add_option("--horizon", horizon);
    add_common(find, c, false);
    find->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            m.add_file(g_path);
            m.add_file(p_path);
            ProcessOverrides ov;
            ov.horizon = horizon;
            auto lp = load_process_files(g_path, p_path, ov);
            so.threads = threads_of(c);
            if (horizon) so.horizon = *horizon;
            StateSearchResult r;
            if (lp.annotation)
                r = find_valid_states(std::get<RolledTemplate>(lp.source), lp.annotation->rewards, so);
            else
                r = find_valid_states(lp.process, so);
            json j = to_json(r, &lp.process.graph());
            if (c.json) {
                emit_json(c, j, m);
            } else {
                std::string out;
                for (const auto& p : r.proposals) out += join(p.labels, ", ") + "\n";
                if (r.proposals.empty()) out += "no valid state set within the search bounds\n";
                out += "candidates examined: " + std::to_string(r.candidates) + "\n";
                emit(c, out);
            }
            return r.proposals.empty() ? kCheckFailed : kOk;
        };
    });

    // gformula
    auto* gf = app.add_subcommand("gformula", "value of a policy from an observational joint table");
    std::string dist_path, policy_path, utility = "discounted:0.99";
    GFormulaOptions gopt;
    bool emit_joint = false, recursive = false;
    gf->add_option("GRAPH", g_path)->required()->check(CLI::ExistingFile);
    gf->add_option("PROCESS", p_path)->required()->check(CLI::ExistingFile);
    gf->add_option("DIST", dist_path, "CSV joint table")->required()->check(CLI::ExistingFile);
    gf->add_option("POLICY", policy_path, "CSV decision rules")->required()->check(CLI::ExistingFile);
    gf->add_option("--utility", utility, "discounted:GAMMA or table:FILE");
    gf->add_option("--state", state_override);
    gf->add_option("--horizon", horizon);
    gf->add_flag("--unsafe", gopt.unsafe, "skip the identification precondition");
    gf->add_flag("--strict-positivity", gopt.strict_positivity);
    gf->add_flag("--emit-joint", emit_joint, "include the interventional joint table");
    gf->add_flag("--recursive", recursive, "use the period-by-period recursion");
    add_common(gf, c, false);
    gf->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            for (const auto* p : {&g_path, &p_path, &dist_path, &policy_path}) m.add_file(*p);
            ProcessOverrides ov;
            if (!state_override.empty()) ov.state = state_override;
            ov.horizon = horizon;
            auto lp = load_process_files(g_path, p_path, ov);
            auto P = distribution_from_csv(read_file(dist_path));
            auto g = policy_from_csv(read_file(policy_path), P, lp.process);
            Utility u;
            if (utility.rfind("discounted:", 0) == 0) {
                u = Utility::discounted(std::stod(utility.substr(11)));
            } else if (utility.rfind("table:", 0) == 0) {
                m.add_file(utility.substr(6));
                u = utility_from_csv(read_file(utility.substr(6)), P);
            } else {
                throw CLI::ValidationError("--utility", "expected discounted:GAMMA or table:FILE");
            }
            auto joint = recursive ? identify_joint_recursive(P, lp.process, g, gopt)
                                   : identify_joint(P, lp.process, g, gopt);
            double v = expected_utility(joint, lp.process, u);
            if (c.json) {
                json j{{"value", v}};
                if (emit_joint) j["joint"] = to_json(joint);
                emit_json(c, j, m);
            } else {
                char buf[64];
                std::snprintf(buf, sizeof buf, "value %.12g\n", v);
                std::string out = buf;
                if (emit_joint) out += to_csv(joint);
                emit(c, out);
            }
            return kOk;
        };
    });

    // simulate
    auto* sim = app.add_subcommand("simulate", "draw episodes from a YAML spec or a pricing parameter file");
    std::string spec_path;
    int episodes = 1000, sim_horizon = 100;
    sim->add_option("SPEC", spec_path)->required()->check(CLI::ExistingFile);
    sim->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
    sim->add_option("--horizon", sim_horizon)->check(CLI::NonNegativeNumber);
    sim->add_option("--out", c.out, "episode CSV (default stdout)");
    add_common(sim, c, true);
    sim->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            auto spec = load_spec(spec_path, m);
            auto seed = resolve_seed(c, 1);
            m.set_seed(seed);
            auto eps = run_episodes(spec, episodes, sim_horizon, seed, threads_of(c));
            std::string csv = episodes_csv(eps);
            if (c.json) {
                if (c.out.empty()) throw CLI::ValidationError("--json", "needs --out for the episode CSV");
                write_file(c.out, csv);
                json j{{"episodes", episodes},
                       {"horizon", sim_horizon},
                       {"out", c.out},
                       {"out_digest", "fnv1a64:" + fnv1a_hex(csv)}};
                j["manifest"] = m.to_json();
                std::cout << j.dump(2) << "\n";
            } else {
                emit(c, csv);
            }
            return kOk;
        };
    });

    // learn
    auto* learn = app.add_subcommand("learn", "tabular policy iteration on simulated null-policy data");
    std::string state, actions, reward = "R", latent;
    PiOptions pi;
    learn->add_option("SPEC", spec_path)->required()->check(CLI::ExistingFile);
    learn->add_option("--state", state, "e.g. \"A1@1,Dhat@1,B1,Dhat\"")->required();
    learn->add_option("--actions", actions, "decision vertices (pricing default A1,A2)");
    learn->add_option("--reward", reward);
    learn->add_option("--latent", latent, "vertices never allowed in the state (pricing default D,Ac1,Ac2)");
    learn->add_option("--gamma", pi.gamma);
    learn->add_option("--epsilon", pi.epsilon, "exploration floor of the returned policy");
    learn->add_option("--min-visits", pi.min_visits, "treat rarer (s,a) pairs as unvisited");
    learn->add_option("--lcb", pi.lcb, "penalise rewards by lcb*sd/sqrt(n)");
    learn->add_option("--max-iterations", pi.max_iterations);
    learn->add_option("--episodes", episodes)->check(CLI::PositiveNumber);
    learn->add_option("--horizon", sim_horizon)->check(CLI::PositiveNumber);
    learn->add_option("--out", c.out, "policy JSON (default stdout)");
    add_common(learn, c, true);
    learn->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            auto spec = load_spec(spec_path, m);
            auto seed = resolve_seed(c, 1);
            m.set_seed(seed);
            LearnSetup ls;
            ls.state = StateDefinition::parse(state);
            ls.reward = reward;
            ls.actions = actions.empty() && is_pricing(spec_path) ? std::vector<std::string>{"A1", "A2"}
                                                                   : names_of(actions);
            ls.latent = latent.empty() && is_pricing(spec_path) ? pricing_latent() : names_of(latent);
            auto eps = run_episodes(spec, episodes, sim_horizon, seed, threads_of(c));
            auto pol = learn_policy(eps, spec, ls, pi, threads_of(c));
            json j = pol.to_json();
            j["training"] = {{"episodes", episodes}, {"horizon", sim_horizon}};
            j["manifest"] = m.to_json();
            emit(c, j.dump(2) + "\n");
            const bool to_file = !c.out.empty() && c.out != "-";
            if (to_file && c.json) {
                json summary{{"out", c.out},
                             {"iterations", pol.iterations},
                             {"residual", pol.residual},
                             {"manifest", j["manifest"]}};
                std::cout << summary.dump(2) << "\n";
            } else if (to_file) {
                std::cout << "policy iteration converged in " << pol.iterations << " iterations; wrote " << c.out
                          << "\n";
            }
            return kOk;
        };
    });

    // evaluate
    auto* eval = app.add_subcommand("evaluate", "simulate a learned policy against the null policy");
    std::string csv_path, curve_path;
    bool paired = true;
    EvalOptions eo;
    eval->add_option("SPEC", spec_path)->required()->check(CLI::ExistingFile);
    eval->add_option("POLICY", policy_path, "policy JSON, or 'null'")->required();
    eval->add_option("--episodes", eo.episodes)->check(CLI::PositiveNumber);
    eval->add_option("--horizon", eo.horizon)->check(CLI::PositiveNumber);
    eval->add_option("--reward", eo.reward);
    eval->add_flag("--paired-null", paired, "compare with the null policy on the same seeds (always on)");
    eval->add_option("--csv", csv_path, "per-episode values");
    eval->add_option("--curve", curve_path, "mean cumulative reward by period");
    eval->add_option("--out", c.out, "report (default stdout)");
    add_common(eval, c, true);
    eval->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            auto spec = load_spec(spec_path, m);
            eo.seed = resolve_seed(c, 2);
            eo.threads = threads_of(c);
            m.set_seed(eo.seed);
            std::optional<LearnedPolicy> pol;
            if (policy_path != "null") {
                const std::string text = read_file(policy_path);
                m.add_input(policy_path, text);
                json pj;
                try {
                    pj = json::parse(text);
                } catch (const json::exception& e) {
                    throw InvalidParams(std::string("policy file is not JSON: ") + e.what());
                }
                pol = LearnedPolicy::from_json(pj);
            }
            auto r = evaluate_policy(spec, pol ? &*pol : nullptr, eo);
            if (!csv_path.empty()) write_file(csv_path, r.episodes_csv());
            if (!curve_path.empty()) write_file(curve_path, r.curve_csv());
            if (c.json) {
                emit_json(c, r.to_json(), m);
            } else {
                char buf[512];
                std::snprintf(buf, sizeof buf,
                              "policy %.2f (sd %.2f)\nnull   %.2f (sd %.2f)\nregret %.2f%% [%.2f, %.2f]\n"
                              "unseen-state queries %llu of %llu\n",
                              r.mean, r.sd, r.null_mean, r.null_sd, r.regret, r.regret_lo, r.regret_hi,
                              static_cast<unsigned long long>(r.unvisited_queries),
                              static_cast<unsigned long long>(r.queries));
                emit(c, buf);
            }
            return kOk;
        };
    });

    // reproduce
    auto* repro = app.add_subcommand("reproduce", "rerun the pricing study end to end");
    std::string what, scale = "desk", fixtures = CPID_FIXTURE_DIR, only;
    Table1Options to;
    std::optional<int> r_eps, r_hor, r_eval;
    repro->add_option("WHAT", what, "table1")->required()->check(CLI::IsMember({"table1"}));
    repro->add_option("--scale", scale, "desk (N=2000, T=100)")->check(CLI::IsMember({"desk"}));
    repro->add_option("--fixtures", fixtures, "directory holding pricing/*.json");
    repro->add_option("--scenarios", only, "comma-separated subset");
    repro->add_option("--episodes", r_eps, "training episodes")->check(CLI::PositiveNumber);
    repro->add_option("--horizon", r_hor, "weeks per episode")->check(CLI::PositiveNumber);
    repro->add_option("--eval-episodes", r_eval)->check(CLI::PositiveNumber);
    repro->add_option("--gamma", to.pi.gamma);
    repro->add_option("--out", c.out);
    add_common(repro, c, true);
    repro->callback([&] {
        run = [&] {
            RunManifest m(command_line);
            to.fixture_dir = fixtures;
            to.threads = threads_of(c);
            to.seed = resolve_seed(c, to.seed);
            if (r_eps) to.episodes = *r_eps;
            if (r_hor) to.horizon = to.eval_horizon = *r_hor;
            if (r_eval) to.eval_episodes = *r_eval;
            if (!only.empty()) to.scenarios = names_of(only);
            for (const auto& s : to.scenarios) m.add_file(fixtures + "/pricing/" + s + ".json");
            m.set_seed(to.seed);
            auto rep = reproduce_table1(to);
            if (c.json) {
                json j = rep.to_json();
                j["settings"] = {{"episodes", to.episodes},
                                 {"horizon", to.horizon},
                                 {"eval_episodes", to.eval_episodes},
                                 {"gamma", to.pi.gamma}};
                emit_json(c, j, m);
            } else {
                emit(c, rep.to_text());
            }
            return rep.all_pass() ? kOk : kCheckFailed;
        };
    });

    if (argc < 2) {
        std::cerr << app.help();
        return kUsage;
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }
    try {
        rc = run();
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const cpid::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return rc;
}
