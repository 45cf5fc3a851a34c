// Thin string-in, JSON-string-out bindings; the Python package decodes JSON.
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "cpid/errors.hpp"
#include "cpid/graph_io.hpp"
#include "cpid/identify.hpp"
#include "cpid/manifest.hpp"
#include "cpid/policy_learn.hpp"
#include "cpid/process_io.hpp"
#include "cpid/reproduce.hpp"
#include "cpid/separation.hpp"
#include "cpid/simulator.hpp"
#include "cpid/state_search.hpp"

namespace py = pybind11;
using namespace cpid;

namespace {

bool looks_like_json(const std::string& s) {
    auto i = s.find_first_not_of(" \t\r\n");
    return i != std::string::npos && s[i] == '{';
}

SimSpec spec_of(const std::string& text) {
    return looks_like_json(text) ? pricing_env(pricing_params_from_json(text)) : parse_spec(text);
}

Admg graph_of(const std::string& text, int horizon) {
    GraphSource src = parse_graph_source(text);
    if (auto* g = std::get_if<Admg>(&src)) return *g;
    return std::get<RolledTemplate>(src).unroll(horizon);
}

LearnSetup setup_of(const std::string& spec_text, const std::string& state,
                    const std::optional<std::vector<std::string>>& actions, const std::string& reward,
                    const std::optional<std::vector<std::string>>& latent) {
    LearnSetup s = looks_like_json(spec_text) ? pricing_setup(state) : LearnSetup{StateDefinition::parse(state), {}, "R", {}};
    if (actions) s.actions = *actions;
    if (latent) s.latent = *latent;
    s.reward = reward;
    if (s.actions.empty()) throw InvalidParams("actions are required for a YAML spec");
    return s;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    py::register_exception<Error>(m, "CpidError", PyExc_ValueError);

    m.def("version", &RunManifest::version);

    m.def(
        "m_separated",
        [](const std::string& graph, const std::vector<std::string>& left, const std::vector<std::string>& right,
           const std::vector<std::string>& given, int horizon) {
            Admg g = graph_of(graph, horizon);
            return m_separated(g, SeparationQuery{g.indices(left), g.indices(right), g.indices(given)});
        },
        py::arg("graph"), py::arg("left"), py::arg("right"), py::arg("given") = std::vector<std::string>{},
        py::arg("horizon") = 3);

    m.def(
        "identify",
        [](const std::string& graph, const std::string& process, std::optional<std::string> state) {
            ProcessOverrides ov;
            ov.state = std::move(state);
            auto lp = load_process(parse_graph_source(graph), nlohmann::json::parse(process), ov);
            return to_json(identify(lp.process)).dump();
        },
        py::arg("graph"), py::arg("process"), py::arg("state") = std::nullopt);

    m.def(
        "find_states",
        [](const std::string& graph, const std::vector<std::string>& rewards, int max_lag, int max_size) {
            StateSearchOptions opt;
            opt.max_lag = max_lag;
            opt.max_size = max_size;
            GraphSource src = parse_graph_source(graph);
            return to_json(find_valid_states(std::get<RolledTemplate>(src), rewards, opt)).dump();
        },
        py::arg("template"), py::arg("rewards"), py::arg("max_lag") = 2, py::arg("max_size") = 3);

    m.def(
        "simulate",
        [](const std::string& spec, int episodes, int horizon, std::uint64_t seed, int threads) {
            SimSpec s = spec_of(spec);
            py::gil_scoped_release nogil;
            return episodes_csv(run_episodes(s, episodes, horizon, seed, threads));
        },
        py::arg("spec"), py::arg("episodes"), py::arg("horizon"), py::arg("seed") = 1, py::arg("threads") = 1);

    m.def(
        "learn",
        [](const std::string& spec, const std::string& state, int episodes, int horizon, std::uint64_t seed,
           std::optional<std::vector<std::string>> actions, const std::string& reward,
           std::optional<std::vector<std::string>> latent, double gamma) {
            SimSpec s = spec_of(spec);
            LearnSetup setup = setup_of(spec, state, actions, reward, latent);
            PiOptions pi;
            pi.gamma = gamma;
            py::gil_scoped_release nogil;
            return learn_policy(run_episodes(s, episodes, horizon, seed), s, setup, pi).to_json().dump();
        },
        py::arg("spec"), py::arg("state"), py::arg("episodes") = 2000, py::arg("horizon") = 100, py::arg("seed") = 1,
        py::arg("actions") = std::nullopt, py::arg("reward") = "R", py::arg("latent") = std::nullopt,
        py::arg("gamma") = 0.99);

    m.def(
        "evaluate",
        [](const std::string& spec, std::optional<std::string> policy, int episodes, int horizon, std::uint64_t seed) {
            SimSpec s = spec_of(spec);
            std::optional<LearnedPolicy> pol;
            if (policy) pol = LearnedPolicy::from_json(nlohmann::json::parse(*policy));
            EvalOptions eo;
            eo.episodes = episodes;
            eo.horizon = horizon;
            eo.seed = seed;
            py::gil_scoped_release nogil;
            return evaluate_policy(s, pol ? &*pol : nullptr, eo).to_json().dump();
        },
        py::arg("spec"), py::arg("policy") = std::nullopt, py::arg("episodes") = 2000, py::arg("horizon") = 100,
        py::arg("seed") = 2);

    m.def(
        "reproduce_table1",
        [](const std::string& fixture_dir, std::optional<std::vector<std::string>> scenarios, int episodes,
           int horizon) {
            Table1Options opt;
            opt.fixture_dir = fixture_dir;
            if (scenarios) opt.scenarios = *scenarios;
            opt.episodes = opt.eval_episodes = episodes;
            opt.horizon = opt.eval_horizon = horizon;
            py::gil_scoped_release nogil;
            return reproduce_table1(opt).to_json().dump();
        },
        py::arg("fixture_dir"), py::arg("scenarios") = std::nullopt, py::arg("episodes") = 2000,
        py::arg("horizon") = 100);
}
