#include "cpid/reproduce.hpp"

#include <cmath>
#include <cstdio>

#include "cpid/errors.hpp"
#include "cpid/text.hpp"

namespace cpid {

namespace {

std::string join_state(const nlohmann::json& arr) {
    std::vector<std::string> parts;
    for (const auto& x : arr) parts.push_back(x.get<std::string>());
    return join(parts, ",");
}

std::string fmt(const char* f, double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, x);
    return buf;
}

PolicyResult learn_and_evaluate(const SimSpec& spec, const std::vector<Episode>& train, const std::string& state,
                                const Table1Options& opt) {
    auto pol = learn_policy(train, spec, pricing_setup(state), opt.pi, opt.threads);
    EvalOptions eo;
    eo.episodes = opt.eval_episodes;
    eo.horizon = opt.eval_horizon;
    eo.seed = opt.seed + 1;
    eo.threads = opt.threads;
    auto r = evaluate_policy(spec, &pol, eo);
    return {state, r.mean, r.sd, r.regret, r.regret_lo, r.regret_hi, r.unvisited_queries};
}

nlohmann::json to_json(const PolicyResult& p) {
    return {{"state", p.state},
            {"mean", p.mean},
            {"sd", p.sd},
            {"regret_percent", p.regret},
            {"regret_ci95", {p.regret_lo, p.regret_hi}},
            {"unvisited_state_queries", p.unvisited_queries}};
}

}  // namespace

PricingScenario load_pricing_scenario(const std::string& path) {
    const std::string text = read_file(path);
    PricingScenario sc;
    sc.params = pricing_params_from_json(text);
    auto j = nlohmann::json::parse(text);
    try {
        sc.name = j.at("name").get<std::string>();
        sc.graph = j.value("graph", "");
        if (j.contains("degree") && !j["degree"].is_null()) sc.degree = j["degree"].get<double>();
        const auto& st = j.at("states");
        sc.baseline_state = join_state(st.at("baseline"));
        if (st.contains("identified")) sc.identified_state = join_state(st["identified"]);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidParams(path + ": scenario fields missing (" + e.what() + ")");
    }
    return sc;
}

std::vector<std::string> pricing_latent() { return {"D", "Ac1", "Ac2"}; }

LearnSetup pricing_setup(const std::string& state) {
    return {StateDefinition::parse(state), {"A1", "A2"}, "R", pricing_latent()};
}

Table1Row run_scenario(const PricingScenario& sc, const Table1Options& opt) {
    const SimSpec spec = pricing_env(sc.params);
    const auto train = run_episodes(spec, opt.episodes, opt.horizon, opt.seed, opt.threads);
    Table1Row row;
    row.name = sc.name;
    row.graph = sc.graph;
    row.degree = sc.degree;
    row.baseline = learn_and_evaluate(spec, train, sc.baseline_state, opt);
    if (sc.identified_state && *sc.identified_state != sc.baseline_state)
        row.identified = learn_and_evaluate(spec, train, *sc.identified_state, opt);
    else if (sc.identified_state)
        row.identified = row.baseline;
    // the null run is shared by every evaluation on the same seeds
    EvalOptions eo;
    eo.episodes = opt.eval_episodes;
    eo.horizon = opt.eval_horizon;
    eo.seed = opt.seed + 1;
    eo.threads = opt.threads;
    auto null = evaluate_policy(spec, nullptr, eo);
    row.null_mean = null.mean;
    row.null_sd = null.sd;
    return row;
}

std::vector<Claim> table1_claims(const std::vector<Table1Row>& rows) {
    auto find = [&](const std::string& n) -> const Table1Row* {
        for (const auto& r : rows)
            if (r.name == n) return &r;
        return nullptr;
    };
    std::vector<Claim> out;
    if (const auto* b = find("basic")) {
        const auto& p = b->baseline;
        out.push_back({"basic: learned policy beats null", p.regret > 0 && p.regret_lo > 0,
                       "regret " + fmt("%.2f", p.regret) + "% CI [" + fmt("%.2f", p.regret_lo) + ", " +
                           fmt("%.2f", p.regret_hi) + "]"});
    }
    if (const auto* r = find("retro_2"); r && r->identified) {
        const auto &w = r->baseline, &c = *r->identified;
        bool ok = w.regret < 0 && c.regret > 0 && c.regret_lo > w.regret_hi;
        out.push_back({"retro degree 2: baseline state loses, identified state wins", ok,
                       "baseline " + fmt("%.2f", w.regret) + "% [" + fmt("%.2f", w.regret_lo) + ", " +
                           fmt("%.2f", w.regret_hi) + "], identified " + fmt("%.2f", c.regret) + "% [" +
                           fmt("%.2f", c.regret_lo) + ", " + fmt("%.2f", c.regret_hi) + "]"});
    }
    {
        std::vector<double> gaps;
        std::string detail;
        for (const char* n : {"retro_1", "retro_2", "retro_4"}) {
            const auto* r = find(n);
            if (!r || !r->identified) {
                gaps.clear();
                break;
            }
            gaps.push_back(r->identified->regret - r->baseline.regret);
            detail += std::string(detail.empty() ? "" : ", ") + n + " " + fmt("%.2f", gaps.back());
        }
        if (gaps.size() == 3)
            out.push_back({"retro degrees 1,2,4: gap grows with degree", gaps[0] < gaps[1] && gaps[1] < gaps[2],
                           "gap (points) " + detail});
    }
    if (const auto *lo = find("trend_0.1"), *hi = find("trend_0.9"); lo && hi) {
        double a = std::abs(hi->baseline.regret), b = std::abs(lo->baseline.regret);
        out.push_back({"trend: |regret| at 0.9 below |regret| at 0.1", a < b,
                       "|" + fmt("%.2f", hi->baseline.regret) + "| vs |" + fmt("%.2f", lo->baseline.regret) + "|"});
    }
    return out;
}

Table1Report reproduce_table1(const Table1Options& opt) {
    Table1Report rep;
    for (const auto& name : opt.scenarios)
        rep.rows.push_back(run_scenario(load_pricing_scenario(opt.fixture_dir + "/pricing/" + name + ".json"), opt));
    rep.claims = table1_claims(rep.rows);
    return rep;
}

bool Table1Report::all_pass() const {
    for (const auto& c : claims)
        if (!c.pass) return false;
    return true;
}

const Table1Row* Table1Report::find(const std::string& name) const {
    for (const auto& r : rows)
        if (r.name == name) return &r;
    return nullptr;
}

nlohmann::json Table1Report::to_json() const {
    nlohmann::json j;
    j["rows"] = nlohmann::json::array();
    for (const auto& r : rows) {
        nlohmann::json o{{"scenario", r.name},
                         {"graph", r.graph},
                         {"degree", r.degree ? nlohmann::json(*r.degree) : nlohmann::json(nullptr)},
                         {"null", {{"mean", r.null_mean}, {"sd", r.null_sd}}},
                         {"baseline", cpid::to_json(r.baseline)}};
        o["identified"] = r.identified ? cpid::to_json(*r.identified) : nlohmann::json(nullptr);
        j["rows"].push_back(o);
    }
    j["claims"] = nlohmann::json::array();
    for (const auto& c : claims) j["claims"].push_back({{"claim", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    j["all_pass"] = all_pass();
    return j;
}

std::string Table1Report::to_text() const {
    std::string out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-6s %-6s %18s %18s %18s %9s %9s\n", "graph", "degree", "null", "PI baseline",
                  "PI identified", "regret", "regret");
    out += buf;
    auto cell = [](double m, double sd) { return fmt("%.1f", m) + " (" + fmt("%.2f", sd) + ")"; };
    for (const auto& r : rows) {
        std::string deg = r.degree ? fmt("%g", *r.degree) : "-";
        std::string id = r.identified ? cell(r.identified->mean, r.identified->sd) : "-";
        std::string idr = r.identified ? fmt("%.2f", r.identified->regret) : "-";
        std::snprintf(buf, sizeof buf, "%-6s %-6s %18s %18s %18s %9s %9s\n", r.graph.c_str(), deg.c_str(),
                      cell(r.null_mean, r.null_sd).c_str(), cell(r.baseline.mean, r.baseline.sd).c_str(), id.c_str(),
                      fmt("%.2f", r.baseline.regret).c_str(), idr.c_str());
        out += buf;
    }
    out += "\n";
    for (const auto& c : claims) out += std::string(c.pass ? "PASS " : "FAIL ") + c.name + ": " + c.detail + "\n";
    return out;
}

}  // namespace cpid
