#include "cpid/simulator.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <queue>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "cpid/errors.hpp"
#include "cpid/rng.hpp"

namespace cpid {

// Index-based copy of the kernels, built once per spec.
struct SimSpec::Compiled {
    struct Var {
        int lag;
        std::size_t v;
    };
    struct Ind {
        Var lhs;
        char op;
        bool has_rhs;
        Var rhs;
        double constant;
    };
    struct CTerm {
        double intercept, value;
        std::vector<Var> vars;
        std::vector<Ind> inds;
    };
    struct CKernel {
        KernelType type;
        std::vector<double> domain;  // sorted
        double noise;
        std::vector<double> weights;
        std::vector<std::vector<CTerm>> branches;
        bool has_cap;
        std::vector<CTerm> cap;
    };
    std::vector<CKernel> kernels;
};

namespace {

using Compiled = SimSpec::Compiled;

[[noreturn]] void bad(const std::string& path, const std::string& msg) {
    throw SchemaError(path + ": " + msg);
}

std::string fmt(double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
}

bool valid_name(const std::string& n) {
    return !n.empty() && n.find_first_of("[]@,+- \t:") == std::string::npos;
}

// ---- YAML reading

double num(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) bad(path, "expected a number");
    try {
        return n.as<double>();
    } catch (const YAML::Exception&) {
        bad(path, "expected a number, got '" + n.Scalar() + "'");
    }
}

int lag_of(const YAML::Node& k, const std::string& path) {
    int lag = -1;
    try {
        lag = k.as<int>();
    } catch (const YAML::Exception&) {
        bad(path, "lag keys must be non-negative integers");
    }
    if (lag < 0) bad(path, "lag keys must be non-negative integers");
    return lag;
}

std::string name_of(const YAML::Node& n, const std::string& path) {
    if (!n.IsScalar()) bad(path, "expected a vertex name");
    return n.Scalar();
}

void check_keys(const YAML::Node& m, std::initializer_list<const char*> allowed, const std::string& path) {
    for (const auto& kv : m) {
        auto k = kv.first.Scalar();
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return k == a; }))
            bad(path + "/" + k, "unknown key");
    }
}

std::vector<LaggedName> parse_variables(const YAML::Node& n, const std::string& path) {
    std::vector<LaggedName> out;
    if (!n || n.IsNull()) return out;
    if (!n.IsMap()) bad(path, "expected a map from lag to vertex name");
    for (const auto& kv : n) {
        std::string p = path + "/" + kv.first.Scalar();
        int lag = lag_of(kv.first, p);
        if (kv.second.IsSequence()) {
            std::size_t i = 0;
            for (const auto& e : kv.second) out.push_back({lag, name_of(e, p + "/" + std::to_string(i++))});
        } else {
            out.push_back({lag, name_of(kv.second, p)});
        }
    }
    return out;
}

LaggedName single_variable(const YAML::Node& n, const std::string& path) {
    auto v = parse_variables(n, path);
    if (v.size() != 1) bad(path, "expected exactly one lagged variable");
    return v[0];
}

Indicator parse_indicator(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) bad(path, "expected {left, op, right}");
    check_keys(n, {"left", "op", "right"}, path);
    Indicator ind;
    if (!n["left"]) bad(path + "/left", "missing");
    ind.lhs = single_variable(n["left"], path + "/left");
    std::string op = n["op"] ? n["op"].Scalar() : "";
    if (op != "<" && op != ">") bad(path + "/op", "expected '<' or '>'");
    ind.op = op[0];
    const auto& r = n["right"];
    if (!r) bad(path + "/right", "missing");
    if (r.IsMap())
        ind.rhs = single_variable(r, path + "/right");
    else
        ind.constant = num(r, path + "/right");
    return ind;
}

Term parse_term(const YAML::Node& n, const std::string& path) {
    if (!n.IsMap()) bad(path, "expected a term map");
    check_keys(n, {"intercept", "indicators", "value", "variable"}, path);
    Term t;
    if (n["intercept"] && !n["intercept"].IsNull()) t.intercept = num(n["intercept"], path + "/intercept");
    if (n["value"] && !n["value"].IsNull()) t.value = num(n["value"], path + "/value");
    t.variables = parse_variables(n["variable"], path + "/variable");
    const auto& inds = n["indicators"];
    if (inds && !inds.IsNull()) {
        if (!inds.IsSequence()) bad(path + "/indicators", "expected a list");
        std::size_t i = 0;
        for (const auto& e : inds) {
            t.indicators.push_back(parse_indicator(e, path + "/indicators/" + std::to_string(i)));
            ++i;
        }
    }
    return t;
}

std::vector<Term> parse_terms(const YAML::Node& n, const std::string& path) {
    std::vector<Term> out;
    if (!n || n.IsNull()) return out;
    if (!n.IsSequence()) bad(path, "expected a list of terms");
    std::size_t i = 0;
    for (const auto& e : n) {
        out.push_back(parse_term(e, path + "/" + std::to_string(i)));
        ++i;
    }
    return out;
}

Kernel parse_kernel(const YAML::Node& n, const std::string& path) {
    if (!n || !n.IsMap()) bad(path, "expected a kernel map");
    check_keys(n, {"type", "sample_domain", "noise", "terms", "branches", "cap", "initial"}, path);
    Kernel k;
    if (!n["type"] || !n["type"].IsScalar()) bad(path + "/type", "missing");
    const std::string type = n["type"].Scalar();
    if (type == "uniform")
        k.type = KernelType::Uniform;
    else if (type == "linear")
        k.type = KernelType::Linear;
    else if (type == "poisson" || type == "poisson-mixture")
        k.type = KernelType::Poisson;
    else
        throw UnknownKernelType(path + "/type: unknown kernel type '" + type + "'");
    const auto& dom = n["sample_domain"];
    if (!dom || !dom.IsSequence()) bad(path + "/sample_domain", "expected a list of values");
    std::size_t i = 0;
    for (const auto& e : dom) k.sample_domain.push_back(num(e, path + "/sample_domain/" + std::to_string(i++)));
    if (n["noise"] && !n["noise"].IsNull()) k.noise = num(n["noise"], path + "/noise");
    if (n["initial"] && !n["initial"].IsNull()) k.initial = num(n["initial"], path + "/initial");
    if (n["terms"] && n["branches"]) bad(path, "give either terms or branches");
    if (n["branches"] && !n["branches"].IsNull()) {
        if (!n["branches"].IsSequence()) bad(path + "/branches", "expected a list");
        std::size_t b = 0;
        for (const auto& e : n["branches"]) {
            std::string p = path + "/branches/" + std::to_string(b++);
            if (!e.IsMap()) bad(p, "expected {weight, terms}");
            check_keys(e, {"weight", "terms"}, p);
            if (!e["weight"]) bad(p + "/weight", "missing");
            k.branches.push_back({num(e["weight"], p + "/weight"), parse_terms(e["terms"], p + "/terms")});
        }
    } else if (k.type != KernelType::Uniform) {
        k.branches.push_back({1.0, parse_terms(n["terms"], path + "/terms")});
    } else if (n["terms"] && !n["terms"].IsNull()) {
        bad(path + "/terms", "a uniform kernel takes no terms");
    }
    if (n["cap"] && !n["cap"].IsNull()) k.cap = parse_terms(n["cap"], path + "/cap");
    return k;
}

// ---- YAML writing

void emit_var_map(YAML::Emitter& out, const std::vector<LaggedName>& vars) {
    std::map<int, std::vector<std::string>> by_lag;
    for (const auto& v : vars) by_lag[v.lag].push_back(v.name);
    out << YAML::BeginMap;
    for (const auto& [lag, names] : by_lag) {
        out << YAML::Key << lag << YAML::Value;
        if (names.size() == 1)
            out << names[0];
        else
            out << YAML::Flow << names;
    }
    out << YAML::EndMap;
}

void emit_terms(YAML::Emitter& out, const std::vector<Term>& terms) {
    if (terms.empty()) {
        out << YAML::Null;
        return;
    }
    out << YAML::BeginSeq;
    for (const auto& t : terms) {
        out << YAML::BeginMap;
        out << YAML::Key << "intercept" << YAML::Value << fmt(t.intercept);
        out << YAML::Key << "indicators" << YAML::Value;
        if (t.indicators.empty()) {
            out << YAML::Null;
        } else {
            out << YAML::BeginSeq;
            for (const auto& ind : t.indicators) {
                out << YAML::BeginMap << YAML::Key << "left" << YAML::Value;
                emit_var_map(out, {ind.lhs});
                out << YAML::Key << "op" << YAML::Value << std::string(1, ind.op);
                out << YAML::Key << "right" << YAML::Value;
                if (ind.rhs)
                    emit_var_map(out, {*ind.rhs});
                else
                    out << fmt(ind.constant);
                out << YAML::EndMap;
            }
            out << YAML::EndSeq;
        }
        out << YAML::Key << "value" << YAML::Value << fmt(t.value);
        out << YAML::Key << "variable" << YAML::Value;
        if (t.variables.empty())
            out << YAML::Null;
        else
            emit_var_map(out, t.variables);
        out << YAML::EndMap;
    }
    out << YAML::EndSeq;
}

// ---- sampling

double snap(const std::vector<double>& dom, double x) {
    // nearest domain value, ties to the lower one
    auto it = std::lower_bound(dom.begin(), dom.end(), x);
    if (it == dom.begin()) return dom.front();
    if (it == dom.end()) return dom.back();
    double hi = *it, lo = *(it - 1);
    return (hi - x < x - lo) ? hi : lo;
}

double floor_in(const std::vector<double>& dom, double x) {
    auto it = std::upper_bound(dom.begin(), dom.end(), x + 1e-9);
    return it == dom.begin() ? dom.front() : *(it - 1);
}

double eval_terms(const std::vector<Compiled::CTerm>& terms, const History& h) {
    double sum = 0;
    for (const auto& t : terms) {
        bool on = true;
        for (const auto& ind : t.inds) {
            double l = h.at(ind.lhs.lag, ind.lhs.v);
            double r = ind.has_rhs ? h.at(ind.rhs.lag, ind.rhs.v) : ind.constant;
            if (!(ind.op == '<' ? l < r : l > r)) {
                on = false;
                break;
            }
        }
        if (!on) continue;
        double prod = 1;
        for (const auto& v : t.vars) prod *= h.at(v.lag, v.v);
        sum += t.intercept + t.value * prod;
    }
    return sum;
}

double sample(const Compiled::CKernel& k, const History& h, CounterRng& rng) {
    double x;
    if (k.type == KernelType::Uniform || rng.uniform() < k.noise) {
        x = k.domain[rng.below(k.domain.size())];
    } else {
        std::size_t b = k.branches.size() == 1 ? 0 : rng.categorical(k.weights);
        double s = eval_terms(k.branches[b], h);
        if (k.type == KernelType::Linear) {
            x = snap(k.domain, s);
        } else {
            double lambda = std::exp(s);
            x = snap(k.domain, static_cast<double>(rng.poisson(lambda)));
        }
    }
    if (k.has_cap) x = floor_in(k.domain, std::min(x, eval_terms(k.cap, h)));
    return x;
}

}  // namespace

SimSpec::SimSpec(std::vector<SimVertex> vertices, int burn_in)
    : vertices_(std::move(vertices)), burn_in_(burn_in) {
    if (burn_in_ < 0) throw SchemaError("burn_in: must be non-negative");
    if (vertices_.empty()) throw SchemaError("/: a spec needs at least one vertex");
    const std::size_t n = vertices_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = vertices_[i];
        if (!valid_name(v.name)) bad("/" + v.name, "invalid vertex name");
        for (std::size_t j = 0; j < i; ++j)
            if (vertices_[j].name == v.name) bad("/" + v.name, "duplicate vertex");
    }
    auto comp = std::make_shared<Compiled>();
    std::vector<std::vector<std::size_t>> lag0_children(n);
    std::vector<int> indeg(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& v = vertices_[i];
        const auto& k = v.kernel;
        const std::string path = "/" + v.name;
        if (k.sample_domain.empty()) bad(path + "/kernel/sample_domain", "must be non-empty");
        for (double x : k.sample_domain)
            if (!std::isfinite(x)) bad(path + "/kernel/sample_domain", "values must be finite");
        if (!(k.noise >= 0 && k.noise <= 1)) bad(path + "/kernel/noise", "must lie in [0,1]");
        if (k.type == KernelType::Uniform && !k.branches.empty())
            bad(path + "/kernel/terms", "a uniform kernel takes no terms");
        if (k.type != KernelType::Uniform) {
            if (k.branches.empty()) bad(path + "/kernel/terms", "missing");
            double tot = 0;
            for (const auto& b : k.branches) {
                if (!(b.weight >= 0)) bad(path + "/kernel/branches", "weights must be non-negative");
                tot += b.weight;
            }
            if (!(tot > 0)) bad(path + "/kernel/branches", "weights must not all be zero");
        }
        for (const auto& [lag, names] : v.dependencies) {
            std::string dp = path + "/dependencies/" + std::to_string(lag);
            if (lag < 0) bad(dp, "lags must be non-negative");
            for (const auto& d : names) {
                auto j = find(d);
                if (!j) bad(dp, "undeclared parent '" + d + "'");
                if (lag == 0) {
                    if (*j == i) bad(dp, "'" + d + "' depends on itself at lag 0");
                    lag0_children[*j].push_back(i);
                    ++indeg[i];
                }
                max_lag_ = std::max(max_lag_, lag);
            }
        }
        auto declared = [&](const LaggedName& x, const std::string& p) {
            auto it = v.dependencies.find(x.lag);
            if (it == v.dependencies.end() ||
                std::find(it->second.begin(), it->second.end(), x.name) == it->second.end())
                bad(p, "'" + x.name + "' at lag " + std::to_string(x.lag) + " is not a declared dependency");
            return Compiled::Var{x.lag, index(x.name)};
        };
        auto compile_terms = [&](const std::vector<Term>& terms, const std::string& p) {
            std::vector<Compiled::CTerm> out;
            for (std::size_t ti = 0; ti < terms.size(); ++ti) {
                const auto& t = terms[ti];
                std::string tp = p + "/" + std::to_string(ti);
                Compiled::CTerm c{t.intercept, t.value, {}, {}};
                for (const auto& x : t.variables) c.vars.push_back(declared(x, tp + "/variable"));
                for (const auto& ind : t.indicators) {
                    if (ind.op != '<' && ind.op != '>') bad(tp + "/indicators", "operator must be < or >");
                    Compiled::Ind ci{declared(ind.lhs, tp + "/indicators"), ind.op, ind.rhs.has_value(), {0, 0},
                                     ind.constant};
                    if (ind.rhs) ci.rhs = declared(*ind.rhs, tp + "/indicators");
                    c.inds.push_back(ci);
                }
                out.push_back(std::move(c));
            }
            return out;
        };
        Compiled::CKernel ck;
        ck.type = k.type;
        ck.domain = k.sample_domain;
        std::sort(ck.domain.begin(), ck.domain.end());
        ck.domain.erase(std::unique(ck.domain.begin(), ck.domain.end()), ck.domain.end());
        ck.noise = k.noise;
        for (std::size_t b = 0; b < k.branches.size(); ++b) {
            ck.weights.push_back(k.branches[b].weight);
            std::string bp = path + "/kernel/" +
                             (k.branches.size() == 1 ? std::string("terms") : "branches/" + std::to_string(b) + "/terms");
            ck.branches.push_back(compile_terms(k.branches[b].terms, bp));
        }
        ck.has_cap = k.cap.has_value();
        if (k.cap) ck.cap = compile_terms(*k.cap, path + "/kernel/cap");
        comp->kernels.push_back(std::move(ck));
    }
    // lag-0 topological order, declaration order among ready vertices
    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
    for (std::size_t i = 0; i < n; ++i)
        if (!indeg[i]) ready.push(i);
    while (!ready.empty()) {
        std::size_t i = ready.top();
        ready.pop();
        order_.push_back(i);
        for (std::size_t c : lag0_children[i])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (order_.size() != n) throw SchemaError("/: lag-0 dependencies contain a cycle");
    compiled_ = std::move(comp);
}

std::optional<std::size_t> SimSpec::find(std::string_view name) const {
    for (std::size_t i = 0; i < vertices_.size(); ++i)
        if (vertices_[i].name == name) return i;
    return std::nullopt;
}

std::size_t SimSpec::index(std::string_view name) const {
    auto i = find(name);
    if (!i) throw SchemaError("/" + std::string(name) + ": no such vertex");
    return *i;
}

double SimSpec::initial_value(std::size_t v) const {
    const auto& k = vertices_.at(v).kernel;
    if (k.initial) return *k.initial;
    const auto& dom = compiled_->kernels[v].domain;
    return dom[(dom.size() - 1) / 2];
}

SimSpec SimSpec::with_vertex(SimVertex v) const {
    auto vs = vertices_;
    vs.at(index(v.name)) = std::move(v);
    return SimSpec(std::move(vs), burn_in_);
}

SimSpec parse_spec(std::string_view yaml_text) {
    YAML::Node root;
    try {
        root = YAML::Load(std::string(yaml_text));
    } catch (const YAML::Exception& e) {
        throw SchemaError("/: malformed YAML: " + std::string(e.what()));
    }
    if (!root.IsMap()) throw SchemaError("/: expected a map of vertices");
    std::vector<SimVertex> vs;
    for (const auto& kv : root) {
        SimVertex v;
        v.name = kv.first.Scalar();
        const std::string path = "/" + v.name;
        const auto& body = kv.second;
        if (!body.IsMap()) bad(path, "expected {kernel, dependencies}");
        check_keys(body, {"kernel", "dependencies"}, path);
        v.kernel = parse_kernel(body["kernel"], path + "/kernel");
        const auto& deps = body["dependencies"];
        if (deps && !deps.IsNull()) {
            if (!deps.IsMap()) bad(path + "/dependencies", "expected a map from lag to names");
            for (const auto& d : deps) {
                std::string dp = path + "/dependencies/" + d.first.Scalar();
                int lag = lag_of(d.first, dp);
                auto& list = v.dependencies[lag];
                if (d.second.IsSequence()) {
                    std::size_t i = 0;
                    for (const auto& e : d.second) list.push_back(name_of(e, dp + "/" + std::to_string(i++)));
                } else {
                    list.push_back(name_of(d.second, dp));
                }
            }
        }
        vs.push_back(std::move(v));
    }
    return SimSpec(std::move(vs));
}

std::string to_yaml(const SimSpec& spec) {
    YAML::Emitter out;
    out << YAML::BeginMap;
    for (const auto& v : spec.vertices()) {
        const auto& k = v.kernel;
        out << YAML::Key << v.name << YAML::Value << YAML::BeginMap;
        out << YAML::Key << "kernel" << YAML::Value << YAML::BeginMap;
        const char* type = k.type == KernelType::Uniform ? "uniform" : k.type == KernelType::Linear ? "linear" : "poisson";
        out << YAML::Key << "type" << YAML::Value << YAML::DoubleQuoted << type;
        out << YAML::Key << "sample_domain" << YAML::Value << YAML::Flow << YAML::BeginSeq;
        for (double x : k.sample_domain) out << fmt(x);
        out << YAML::EndSeq;
        if (k.type != KernelType::Uniform) out << YAML::Key << "noise" << YAML::Value << fmt(k.noise);
        if (k.initial) out << YAML::Key << "initial" << YAML::Value << fmt(*k.initial);
        if (k.branches.size() == 1 && k.branches[0].weight == 1) {
            out << YAML::Key << "terms" << YAML::Value;
            emit_terms(out, k.branches[0].terms);
        } else if (k.branches.empty()) {
            out << YAML::Key << "terms" << YAML::Value << YAML::Null;
        } else {
            out << YAML::Key << "branches" << YAML::Value << YAML::BeginSeq;
            for (const auto& b : k.branches) {
                out << YAML::BeginMap << YAML::Key << "weight" << YAML::Value << fmt(b.weight);
                out << YAML::Key << "terms" << YAML::Value;
                emit_terms(out, b.terms);
                out << YAML::EndMap;
            }
            out << YAML::EndSeq;
        }
        if (k.cap) {
            out << YAML::Key << "cap" << YAML::Value;
            emit_terms(out, *k.cap);
        }
        out << YAML::EndMap;
        out << YAML::Key << "dependencies" << YAML::Value;
        if (v.dependencies.empty()) {
            out << YAML::Null;
        } else {
            out << YAML::BeginMap;
            for (const auto& [lag, names] : v.dependencies) out << YAML::Key << lag << YAML::Value << YAML::Flow << names;
            out << YAML::EndMap;
        }
        out << YAML::EndMap;
    }
    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

double Episode::at(int t, std::string_view name) const {
    if (t < 1 || t > horizon) throw InvalidTimes("episode period " + std::to_string(t));
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values[static_cast<std::size_t>(t - 1)][i];
    throw SchemaError("/" + std::string(name) + ": no such vertex");
}

Episode run_episode(const SimSpec& spec, int horizon, std::uint64_t seed, std::uint64_t index,
                    const Intervention* g) {
    if (horizon < 0) throw InvalidHorizon("negative horizon");
    const auto& comp = spec.compiled();
    const std::size_t n = spec.vertices().size();
    const std::size_t pre = static_cast<std::size_t>(spec.max_lag());
    const std::size_t first = pre + static_cast<std::size_t>(spec.burn_in());
    const std::size_t rows_n = first + static_cast<std::size_t>(horizon);
    std::vector<std::vector<double>> rows(rows_n, std::vector<double>(n, 0.0));
    for (std::size_t r = 0; r < pre; ++r)
        for (std::size_t v = 0; v < n; ++v) rows[r][v] = spec.initial_value(v);

    std::vector<bool> intervened(n, false);
    std::size_t trigger = n;
    if (g) {
        for (std::size_t v : g->vertices) intervened.at(v) = true;
        for (std::size_t v : spec.order())
            if (intervened[v]) {
                trigger = v;
                break;
            }
    }
    std::vector<double> chosen;
    for (std::size_t r = pre; r < rows_n; ++r) {
        const History h(rows, r);
        const bool active = g && r >= first;
        for (std::size_t v : spec.order()) {
            if (active && intervened[v]) {
                if (v == trigger) {
                    CounterRng rng(seed, index, r, 0x100000000ULL + v);
                    chosen.assign(g->vertices.size(), 0.0);
                    g->choose(h, rng.uniform(), chosen);
                    for (std::size_t i = 0; i < g->vertices.size(); ++i) rows[r][g->vertices[i]] = chosen[i];
                }
                continue;
            }
            CounterRng rng(seed, index, r, v);
            rows[r][v] = sample(comp.kernels[v], h, rng);
        }
    }
    Episode ep;
    for (const auto& v : spec.vertices()) ep.names.push_back(v.name);
    ep.values.assign(rows.begin() + static_cast<std::ptrdiff_t>(first), rows.end());
    ep.horizon = horizon;
    ep.seed = seed;
    ep.index = index;
    return ep;
}

std::vector<Episode> run_episodes(const SimSpec& spec, int episodes, int horizon, std::uint64_t seed,
                                  int threads, const Intervention* g) {
    if (episodes < 0) throw InvalidParams("negative episode count");
    std::vector<Episode> out(static_cast<std::size_t>(episodes));
    const int workers = std::max(1, std::min(threads, episodes));
    auto work = [&](int w) {
        for (int e = w; e < episodes; e += workers)
            out[static_cast<std::size_t>(e)] = run_episode(spec, horizon, seed, static_cast<std::uint64_t>(e), g);
    };
    if (workers == 1) {
        work(0);
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
        for (auto& t : pool) t.join();
    }
    return out;
}

std::string episodes_csv(const std::vector<Episode>& eps) {
    std::string out = "episode,seed,t";
    if (!eps.empty())
        for (const auto& n : eps[0].names) out += "," + n;
    out += "\n";
    for (const auto& e : eps)
        for (int t = 1; t <= e.horizon; ++t) {
            out += std::to_string(e.index) + "," + std::to_string(e.seed) + "," + std::to_string(t);
            for (double x : e.values[static_cast<std::size_t>(t - 1)]) out += "," + fmt(x);
            out += "\n";
        }
    return out;
}

RolledTemplate dependency_template(const SimSpec& spec, const std::set<std::string>& latent,
                                   const std::vector<std::string>& actions) {
    std::vector<TemplateVertex> period;
    for (std::size_t v : spec.order()) {
        const auto& name = spec.vertices()[v].name;
        bool act = std::find(actions.begin(), actions.end(), name) != actions.end();
        period.push_back({name, latent.count(name) > 0, act});
    }
    std::vector<TemplateEdge> edges;
    for (const auto& v : spec.vertices())
        for (const auto& [lag, names] : v.dependencies) {
            std::set<std::string> seen;
            for (const auto& d : names)
                if (seen.insert(d).second) edges.push_back({d, lag, v.name, EdgeType::Directed});
        }
    return RolledTemplate(std::move(period), std::move(edges));
}

}  // namespace cpid
