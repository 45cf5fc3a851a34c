#include "cpid/gformula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "cpid/errors.hpp"
#include "cpid/identify.hpp"
#include "cpid/text.hpp"

namespace cpid {

namespace {

// Walks a mixed-radix space keeping several linear indices in step.
class Odometer {
public:
    Odometer(std::vector<std::size_t> card, std::vector<std::vector<std::size_t>> strides)
        : card_(std::move(card)), strides_(std::move(strides)), digits_(card_.size(), 0),
          index_(strides_.size(), 0) {}

    bool next() {
        for (std::size_t i = card_.size(); i-- > 0;) {
            if (++digits_[i] < card_[i]) {
                for (std::size_t k = 0; k < strides_.size(); ++k) index_[k] += strides_[k][i];
                return true;
            }
            for (std::size_t k = 0; k < strides_.size(); ++k)
                index_[k] -= (card_[i] - 1) * strides_[k][i];
            digits_[i] = 0;
        }
        return false;
    }
    std::size_t index(std::size_t k) const { return index_[k]; }
    const std::vector<std::size_t>& digits() const { return digits_; }

private:
    std::vector<std::size_t> card_;
    std::vector<std::vector<std::size_t>> strides_;
    std::vector<std::size_t> digits_;
    std::vector<std::size_t> index_;
};

std::vector<std::size_t> cards(const std::vector<Variable>& vars) {
    std::vector<std::size_t> c;
    for (const auto& v : vars) c.push_back(v.values.size());
    return c;
}

std::vector<std::size_t> row_major(const std::vector<std::size_t>& card) {
    std::vector<std::size_t> s(card.size(), 1);
    for (std::size_t i = card.size(); i-- > 1;) s[i - 1] = s[i] * card[i];
    return s;
}

// Strides that map a walk over `outer` onto a table over `inner` (a subset by name).
std::vector<std::size_t> projection(const std::vector<Variable>& outer,
                                    const std::vector<Variable>& inner) {
    auto s = row_major(cards(inner));
    std::vector<std::size_t> out(outer.size(), 0);
    for (std::size_t i = 0; i < inner.size(); ++i) {
        bool found = false;
        for (std::size_t j = 0; j < outer.size(); ++j)
            if (outer[j].name == inner[i].name) {
                out[j] = s[i];
                found = true;
            }
        if (!found) throw InvalidDistribution("variable " + inner[i].name + " missing from table");
    }
    return out;
}

std::string fmt(double x) {
    std::ostringstream os;
    os.precision(17);
    os << x;
    return os.str();
}

}  // namespace

std::size_t domain_cells(const std::vector<Variable>& vars) {
    std::size_t n = 1;
    for (const auto& v : vars) {
        if (v.values.empty()) throw InvalidDistribution("variable " + v.name + " has an empty domain");
        if (n > std::numeric_limits<std::size_t>::max() / v.values.size() / 2)
            throw DomainTooLarge("joint domain overflows");
        n *= v.values.size();
    }
    return n;
}

TabularDistribution::TabularDistribution(std::vector<Variable> vars, std::vector<double> probs,
                                         double tol)
    : vars_(std::move(vars)), probs_(std::move(probs)) {
    std::set<std::string> seen;
    for (const auto& v : vars_) {
        if (!seen.insert(v.name).second) throw InvalidDistribution("duplicate variable " + v.name);
        std::set<double> vals(v.values.begin(), v.values.end());
        if (vals.size() != v.values.size())
            throw InvalidDistribution("repeated value in the domain of " + v.name);
    }
    if (probs_.size() != domain_cells(vars_))
        throw InvalidDistribution("table has " + std::to_string(probs_.size()) + " cells, domain needs " +
                                  std::to_string(domain_cells(vars_)));
    double total = 0;
    for (double p : probs_) {
        if (!(p >= 0 && p <= 1 + tol)) throw InvalidDistribution("probability outside [0,1]: " + fmt(p));
        total += p;
    }
    if (std::abs(total - 1) > tol) throw InvalidDistribution("probabilities sum to " + fmt(total));
}

TabularDistribution TabularDistribution::from_weights(std::vector<Variable> vars, std::vector<double> w) {
    double total = 0;
    for (double x : w) {
        if (!(x >= 0)) throw InvalidDistribution("negative weight");
        total += x;
    }
    if (!(total > 0)) throw InvalidDistribution("weights have no mass");
    for (double& x : w) x /= total;
    return TabularDistribution(std::move(vars), std::move(w), 1e-9);
}

std::optional<std::size_t> TabularDistribution::find(const std::string& name) const {
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (vars_[i].name == name) return i;
    return std::nullopt;
}

std::size_t TabularDistribution::index(const std::string& name) const {
    if (auto i = find(name)) return *i;
    throw InvalidDistribution("distribution has no variable " + name);
}

std::vector<std::size_t> TabularDistribution::digits(std::size_t cell) const {
    std::vector<std::size_t> d(vars_.size());
    for (std::size_t i = vars_.size(); i-- > 0;) {
        d[i] = cell % vars_[i].values.size();
        cell /= vars_[i].values.size();
    }
    return d;
}

std::size_t TabularDistribution::cell(const std::vector<std::size_t>& digits) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < vars_.size(); ++i) c = c * vars_[i].values.size() + digits.at(i);
    return c;
}

TabularDistribution TabularDistribution::marginal(const std::vector<std::string>& names) const {
    std::vector<Variable> sub;
    for (const auto& n : names) sub.push_back(vars_[index(n)]);
    std::vector<double> out(domain_cells(sub), 0.0);
    Odometer it(cards(vars_), {projection(vars_, sub)});
    std::size_t c = 0;
    do {
        out[it.index(0)] += probs_[c++];
    } while (it.next());
    TabularDistribution d;
    d.vars_ = std::move(sub);
    d.probs_ = std::move(out);
    return d;
}

TabularDistribution TabularDistribution::reorder(const std::vector<std::string>& names) const {
    if (names.size() != vars_.size()) throw InvalidDistribution("reorder needs every variable");
    return marginal(names);
}

double TabularDistribution::max_abs_diff(const TabularDistribution& other) const {
    std::vector<std::string> names;
    for (const auto& v : vars_) names.push_back(v.name);
    TabularDistribution o = other.reorder(names);
    for (std::size_t i = 0; i < vars_.size(); ++i)
        if (o.vars_[i].values != vars_[i].values)
            throw InvalidDistribution("domains of " + vars_[i].name + " differ");
    double m = 0;
    for (std::size_t i = 0; i < probs_.size(); ++i) m = std::max(m, std::abs(probs_[i] - o.probs_[i]));
    return m;
}

Policy null_policy(int horizon) {
    Policy g;
    g.rules.resize(static_cast<std::size_t>(std::max(horizon, 0)));
    return g;
}

namespace {

std::vector<std::string> state_names(const DecisionProcess& p, int t) {
    return p.graph().names(p.state(t));
}

std::vector<std::string> names_of(const DecisionProcess& p, const VertexSet& s) {
    return p.graph().names(s);
}

std::vector<Variable> vars_of(const TabularDistribution& d, const std::vector<std::string>& names) {
    std::vector<Variable> out;
    for (const auto& n : names) out.push_back(d.variables()[d.index(n)]);
    return out;
}

}  // namespace

DecisionRule deterministic_rule(const TabularDistribution& domains, const DecisionProcess& p, int t,
                                const std::function<double(const std::vector<double>&)>& choose) {
    DecisionRule r;
    r.natural = false;
    r.state = state_names(p, t);
    r.action = p.graph().name(p.action(t));
    auto svars = vars_of(domains, r.state);
    const auto& avals = domains.variables()[domains.index(r.action)].values;
    const std::size_t ns = domain_cells(svars);
    r.probs.assign(ns * avals.size(), 0.0);
    Odometer it(cards(svars), {});
    std::size_t s = 0;
    do {
        std::vector<double> vals;
        for (std::size_t i = 0; i < svars.size(); ++i) vals.push_back(svars[i].values[it.digits()[i]]);
        double a = choose(vals);
        auto pos = std::find(avals.begin(), avals.end(), a);
        if (pos == avals.end()) throw InvalidParams("rule chose " + fmt(a) + ", outside the domain of " + r.action);
        r.probs[s * avals.size() + static_cast<std::size_t>(pos - avals.begin())] = 1.0;
        ++s;
    } while (it.next());
    return r;
}

DecisionRule observed_rule(const TabularDistribution& P, const DecisionProcess& p, int t) {
    DecisionRule r;
    r.natural = false;
    r.state = state_names(p, t);
    r.action = p.graph().name(p.action(t));
    std::vector<std::string> joint = r.state;
    joint.push_back(r.action);
    TabularDistribution m = P.marginal(joint);
    const std::size_t na = m.variables().back().values.size();
    r.probs = m.probs();
    for (std::size_t s = 0; s * na < r.probs.size(); ++s) {
        double tot = 0;
        for (std::size_t a = 0; a < na; ++a) tot += r.probs[s * na + a];
        for (std::size_t a = 0; a < na; ++a)
            r.probs[s * na + a] = tot > 0 ? r.probs[s * na + a] / tot : 1.0 / static_cast<double>(na);
    }
    return r;
}

Utility Utility::discounted(double gamma) {
    if (!(gamma > 0 && gamma < 1)) throw InvalidParams("discount factor must lie strictly inside (0,1)");
    Utility u;
    u.kind = Kind::Discounted;
    u.gamma = gamma;
    return u;
}

Utility Utility::constant(double c) {
    Utility u;
    u.kind = Kind::Table;
    u.table = {c};
    return u;
}

std::vector<std::string> joint_variables(const DecisionProcess& p) {
    std::vector<std::string> out;
    for (int t = 1; t <= p.horizon() + 1; ++t) {
        for (const auto& n : names_of(p, p.innovation(t))) out.push_back(n);
        if (t <= p.horizon()) out.push_back(p.graph().name(p.action(t)));
    }
    return out;
}

namespace {

void check_preconditions(const TabularDistribution& P, const DecisionProcess& p, const Policy& g,
                         const GFormulaOptions& opt) {
    if (!opt.unsafe && static_cast<int>(g.rules.size()) == p.horizon()) {
        // A natural decision downstream of an intervention only follows
        // P(a_t | s_t) when nothing outside S_t drives it.
        int first = p.horizon() + 1;
        for (int t = p.horizon(); t >= 1; --t)
            if (!g.at(t).natural) first = t;
        Verdict rd = check_randomized_decisions(p);
        for (const auto& v : rd.violations)
            if (v.t > first && g.at(v.t).natural)
                throw PreconditionFailed("decision " + p.graph().name(p.action(v.t)) +
                                         " is left natural after an intervention but is confounded (" +
                                         v.witness + "); pass unsafe to force");
    }
    if (!opt.unsafe) {
        IdentReport r = identify(p);
        if (!r.identified()) {
            std::string failed;
            for (const Verdict* v : {&r.nested, &r.memoryless, &r.unconfounded})
                if (!v->pass) failed += (failed.empty() ? "" : ", ") + v->name;
            throw PreconditionFailed("identification checks fail (" + failed + "); pass unsafe to force");
        }
    }
    for (int t = 1; t <= p.horizon(); ++t)
        for (Vertex r : p.reward(t))
            if (!p.state(t).count(r))
                throw PreconditionFailed("reward " + p.graph().name(r) + " at t=" + std::to_string(t) +
                                         " is not in the state; only final-reward processes may leave "
                                         "intermediate rewards out");
    if (P.cells() > opt.max_cells) throw DomainTooLarge("distribution exceeds the cell cap");
    for (int t = 1; t <= p.horizon(); ++t)
        for (Vertex s : p.state(t))
            P.index(p.graph().name(s));
}

void check_rule(const DecisionRule& r, const TabularDistribution& P, const DecisionProcess& p, int t) {
    if (r.natural) return;
    auto want = state_names(p, t);
    auto got = r.state;
    std::sort(want.begin(), want.end());
    std::sort(got.begin(), got.end());
    if (want != got) throw InvalidDistribution("rule at t=" + std::to_string(t) + " conditions on the wrong state");
    if (r.action != p.graph().name(p.action(t)))
        throw InvalidDistribution("rule at t=" + std::to_string(t) + " names action " + r.action);
    const std::size_t na = P.variables()[P.index(r.action)].values.size();
    if (r.probs.size() != domain_cells(vars_of(P, r.state)) * na)
        throw InvalidDistribution("rule at t=" + std::to_string(t) + " has the wrong table size");
    for (std::size_t s = 0; s * na < r.probs.size(); ++s) {
        double tot = 0;
        for (std::size_t a = 0; a < na; ++a) {
            double x = r.probs[s * na + a];
            if (!(x >= 0 && x <= 1 + 1e-9)) throw InvalidDistribution("rule probability outside [0,1]");
            tot += x;
        }
        if (std::abs(tot - 1) > 1e-9)
            throw InvalidDistribution("rule at t=" + std::to_string(t) + " does not sum to one");
    }
}

// One multiplicative term of the product, looked up from a walk over `scope`.
struct Term {
    std::vector<double> num;
    std::vector<double> den;  // empty when not a ratio
    std::vector<std::size_t> num_stride, den_stride;
    std::string what;
};

// P(targets | given) as a ratio of two marginals.
Term conditional(const TabularDistribution& P, const std::vector<std::string>& targets,
                 const std::vector<std::string>& given, const std::vector<Variable>& scope,
                 std::string what) {
    std::vector<std::string> all = given;
    all.insert(all.end(), targets.begin(), targets.end());
    TabularDistribution num = P.marginal(all);
    TabularDistribution den = P.marginal(given);
    Term t;
    t.num = num.probs();
    t.den = den.probs();
    t.num_stride = projection(scope, num.variables());
    t.den_stride = projection(scope, den.variables());
    t.what = std::move(what);
    return t;
}

Term policy_term(const DecisionRule& r, const TabularDistribution& P, const std::vector<Variable>& scope) {
    std::vector<std::string> names = r.state;
    names.push_back(r.action);
    Term t;
    t.num = r.probs;
    t.num_stride = projection(scope, vars_of(P, names));
    return t;
}

std::string describe_cell(const std::vector<Variable>& scope, const std::vector<std::size_t>& d,
                          const std::vector<std::size_t>& den_stride) {
    std::string out;
    for (std::size_t i = 0; i < scope.size(); ++i)
        if (den_stride[i]) out += (out.empty() ? "" : ", ") + scope[i].name + "=" + fmt(scope[i].values[d[i]]);
    return out.empty() ? "(empty)" : out;
}

void check_strict(const TabularDistribution& P, const DecisionProcess& p) {
    for (int t = 1; t <= p.horizon(); ++t) {
        auto names = state_names(p, t);
        names.push_back(p.graph().name(p.action(t)));
        for (double x : P.marginal(names).probs())
            if (!(x > 0))
                throw PositivityViolation("P(" + names.back() + " | S_" + std::to_string(t) +
                                          ") is not strictly positive");
    }
}

// Terms of the step at time t: the innovation kernel and, for t <= T, the rule.
std::vector<Term> step_terms(const TabularDistribution& P, const DecisionProcess& p, const Policy& g,
                             int t, const std::vector<Variable>& scope) {
    std::vector<Term> terms;
    std::vector<std::string> given;
    if (t > 1) {
        given.push_back(p.graph().name(p.action(t - 1)));
        for (const auto& n : state_names(p, t - 1)) given.push_back(n);
    }
    auto innov = names_of(p, p.innovation(t));
    if (!innov.empty())
        terms.push_back(conditional(P, innov, given, scope, "N_" + std::to_string(t)));
    if (t <= p.horizon()) {
        const DecisionRule& r = g.at(t);
        if (r.natural)
            terms.push_back(conditional(P, {p.graph().name(p.action(t))}, state_names(p, t), scope,
                                        "A_" + std::to_string(t)));
        else
            terms.push_back(policy_term(r, P, scope));
    }
    return terms;
}

// Multiplies `terms` into `acc` cell by cell; zero weights short-circuit so
// positivity is only demanded where the policy reaches.
void apply_terms(std::vector<double>& acc, const std::vector<Variable>& scope,
                 const std::vector<Term>& terms, const std::vector<std::size_t>* extra_stride,
                 const std::vector<double>* extra, bool undefined_is_zero) {
    std::vector<std::vector<std::size_t>> strides;
    for (const auto& t : terms) {
        strides.push_back(t.num_stride);
        strides.push_back(t.den.empty() ? std::vector<std::size_t>(scope.size(), 0) : t.den_stride);
    }
    if (extra_stride) strides.push_back(*extra_stride);
    Odometer it(cards(scope), strides);
    std::size_t c = 0;
    do {
        double w = acc[c];
        if (extra && w > 0) w *= (*extra)[it.index(2 * terms.size())];
        for (std::size_t k = 0; k < terms.size() && w > 0; ++k) {
            const Term& t = terms[k];
            double n = t.num[it.index(2 * k)];
            if (t.den.empty()) {
                w *= n;
                continue;
            }
            double d = t.den[it.index(2 * k + 1)];
            if (!(d > 0) && undefined_is_zero) {
                w = 0;
                break;
            }
            if (!(d > 0))
                throw PositivityViolation("conditional for " + t.what + " is undefined at " +
                                          describe_cell(scope, it.digits(), t.den_stride) +
                                          ", which the policy reaches");
            w *= n / d;
        }
        acc[c++] = w;
    } while (it.next());
}

void prepare(const TabularDistribution& P, const DecisionProcess& p, const Policy& g,
             const GFormulaOptions& opt, std::vector<Variable>& out) {
    check_preconditions(P, p, g, opt);
    if (static_cast<int>(g.rules.size()) != p.horizon())
        throw InvalidDistribution("policy has " + std::to_string(g.rules.size()) + " rules for horizon " +
                                  std::to_string(p.horizon()));
    for (int t = 1; t <= p.horizon(); ++t) check_rule(g.at(t), P, p, t);
    out = vars_of(P, joint_variables(p));
    if (domain_cells(out) > opt.max_cells)
        throw DomainTooLarge("identified joint needs " + std::to_string(domain_cells(out)) +
                             " cells, above the cap of " + std::to_string(opt.max_cells));
    if (opt.strict_positivity) check_strict(P, p);
}

}  // namespace

TabularDistribution identify_joint(const TabularDistribution& P, const DecisionProcess& p,
                                   const Policy& g, const GFormulaOptions& opt) {
    std::vector<Variable> out;
    prepare(P, p, g, opt, out);
    std::vector<Term> terms;
    for (int t = 1; t <= p.horizon() + 1; ++t)
        for (auto& term : step_terms(P, p, g, t, out)) terms.push_back(std::move(term));
    std::vector<double> w(domain_cells(out), 1.0);
    apply_terms(w, out, terms, nullptr, nullptr, false);
    return TabularDistribution::from_weights(std::move(out), std::move(w));
}

TabularDistribution identify_joint_recursive(const TabularDistribution& P, const DecisionProcess& p,
                                             const Policy& g, const GFormulaOptions& opt) {
    std::vector<Variable> out;
    prepare(P, p, g, opt, out);
    // Walking backwards the past weight of a cell is unknown, so positivity is
    // left to the forward product; undefined conditionals count as zero here.
    const int T = p.horizon();
    // Q_{t}: law of (N_t.., A_t..) given (A_{t-1}, S_{t-1}); starts as the constant 1.
    std::vector<Variable> q_scope;
    std::vector<double> q{1.0};
    for (int t = T + 1; t >= 1; --t) {
        std::vector<std::string> names;
        if (t > 1) {
            names.push_back(p.graph().name(p.action(t - 1)));
            for (const auto& n : state_names(p, t - 1)) names.push_back(n);
        }
        for (const auto& n : names_of(p, p.innovation(t))) names.push_back(n);
        if (t <= T) names.push_back(p.graph().name(p.action(t)));
        for (const auto& v : q_scope)
            if (std::find(names.begin(), names.end(), v.name) == names.end()) names.push_back(v.name);
        std::vector<Variable> scope = vars_of(P, names);
        std::vector<double> next(domain_cells(scope), 1.0);
        auto stride = projection(scope, q_scope);
        apply_terms(next, scope, step_terms(P, p, g, t, scope), &stride, &q, true);
        q_scope = std::move(scope);
        q = std::move(next);
    }
    std::vector<std::string> order;
    for (const auto& v : out) order.push_back(v.name);
    return TabularDistribution::from_weights(q_scope, q).reorder(order);
}

double expected_utility(const TabularDistribution& joint, const DecisionProcess& p, const Utility& u) {
    const auto& vars = joint.variables();
    double total = 0;
    if (u.kind == Utility::Kind::Discounted) {
        std::vector<std::pair<std::size_t, double>> weights;  // variable, γ^t
        for (int t = 1; t <= p.horizon() + 1; ++t)
            for (Vertex r : p.reward(t)) {
                auto i = joint.find(p.graph().name(r));
                if (!i) throw PreconditionFailed("reward " + p.graph().name(r) + " is not in the joint");
                weights.emplace_back(*i, std::pow(u.gamma, t));
            }
        Odometer it(cards(vars), {});
        std::size_t c = 0;
        do {
            double v = 0;
            for (auto [i, w] : weights) v += w * vars[i].values[it.digits()[i]];
            total += joint.probs()[c++] * v;
        } while (it.next());
        return total;
    }
    std::vector<Variable> uv = vars_of(joint, u.vars);
    if (u.table.size() != domain_cells(uv)) throw InvalidDistribution("utility table has the wrong size");
    Odometer it(cards(vars), {projection(vars, uv)});
    std::size_t c = 0;
    do {
        total += joint.probs()[c++] * u.table[it.index(0)];
    } while (it.next());
    return total;
}

double policy_value(const TabularDistribution& P, const DecisionProcess& p, const Policy& g,
                    const Utility& u, const GFormulaOptions& opt) {
    return expected_utility(identify_joint(P, p, g, opt), p, u);
}

namespace {

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv parse_csv(const std::string& text) {
    Csv csv;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') continue;
        std::vector<std::string> cells;
        for (auto c : split(line, ',')) cells.emplace_back(trim(c));
        if (csv.header.empty()) {
            csv.header = std::move(cells);
            continue;
        }
        if (cells.size() != csv.header.size())
            throw ParseError("line " + std::to_string(line_no) + ": expected " +
                             std::to_string(csv.header.size()) + " fields");
        csv.rows.push_back(std::move(cells));
    }
    if (csv.header.empty()) throw ParseError("empty CSV");
    return csv;
}

double number(const std::string& s) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("not a number: '" + s + "'");
    }
}

std::size_t value_index(const Variable& v, double x) {
    auto it = std::find(v.values.begin(), v.values.end(), x);
    if (it == v.values.end()) throw InvalidDistribution(fmt(x) + " is outside the domain of " + v.name);
    return static_cast<std::size_t>(it - v.values.begin());
}

}  // namespace

TabularDistribution distribution_from_csv(const std::string& text) {
    Csv csv = parse_csv(text);
    if (csv.header.size() < 2 || (csv.header.back() != "p" && csv.header.back() != "prob"))
        throw ParseError("distribution CSV needs variable columns and a final p column");
    const std::size_t nv = csv.header.size() - 1;
    std::vector<std::set<double>> domains(nv);
    std::vector<std::vector<double>> parsed;
    for (const auto& row : csv.rows) {
        std::vector<double> r;
        for (std::size_t i = 0; i <= nv; ++i) r.push_back(number(row[i]));
        for (std::size_t i = 0; i < nv; ++i) domains[i].insert(r[i]);
        parsed.push_back(std::move(r));
    }
    std::vector<Variable> vars;
    for (std::size_t i = 0; i < nv; ++i)
        vars.push_back({csv.header[i], std::vector<double>(domains[i].begin(), domains[i].end())});
    std::vector<double> probs(domain_cells(vars), 0.0);
    std::vector<bool> filled(probs.size(), false);
    for (const auto& r : parsed) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < nv; ++i) c = c * vars[i].values.size() + value_index(vars[i], r[i]);
        if (filled[c]) throw InvalidDistribution("duplicate row in distribution CSV");
        filled[c] = true;
        probs[c] = r[nv];
    }
    return TabularDistribution(std::move(vars), std::move(probs));
}

std::string to_csv(const TabularDistribution& d) {
    std::string out;
    for (const auto& v : d.variables()) out += v.name + ",";
    out += "p\n";
    for (std::size_t c = 0; c < d.cells(); ++c) {
        if (d.probs()[c] == 0) continue;
        auto dg = d.digits(c);
        for (std::size_t i = 0; i < dg.size(); ++i) out += fmt(d.variables()[i].values[dg[i]]) + ",";
        out += fmt(d.probs()[c]) + "\n";
    }
    return out;
}

Policy policy_from_csv(const std::string& text, const TabularDistribution& domains,
                       const DecisionProcess& p) {
    Csv csv = parse_csv(text);
    if (csv.header.size() < 3 || csv.header.front() != "t" || csv.header.back() != "p")
        throw ParseError("policy CSV needs a leading t column and a final p column");
    Policy g = null_policy(p.horizon());
    std::vector<std::vector<bool>> filled(static_cast<std::size_t>(p.horizon()));
    for (const auto& row : csv.rows) {
        double tv = number(row.front());
        int t = static_cast<int>(tv);
        if (t != tv || t < 1 || t > p.horizon()) throw ParseError("bad decision time " + row.front());
        DecisionRule& r = g.rules[static_cast<std::size_t>(t - 1)];
        if (r.natural) {
            r.natural = false;
            r.state = state_names(p, t);
            r.action = p.graph().name(p.action(t));
            r.probs.assign(domain_cells(vars_of(domains, r.state)) *
                               domains.variables()[domains.index(r.action)].values.size(),
                           0.0);
            filled[static_cast<std::size_t>(t - 1)].assign(r.probs.size(), false);
        }
        std::map<std::string, double> vals;
        for (std::size_t i = 1; i + 1 < row.size(); ++i)
            if (!row[i].empty()) vals[csv.header[i]] = number(row[i]);
        std::vector<std::string> want = r.state;
        want.push_back(r.action);
        if (vals.size() != want.size())
            throw InvalidDistribution("policy row at t=" + std::to_string(t) + " must fill exactly S_t and A_t");
        std::size_t c = 0;
        for (const auto& n : want) {
            if (!vals.count(n)) throw InvalidDistribution("policy row at t=" + std::to_string(t) + " lacks " + n);
            const Variable& v = domains.variables()[domains.index(n)];
            c = c * v.values.size() + value_index(v, vals[n]);
        }
        auto& f = filled[static_cast<std::size_t>(t - 1)];
        if (f[c]) throw InvalidDistribution("duplicate policy row at t=" + std::to_string(t));
        f[c] = true;
        r.probs[c] = number(row.back());
    }
    for (int t = 1; t <= p.horizon(); ++t) {
        const DecisionRule& r = g.at(t);
        if (r.natural) continue;
        const std::size_t na = domains.variables()[domains.index(r.action)].values.size();
        const auto& f = filled[static_cast<std::size_t>(t - 1)];
        for (std::size_t s = 0; s * na < f.size(); ++s) {
            bool any = false;
            for (std::size_t a = 0; a < na; ++a) any = any || f[s * na + a];
            if (!any) throw InvalidDistribution("policy at t=" + std::to_string(t) + " misses a state");
        }
        check_rule(r, domains, p, t);
    }
    return g;
}

Utility utility_from_csv(const std::string& text, const TabularDistribution& domains) {
    Csv csv = parse_csv(text);
    if (csv.header.back() != "u") throw ParseError("utility CSV needs a final u column");
    Utility u;
    u.kind = Utility::Kind::Table;
    u.vars.assign(csv.header.begin(), csv.header.end() - 1);
    auto vars = vars_of(domains, u.vars);
    u.table.assign(domain_cells(vars), std::numeric_limits<double>::quiet_NaN());
    for (const auto& row : csv.rows) {
        std::size_t c = 0;
        for (std::size_t i = 0; i < vars.size(); ++i)
            c = c * vars[i].values.size() + value_index(vars[i], number(row[i]));
        u.table[c] = number(row.back());
    }
    for (double x : u.table)
        if (std::isnan(x)) throw InvalidDistribution("utility table misses a reward combination");
    return u;
}

nlohmann::json to_json(const TabularDistribution& d) {
    nlohmann::json j;
    j["variables"] = nlohmann::json::array();
    for (const auto& v : d.variables()) j["variables"].push_back({{"name", v.name}, {"values", v.values}});
    j["rows"] = nlohmann::json::array();
    for (std::size_t c = 0; c < d.cells(); ++c) {
        if (d.probs()[c] == 0) continue;
        auto dg = d.digits(c);
        std::vector<double> vals;
        for (std::size_t i = 0; i < dg.size(); ++i) vals.push_back(d.variables()[i].values[dg[i]]);
        j["rows"].push_back({{"values", vals}, {"p", d.probs()[c]}});
    }
    return j;
}

}  // namespace cpid
