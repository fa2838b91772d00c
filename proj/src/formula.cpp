#include "uecsp/formula.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "uecsp/modular.hpp"
#include "uecsp/rng.hpp"

namespace uecsp {

double DegreeProfile::mean() const {
    if (unassigned == 0) return 0.0;
    long double s = 0;
    for (std::size_t l = 0; l < by_degree.size(); ++l) s += static_cast<long double>(l) * by_degree[l];
    return static_cast<double>(s / unassigned);
}

std::size_t Assignment::count_assigned() const {
    std::size_t n = 0;
    for (auto v : value) n += (v >= 0);
    return n;
}

void Formula::add_clause_indexed(Clause c) {
    auto cid = static_cast<std::uint32_t>(clauses_.size());
    for (const Term& t : c.terms) {
        occ_[t.var].push_back(cid);
        degree_hist_[degree_[t.var]]--;
        degree_[t.var]++;
        if (degree_[t.var] >= degree_hist_.size()) degree_hist_.resize(degree_[t.var] + 1, 0);
        degree_hist_[degree_[t.var]]++;
    }
    len_count_[c.len()]++;
    alive_count_++;
    clauses_.push_back(std::move(c));
}

Formula Formula::random(std::uint32_t num_vars, std::uint32_t arity, double alpha,
                        std::uint32_t domain, std::uint64_t seed) {
    if (domain < 2) throw std::invalid_argument("formula: domain d must be >= 2");
    if (arity < 2) throw std::invalid_argument("formula: arity k must be >= 2");
    if (num_vars < arity) throw std::invalid_argument("formula: need N >= k");
    if (!(alpha >= 0.0) || !std::isfinite(alpha))
        throw std::invalid_argument("formula: alpha must be finite and >= 0");

    Formula f;
    f.domain_ = domain;
    f.num_vars_ = num_vars;
    f.arity_ = arity;
    f.occ_.resize(num_vars);
    f.degree_.assign(num_vars, 0);
    f.value_.assign(num_vars, -1);
    f.len_count_.assign(arity + 1, 0);
    f.degree_hist_.assign(1, num_vars);  // everyone starts at degree 0

    auto m = static_cast<std::uint64_t>(std::llround(alpha * num_vars));
    f.clauses_.reserve(m);

    Rng rng(seed);
    std::vector<std::uint32_t> vars(arity);
    for (std::uint64_t i = 0; i < m; ++i) {
        // k distinct uniform variables (k << N, rejection is cheap)
        for (std::uint32_t j = 0; j < arity; ++j) {
            std::uint32_t v;
            bool dup;
            do {
                v = static_cast<std::uint32_t>(rng.below(num_vars));
                dup = false;
                for (std::uint32_t l = 0; l < j; ++l) dup |= (vars[l] == v);
            } while (dup);
            vars[j] = v;
        }
        Clause c;
        c.terms.reserve(arity);
        for (std::uint32_t j = 0; j < arity; ++j) {
            std::uint32_t coef = 1;
            if (domain > 2) {
                do {
                    coef = 1 + static_cast<std::uint32_t>(rng.below(domain - 1));
                } while (!is_unit(coef, domain));
            }
            c.terms.push_back({vars[j], coef});
        }
        c.rhs = static_cast<std::uint32_t>(rng.below(domain));
        f.add_clause_indexed(std::move(c));
    }
    return f;
}

ClauseCounts Formula::counts() const {
    ClauseCounts cc;
    cc.by_len.assign(len_count_.begin(), len_count_.end());
    cc.by_len[0] = 0;  // markers are not live constraints
    cc.alive = alive_count_;
    cc.num_vars = num_vars_;
    return cc;
}

DegreeProfile Formula::degree_profile() const {
    DegreeProfile p;
    p.by_degree = degree_hist_;
    while (p.by_degree.size() > 1 && p.by_degree.back() == 0) p.by_degree.pop_back();
    p.unassigned = num_vars_ - assigned_count_;
    return p;
}

bool Formula::handshake_ok() const {
    unsigned long long lhs = 0, rhs = 0;
    for (std::size_t l = 1; l < degree_hist_.size(); ++l) lhs += l * degree_hist_[l];
    for (std::size_t j = 1; j < len_count_.size(); ++j) rhs += j * len_count_[j];
    return lhs == rhs;
}

ReductionReport Formula::reduce_by_assignment(std::uint32_t var, std::uint32_t val) {
    if (var >= num_vars_) throw std::invalid_argument("reduce: variable out of range");
    if (value_[var] >= 0) throw std::invalid_argument("reduce: variable already assigned");
    if (val >= domain_) throw std::invalid_argument("reduce: value out of domain");

    ReductionReport rep;
    value_[var] = static_cast<std::int32_t>(val);
    assigned_count_++;
    degree_hist_[degree_[var]]--;  // var leaves the unassigned profile entirely

    for (std::uint32_t cid : occ_[var]) {
        Clause& c = clauses_[cid];
        if (!c.alive || c.terms.empty()) continue;  // stale entry
        auto it = std::find_if(c.terms.begin(), c.terms.end(),
                               [var](const Term& t) { return t.var == var; });
        if (it == c.terms.end()) continue;

        auto old_len = static_cast<std::uint32_t>(c.len());
        c.rhs = mod_sub(c.rhs, mod_mul(it->coef, val, domain_), domain_);
        *it = c.terms.back();
        c.terms.pop_back();
        len_count_[old_len]--;
        std::uint32_t new_len = old_len - 1;

        if (new_len == 0) {
            alive_count_--;
            if (c.rhs == 0) {
                c.alive = false;
                rep.satisfied++;
            } else {
                // stays alive as a contradiction marker
                len_count_[0]++;
                contradiction_ = true;
                rep.contradiction = true;
            }
        } else {
            len_count_[new_len]++;
            if (new_len == 1) rep.new_units.push_back(cid);
        }
        rep.events.push_back({cid, new_len});
    }
    occ_[var].clear();
    degree_[var] = 0;
    return rep;
}

std::vector<std::pair<std::uint32_t, std::uint32_t>> Formula::remove_clause(std::uint32_t cid) {
    if (cid >= clauses_.size()) throw std::invalid_argument("remove_clause: id out of range");
    Clause& c = clauses_[cid];
    if (!c.alive || c.terms.empty()) throw std::invalid_argument("remove_clause: clause not alive");

    std::vector<std::pair<std::uint32_t, std::uint32_t>> affected;
    affected.reserve(c.len());
    for (const Term& t : c.terms) {
        degree_hist_[degree_[t.var]]--;
        degree_[t.var]--;
        degree_hist_[degree_[t.var]]++;
        affected.emplace_back(t.var, degree_[t.var]);
    }
    len_count_[c.len()]--;
    alive_count_--;
    c.alive = false;
    return affected;
}

Assignment Formula::current_assignment() const {
    Assignment a(num_vars_);
    a.value = value_;
    return a;
}

void Formula::serialize(std::ostream& out) const {
    out << domain_ << ' ' << num_vars_ << ' ' << alive_count_ << ' ' << arity_ << '\n';
    for (const Clause& c : clauses_) {
        if (!c.alive || c.terms.empty()) continue;
        out << c.len();
        for (const Term& t : c.terms) out << ' ' << t.var << ':' << t.coef;
        out << ' ' << c.rhs << '\n';
    }
}

std::string Formula::to_text() const {
    std::ostringstream os;
    serialize(os);
    return os.str();
}

Formula Formula::parse(std::istream& in) {
    // leading '#' lines are reproducibility comments, not part of the format
    while ((in >> std::ws) && in.peek() == '#') in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
    std::uint32_t d = 0, n = 0, k = 0;
    std::uint64_t m = 0;
    if (!(in >> d >> n >> m >> k)) throw std::invalid_argument("parse: bad header, expected 'd N M k'");
    if (d < 2 || k < 2 || n < k) throw std::invalid_argument("parse: header violates d>=2, k>=2, N>=k");

    Formula f;
    f.domain_ = d;
    f.num_vars_ = n;
    f.arity_ = k;
    f.occ_.resize(n);
    f.degree_.assign(n, 0);
    f.value_.assign(n, -1);
    f.len_count_.assign(k + 1, 0);
    f.degree_hist_.assign(1, n);
    f.clauses_.reserve(m);

    std::vector<bool> seen(n, false);
    for (std::uint64_t i = 0; i < m; ++i) {
        std::uint32_t len = 0;
        if (!(in >> len)) throw std::invalid_argument("parse: truncated clause list");
        if (len < 1 || len > k) throw std::invalid_argument("parse: clause length out of range");
        Clause c;
        c.terms.reserve(len);
        for (std::uint32_t j = 0; j < len; ++j) {
            std::string tok;
            if (!(in >> tok)) throw std::invalid_argument("parse: truncated clause");
            auto colon = tok.find(':');
            if (colon == std::string::npos) throw std::invalid_argument("parse: expected var:coef");
            std::uint64_t var = std::stoull(tok.substr(0, colon));
            std::uint64_t coef = std::stoull(tok.substr(colon + 1));
            if (var >= n) throw std::invalid_argument("parse: variable out of range");
            if (coef == 0 || coef >= d || !is_unit(static_cast<std::uint32_t>(coef), d))
                throw std::invalid_argument("parse: coefficient is not a unit mod d");
            if (seen[var]) throw std::invalid_argument("parse: repeated variable in clause");
            seen[var] = true;
            c.terms.push_back({static_cast<std::uint32_t>(var), static_cast<std::uint32_t>(coef)});
        }
        for (const Term& t : c.terms) seen[t.var] = false;
        std::uint32_t rhs = 0;
        if (!(in >> rhs)) throw std::invalid_argument("parse: missing rhs");
        if (rhs >= d) throw std::invalid_argument("parse: rhs out of domain");
        c.rhs = rhs;
        f.add_clause_indexed(std::move(c));
    }
    return f;
}

Formula Formula::parse_text(const std::string& text) {
    std::istringstream is(text);
    return parse(is);
}

bool check_solution(const Formula& f, const Assignment& a) {
    if (a.value.size() < f.num_vars())
        throw std::invalid_argument("check_solution: assignment vector too short");
    for (const Clause& c : f.clauses()) {
        if (!c.alive) continue;
        std::uint32_t acc = 0;
        for (const Term& t : c.terms) {
            if (a.value[t.var] < 0)
                throw std::invalid_argument("check_solution: variable of an alive clause unassigned");
            acc = mod_add(acc, mod_mul(t.coef, static_cast<std::uint32_t>(a.value[t.var]), f.domain()),
                          f.domain());
        }
        if (acc != c.rhs) return false;
    }
    return true;
}

}  // namespace uecsp
