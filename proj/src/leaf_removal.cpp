#include "uecsp/leaf_removal.hpp"

#include <sstream>
#include <stdexcept>

#include "uecsp/modular.hpp"
#include "uecsp/rng.hpp"

namespace uecsp {

CoreReport leaf_remove(Formula& f, std::uint64_t seed) {
    const std::uint32_t n = f.num_vars();
    if (f.has_contradiction())
        throw std::invalid_argument("leaf_remove: formula carries a contradiction marker");
    {
        ClauseCounts cc = f.counts();
        if (cc.by_len.size() > 1 && cc.by_len[1] != 0)
            throw std::invalid_argument("leaf_remove: formula has unit clauses");
    }

    // vars with degree exactly 1, with positions for O(1) uniform removal
    std::vector<std::uint32_t> ones;
    std::vector<std::uint32_t> pos(n, UINT32_MAX);
    auto ones_add = [&](std::uint32_t v) {
        if (pos[v] != UINT32_MAX) return;
        pos[v] = static_cast<std::uint32_t>(ones.size());
        ones.push_back(v);
    };
    auto ones_drop = [&](std::uint32_t v) {
        std::uint32_t p = pos[v];
        if (p == UINT32_MAX) return;
        ones[p] = ones.back();
        pos[ones[p]] = p;
        ones.pop_back();
        pos[v] = UINT32_MAX;
    };
    for (std::uint32_t v = 0; v < n; ++v)
        if (f.degree(v) == 1) ones_add(v);

    Rng rng(seed);
    CoreReport rep;
    while (!ones.empty()) {
        std::uint32_t v = ones[rng.below(ones.size())];
        // unique alive clause containing v (occ entries are stale only when dead)
        std::uint32_t cid = UINT32_MAX;
        for (std::uint32_t c : f.occurrences(v)) {
            if (f.clause(c).alive) { cid = c; break; }
        }
        if (cid == UINT32_MAX) throw std::logic_error("leaf_remove: degree-1 var without clause");

        for (auto [u, deg] : f.remove_clause(cid)) {
            if (deg == 1) ones_add(u);
            else ones_drop(u);  // handles both the pivot (deg 0) and vars dropping below/above
        }
        rep.peel_order.push_back({cid, v});
    }

    rep.core_clauses_by_len.assign(f.arity() + 1, 0);
    ClauseCounts cc = f.counts();
    for (std::size_t j = 1; j < cc.by_len.size(); ++j) rep.core_clauses_by_len[j] = cc.by_len[j];
    for (std::uint32_t v = 0; v < n; ++v) rep.core_vars += (f.degree(v) >= 1);
    rep.empty = (cc.alive == 0);

    // backbone = implication closure of the core variables through the peeled
    // clauses: a removed clause with exactly one undetermined variable pins it.
    std::vector<char> pinned(n, 0);
    std::uint64_t num_pinned = 0;
    for (std::uint32_t v = 0; v < n; ++v)
        if (f.degree(v) >= 1) { pinned[v] = 1; ++num_pinned; }
    const std::size_t m = rep.peel_order.size();
    std::vector<std::uint32_t> outside(m, 0);
    std::vector<std::vector<std::uint32_t>> hooks(n);  // peel indices awaiting each var
    std::vector<std::uint32_t> stack;
    for (std::size_t i = 0; i < m; ++i) {
        const Clause& c = f.clause(rep.peel_order[i].clause);
        for (const Term& t : c.terms) {
            if (pinned[t.var]) continue;
            ++outside[i];
            hooks[t.var].push_back(static_cast<std::uint32_t>(i));
        }
        if (outside[i] == 1) stack.push_back(static_cast<std::uint32_t>(i));
    }
    while (!stack.empty()) {
        std::uint32_t ci = stack.back();
        stack.pop_back();
        if (outside[ci] != 1) continue;  // stale entry
        const Clause& c = f.clause(rep.peel_order[ci].clause);
        std::uint32_t forced = UINT32_MAX;
        for (const Term& t : c.terms)
            if (!pinned[t.var]) { forced = t.var; break; }
        if (forced == UINT32_MAX) throw std::logic_error("leaf_remove: outside counter desynced");
        pinned[forced] = 1;
        ++num_pinned;
        for (std::uint32_t cj : hooks[forced])
            if (--outside[cj] == 1) stack.push_back(cj);
    }
    rep.backbone_vars = num_pinned;
    rep.backbone_fraction = static_cast<double>(num_pinned) / static_cast<double>(n);
    return rep;
}

Assignment reconstruct_solution(const Assignment& core_witness, const CoreReport& report,
                                const Formula& peeled, std::uint64_t seed) {
    const std::uint32_t n = peeled.num_vars();
    const std::uint32_t d = peeled.domain();
    if (core_witness.value.size() < n && !(report.empty && core_witness.value.empty()))
        throw std::invalid_argument("reconstruct: witness vector too short");

    Assignment a(n);
    for (std::uint32_t v = 0; v < n; ++v)
        if (peeled.assigned(v)) a.value[v] = peeled.value(v);
    for (std::uint32_t v = 0; v < n; ++v) {
        if (peeled.degree(v) >= 1) {
            if (v >= core_witness.value.size() || core_witness.value[v] < 0)
                throw std::invalid_argument("reconstruct: core variable unassigned in witness");
            a.value[v] = core_witness.value[v];
        }
    }
    // witness must satisfy the core before we extend it
    for (const Clause& c : peeled.clauses()) {
        if (!c.alive) continue;
        std::uint32_t acc = 0;
        for (const Term& t : c.terms)
            acc = mod_add(acc, mod_mul(t.coef, static_cast<std::uint32_t>(a.value[t.var]), d), d);
        if (acc != c.rhs) throw std::invalid_argument("reconstruct: witness does not satisfy the core");
    }

    Rng rng(seed);
    for (auto it = report.peel_order.rbegin(); it != report.peel_order.rend(); ++it) {
        const Clause& c = peeled.clause(it->clause);
        std::uint32_t acc = 0, pivot_coef = 0;
        for (const Term& t : c.terms) {
            if (t.var == it->pivot) { pivot_coef = t.coef; continue; }
            if (a.value[t.var] < 0)  // freed during peeling, never constrained again
                a.value[t.var] = static_cast<std::int32_t>(rng.below(d));
            acc = mod_add(acc, mod_mul(t.coef, static_cast<std::uint32_t>(a.value[t.var]), d), d);
        }
        if (pivot_coef == 0) throw std::logic_error("reconstruct: pivot missing from its clause");
        std::uint32_t need = mod_sub(c.rhs, acc, d);
        a.value[it->pivot] = static_cast<std::int32_t>(mod_mul(mod_inverse(pivot_coef, d), need, d));
    }
    for (std::uint32_t v = 0; v < n; ++v)
        if (a.value[v] < 0) a.value[v] = static_cast<std::int32_t>(rng.below(d));
    return a;
}

std::string core_report_json(const CoreReport& report) {
    std::ostringstream os;
    os << "{\"empty\":" << (report.empty ? "true" : "false")
       << ",\"core_vars\":" << report.core_vars << ",\"core_clauses_by_len\":[";
    for (std::size_t j = 0; j < report.core_clauses_by_len.size(); ++j) {
        if (j) os << ',';
        os << report.core_clauses_by_len[j];
    }
    os << "],\"backbone_vars\":" << report.backbone_vars
       << ",\"backbone_fraction\":" << report.backbone_fraction << "}";
    return os.str();
}

}  // namespace uecsp
