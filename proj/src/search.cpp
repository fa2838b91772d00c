#include "uecsp/search.hpp"

#include <atomic>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "uecsp/modular.hpp"

namespace uecsp {

namespace {

// Per-length clause lists with O(1) uniform sampling and removal, rebuilt from
// the formula at construction and kept in sync through ReductionReport events.
struct SearchIndex {
    explicit SearchIndex(const Formula& f)
        : by_len(f.arity() + 1),
          pos(f.clauses().size(), UINT32_MAX),
          len_of(f.clauses().size(), 0) {
        for (std::uint32_t cid = 0; cid < f.clauses().size(); ++cid) {
            const Clause& c = f.clause(cid);
            if (!c.alive || c.terms.empty()) continue;
            insert(cid, static_cast<std::uint32_t>(c.len()));
        }
        var_pos_.assign(f.num_vars(), UINT32_MAX);
        for (std::uint32_t v = 0; v < f.num_vars(); ++v) {
            if (!f.assigned(v)) {
                var_pos_[v] = static_cast<std::uint32_t>(unassigned.size());
                unassigned.push_back(v);
            }
        }
    }

    void insert(std::uint32_t cid, std::uint32_t len) {
        pos[cid] = static_cast<std::uint32_t>(by_len[len].size());
        by_len[len].push_back(cid);
        len_of[cid] = len;
    }

    void erase(std::uint32_t cid) {
        auto& lst = by_len[len_of[cid]];
        std::uint32_t p = pos[cid];
        lst[p] = lst.back();
        pos[lst[p]] = p;
        lst.pop_back();
        pos[cid] = UINT32_MAX;
    }

    void apply(const ReductionReport& rep) {
        for (const auto& ev : rep.events) {
            erase(ev.clause);
            if (ev.new_len >= 1) insert(ev.clause, ev.new_len);
        }
    }

    void drop_var(std::uint32_t v) {
        std::uint32_t p = var_pos_[v];
        unassigned[p] = unassigned.back();
        var_pos_[unassigned[p]] = p;
        unassigned.pop_back();
        var_pos_[v] = UINT32_MAX;
    }

    std::vector<std::vector<std::uint32_t>> by_len;
    std::vector<std::uint32_t> pos;
    std::vector<std::uint32_t> len_of;
    std::vector<std::uint32_t> unassigned;

private:
    std::vector<std::uint32_t> var_pos_;
};

struct PickResult {
    std::uint32_t var;
    std::uint32_t value;
    std::uint32_t from_len;
};

PickResult pick_free(const SearchIndex& idx, const Formula& f, Rng& rng) {
    std::uint32_t v = idx.unassigned[rng.below(idx.unassigned.size())];
    return {v, static_cast<std::uint32_t>(rng.below(f.domain())), 0};
}

PickResult pick_from_length(const SearchIndex& idx, const Formula& f, Rng& rng, std::uint32_t j) {
    std::uint32_t cid = idx.by_len[j][rng.below(idx.by_len[j].size())];
    const Clause& c = f.clause(cid);
    if (j == 1) {
        const Term& t = c.terms[0];
        std::uint32_t forced = mod_mul(mod_inverse(t.coef, f.domain()), c.rhs, f.domain());
        return {t.var, forced, 1};
    }
    const Term& t = c.terms[rng.below(c.terms.size())];
    return {t.var, static_cast<std::uint32_t>(rng.below(f.domain())), j};
}

}  // namespace

SearchStatus advance_search(Formula& f, const HeuristicPolicy& policy, Rng& rng,
                            std::uint64_t max_steps, const StepObserver& observer,
                            SearchTrace* trace) {
    if (f.has_contradiction()) return SearchStatus::Contradiction;
    const std::uint32_t k = f.arity();
    const std::uint32_t n = f.num_vars();
    SearchIndex idx(f);

    std::vector<double> weights(k + 1, 0.0);
    ClauseCounts cc;
    cc.by_len.assign(k + 1, 0);
    cc.num_vars = n;

    const auto window = static_cast<std::uint64_t>(std::ceil(std::sqrt(static_cast<double>(n))));
    std::vector<std::uint64_t> served(k + 2, 0);
    std::uint64_t window_steps = 0;

    auto emit_trace_point = [&]() {
        if (!trace) return;
        TracePoint tp;
        tp.t = static_cast<double>(f.num_assigned()) / n;
        tp.c.assign(k + 1, 0.0);
        for (std::uint32_t j = 1; j <= k; ++j)
            tp.c[j] = static_cast<double>(idx.by_len[j].size()) / n;
        tp.ctilde2 = tp.t < 1.0 && k >= 2 ? tp.c[2] / (1.0 - tp.t) : 0.0;
        trace->points.push_back(std::move(tp));
    };
    if (trace && trace->points.empty() && trace->stride > 0) emit_trace_point();

    for (std::uint64_t s = 0; s < max_steps; ++s) {
        if (f.alive_clauses() == 0) return SearchStatus::Satisfied;

        PickResult pick{};
        std::uint64_t units = idx.by_len[1].size();
        if (units > 0) {
            pick = pick_from_length(idx, f, rng, 1);
        } else {
            switch (policy.kind) {
                case PolicyKind::UnitClause:
                    pick = pick_free(idx, f, rng);
                    break;
                case PolicyKind::GeneralizedUnitClause: {
                    std::uint32_t jstar = 0;
                    for (std::uint32_t j = 2; j <= k; ++j)
                        if (!idx.by_len[j].empty()) { jstar = j; break; }
                    if (jstar == 0) return SearchStatus::Satisfied;  // defensive; alive==0 above
                    pick = pick_from_length(idx, f, rng, jstar);
                    break;
                }
                case PolicyKind::Custom: {
                    if (!policy.weights)
                        throw std::invalid_argument("search: custom policy without weight function");
                    for (std::uint32_t j = 1; j <= k; ++j)
                        cc.by_len[j] = idx.by_len[j].size();
                    cc.alive = f.alive_clauses();
                    std::fill(weights.begin(), weights.end(), 0.0);
                    policy.weights(cc, std::span<double>(weights));
                    double total = 0.0;
                    for (std::uint32_t j = 1; j <= k; ++j) {
                        if (weights[j] < 0)
                            throw std::invalid_argument("search: negative policy weight");
                        if (weights[j] > 0 && idx.by_len[j].empty())
                            throw std::invalid_argument("search: policy weight on empty length");
                        total += weights[j];
                    }
                    if (total > 1.0 + 1e-9)
                        throw std::invalid_argument("search: policy weights exceed 1");
                    double r = rng.real01();
                    double cum = 0.0;
                    std::uint32_t chosen = 0;
                    for (std::uint32_t j = 1; j <= k; ++j) {
                        cum += weights[j];
                        if (r < cum) { chosen = j; break; }
                    }
                    pick = chosen == 0 ? pick_free(idx, f, rng)
                                       : pick_from_length(idx, f, rng, chosen);
                    break;
                }
            }
        }

        ReductionReport rep = f.reduce_by_assignment(pick.var, pick.value);
        idx.apply(rep);
        idx.drop_var(pick.var);

        served[pick.from_len <= k ? pick.from_len : k]++;
        window_steps++;
        if (trace && window_steps == window) {
            RhoWindow rw;
            rw.t_mid = (static_cast<double>(f.num_assigned()) - window / 2.0) / n;
            rw.rho.assign(k + 1, 0.0);
            for (std::uint32_t j = 1; j <= k; ++j)
                rw.rho[j] = (static_cast<double>(served[j]) - static_cast<double>(served[j + 1])) /
                            static_cast<double>(window);
            trace->rho_windows.push_back(std::move(rw));
            std::fill(served.begin(), served.end(), 0);
            window_steps = 0;
        }

        if (observer) {
            StepEvent ev{f.num_assigned() - 1, pick.var, pick.value, pick.from_len, units};
            observer(ev, f);
        }
        if (trace && trace->stride > 0 && f.num_assigned() % trace->stride == 0) emit_trace_point();

        if (rep.contradiction) return SearchStatus::Contradiction;
    }
    return SearchStatus::Running;
}

std::pair<SearchOutcome, SearchTrace> run_search(Formula& f, const HeuristicPolicy& policy,
                                                 std::uint64_t seed, std::uint64_t trace_stride,
                                                 const StepObserver& observer) {
    Rng rng(seed);
    SearchTrace trace;
    trace.k = f.arity();
    trace.stride = trace_stride;

    SearchStatus st = advance_search(f, policy, rng, UINT64_MAX, observer, &trace);

    SearchOutcome out;
    out.steps = f.num_assigned();
    out.final_counts = f.counts();
    if (st == SearchStatus::Contradiction) {
        out.result = SearchOutcome::Result::Contradiction;
        out.assignment = f.current_assignment();
    } else {
        out.result = SearchOutcome::Result::Satisfied;
        Assignment a = f.current_assignment();
        for (std::uint32_t v = 0; v < f.num_vars(); ++v)
            if (a.value[v] < 0) a.value[v] = static_cast<std::int32_t>(rng.below(f.domain()));
        out.assignment = std::move(a);
    }
    return {std::move(out), std::move(trace)};
}

SuccessEstimate estimate_success_probability(const EnsembleSpec& spec, const HeuristicPolicy& policy,
                                             std::uint32_t runs, std::uint64_t master_seed,
                                             unsigned threads) {
    if (runs == 0) throw std::invalid_argument("estimate_success_probability: runs must be >= 1");
    std::vector<std::uint8_t> ok(runs, 0);

    auto work = [&](std::uint32_t i) {
        std::uint64_t gen_seed = mix_seed(master_seed, 2 * i);
        std::uint64_t run_seed = mix_seed(master_seed, 2 * i + 1);
        Formula f = Formula::random(spec.num_vars, spec.arity, spec.alpha, spec.domain, gen_seed);
        auto [outcome, trace] = run_search(f, policy, run_seed);
        ok[i] = outcome.result == SearchOutcome::Result::Satisfied;
    };

    if (threads <= 1) {
        for (std::uint32_t i = 0; i < runs; ++i) work(i);
    } else {
        std::vector<std::thread> pool;
        std::atomic<std::uint32_t> next{0};
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back([&] {
                for (std::uint32_t i = next.fetch_add(1); i < runs; i = next.fetch_add(1)) work(i);
            });
        for (auto& th : pool) th.join();
    }

    SuccessEstimate est;
    est.runs = runs;
    for (auto b : ok) est.successes += b;
    est.p_hat = static_cast<double>(est.successes) / runs;
    est.stderr_ = std::sqrt(est.p_hat * (1.0 - est.p_hat) / runs);
    return est;
}

ChiSquareReport poissonianity_test(const Formula& f) {
    DegreeProfile prof = f.degree_profile();
    if (prof.unassigned < 100)
        throw std::invalid_argument("poissonianity_test: fewer than 100 unassigned variables");
    double lambda = prof.mean();
    if (!(lambda > 0))
        throw std::invalid_argument("poissonianity_test: degenerate (empty) degree profile");
    return chi_square_poisson(std::span<const std::uint64_t>(prof.by_degree), lambda, true);
}

void trace_to_csv(const SearchTrace& trace, std::ostream& out, const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "t";
    for (std::uint32_t j = 1; j <= trace.k; ++j) out << ",c_" << j;
    out << ",ctilde_2\n";
    out.precision(12);
    for (const TracePoint& p : trace.points) {
        out << p.t;
        for (std::uint32_t j = 1; j <= trace.k; ++j) out << ',' << p.c[j];
        out << ',' << p.ctilde2 << '\n';
    }
}

std::string outcome_json(const SearchOutcome& outcome, std::uint64_t seed) {
    std::ostringstream os;
    os << "{\"result\":\""
       << (outcome.result == SearchOutcome::Result::Satisfied ? "satisfied" : "contradiction")
       << "\",\"steps\":" << outcome.steps << ",\"seed\":" << seed << "}";
    return os.str();
}

}  // namespace uecsp
