#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uecsp/formula.hpp"
#include "uecsp/rng.hpp"
#include "uecsp/stats.hpp"

namespace uecsp {

enum class PolicyKind { UnitClause, GeneralizedUnitClause, Custom };

// A step policy: when no unit clause is present, pick the clause length to serve
// with probabilities p_j (the residual 1 - sum_j p_j is a free uniform pick).
// Unit clauses are always served first regardless of the policy. A custom weight
// function must put zero weight on empty lengths and keep sum p_j <= 1.
struct HeuristicPolicy {
    PolicyKind kind = PolicyKind::UnitClause;
    std::function<void(const ClauseCounts&, std::span<double>)> weights;  // fills p[1..k]

    static HeuristicPolicy uc() { return {PolicyKind::UnitClause, nullptr}; }
    static HeuristicPolicy guc() { return {PolicyKind::GeneralizedUnitClause, nullptr}; }
    static HeuristicPolicy custom(std::function<void(const ClauseCounts&, std::span<double>)> fn) {
        return {PolicyKind::Custom, std::move(fn)};
    }
};

struct StepEvent {
    std::uint64_t step;
    std::uint32_t var;
    std::uint32_t value;
    std::uint32_t picked_from_len;  // 0 = free pick, j >= 1 = clause of length j
    std::uint64_t units_before;     // C_1 before this step
};

using StepObserver = std::function<void(const StepEvent&, const Formula&)>;

struct SearchOutcome {
    enum class Result { Satisfied, Contradiction } result = Result::Satisfied;
    Assignment assignment;       // full when Satisfied
    std::uint64_t steps = 0;     // variables assigned before halting
    ClauseCounts final_counts;
};

struct TracePoint {
    double t;                // fraction of variables assigned
    std::vector<double> c;   // c[j] = C_j / N, index 0..k
    double ctilde2;          // c_2 / (1 - t)
};

struct RhoWindow {
    double t_mid;
    std::vector<double> rho;  // empirical rho_j over the window, index 0..k
};

struct SearchTrace {
    std::uint32_t k = 0;
    std::uint64_t stride = 0;
    std::vector<TracePoint> points;
    std::vector<RhoWindow> rho_windows;  // windows of ceil(sqrt(N)) steps
};

enum class SearchStatus { Running, Satisfied, Contradiction };

// Low-level driver: advances the heuristic by at most max_steps assignments,
// mutating f. Useful for mid-run snapshots.
SearchStatus advance_search(Formula& f, const HeuristicPolicy& policy, Rng& rng,
                            std::uint64_t max_steps, const StepObserver& observer = {},
                            SearchTrace* trace = nullptr);

// Runs the heuristic to termination on f (mutating it). On success the returned
// assignment extends to all variables (leftover free variables drawn uniformly).
std::pair<SearchOutcome, SearchTrace> run_search(Formula& f, const HeuristicPolicy& policy,
                                                 std::uint64_t seed, std::uint64_t trace_stride = 0,
                                                 const StepObserver& observer = {});

struct EnsembleSpec {
    std::uint32_t num_vars;
    std::uint32_t arity;
    std::uint32_t domain;
    double alpha;
};

struct SuccessEstimate {
    double p_hat = 0.0;
    double stderr_ = 0.0;
    std::uint32_t successes = 0;
    std::uint32_t runs = 0;
};

// Independent instances + runs, seeds derived from master_seed; deterministic for
// any thread count.
SuccessEstimate estimate_success_probability(const EnsembleSpec& spec, const HeuristicPolicy& policy,
                                             std::uint32_t runs, std::uint64_t master_seed,
                                             unsigned threads = 1);

// Chi-square of the unassigned-variable degree histogram against a Poisson law
// with the matched (estimated) mean. Throws when fewer than 100 unassigned vars.
ChiSquareReport poissonianity_test(const Formula& f);

// CSV: "t,c_1,...,c_k,ctilde_2"
void trace_to_csv(const SearchTrace& trace, std::ostream& out, const std::string& header_comment = "");
// JSON: {"result":…, "steps":…, "seed":…}
std::string outcome_json(const SearchOutcome& outcome, std::uint64_t seed);

}  // namespace uecsp
