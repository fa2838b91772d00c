// Acceptance gate: ten end-to-end criteria with pinned tolerances and runtime
// budgets. Each criterion prints exactly one [PASS]/[FAIL] line with its
// measured values; the process exits 0 iff every criterion passes.

#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "uecsp/formula.hpp"
#include "uecsp/leaf_removal.hpp"
#include "uecsp/linear_solver.hpp"
#include "uecsp/meanfield.hpp"
#include "uecsp/phase.hpp"
#include "uecsp/rng.hpp"
#include "uecsp/scaling.hpp"
#include "uecsp/search.hpp"
#include "uecsp/stats.hpp"

using namespace uecsp;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;
};

class Detail {
public:
    Detail& operator<<(const std::string& s) {
        if (!buf_.str().empty()) buf_ << " ";
        buf_ << s;
        return *this;
    }
    std::string str() const { return buf_.str(); }

private:
    std::ostringstream buf_;
};

std::string fmt(double x, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, x);
    return buf;
}

// value within +-tol of target; appends "name=value (|d|=...<=tol)"
bool within(Outcome& out, Detail& d, const std::string& name, double value, double target,
            double tol) {
    double err = std::abs(value - target);
    bool ok = err <= tol;
    d << (name + "=" + fmt(value) + " (|d|=" + fmt(err, 2) + (ok ? "<=" : ">") + fmt(tol, 2) + ")");
    if (!ok) out.pass = false;
    return ok;
}

bool expect(Outcome& out, Detail& d, bool cond, const std::string& label) {
    d << (label + (cond ? " ok" : " FAILED"));
    if (!cond) out.pass = false;
    return cond;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------- criterion 1
Outcome criterion_static_thresholds() {
    constexpr double target_d = 0.818, target_s = 0.918, tol = 1e-3, budget_each = 1.0;
    Outcome out;
    Detail d;

    auto t0 = std::chrono::steady_clock::now();
    double alpha_d = clustering_threshold_pure(3);
    double el_d = seconds_since(t0);
    t0 = std::chrono::steady_clock::now();
    double alpha_s = sat_threshold_pure(3);
    double el_s = seconds_since(t0);

    within(out, d, "alpha_d(3)", alpha_d, target_d, tol);
    within(out, d, "alpha_s(3)", alpha_s, target_s, tol);
    expect(out, d, el_d < budget_each, "alpha_d in " + fmt(el_d, 3) + "s<" + fmt(budget_each, 2) + "s");
    expect(out, d, el_s < budget_each, "alpha_s in " + fmt(el_s, 3) + "s<" + fmt(budget_each, 2) + "s");
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 2
Outcome criterion_uc_threshold() {
    constexpr double tol_alpha = 1e-4, tol_closed = 1e-9;
    Outcome out;
    Detail d;

    CriticalPoint cp = critical_point(3, MeanfieldPolicy::uc());
    expect(out, d, cp.converged, "bisection converged");
    within(out, d, "alpha_a", cp.alpha_a, 2.0 / 3.0, tol_alpha);

    // closed form: ctilde_2(t) = 3 alpha t (1-t) peaks at exactly 1/2 for alpha = 2/3
    double best = -1.0, arg = 0.0;
    for (int i = 0; i <= 1000000; ++i) {
        double t = i * 1e-6;
        double v = uc_ctilde2(3, 2.0 / 3.0, t);
        if (v > best) {
            best = v;
            arg = t;
        }
    }
    within(out, d, "max_ctilde2", best, 0.5, tol_closed);
    within(out, d, "argmax_t", arg, 0.5, 1e-5);
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 3
Outcome criterion_crossing_times() {
    constexpr double tol = 1e-3;
    Outcome out;
    Detail d;

    TrajectoryOptions opts;
    opts.dt = 1e-5;
    std::vector<double> alphas{0.8};
    TransitionLines lines = transition_lines(3, alphas, MeanfieldPolicy::uc(), opts);
    if (lines.points.size() != 1) {
        out.pass = false;
        out.detail = "expected one transition point";
        return out;
    }
    within(out, d, "t_d", lines.points[0].t_d, 0.02957, tol);
    within(out, d, "t_s", lines.points[0].t_s, 0.11697, tol);
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 4
Outcome criterion_central_inequality() {
    Outcome out;
    Detail d;
    for (std::uint32_t k : {3u, 4u, 256u, 1024u}) {
        double alpha_d = clustering_threshold_pure(k);
        CriticalPoint uc = critical_point(k, MeanfieldPolicy::uc());
        CriticalPoint guc = critical_point(k, MeanfieldPolicy::guc());
        bool ok = uc.converged && guc.converged && uc.alpha_a <= alpha_d && guc.alpha_a <= alpha_d;
        d << ("k=" + std::to_string(k) + ": uc=" + fmt(uc.alpha_a) + " guc=" + fmt(guc.alpha_a) +
              (ok ? " <= " : " NOT<= ") + "alpha_d=" + fmt(alpha_d));
        if (!ok) out.pass = false;
    }
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 5
Outcome criterion_tangency() {
    constexpr double tol = 1e-3;
    Outcome out;
    Detail d;
    CriticalPoint uc = critical_point(3, MeanfieldPolicy::uc());
    CriticalPoint guc = critical_point(3, MeanfieldPolicy::guc());
    expect(out, d, uc.converged && guc.converged, "both bisections converged");
    within(out, d, "uc |ctilde2-1/2|", uc.residual_c2, 0.0, tol);
    within(out, d, "uc |ctilde3-1/6|", uc.residual_c3, 0.0, tol);
    within(out, d, "guc |ctilde2-1/2|", guc.residual_c2, 0.0, tol);
    within(out, d, "guc |ctilde3-1/6|", guc.residual_c3, 0.0, tol);
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 6
Outcome criterion_large_k_scaling() {
    constexpr double gap_lo = 1.9, gap_hi = 2.4, exp_tol = 0.1;
    Outcome out;
    Detail d;

    std::vector<std::uint32_t> ks{256, 512, 1024, 2048, 4096};
    CriticalPointOptions opts;
    opts.trajectory.dt = 1e-5;
    ScalingSweep sweep = guc_threshold_sweep(ks, opts);

    for (const ScalingPoint& pt : sweep.points) {
        bool ok = pt.ok && pt.k_alpha_minus_logk >= gap_lo && pt.k_alpha_minus_logk <= gap_hi;
        d << ("k=" + std::to_string(pt.k) + ": k*a-log k=" + fmt(pt.k_alpha_minus_logk, 4) +
              (ok ? "" : " OUTSIDE [" + fmt(gap_lo, 2) + "," + fmt(gap_hi, 2) + "]"));
        if (!ok) out.pass = false;
    }
    CollapseFit fit = collapse_fit(sweep.points);
    expect(out, d, fit.ok, "collapse fit");
    within(out, d, "nu", fit.nu, 0.5, exp_tol);
    within(out, d, "mu", fit.mu, 0.5, exp_tol);
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 7
Outcome criterion_mc_meanfield() {
    constexpr std::uint32_t n = 100000, num_seeds = 20;
    constexpr double alpha = 0.8, sup_tol = 0.005;
    Outcome out;
    Detail d;

    // mean-field curve on the same t-grid the traces sample (every 1e-3)
    TrajectoryOptions opts;
    opts.dt = 1e-5;
    opts.sample_stride = 100;
    TrajectoryResult ode = integrate_trajectory(3, alpha, MeanfieldPolicy::uc(), opts);
    double t_q = ode.t_contradiction;
    std::map<long, double> ode_curve;
    for (const TrajectorySample& smp : ode.samples) {
        long idx = std::lround(smp.t * 1000.0);
        if (std::abs(smp.t * 1000.0 - idx) < 1e-6) ode_curve[idx] = smp.c[2] / (1.0 - smp.t);
    }

    std::map<long, std::pair<double, int>> mc;  // idx -> (sum, count)
    for (std::uint32_t s = 0; s < num_seeds; ++s) {
        Formula f = Formula::random(n, 3, alpha, 2, 1000 + s);
        auto [outcome, trace] = run_search(f, HeuristicPolicy::uc(), 77000 + s, n / 1000);
        for (const TracePoint& p : trace.points) {
            long idx = std::lround(p.t * 1000.0);
            if (std::abs(p.t * 1000.0 - idx) < 1e-6) {
                mc[idx].first += p.ctilde2;
                mc[idx].second += 1;
            }
        }
    }

    double sup = 0.0, sup_t = 0.0;
    int min_cover = num_seeds, compared = 0;
    long idx_max = std::lround((t_q - 0.01) * 1000.0);
    for (long idx = 0; idx <= idx_max; ++idx) {
        auto mit = mc.find(idx);
        auto oit = ode_curve.find(idx);
        if (mit == mc.end() || oit == ode_curve.end()) continue;
        double avg = mit->second.first / mit->second.second;
        min_cover = std::min(min_cover, mit->second.second);
        double err = std::abs(avg - oit->second);
        if (err > sup) {
            sup = err;
            sup_t = idx * 1e-3;
        }
        ++compared;
    }
    expect(out, d, compared >= 250, "grid coverage " + std::to_string(compared) + " points");
    expect(out, d, min_cover >= 10, "min seeds per point " + std::to_string(min_cover));
    within(out, d, "sup|mc-ode|", sup, 0.0, sup_tol);
    d << ("argmax_t=" + fmt(sup_t, 3));
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 8
Outcome criterion_core_vs_flow() {
    constexpr double rel_tol = 0.01;
    Outcome out;
    Detail d;

    // largest root of 1 - b = exp(-3 alpha b^2) at alpha = 0.85
    const double alpha = 0.85;
    double lo = 0.5, hi = 0.999999;
    for (int i = 0; i < 200; ++i) {
        double mid = 0.5 * (lo + hi);
        double f = 1.0 - mid - std::exp(-3.0 * alpha * mid * mid);
        (f > 0.0 ? lo : hi) = mid;
    }
    double b_star = 0.5 * (lo + hi);

    Formula f = Formula::random(100000, 3, alpha, 2, 90210);
    CoreReport rep = leaf_remove(f, 4242);
    double rel = std::abs(rep.backbone_fraction - b_star) / b_star;
    d << ("backbone=" + fmt(rep.backbone_fraction) + " b*=" + fmt(b_star));
    expect(out, d, rel <= rel_tol, "rel err " + fmt(rel, 2) + "<=" + fmt(rel_tol, 2));

    // empty-core probability falls through 1/2 between alpha = 0.80 and 0.84
    auto p_empty = [](double a) {
        int empty = 0;
        for (std::uint64_t s = 0; s < 40; ++s) {
            Formula g = Formula::random(20000, 3, a, 2, 31000 + s);
            if (leaf_remove(g, 500 + s).empty) ++empty;
        }
        return empty / 40.0;
    };
    double p80 = p_empty(0.80), p84 = p_empty(0.84);
    d << ("p_empty(0.80)=" + fmt(p80) + " p_empty(0.84)=" + fmt(p84));
    expect(out, d, p80 > 0.5 && p84 < 0.5, "crosses 1/2 inside [0.80,0.84]");
    out.detail = d.str();
    return out;
}

// ---------------------------------------------------------------- criterion 9
Outcome criterion_oracle_equivalence() {
    Outcome out;
    Detail d;
    const double alphas[3] = {0.7, 0.9, 1.1};
    int agree = 0, search_checked = 0, search_bad = 0, recon_bad = 0;
    for (int i = 0; i < 100; ++i) {
        double alpha = alphas[i % 3];
        std::uint64_t seed = 5000 + static_cast<std::uint64_t>(i);
        Formula pristine = Formula::random(200, 3, alpha, 2, seed);

        SatVerdict direct = gaussian_solve(pristine);

        Formula peeled = pristine;
        CoreReport rep = leaf_remove(peeled, seed ^ 0x9e37);
        SatVerdict core = gaussian_solve(peeled);
        bool same = core.satisfiable == direct.satisfiable;
        if (same && core.satisfiable) {
            Assignment full = reconstruct_solution(*core.witness, rep, peeled, seed + 7);
            if (!check_solution(pristine, full)) {
                ++recon_bad;
                same = false;
            }
        }
        if (same) ++agree;

        Formula searched = pristine;
        auto [outcome, trace] = run_search(searched, HeuristicPolicy::guc(), seed + 13);
        if (outcome.result == SearchOutcome::Result::Satisfied) {
            ++search_checked;
            if (!check_solution(pristine, outcome.assignment)) ++search_bad;
        }
    }
    expect(out, d, agree == 100, "peel+solve+reconstruct vs direct: " + std::to_string(agree) + "/100");
    expect(out, d, recon_bad == 0, "reconstruction failures " + std::to_string(recon_bad));
    expect(out, d,
           search_checked > 0 && search_bad == 0,
           "satisfied searches verified " + std::to_string(search_checked - search_bad) + "/" +
               std::to_string(search_checked));
    out.detail = d.str();
    return out;
}

// --------------------------------------------------------------- criterion 10
bool property_flux_bounds(Detail& d) {
    TrajectoryOptions opts;
    opts.dt = 1e-4;
    opts.sample_stride = 100;
    struct Case {
        std::uint32_t k;
        double alpha;
        MeanfieldPolicy policy;
        const char* name;
    };
    const Case cases[] = {{3, 0.8, MeanfieldPolicy::uc(), "uc"},
                          {3, 0.74, MeanfieldPolicy::guc(), "guc3"},
                          {6, 0.4, MeanfieldPolicy::guc(), "guc6"}};
    for (const Case& cs : cases) {
        TrajectoryResult traj = integrate_trajectory(cs.k, cs.alpha, cs.policy, opts);
        for (const TrajectorySample& smp : traj.samples) {
            // the bound applies strictly before the contradiction point
            if (smp.c[2] / (1 - smp.t) >= 0.5 - 1e-9) continue;
            for (int i = 0; i <= 20; ++i) {
                double b = i / 20.0;
                if (flux(smp.rho, b) > b + 1e-12 || flux_deriv(smp.rho, b) > 1.0 + 1e-12) {
                    d << ("flux bound broken: " + std::string(cs.name) + " t=" + fmt(smp.t) +
                          " b=" + fmt(b));
                    return false;
                }
            }
        }
    }
    d << "F(b)<=b,F'(b)<=1";
    return true;
}

bool property_guc_rate_bracket(Detail& d) {
    TrajectoryOptions opts;
    opts.dt = 1e-4;
    opts.sample_stride = 50;
    TrajectoryResult traj = integrate_trajectory(6, 0.4, MeanfieldPolicy::guc(), opts);
    for (const TrajectorySample& smp : traj.samples) {
        if (smp.t < 1e-3 || smp.jstar < 2) continue;
        double lo = 1.0 / smp.jstar;
        double hi = smp.jstar >= 3 ? 1.0 / (smp.jstar - 1.0) : 1.0;
        if (smp.gamma_dot < lo - 1e-9 || smp.gamma_dot > hi + 1e-6) {
            d << ("rate bracket broken at t=" + fmt(smp.t) + " j*=" + std::to_string(smp.jstar) +
                  " rate=" + fmt(smp.gamma_dot));
            return false;
        }
    }
    d << "gamma_dot in [1/j*,1/(j*-1)]";
    return true;
}

bool property_no_escape(Detail& d) {
    TrajectoryOptions opts;
    opts.dt = 1e-4;
    opts.sample_stride = 50;
    TrajectoryResult traj = integrate_trajectory(3, 0.8, MeanfieldPolicy::uc(), opts);
    int stage = 0;
    for (const TrajectorySample& smp : traj.samples) {
        if (smp.t >= 1.0 - 1e-9) break;
        PhaseReport rep = classify(evolved_generating_function(smp.c, smp.t));
        int s = rep.label == PhaseLabel::Unclustered ? 0
                : rep.label == PhaseLabel::ClusteredSat ? 1
                                                        : 2;
        if (s < stage) {
            d << ("phase label went backwards at t=" + fmt(smp.t));
            return false;
        }
        stage = std::max(stage, s);
    }
    d << "labels monotone";
    return stage == 2;
}

bool property_poissonianity(Detail& d) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Formula f = Formula::random(100000, 3, 0.5, 2, 60000 + seed);
        Rng rng(800 + seed);
        double p_min = 1.0;
        bool survived = true;
        for (int snap = 0; snap < 3; ++snap) {
            if (advance_search(f, HeuristicPolicy::uc(), rng, 20000) != SearchStatus::Running) {
                survived = false;
                break;
            }
            p_min = std::min(p_min, poissonianity_test(f).p_value);
        }
        if (!survived) continue;
        d << ("min p=" + fmt(p_min, 3) + " over 3 snapshots (seed " + std::to_string(seed) + ")");
        return p_min > 1e-3;
    }
    d << "no run survived to the third snapshot";
    return false;
}

bool property_second_order_scaling(Detail& d) {
    std::vector<double> log_eps, log_gap, log_bd;
    for (double le = -2.0; le <= -1.0 + 1e-9; le += 0.25) {
        double eps = std::pow(10.0, le);
        double c3 = (0.5 + eps) / 3.0;
        std::vector<std::pair<std::uint32_t, double>> fixed{{3u, c3}};
        SectionCrossings sc = section_crossings(3, fixed, 2, 0.3, 0.5);
        if (std::isnan(sc.sweep_at_d)) {
            d << "no clustering crossing found";
            return false;
        }
        double gap = 0.5 - sc.sweep_at_d;
        if (gap <= 0.0) {
            d << "crossing above the contradiction plane";
            return false;
        }
        PhaseReport rep =
            classify(GeneratingFunction(std::vector<double>{0, 0, sc.sweep_at_d + 1e-8, c3}));
        if (!rep.has_roots) {
            d << "no stationary root just past the crossing";
            return false;
        }
        log_eps.push_back(std::log(eps));
        log_gap.push_back(std::log(gap));
        log_bd.push_back(std::log(rep.b_s));
    }
    double slope_gap = least_squares(log_eps, log_gap).slope;
    double slope_bd = least_squares(log_eps, log_bd).slope;
    d << ("slopes: 1/2-c2 ~ eps^" + fmt(slope_gap, 3) + ", b_d ~ eps^" + fmt(slope_bd, 3));
    return std::abs(slope_gap - 2.0) <= 0.15 && std::abs(slope_bd - 1.0) <= 0.15;
}

Outcome criterion_property_suites() {
    Outcome out;
    Detail d;
    struct Prop {
        const char* name;
        std::function<bool(Detail&)> fn;
    };
    const Prop props[] = {{"flux", property_flux_bounds},
                          {"rate", property_guc_rate_bracket},
                          {"no-escape", property_no_escape},
                          {"poisson", property_poissonianity},
                          {"scaling", property_second_order_scaling}};
    for (const Prop& p : props) {
        Detail inner;
        bool ok = p.fn(inner);
        d << (std::string(p.name) + (ok ? "[ok: " : "[FAILED: ") + inner.str() + "]");
        if (!ok) out.pass = false;
    }
    out.detail = d.str();
    return out;
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double budget_seconds;  // 0 = unbudgeted
        std::function<Outcome()> fn;
    };
    const std::vector<Criterion> criteria = {
        {1, "static-thresholds", 5.0, criterion_static_thresholds},
        {2, "uc-algorithmic-threshold", 10.0, criterion_uc_threshold},
        {3, "trajectory-crossing-times", 30.0, criterion_crossing_times},
        {4, "central-inequality", 0.0, criterion_central_inequality},
        {5, "tangency-residuals", 0.0, criterion_tangency},
        {6, "large-k-scaling", 600.0, criterion_large_k_scaling},
        {7, "mc-vs-meanfield", 120.0, criterion_mc_meanfield},
        {8, "core-vs-flow", 0.0, criterion_core_vs_flow},
        {9, "oracle-equivalence", 0.0, criterion_oracle_equivalence},
        {10, "property-suites", 0.0, criterion_property_suites},
    };

    int passed = 0;
    for (const Criterion& c : criteria) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.fn();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        double el = seconds_since(t0);
        if (c.budget_seconds > 0.0 && el > c.budget_seconds) {
            out.pass = false;
            out.detail += " | runtime " + fmt(el, 3) + "s exceeds budget " +
                          fmt(c.budget_seconds, 3) + "s";
        }
        if (out.pass) ++passed;
        std::printf("[%s] #%d %s: %s [%.1fs]\n", out.pass ? "PASS" : "FAIL", c.id, c.name,
                    out.detail.c_str(), el);
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/%zu criteria passed\n", passed, criteria.size());
    return passed == static_cast<int>(criteria.size()) ? 0 : 1;
}
