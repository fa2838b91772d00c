#include "uecsp/phase.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace uecsp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// V and V' parametrized by eps = 1 - b. 1.0 - eps is exact for eps in [0.5, 1]
// (Sterbenz), and the entropy term is computed as eps*log(eps) directly, so the
// evaluation stays accurate arbitrarily close to b = 1 where large-k roots sit.
double v_of_eps(const GeneratingFunction& g, double eps) {
    return -g.value(1.0 - eps) + (1.0 - eps) + eps * std::log(eps);
}

double v1_of_eps(const GeneratingFunction& g, double eps) {
    return -g.deriv1(1.0 - eps) - std::log(eps);
}

// Probe locations in eps, descending (b ascending): a uniform b-grid of pitch
// 1e-4 unioned with a log-eps tail down to exp(-(k+5)), since for pure-k
// ensembles the stationary/zero structure of V sits at eps = O(exp(-k)).
std::vector<double> probe_grid_eps(std::uint32_t k) {
    constexpr int grid = 10000;
    const double u_max = std::max(40.0, static_cast<double>(k) + 5.0);
    const int tail = static_cast<int>(u_max / 0.1);
    std::vector<double> eps;
    eps.reserve(static_cast<std::size_t>(grid + tail + 2));
    eps.push_back(1.0);  // b = 0; V = V' = 0 exactly
    for (int i = 1; i < grid; ++i) eps.push_back(1.0 - static_cast<double>(i) / grid);
    for (int i = 1; i <= tail; ++i) eps.push_back(std::exp(-0.1 * i));
    std::sort(eps.begin(), eps.end(), std::greater<double>());
    eps.erase(std::unique(eps.begin(), eps.end()), eps.end());
    return eps;
}

struct ScanMin {
    double eps;
    double value;
};

// Global minimum over the probe grid, refined by ternary search in log(eps)
// within the two bracketing cells (monotone reparametrizations preserve
// unimodality, so one rule covers both the linear and the log region).
ScanMin scan_min(std::span<const double> grid,
                 const std::function<double(double)>& f) {
    std::size_t m = 0;
    double best = f(grid[0]);
    for (std::size_t i = 1; i < grid.size(); ++i) {
        double v = f(grid[i]);
        if (v < best) {
            best = v;
            m = i;
        }
    }
    const std::size_t left = (m == 0) ? 0 : m - 1;
    const std::size_t right = (m + 1 < grid.size()) ? m + 1 : m;
    double slo = std::log(grid[right]);  // smaller eps
    double shi = std::log(grid[left]);
    for (int it = 0; it < 200 && shi - slo > 1e-11 * (1.0 + std::abs(slo)); ++it) {
        const double s1 = slo + (shi - slo) / 3.0;
        const double s2 = shi - (shi - slo) / 3.0;
        if (f(std::exp(s1)) < f(std::exp(s2)))
            shi = s2;
        else
            slo = s1;
    }
    const double em = std::exp(0.5 * (slo + shi));
    const double vm = f(em);
    if (vm < best) return {em, vm};
    return {grid[m], best};
}

ScanMin min_v1(const GeneratingFunction& g, std::span<const double> grid) {
    return scan_min(grid, [&](double e) { return v1_of_eps(g, e); });
}

ScanMin min_v(const GeneratingFunction& g, std::span<const double> grid) {
    return scan_min(grid, [&](double e) { return v_of_eps(g, e); });
}

// Root of f between two probes (f changes sign); bisection on eps with a
// geometric midpoint so log-tail cells converge as fast as linear ones.
double bisect_root_eps(const std::function<double(double)>& f, double eps_lo_b,
                       double eps_hi_b, double f_lo_b) {
    // eps_lo_b: probe with smaller b (larger eps)
    double a = eps_lo_b, b = eps_hi_b, fa = f_lo_b;
    for (int it = 0; it < 200 && a - b > 1e-16 * a; ++it) {
        const double mid = std::sqrt(a * b);
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fa < 0.0) == (fm < 0.0)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return std::sqrt(a * b);
}

// All positive roots of V' in ascending b, to ~1e-12 residual.
std::vector<double> stationary_roots(const GeneratingFunction& g,
                                     const std::vector<double>& grid) {
    auto f = [&](double e) { return v1_of_eps(g, e); };
    std::vector<double> roots_b;
    double prev_eps = grid[0];
    double prev_f = 0.0;  // V'(b=0) = 0 exactly; skip as a root
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double e = grid[i];
        const double fe = f(e);
        if (fe == 0.0) {
            roots_b.push_back(1.0 - e);
        } else if (prev_f != 0.0 && (prev_f < 0.0) != (fe < 0.0)) {
            const double er = bisect_root_eps(f, prev_eps, e, prev_f);
            roots_b.push_back(1.0 - er);
        }
        prev_eps = e;
        prev_f = fe;
    }
    return roots_b;
}

// Densities for a section query: fixed coordinates plus two free slots.
std::vector<double> section_densities(std::uint32_t k,
                                      std::span<const std::pair<std::uint32_t, double>> fixed) {
    std::vector<double> c(k + 1, 0.0);
    for (const auto& [j, v] : fixed) {
        if (j < 2 || j > k) throw std::invalid_argument("section: density index out of [2,k]");
        if (v < 0.0) throw std::invalid_argument("section: negative density");
        c[j] = v;
    }
    return c;
}

void check_c2_cap(const std::vector<double>& c) {
    if (c[2] > 0.5 + 1e-12)
        throw std::invalid_argument("section: c_2 must be <= 1/2 (contradiction region)");
}

// alpha-derivative of a trajectory observable by central finite differences.
double alpha_derivative(const std::function<double(double)>& observable, double alpha) {
    const double da = 1e-4 * std::max(1.0, alpha);
    return (observable(alpha + da) - observable(alpha - da)) / (2.0 * da);
}

// rho vector at a trajectory state, mirroring the integrator's bookkeeping.
void reconstruct_rho(std::uint32_t k, const MeanfieldPolicy& policy, double t,
                     std::span<const double> c, std::uint32_t jstar, std::span<double> rho) {
    std::fill(rho.begin(), rho.end(), 0.0);
    const double om = 1.0 - t;
    switch (policy.kind) {
        case MeanfieldPolicyKind::UC:
            break;
        case MeanfieldPolicyKind::GUC:
            if (jstar >= 2 && jstar <= k) {
                const double serve = 1.0 / jstar - (jstar - 1.0) * c[jstar] / om;
                rho[jstar] = std::max(0.0, serve);
                if (jstar >= 3) rho[jstar - 1] = jstar * c[jstar] / om;
            }
            break;
        case MeanfieldPolicyKind::Custom:
            policy.rho_fn(t, c, rho);
            break;
    }
    rho[1] = 2.0 * c[2] / om;
}

void csv_field(std::ostream& out, double v, bool defined) {
    out << ',';
    if (defined) out << v;
}

}  // namespace

PhaseReport classify(const GeneratingFunction& g) {
    const auto grid = probe_grid_eps(g.arity());
    PhaseReport rep;
    const auto roots = stationary_roots(g, grid);
    if (roots.empty()) return rep;
    rep.has_roots = true;
    rep.b_s = roots.back();
    if (roots.size() >= 2) rep.b_barrier = roots[roots.size() - 2];
    rep.v_at_min = v_of_eps(g, 1.0 - rep.b_s);
    rep.label = rep.v_at_min < 0.0 ? PhaseLabel::Unsat : PhaseLabel::ClusteredSat;
    return rep;
}

const char* phase_label_name(PhaseLabel label) {
    switch (label) {
        case PhaseLabel::Unclustered: return "unclustered";
        case PhaseLabel::ClusteredSat: return "clustered_sat";
        case PhaseLabel::Unsat: return "unsat";
    }
    return "unknown";
}

namespace {

double pure_threshold(std::uint32_t k, bool clustering) {
    if (k < 2) throw std::invalid_argument("pure threshold: k must be >= 2");
    const auto grid = probe_grid_eps(k);
    auto crossed = [&](double alpha) {
        const GeneratingFunction g = GeneratingFunction::pure(k, alpha);
        const double m = clustering ? min_v1(g, grid).value : min_v(g, grid).value;
        return m < 0.0;
    };
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (!crossed(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++guard > 12) throw std::runtime_error("pure threshold: no upper bracket");
    }
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        (crossed(mid) ? hi : lo) = mid;
    }
    return lo;
}

}  // namespace

double clustering_threshold_pure(std::uint32_t k) { return pure_threshold(k, true); }

double sat_threshold_pure(std::uint32_t k) {
    if (k == 2) return 0.5;  // both surfaces collapse onto the c_2 = 1/2 hyperplane
    return pure_threshold(k, false);
}

std::vector<SurfaceSectionPoint> surface_section(const SurfaceSectionSpec& spec) {
    const std::uint32_t k = spec.k;
    if (k < 2) throw std::invalid_argument("surface_section: k must be >= 2");
    if (spec.sweep_index < 2 || spec.sweep_index > k || spec.solve_index < 2 ||
        spec.solve_index > k)
        throw std::invalid_argument("surface_section: coordinate index out of [2,k]");
    if (spec.sweep_index == spec.solve_index)
        throw std::invalid_argument("surface_section: sweep and solve coordinates coincide");
    if (spec.num_points < 2) throw std::invalid_argument("surface_section: need >= 2 points");
    if (spec.sweep_hi < spec.sweep_lo)
        throw std::invalid_argument("surface_section: empty sweep range");
    for (const auto& [j, v] : spec.fixed) {
        (void)v;
        if (j == spec.sweep_index || j == spec.solve_index)
            throw std::invalid_argument("surface_section: fixed coordinate clashes with sweep/solve");
    }
    std::vector<double> base = section_densities(k, spec.fixed);
    if (spec.sweep_index == 2 && spec.sweep_hi > 0.5 + 1e-12)
        throw std::invalid_argument("surface_section: sweeping c_2 beyond 1/2");

    const auto grid = probe_grid_eps(k);
    const double cap = spec.solve_index == 2 ? 0.5 : 8.0;

    auto solve_on = [&](std::vector<double>& c, bool clustering) -> double {
        auto crossed = [&](double x) {
            c[spec.solve_index] = x;
            const GeneratingFunction g{std::vector<double>(c)};
            return (clustering ? min_v1(g, grid).value : min_v(g, grid).value) < 0.0;
        };
        if (crossed(0.0) || !crossed(cap)) return kNaN;  // no crossing inside [0, cap]
        double lo = 0.0, hi = cap;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (crossed(mid) ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };

    std::vector<SurfaceSectionPoint> out;
    out.reserve(spec.num_points);
    for (std::uint32_t i = 0; i < spec.num_points; ++i) {
        const double s = spec.sweep_lo + (spec.sweep_hi - spec.sweep_lo) *
                                             static_cast<double>(i) / (spec.num_points - 1);
        std::vector<double> c = base;
        c[spec.sweep_index] = s;
        check_c2_cap(c);
        SurfaceSectionPoint pt{s, kNaN, kNaN};
        pt.c_crit_d = solve_on(c, true);
        pt.c_crit_s = solve_on(c, false);
        out.push_back(pt);
    }
    return out;
}

SectionCrossings section_crossings(std::uint32_t k,
                                   std::span<const std::pair<std::uint32_t, double>> fixed,
                                   std::uint32_t sweep_index, double sweep_lo, double sweep_hi) {
    if (k < 2) throw std::invalid_argument("section_crossings: k must be >= 2");
    if (sweep_index < 2 || sweep_index > k)
        throw std::invalid_argument("section_crossings: sweep index out of [2,k]");
    if (sweep_hi < sweep_lo) throw std::invalid_argument("section_crossings: empty sweep range");
    for (const auto& [j, v] : fixed) {
        (void)v;
        if (j == sweep_index)
            throw std::invalid_argument("section_crossings: fixed coordinate clashes with sweep");
    }
    std::vector<double> base = section_densities(k, fixed);
    if (sweep_index == 2 && sweep_hi > 0.5 + 1e-12)
        throw std::invalid_argument("section_crossings: sweeping c_2 beyond 1/2");

    const auto grid = probe_grid_eps(k);
    auto bisect_sweep = [&](bool clustering) -> double {
        auto crossed = [&](double s) {
            std::vector<double> c = base;
            c[sweep_index] = s;
            check_c2_cap(c);
            const GeneratingFunction g(std::move(c));
            return (clustering ? min_v1(g, grid).value : min_v(g, grid).value) < 0.0;
        };
        if (crossed(sweep_lo) || !crossed(sweep_hi)) return kNaN;
        double lo = sweep_lo, hi = sweep_hi;
        while (hi - lo > 1e-10) {
            const double mid = 0.5 * (lo + hi);
            (crossed(mid) ? hi : lo) = mid;
        }
        return 0.5 * (lo + hi);
    };

    SectionCrossings cr{bisect_sweep(true), bisect_sweep(false), kNaN};
    // The contradiction surface is the hyperplane c_2 = 1/2: only a c_2 sweep
    // can cross it transversally.
    if (sweep_index == 2 && sweep_lo <= 0.5 && 0.5 <= sweep_hi) cr.sweep_at_q = 0.5;
    return cr;
}

namespace {

// End state of a trajectory stopped exactly at time t (no event stopping).
struct EndState {
    double t;
    std::vector<double> c;
    std::uint32_t jstar;
};

EndState run_to(std::uint32_t k, double alpha, const MeanfieldPolicy& policy,
                const TrajectoryOptions& base, double t) {
    TrajectoryOptions o = base;
    o.sample_stride = 0;
    o.stop_at_contradiction = false;
    o.t_max = t;
    TrajectoryResult r = integrate_trajectory(k, alpha, policy, o);
    return {r.t_end, std::move(r.c_end), r.jstar_end};
}

}  // namespace

TransitionLines transition_lines(std::uint32_t k, std::span<const double> alphas,
                                 const MeanfieldPolicy& policy, const TrajectoryOptions& opts) {
    if (k < 2) throw std::invalid_argument("transition_lines: k must be >= 2");
    const auto grid = probe_grid_eps(k);

    TrajectoryOptions scan = opts;
    scan.stop_at_contradiction = true;
    if (scan.sample_stride == 0)
        scan.sample_stride =
            std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(1e-3 / scan.dt)));

    TransitionLines lines;
    lines.points.reserve(alphas.size());
    for (const double alpha : alphas) {
        TransitionPoint p{};
        p.alpha = alpha;
        p.t_d = p.t_s = p.t_q = -1.0;
        p.b_d = p.b_s = kNaN;
        p.num_d = p.den_d = p.num_s = p.den_s = p.num_q = p.den_q = kNaN;

        const TrajectoryResult traj = integrate_trajectory(k, alpha, policy, scan);
        p.t_q = traj.t_contradiction;

        auto label_at = [&](std::span<const double> c, double t) {
            return classify(evolved_generating_function(c, t)).label;
        };
        // First sampled time whose label satisfies `hit`, refined by bisection
        // on re-integrated end states; -1 when the trajectory never gets there.
        auto first_crossing = [&](const std::function<bool(PhaseLabel)>& hit) -> double {
            std::size_t i = 0;
            while (i < traj.samples.size() &&
                   !hit(label_at(traj.samples[i].c, traj.samples[i].t)))
                ++i;
            if (i == traj.samples.size()) return -1.0;
            if (i == 0) return 0.0;
            double lo = traj.samples[i - 1].t, hi = traj.samples[i].t;
            while (hi - lo > 1e-6) {
                const double mid = 0.5 * (lo + hi);
                const EndState st = run_to(k, alpha, policy, opts, mid);
                (hit(label_at(st.c, st.t)) ? hi : lo) = mid;
            }
            return 0.5 * (lo + hi);
        };

        p.t_d = first_crossing([](PhaseLabel l) { return l != PhaseLabel::Unclustered; });
        p.t_s = first_crossing([](PhaseLabel l) { return l == PhaseLabel::Unsat; });

        std::vector<double> rho(k + 1, 0.0);
        if (p.t_d >= 0.0) {
            const EndState st = run_to(k, alpha, policy, opts, p.t_d);
            const GeneratingFunction g = evolved_generating_function(st.c, st.t);
            // At the birth of the root V' only touches zero; the ternary-refined
            // argmin is the stable locator for the tangency point b_d. The b = 0
            // probe (where V' = 0 exactly) is excluded so the interior dip wins
            // on either side of the tangency.
            p.b_d = 1.0 - min_v1(g, std::span<const double>(grid).subspan(1)).eps;
            reconstruct_rho(k, policy, st.t, st.c, st.jstar, rho);
            p.num_d = 1.0 - flux_deriv(rho, p.b_d);
            // The slope denominators differentiate G(b;t,a) = sum_j c_j(t) b^j,
            // i.e. (1-t) times the reduced-instance generating function.
            p.den_d = alpha_derivative(
                [&](double a) {
                    const EndState s2 = run_to(k, a, policy, opts, p.t_d);
                    return (1.0 - s2.t) * evolved_generating_function(s2.c, s2.t).deriv1(p.b_d);
                },
                alpha);
        }
        if (p.t_s >= 0.0) {
            const EndState st = run_to(k, alpha, policy, opts, p.t_s);
            const GeneratingFunction g = evolved_generating_function(st.c, st.t);
            p.b_s = classify(g).b_s;
            reconstruct_rho(k, policy, st.t, st.c, st.jstar, rho);
            p.num_s = p.b_s - flux(rho, p.b_s);
            p.den_s = alpha_derivative(
                [&](double a) {
                    const EndState s2 = run_to(k, a, policy, opts, p.t_s);
                    return (1.0 - s2.t) * evolved_generating_function(s2.c, s2.t).value(p.b_s);
                },
                alpha);
        }
        if (p.t_q >= 0.0) {
            const EndState st = run_to(k, alpha, policy, opts, p.t_q);
            reconstruct_rho(k, policy, st.t, st.c, st.jstar, rho);
            const double c3 = k >= 3 ? st.c[3] : 0.0;
            const double c2dot = (3.0 * c3 - 2.0 * st.c[2]) / (1.0 - st.t) - rho[2];
            p.num_q = 1.0 + 2.0 * c2dot;
            p.den_q = 2.0 * alpha_derivative(
                                [&](double a) {
                                    const EndState s2 = run_to(k, a, policy, opts, p.t_q);
                                    return s2.c[2];
                                },
                                alpha);
        }
        lines.points.push_back(p);
    }
    return lines;
}

CriticalPoint critical_point(std::uint32_t k, const MeanfieldPolicy& policy,
                             const CriticalPointOptions& opts) {
    if (k < 2) throw std::invalid_argument("critical_point: k must be >= 2");
    TrajectoryOptions topts = opts.trajectory;
    topts.sample_stride = 0;
    topts.stop_at_contradiction = true;

    auto crosses = [&](double alpha) {
        return integrate_trajectory(k, alpha, policy, topts).t_contradiction >= 0.0;
    };

    CriticalPoint cp;
    double lo = 0.0, hi = opts.alpha_hi;
    std::uint32_t it = 0;
    while (!crosses(hi)) {
        lo = hi;
        hi *= 2.0;
        if (++it >= 24) {
            cp.iterations = it;
            cp.alpha_a = hi;
            return cp;  // converged stays false: no contradiction bracket found
        }
    }
    while (hi - lo > opts.alpha_tol && it < opts.max_iters) {
        ++it;
        const double mid = 0.5 * (lo + hi);
        (crosses(mid) ? hi : lo) = mid;
    }
    cp.iterations = it;
    cp.converged = (hi - lo) <= opts.alpha_tol;
    cp.alpha_a = 0.5 * (lo + hi);

    // Tangency residuals from the certified-below side of the bracket.
    const TrajectoryResult res = integrate_trajectory(k, lo, policy, topts);
    cp.t_a = res.t_at_max;
    cp.residual_c2 = std::abs(res.max_ctilde2 - 0.5);
    cp.residual_c3 = std::abs(res.ctilde3_at_max - 1.0 / 6.0);
    return cp;
}

void transition_lines_to_csv(const TransitionLines& lines, std::ostream& out,
                             const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "alpha,t_d,t_s,t_q\n";
    out.precision(12);
    for (const TransitionPoint& p : lines.points) {
        out << p.alpha;
        csv_field(out, p.t_d, p.t_d >= 0.0);
        csv_field(out, p.t_s, p.t_s >= 0.0);
        csv_field(out, p.t_q, p.t_q >= 0.0);
        out << '\n';
    }
}

void surface_section_to_csv(std::span<const SurfaceSectionPoint> pts, std::ostream& out,
                            const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "sweep_value,c_crit_d,c_crit_s\n";
    out.precision(12);
    for (const SurfaceSectionPoint& p : pts) {
        out << p.sweep_value;
        csv_field(out, p.c_crit_d, !std::isnan(p.c_crit_d));
        csv_field(out, p.c_crit_s, !std::isnan(p.c_crit_s));
        out << '\n';
    }
}

}  // namespace uecsp
