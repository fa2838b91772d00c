#include "uecsp/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace uecsp {

Potential potential(const GeneratingFunction& g, double b) {
    if (b < 0.0 || b >= 1.0) throw std::domain_error("potential: b must lie in [0, 1)");
    const double l1m = std::log1p(-b);
    Potential p;
    p.v = -g.value(b) + b + (1.0 - b) * l1m;
    p.v1 = -g.deriv1(b) - l1m;
    p.v2 = -g.deriv2(b) + 1.0 / (1.0 - b);
    p.v3 = -g.deriv3(b) + 1.0 / ((1.0 - b) * (1.0 - b));
    return p;
}

namespace {

// Largest root of 1 - b = exp(-G'(b)) on (0, 1), or 0 when only the trivial
// root exists. h(b) = G'(b) + log(1-b) vanishes at roots and h(1-) = -inf, so
// scanning down from 1 the first sign change brackets the largest root.
double largest_stop_root(const GeneratingFunction& g, std::uint32_t grid = 10000) {
    auto h = [&](double b) { return g.deriv1(b) + std::log1p(-b); };
    const double top = 1.0 - 1e-12;
    double prev_b = top;
    bool prev_neg = h(prev_b) <= 0.0;
    for (std::uint32_t i = 1; i <= grid; ++i) {
        double b = top * (1.0 - static_cast<double>(i) / grid);
        if (b < 0.0) b = 0.0;
        bool neg = h(b) <= 0.0;
        if (neg != prev_neg) {
            double lo = b, hi = prev_b;
            for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
                double mid = 0.5 * (lo + hi);
                if ((h(mid) <= 0.0) == prev_neg)
                    hi = mid;
                else
                    lo = mid;
            }
            return 0.5 * (lo + hi);
        }
        prev_b = b;
        prev_neg = neg;
        if (b == 0.0) break;
    }
    return 0.0;
}

}  // namespace

LeafRemovalFlow leaf_removal_flow(const GeneratingFunction& g, std::uint32_t steps) {
    if (steps < 2) steps = 2;
    LeafRemovalFlow flow;
    flow.b_stop = largest_stop_root(g);
    const double gamma_top = g.gamma0();
    flow.points.reserve(steps + 1);
    for (std::uint32_t i = 0; i <= steps; ++i) {
        double b = 1.0 - (1.0 - flow.b_stop) * static_cast<double>(i) / steps;
        LeafRemovalFlow::Point p;
        p.b = b;
        p.gamma = g.value(b);
        p.tau = gamma_top - p.gamma;
        p.lambda = g.deriv1(b);
        p.n1 = p.lambda * (b - 1.0 + std::exp(-p.lambda));
        flow.points.push_back(p);
    }
    flow.core_clause_density = g.value(flow.b_stop);
    return flow;
}

std::vector<double> uc_densities(std::uint32_t k, double alpha, double t) {
    if (t < 0.0 || t > 1.0) throw std::domain_error("uc_densities: t must lie in [0, 1]");
    std::vector<double> c(k + 1, 0.0);
    if (t == 1.0) return c;
    // binom(k, j) (1-t)^j t^(k-j), built from the j=k term downward.
    double term = alpha * std::pow(1.0 - t, static_cast<double>(k));
    for (std::uint32_t j = k; j >= 2; --j) {
        c[j] = term;
        term *= static_cast<double>(j) / (k - j + 1.0) * t / (1.0 - t);
    }
    return c;
}

double uc_ctilde2(std::uint32_t k, double alpha, double t) {
    // c_2/(1-t) = alpha binom(k,2) (1-t) t^(k-2)
    return alpha * (k * (k - 1.0) / 2.0) * (1.0 - t) * std::pow(t, static_cast<double>(k) - 2.0);
}

double uc_evolved_gf(std::uint32_t k, double alpha, double t, double b) {
    const double kk = static_cast<double>(k);
    return alpha * std::pow(1.0 - (1.0 - b) * (1.0 - t), kk) -
           alpha * std::pow(t, kk - 1.0) * (kk * b * (1.0 - t) + t);
}

namespace {

struct FlowState {
    double t;
    std::vector<double> c;  // index 0..k
    std::uint32_t jlo;      // j* for GUC; 2 for UC/custom
    std::uint32_t jhi;      // highest level still alive
};

// Explicit-selection rate at level j* during a GUC epoch (Eq. of motion's
// delta term); nonnegative throughout a proper epoch by the epoch invariant
// c_{j*}/(1-t) <= 1/(j*(j*-1)).
double guc_serve_rate(const FlowState& s) {
    double r = 1.0 / s.jlo - (s.jlo - 1.0) * s.c[s.jlo] / (1.0 - s.t);
    return r > 0.0 ? r : 0.0;
}

// One Euler step of size h over levels [lo, jhi]. rho_custom is null except
// for custom policies; serve is subtracted at level jlo only (GUC).
void euler_step(FlowState& s, double serve, const std::vector<double>* rho_custom, double h) {
    const double om = 1.0 - s.t;
    const std::uint32_t lo = std::max<std::uint32_t>(2, s.jlo);
    double upper = 0.0;  // (j+1) c_{j+1}
    for (std::uint32_t j = s.jhi; j >= lo; --j) {
        double own = static_cast<double>(j) * s.c[j];
        double rate = (upper - own) / om;
        if (rho_custom)
            rate -= (*rho_custom)[j];
        else if (j == s.jlo)
            rate -= serve;
        s.c[j] += h * rate;
        upper = own;
        if (j == lo) break;
    }
    s.t += h;
}

}  // namespace

TrajectoryResult integrate_trajectory(std::uint32_t k, double alpha, const MeanfieldPolicy& policy,
                                      const TrajectoryOptions& opts) {
    if (k < 2) throw std::invalid_argument("integrate_trajectory: k must be >= 2");
    if (alpha < 0) throw std::invalid_argument("integrate_trajectory: negative alpha");
    if (opts.dt <= 0) throw std::invalid_argument("integrate_trajectory: dt must be positive");
    if (policy.kind == MeanfieldPolicyKind::Custom && !policy.rho_fn)
        throw std::invalid_argument("integrate_trajectory: custom policy without rho_fn");

    const bool guc = policy.kind == MeanfieldPolicyKind::GUC;
    const bool custom = policy.kind == MeanfieldPolicyKind::Custom;

    TrajectoryResult res;
    FlowState s;
    s.t = 0.0;
    s.c.assign(k + 1, 0.0);
    s.c[k] = alpha;
    s.jlo = guc ? k : 2;
    s.jhi = k;

    std::vector<double> rho_custom;
    if (custom) rho_custom.assign(k + 1, 0.0);

    std::vector<bool> drop_seen(k + 1, false);
    auto record_drop = [&](std::uint32_t j, double t) {
        if (j <= k && !drop_seen[j]) {
            drop_seen[j] = true;
            res.tstar.drops.emplace_back(j, t);
        }
    };

    auto ctilde2 = [&](const FlowState& st) { return st.c[2] / (1.0 - st.t); };
    auto transition_due = [&](const FlowState& st) {
        return st.jlo >= 3 && st.c[st.jlo] / (1.0 - st.t) >= 1.0 / (st.jlo * (st.jlo - 1.0));
    };

    // Boundary epoch: when alpha > 1/(k(k-1)) the drop condition already holds
    // at t = 0, so j* falls before the first step; the serve-rate clamp is what
    // kept rho_{j*} >= 0 here, hence the flag.
    while (guc && transition_due(s)) {
        record_drop(s.jlo, 0.0);
        res.rho_clamped = true;
        s.jlo--;
    }

    auto track_max = [&](const FlowState& st) {
        double u = ctilde2(st);
        if (u > res.max_ctilde2) {
            res.max_ctilde2 = u;
            res.t_at_max = st.t;
            res.ctilde3_at_max = k >= 3 ? st.c[3] / (1.0 - st.t) : 0.0;
        }
    };

    auto record_sample = [&](const FlowState& st) {
        TrajectorySample smp;
        smp.t = st.t;
        smp.c = st.c;
        if (guc) {
            smp.jstar = st.jlo;  // epoch level; its density is 0 only at drop instants
        } else {
            std::uint32_t j = 2;
            while (j < st.jhi && st.c[j] == 0.0) ++j;
            smp.jstar = j;
        }
        smp.rho.assign(k + 1, 0.0);
        const double om = 1.0 - st.t;
        if (guc && st.jlo >= 2) {
            smp.rho[st.jlo] = guc_serve_rate(st);
            if (st.jlo >= 3) smp.rho[st.jlo - 1] = st.jlo * st.c[st.jlo] / om;
        } else if (custom) {
            policy.rho_fn(st.t, std::span<const double>(st.c), std::span<double>(smp.rho));
        }
        smp.rho[1] = 2.0 * st.c[2] / om;
        smp.gamma_dot = 0.0;
        for (std::uint32_t j = 1; j <= k; ++j) smp.gamma_dot += smp.rho[j];
        res.samples.push_back(std::move(smp));
    };

    track_max(s);
    if (opts.sample_stride != 0) record_sample(s);

    std::uint64_t step_index = 0;
    res.reason = StopReason::TimeLimit;

    while (s.t < opts.t_max) {
        double h = std::min(opts.dt, opts.t_max - s.t);
        FlowState prev = s;

        double serve = guc ? guc_serve_rate(s) : 0.0;
        if (custom) {
            std::fill(rho_custom.begin(), rho_custom.end(), 0.0);
            policy.rho_fn(s.t, std::span<const double>(s.c), std::span<double>(rho_custom));
        }
        const std::vector<double>* rc = custom ? &rho_custom : nullptr;

        // A density far below zero means the step overshot a crossing: halve h
        // down to a floor, then let the clamp absorb what remains.
        int halvings = 0;
        for (;;) {
            euler_step(s, serve, rc, h);
            bool bad = false;
            for (std::uint32_t j = std::max<std::uint32_t>(2, s.jlo); j <= s.jhi; ++j)
                if (s.c[j] < -10.0 * h) { bad = true; break; }
            if (!bad || halvings >= opts.max_halvings) break;
            s = prev;
            h *= 0.5;
            halvings++;
            res.step_halved = true;
        }
        for (std::uint32_t j = std::max<std::uint32_t>(2, s.jlo); j <= s.jhi; ++j)
            if (s.c[j] < opts.density_floor) s.c[j] = 0.0;

        // First crossing of the contradiction surface ctilde_2 = 1/2: bisect
        // along the (linear) Euler segment for the crossing time t_q.
        if (res.t_contradiction < 0.0 && ctilde2(s) >= 0.5) {
            double lo = 0.0, hi = h;
            FlowState probe;
            while (hi - lo > opts.tstar_tol) {
                double mid = 0.5 * (lo + hi);
                probe = prev;
                euler_step(probe, serve, rc, mid);
                (ctilde2(probe) >= 0.5 ? hi : lo) = mid;
            }
            probe = prev;
            euler_step(probe, serve, rc, hi);
            s = probe;
            res.t_contradiction = s.t;
            track_max(s);
            if (guc && s.jlo == 2) record_drop(2, s.t);
            if (opts.stop_at_contradiction) {
                res.reason = StopReason::Contradiction;
                if (opts.sample_stride != 0) record_sample(s);
                break;
            }
        }

        // GUC epoch end: c_{j*}/(1-t) reaches 1/(j*(j*-1)); bisect for t*(j*).
        if (guc && transition_due(s)) {
            const std::uint32_t j = s.jlo;
            const double thr = 1.0 / (j * (j - 1.0));
            double lo = 0.0, hi = h;
            FlowState probe;
            while (hi - lo > opts.tstar_tol) {
                double mid = 0.5 * (lo + hi);
                probe = prev;
                euler_step(probe, serve, rc, mid);
                (probe.c[j] / (1.0 - probe.t) >= thr ? hi : lo) = mid;
            }
            probe = prev;
            euler_step(probe, serve, rc, hi);
            s = probe;
            record_drop(j, s.t);
            s.jlo = j - 1;
        }

        // Maintain the active window: dead top levels never regrow (no source
        // above them); j* moves back up only when its level emptied and the
        // inflow (j*+1)c_{j*+1}/(1-t) cannot beat the serve cap 1/j*.
        while (s.jhi > std::max<std::uint32_t>(2, s.jlo) && s.c[s.jhi] == 0.0) s.jhi--;
        if (guc) {
            while (s.jlo < s.jhi && s.c[s.jlo] == 0.0 &&
                   (s.jlo + 1.0) * s.c[s.jlo + 1] / (1.0 - s.t) <= 1.0 / s.jlo)
                s.jlo++;
        }

        track_max(s);
        step_index++;
        if (opts.sample_stride != 0 && step_index % opts.sample_stride == 0) record_sample(s);

        if ((step_index & 0xFF) == 0) {
            double total = 0.0;
            for (std::uint32_t j = std::max<std::uint32_t>(2, s.jlo); j <= s.jhi; ++j)
                total += s.c[j];
            if (total < opts.empty_eps) {
                res.reason = StopReason::Exhausted;
                break;
            }
        }
    }

    res.t_end = s.t;
    res.c_end = s.c;
    res.jstar_end = s.jlo;
    if (opts.sample_stride != 0 && (res.samples.empty() || res.samples.back().t != s.t))
        record_sample(s);
    return res;
}

GeneratingFunction evolved_generating_function(std::span<const double> c, double t) {
    if (t >= 1.0) throw std::domain_error("evolved_generating_function: t must be < 1");
    std::vector<double> ct(c.size() < 3 ? 3 : c.size(), 0.0);
    for (std::size_t j = 2; j < c.size(); ++j) ct[j] = c[j] / (1.0 - t);
    return GeneratingFunction(std::move(ct));
}

double flux(std::span<const double> rho, double b) {
    double acc = 0.0;
    for (std::size_t j = rho.size(); j-- > 1;) acc = acc * b + rho[j];
    return acc * b;
}

double flux_deriv(std::span<const double> rho, double b) {
    double acc = 0.0;
    for (std::size_t j = rho.size(); j-- > 1;) acc = acc * b + static_cast<double>(j) * rho[j];
    return acc;
}

void trajectory_to_csv(const TrajectoryResult& traj, std::uint32_t k, std::ostream& out,
                       const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "t";
    for (std::uint32_t j = 2; j <= k; ++j) out << ",c_" << j;
    out << ",jstar,gamma_dot\n";
    out.precision(12);
    for (const TrajectorySample& smp : traj.samples) {
        out << smp.t;
        for (std::uint32_t j = 2; j <= k; ++j) out << ',' << smp.c[j];
        out << ',' << smp.jstar << ',' << smp.gamma_dot << '\n';
    }
}

void tstar_to_csv(const TStarSchedule& schedule, std::ostream& out,
                  const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "j,t_star\n";
    out.precision(12);
    for (const auto& [j, t] : schedule.drops) out << j << ',' << t << '\n';
}

}  // namespace uecsp
