#include "uecsp/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "uecsp/stats.hpp"

namespace uecsp {

ScalingSweep guc_threshold_sweep(std::span<const std::uint32_t> ks,
                                 const CriticalPointOptions& opts) {
    ScalingSweep sweep;
    sweep.points.reserve(ks.size());
    for (const std::uint32_t k : ks) {
        ScalingPoint pt;
        pt.k = k;
        try {
            if (k < 3) throw std::invalid_argument("scaling sweep: k must be >= 3");
            const CriticalPoint cp = critical_point(k, MeanfieldPolicy::guc(), opts);
            if (!cp.converged) throw std::runtime_error("critical point did not converge");
            pt.alpha_a = cp.alpha_a;
            pt.k_alpha_minus_logk = k * cp.alpha_a - std::log(static_cast<double>(k));

            TrajectoryOptions topts = opts.trajectory;
            topts.sample_stride = 0;
            topts.stop_at_contradiction = true;
            const TrajectoryResult res = integrate_trajectory(
                k, cp.alpha_a - opts.alpha_tol, MeanfieldPolicy::guc(), topts);
            pt.schedule = res.tstar;
            pt.ok = true;
        } catch (const std::exception& e) {
            pt.ok = false;
            pt.error = e.what();
        }
        sweep.points.push_back(std::move(pt));
    }
    return sweep;
}

namespace {

// Interior epoch lengths from a drop schedule: consecutive recorded drops
// (j+1, t1), (j, t2) give the level-j epoch [t1, t2]; levels k and 2 are
// boundary epochs (apex cascade / contradiction-terminated) and are skipped.
std::vector<std::pair<std::uint32_t, double>> epoch_lengths(const TStarSchedule& schedule,
                                                            std::uint32_t k) {
    std::vector<std::pair<std::uint32_t, double>> out;
    const auto& d = schedule.drops;
    for (std::size_t i = 1; i < d.size(); ++i) {
        const std::uint32_t j = d[i].first;
        if (d[i - 1].first != j + 1) continue;
        if (j < 3 || j >= k) continue;
        out.emplace_back(j, d[i].second - d[i - 1].second);
    }
    return out;
}

}  // namespace

EpochDeviations epoch_deviations(const ScalingPoint& point) {
    EpochDeviations dev;
    dev.k = point.k;
    const double kd = static_cast<double>(point.k);
    for (const auto& [j, dt] : epoch_lengths(point.schedule, point.k)) {
        dev.x.push_back(j / kd);
        dev.y.push_back(kd * dt - 1.0);
    }
    return dev;
}

double epoch_uniformity(const TStarSchedule& schedule, std::uint32_t k) {
    auto lengths = epoch_lengths(schedule, k);
    if (lengths.size() < 10)
        throw std::runtime_error("epoch uniformity: fewer than 10 interior epochs");
    std::sort(lengths.begin(), lengths.end());  // ascending level index
    const std::size_t trim = lengths.size() / 10;
    double worst = 0.0;
    for (std::size_t i = trim; i < lengths.size() - trim; ++i)
        worst = std::max(worst, std::abs(k * lengths[i].second - 1.0));
    return worst;
}

CollapseFit collapse_fit(std::span<const ScalingPoint> points) {
    CollapseFit fit;
    std::vector<const ScalingPoint*> ok;
    for (const ScalingPoint& p : points)
        if (p.ok) ok.push_back(&p);
    if (ok.size() < 3) {
        fit.error = "collapse fit: need >= 3 successful k values";
        return fit;
    }

    double c_sum = 0.0;
    for (const ScalingPoint* p : ok) c_sum += p->k_alpha_minus_logk;
    fit.c = c_sum / static_cast<double>(ok.size());

    // Common log-x binning of the deviation clouds over x in [x_lo, 1/2].
    double x_lo = 5e-3;
    for (const ScalingPoint* p : ok) x_lo = std::max(x_lo, 3.5 / p->k);
    const double x_hi = 0.5;
    constexpr int kBins = 24;
    const double ratio = std::log(x_hi / x_lo);

    std::vector<EpochDeviations> devs;
    devs.reserve(ok.size());
    for (const ScalingPoint* p : ok) devs.push_back(epoch_deviations(*p));

    // ybar[ki][b] = bin-mean deviation for the ki-th k (NaN = empty bin).
    std::vector<std::vector<double>> ybar(ok.size(), std::vector<double>(kBins, 0.0));
    std::vector<std::vector<int>> count(ok.size(), std::vector<int>(kBins, 0));
    for (std::size_t ki = 0; ki < devs.size(); ++ki) {
        for (std::size_t i = 0; i < devs[ki].x.size(); ++i) {
            const double x = devs[ki].x[i];
            if (x < x_lo || x >= x_hi) continue;
            const int b = std::min(kBins - 1,
                                   static_cast<int>(kBins * std::log(x / x_lo) / ratio));
            ybar[ki][b] += devs[ki].y[i];
            ++count[ki][b];
        }
    }
    for (std::size_t ki = 0; ki < devs.size(); ++ki)
        for (int b = 0; b < kBins; ++b)
            if (count[ki][b] > 0) ybar[ki][b] /= count[ki][b];

    auto dispersion = [&](double nu) {
        double var_sum = 0.0, mean_sq = 0.0;
        for (int b = 0; b < kBins; ++b) {
            double s = 0.0, s2 = 0.0;
            int n = 0;
            for (std::size_t ki = 0; ki < devs.size(); ++ki) {
                if (count[ki][b] == 0) continue;
                const double z = ybar[ki][b] * std::pow(static_cast<double>(devs[ki].k), nu);
                s += z;
                s2 += z * z;
                ++n;
            }
            if (n < 2) continue;
            const double mean = s / n;
            var_sum += s2 / n - mean * mean;
            mean_sq += mean * mean;
        }
        if (mean_sq <= 0.0) return std::numeric_limits<double>::infinity();
        return var_sum / mean_sq;
    };

    // Golden-section minimization of the dispersion over nu in [0, 1].
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = 0.0, b = 1.0;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = dispersion(x1), f2 = dispersion(x2);
    for (int it = 0; it < 80 && b - a > 1e-4; ++it) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = dispersion(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = dispersion(x2);
        }
    }
    fit.nu = 0.5 * (a + b);
    const double d0 = dispersion(0.0);
    const double dn = dispersion(fit.nu);
    fit.dispersion_ratio = dn > 0.0 ? d0 / dn : std::numeric_limits<double>::infinity();

    // Small-x power of the collapsed master curve from the pooled cloud.
    std::vector<double> lx, lz;
    for (std::size_t ki = 0; ki < devs.size(); ++ki) {
        const double kn = std::pow(static_cast<double>(devs[ki].k), fit.nu);
        for (std::size_t i = 0; i < devs[ki].x.size(); ++i) {
            const double x = devs[ki].x[i];
            const double z = devs[ki].y[i] * kn;
            if (x < 1e-2 || x > 1e-1 || z <= 0.0) continue;
            lx.push_back(std::log(x));
            lz.push_back(std::log(z));
        }
    }
    if (lx.size() < 8) {
        fit.error = "collapse fit: too few points in the small-x window";
        return fit;
    }
    fit.mu = -least_squares(lx, lz).slope;
    fit.ok = true;
    return fit;
}

void sweep_to_csv(const ScalingSweep& sweep, std::ostream& out,
                  const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "k,alpha_a,k_alpha_minus_logk\n";
    out.precision(12);
    for (const ScalingPoint& p : sweep.points) {
        if (!p.ok) continue;
        out << p.k << ',' << p.alpha_a << ',' << p.k_alpha_minus_logk << '\n';
    }
}

void collapse_to_csv(std::span<const ScalingPoint> points, double nu, std::ostream& out,
                     const std::string& header_comment) {
    if (!header_comment.empty()) out << "# " << header_comment << '\n';
    out << "k,x,scaled_value\n";
    out.precision(12);
    for (const ScalingPoint& p : points) {
        if (!p.ok) continue;
        const EpochDeviations dev = epoch_deviations(p);
        const double kn = std::pow(static_cast<double>(p.k), nu);
        for (std::size_t i = 0; i < dev.x.size(); ++i)
            out << p.k << ',' << dev.x[i] << ',' << dev.y[i] * kn << '\n';
    }
}

}  // namespace uecsp
