#include "uecsp/stats.hpp"

#include <cmath>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace uecsp {

double gamma_q(double a, double x) { return boost::math::gamma_q(a, x); }

ChiSquareReport chi_square_poisson(std::span<const std::uint64_t> histogram, double lambda,
                                   bool mean_estimated) {
    std::uint64_t n = 0;
    for (auto c : histogram) n += c;
    if (n < 100) throw std::invalid_argument("chi_square_poisson: need at least 100 observations");
    if (!(lambda > 0)) throw std::invalid_argument("chi_square_poisson: lambda must be positive");

    // Poisson pmf over 0..L-1 plus upper tail; recurrence keeps it stable.
    const std::size_t len = histogram.size();
    std::vector<double> expected(len + 1, 0.0);
    double pmf = std::exp(-lambda);
    double cum = 0.0;
    for (std::size_t l = 0; l < len; ++l) {
        expected[l] = static_cast<double>(n) * pmf;
        cum += pmf;
        pmf *= lambda / static_cast<double>(l + 1);
    }
    expected[len] = static_cast<double>(n) * std::max(0.0, 1.0 - cum);  // tail >= len

    std::vector<double> obs(len + 1, 0.0);
    for (std::size_t l = 0; l < len; ++l) obs[l] = static_cast<double>(histogram[l]);

    // pool left-to-right so each group has expectation >= 5; an undersized
    // remainder is merged into the last complete group
    std::vector<double> group_exp, group_obs;
    double eg = 0.0, og = 0.0;
    for (std::size_t l = 0; l <= len; ++l) {
        eg += expected[l];
        og += obs[l];
        if (eg >= 5.0) {
            group_exp.push_back(eg);
            group_obs.push_back(og);
            eg = og = 0.0;
        }
    }
    if (eg > 0.0 || og > 0.0) {
        if (!group_exp.empty()) {
            group_exp.back() += eg;
            group_obs.back() += og;
        } else {
            group_exp.push_back(eg);
            group_obs.push_back(og);
        }
    }
    double stat = 0.0;
    for (std::size_t g = 0; g < group_exp.size(); ++g) {
        double diff = group_obs[g] - group_exp[g];
        stat += diff * diff / group_exp[g];
    }
    auto groups = static_cast<std::uint32_t>(group_exp.size());
    std::uint32_t reductions = 1 + (mean_estimated ? 1 : 0);
    std::uint32_t dof = groups > reductions ? groups - reductions : 1;

    ChiSquareReport rep;
    rep.statistic = stat;
    rep.dof = dof;
    rep.p_value = gamma_q(dof / 2.0, stat / 2.0);
    rep.sample_size = n;
    rep.mean = lambda;
    return rep;
}

std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z) {
    if (trials == 0) throw std::invalid_argument("wilson_interval: no trials");
    double n = static_cast<double>(trials);
    double p = static_cast<double>(successes) / n;
    double z2 = z * z;
    double denom = 1.0 + z2 / n;
    double center = (p + z2 / (2 * n)) / denom;
    double half = z * std::sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / denom;
    return {center - half, center + half};
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("least_squares: need >= 2 matching points");
    double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    double det = n * sxx - sx * sx;
    if (det == 0) throw std::invalid_argument("least_squares: degenerate abscissae");
    LinearFit fit;
    fit.slope = (n * sxy - sx * sy) / det;
    fit.intercept = (sy - fit.slope * sx) / n;
    return fit;
}

}  // namespace uecsp
