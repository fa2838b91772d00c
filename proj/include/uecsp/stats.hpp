#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace uecsp {

struct ChiSquareReport {
    double statistic = 0.0;
    std::uint32_t dof = 0;
    double p_value = 1.0;
    std::uint64_t sample_size = 0;
    double mean = 0.0;  // the Poisson mean tested against
};

// Pearson chi-square of an observed count histogram against Poisson(lambda).
// Cells are pooled left-to-right until each group has expected count >= 5, with
// the final group covering the upper tail. dof = groups - 1 - (mean_estimated).
// Throws std::invalid_argument when fewer than 100 observations.
ChiSquareReport chi_square_poisson(std::span<const std::uint64_t> histogram, double lambda,
                                   bool mean_estimated);

// Regularized upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a); the
// chi-square survival function is Q(dof/2, x/2).
double gamma_q(double a, double x);

// Wilson score interval for a binomial proportion.
std::pair<double, double> wilson_interval(std::uint64_t successes, std::uint64_t trials, double z);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace uecsp
