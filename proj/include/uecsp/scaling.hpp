#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uecsp/meanfield.hpp"
#include "uecsp/phase.hpp"

namespace uecsp {

// One k of the GUC large-k sweep: the algorithmic threshold plus the epoch
// schedule t*(j) recorded just below it (alpha_a - alpha_tol, so the
// trajectory runs through the whole level cascade without a contradiction).
struct ScalingPoint {
    std::uint32_t k = 0;
    double alpha_a = 0.0;
    double k_alpha_minus_logk = 0.0;
    TStarSchedule schedule;
    bool ok = false;
    std::string error;
};

struct ScalingSweep {
    std::vector<ScalingPoint> points;
};

ScalingSweep guc_threshold_sweep(std::span<const std::uint32_t> ks,
                                 const CriticalPointOptions& opts = {});

// Epoch-length deviations y(j) = k [t*(j) - t*(j+1)] - 1 against x = j/k for
// the interior levels j in [3, k-1] (boundary epochs excluded).
struct EpochDeviations {
    std::uint32_t k = 0;
    std::vector<double> x;
    std::vector<double> y;
};

EpochDeviations epoch_deviations(const ScalingPoint& point);

// Largest |k dt*(j) - 1| over the middle 80% (in level index) of the interior
// epochs. Throws std::runtime_error when fewer than 10 epochs are available.
double epoch_uniformity(const TStarSchedule& schedule, std::uint32_t k);

// Collapse of the deviations onto a k-independent master curve
//   y(j) = k^(-nu) f(j/k),   f(x) ~ x^(-mu) for x -> 0,
// by minimizing the across-k dispersion of y k^nu on a common log-x binning;
// mu from a log-log fit of the collapsed cloud over x in [1e-2, 1e-1], and
// c = mean(k alpha_a - log k).
struct CollapseFit {
    double nu = 0.0;
    double mu = 0.0;
    double c = 0.0;
    double dispersion_ratio = 0.0;  // D(0) / D(nu): > 1 when rescaling collapses
    bool ok = false;
    std::string error;
};

CollapseFit collapse_fit(std::span<const ScalingPoint> points);

// CSV: "k,alpha_a,k_alpha_minus_logk"
void sweep_to_csv(const ScalingSweep& sweep, std::ostream& out,
                  const std::string& header_comment = "");
// CSV: "k,x,scaled_value" — the collapsed cloud y k^nu at a given nu.
void collapse_to_csv(std::span<const ScalingPoint> points, double nu, std::ostream& out,
                     const std::string& header_comment = "");

}  // namespace uecsp
