#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "uecsp/generating_function.hpp"
#include "uecsp/meanfield.hpp"

namespace uecsp {

enum class PhaseLabel { Unclustered, ClusteredSat, Unsat };

// Static classification of a density vector through the potential V:
// no positive stationary root -> Unclustered; otherwise the largest root b_s
// is the secondary minimum / backbone fraction, and V(b_s) < 0 -> Unsat.
struct PhaseReport {
    PhaseLabel label = PhaseLabel::Unclustered;
    bool has_roots = false;
    double b_s = 0.0;       // largest stationary root (backbone fraction); 0 if none
    double b_barrier = 0.0; // the barrier root below b_s, when distinct
    double v_at_min = 0.0;  // V(b_s); 0 when no root
};

PhaseReport classify(const GeneratingFunction& g);

const char* phase_label_name(PhaseLabel label);

// Pure-ensemble static thresholds (c_j = alpha delta_{jk}), via bisection on
// alpha over a nested minimum scan of V' (clustering) or V (sat/unsat), to
// 1e-8 in alpha; the returned value is the certified-below bracket endpoint.
// k = 2 collapses both thresholds to 1/2 (the c_2 = 1/2 hyperplane).
double clustering_threshold_pure(std::uint32_t k);
double sat_threshold_pure(std::uint32_t k);

// Section of the clustering / sat-unsat surfaces: sweep one density coordinate
// and solve the critical value of another, all remaining coordinates fixed.
struct SurfaceSectionSpec {
    std::uint32_t k = 3;
    std::vector<std::pair<std::uint32_t, double>> fixed;  // (j, c_j)
    std::uint32_t sweep_index = 2;
    std::uint32_t solve_index = 3;
    double sweep_lo = 0.0;
    double sweep_hi = 0.5;
    std::uint32_t num_points = 51;
};

struct SurfaceSectionPoint {
    double sweep_value;
    double c_crit_d;  // solve-coordinate value on Sigma_d (NaN when no crossing)
    double c_crit_s;  // on Sigma_s (NaN when no crossing)
};

std::vector<SurfaceSectionPoint> surface_section(const SurfaceSectionSpec& spec);

// Degenerate section (every non-sweep coordinate fixed): sweep values at which
// the 1-parameter density line crosses each surface. NaN = no crossing.
struct SectionCrossings {
    double sweep_at_d;
    double sweep_at_s;
    double sweep_at_q;  // c_2 = 1/2
};

SectionCrossings section_crossings(std::uint32_t k,
                                   std::span<const std::pair<std::uint32_t, double>> fixed,
                                   std::uint32_t sweep_index, double sweep_lo, double sweep_hi);

// Dynamic transition lines: first crossing times of Sigma_d / Sigma_s / Sigma_q
// along integrated trajectories, with the slope-formula diagnostics
//   d alpha_d/dt = -(1 - F'(b_d)) / d_alpha G'(b_d)
//   d alpha_s/dt = -(b_s - F(b_s)) / d_alpha G(b_s)
//   d alpha_q/dt = -(1 + 2 dc_2/dt) / (2 d_alpha c_2)
// where G(b;t,a) = sum_j c_j(t) b^j and F(b) = sum_j rho_j b^j, evaluated at
// each crossing (alpha-derivatives by central finite differences).
struct TransitionPoint {
    double alpha;
    double t_d, t_s, t_q;  // negative = undefined (never crossed)
    double b_d, b_s;
    double num_d, den_d;
    double num_s, den_s;
    double num_q, den_q;
};

struct TransitionLines {
    std::vector<TransitionPoint> points;
};

TransitionLines transition_lines(std::uint32_t k, std::span<const double> alphas,
                                 const MeanfieldPolicy& policy,
                                 const TrajectoryOptions& opts = {});

// Algorithmic critical point: bisection on alpha with success criterion
// max_t ctilde_2 < 1/2; tangency residuals reported at the argmax.
struct CriticalPoint {
    double t_a = 0.0;
    double alpha_a = 0.0;
    double residual_c2 = 0.0;  // |max ctilde_2 - 1/2|
    double residual_c3 = 0.0;  // |ctilde_3(argmax) - 1/6|
    bool converged = false;
    std::uint32_t iterations = 0;
};

struct CriticalPointOptions {
    double alpha_tol = 1e-6;
    double alpha_hi = 1.0;       // initial upper bracket; doubled if not crossing
    std::uint32_t max_iters = 200;
    TrajectoryOptions trajectory{};
};

CriticalPoint critical_point(std::uint32_t k, const MeanfieldPolicy& policy,
                             const CriticalPointOptions& opts = {});

// CSV: "alpha,t_d,t_s,t_q" with empty fields for undefined crossings.
void transition_lines_to_csv(const TransitionLines& lines, std::ostream& out,
                             const std::string& header_comment = "");
// CSV: "sweep_value,c_crit_d,c_crit_s" with empty fields for NaN.
void surface_section_to_csv(std::span<const SurfaceSectionPoint> pts, std::ostream& out,
                            const std::string& header_comment = "");

}  // namespace uecsp
