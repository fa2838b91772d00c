#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "uecsp/generating_function.hpp"

namespace uecsp {

// V(b) = -G(b) + b + (1-b) log(1-b) and its first three derivatives.
struct Potential {
    double v;
    double v1;  // -G'(b) - log(1-b)
    double v2;  // -G''(b) + 1/(1-b)
    double v3;  // -G'''(b) + 1/(1-b)^2
};

// Throws std::domain_error unless 0 <= b < 1.
Potential potential(const GeneratingFunction& g, double b);

// Mean-field peeling flow: b runs from 1 down to the largest root of
// 1 - b = exp(-G'(b)) (or to 0 when no positive root exists), with
// tau(b) = G(1) - G(b), lambda(b) = G'(b), gamma(b) = G(b) and
// n_1(b) = lambda [b - 1 + exp(-lambda)].
struct LeafRemovalFlow {
    struct Point {
        double tau, b, lambda, gamma, n1;
    };
    std::vector<Point> points;  // b decreasing from 1 to b_stop
    double b_stop = 0.0;        // 0 = empty core
    double core_clause_density = 0.0;  // gamma at b_stop
    bool core_nonempty() const { return b_stop > 0.0; }
};

LeafRemovalFlow leaf_removal_flow(const GeneratingFunction& g, std::uint32_t steps);

// Closed forms for the UC heuristic: c_j(t) = alpha C(k,j) (1-t)^j t^(k-j).
std::vector<double> uc_densities(std::uint32_t k, double alpha, double t);
double uc_ctilde2(std::uint32_t k, double alpha, double t);
// Evolved generating function under UC: G(b;t,a) = a[1-(1-b)(1-t)]^k - a t^(k-1)[k b (1-t) + t].
double uc_evolved_gf(std::uint32_t k, double alpha, double t, double b);

enum class MeanfieldPolicyKind { UC, GUC, Custom };

// rho_fn fills rho[2..k]: the net explicit-selection loss rates of Eq.-of-motion
// level j. Entry rho[1] is ignored on input; it is always the unit-propagation
// flux 2 c_2/(1-t), which holds for every clause-count-only heuristic.
struct MeanfieldPolicy {
    MeanfieldPolicyKind kind = MeanfieldPolicyKind::UC;
    std::function<void(double t, std::span<const double> c, std::span<double> rho)> rho_fn;

    static MeanfieldPolicy uc() { return {MeanfieldPolicyKind::UC, nullptr}; }
    static MeanfieldPolicy guc() { return {MeanfieldPolicyKind::GUC, nullptr}; }
    static MeanfieldPolicy custom(
        std::function<void(double, std::span<const double>, std::span<double>)> fn) {
        return {MeanfieldPolicyKind::Custom, std::move(fn)};
    }
};

struct TrajectoryOptions {
    double dt = 1e-5;
    double t_max = 1.0 - 1e-6;
    double density_floor = 1e-14;  // densities below are clamped to 0
    double tstar_tol = 1e-8;       // in-step bisection tolerance for event times
    std::uint64_t sample_stride = 100;  // 0 = record no samples
    bool stop_at_contradiction = true;  // stop when ctilde_2 reaches 1/2
    double empty_eps = 1e-12;           // all densities below -> Exhausted
    int max_halvings = 24;              // dt floor on a negative-density step
};

struct TrajectorySample {
    double t;
    std::vector<double> c;    // index 0..k; entries < 2 are zero
    std::uint32_t jstar;      // min positive-density length
    std::vector<double> rho;  // index 0..k; rho[1] = 2 c_2/(1-t)
    double gamma_dot;         // sum_j rho_j
};

// Times t*(j) at which j* drops from j to j-1 (recorded in drop order).
struct TStarSchedule {
    std::vector<std::pair<std::uint32_t, double>> drops;
};

enum class StopReason { TimeLimit, Contradiction, Exhausted, StepSizeFloor };

struct TrajectoryResult {
    std::vector<TrajectorySample> samples;
    TStarSchedule tstar;
    StopReason reason = StopReason::TimeLimit;
    double t_end = 0.0;
    std::vector<double> c_end;
    std::uint32_t jstar_end = 0;
    double max_ctilde2 = 0.0;     // running max of c_2/(1-t)
    double t_at_max = 0.0;        // argmax
    double ctilde3_at_max = 0.0;  // c_3/(1-t) at the argmax
    double t_contradiction = -1.0;  // ctilde_2 = 1/2 crossing; -1 = never
    bool rho_clamped = false;       // boundary-epoch clamp engaged (GUC)
    bool step_halved = false;       // negativity forced a locally smaller dt
};

// Explicit Euler integration of dc_j/dt = [(j+1)c_{j+1} - j c_j]/(1-t) - rho_j
// from c_j(0) = alpha delta_{jk}. GUC epoch transitions are located by in-step
// bisection to tstar_tol.
TrajectoryResult integrate_trajectory(std::uint32_t k, double alpha, const MeanfieldPolicy& policy,
                                      const TrajectoryOptions& opts = {});

// Reduced-instance generating function at a trajectory point: coefficients
// ctilde_j = c_j/(1-t). Throws std::domain_error when t >= 1.
GeneratingFunction evolved_generating_function(std::span<const double> c, double t);

// Selection flux F(b) = sum_j rho_j b^j and F'(b), with rho as stored in a sample.
double flux(std::span<const double> rho, double b);
double flux_deriv(std::span<const double> rho, double b);

// CSV: "t,c_2,...,c_k,jstar,gamma_dot"
void trajectory_to_csv(const TrajectoryResult& traj, std::uint32_t k, std::ostream& out,
                       const std::string& header_comment = "");
// CSV: "j,t_star"
void tstar_to_csv(const TStarSchedule& schedule, std::ostream& out,
                  const std::string& header_comment = "");

}  // namespace uecsp
