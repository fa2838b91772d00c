#include "doctest.h"

#include <cmath>
#include <sstream>
#include <vector>

#include "uecsp/phase.hpp"
#include "uecsp/stats.hpp"

using namespace uecsp;

TEST_CASE("pure-ensemble static thresholds") {
    // frozen values, computed independently: alpha_d(k) = min_b -log(1-b)/(k b^{k-1}),
    // alpha_s(k) through the root of b + (1-b)log(1-b) + (b/k)log(1-b)
    CHECK(std::abs(clustering_threshold_pure(3) - 0.8184691608) < 1e-6);
    CHECK(std::abs(sat_threshold_pure(3) - 0.9179352767) < 1e-6);
    CHECK(std::abs(clustering_threshold_pure(4) - 0.7722798398) < 1e-6);
    CHECK(std::abs(sat_threshold_pure(4) - 0.9767701649) < 1e-6);
    CHECK(clustering_threshold_pure(2) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(sat_threshold_pure(2) == doctest::Approx(0.5).epsilon(1e-9));
    CHECK(std::abs(clustering_threshold_pure(1024) - 0.0099612646) < 2e-6);
    for (std::uint32_t k : {3u, 4u})
        CHECK(clustering_threshold_pure(k) < sat_threshold_pure(k));
}

TEST_CASE("static classification across the pure k=3 line") {
    PhaseReport low = classify(GeneratingFunction::pure(3, 0.70));
    CHECK(low.label == PhaseLabel::Unclustered);
    CHECK(!low.has_roots);
    CHECK(low.b_s == doctest::Approx(0.0).epsilon(1e-12));

    PhaseReport mid = classify(GeneratingFunction::pure(3, 0.85));
    CHECK(mid.label == PhaseLabel::ClusteredSat);
    CHECK(mid.has_roots);
    CHECK(std::abs(mid.b_s - 0.8198699391) < 1e-4);  // largest root of 1-b = e^{-2.55 b^2}
    CHECK(std::abs(1.0 - mid.b_s - std::exp(-2.0 * 0.85 * 3.0 / 2.0 * mid.b_s * mid.b_s)) < 1e-6);
    CHECK(mid.b_barrier > 0.0);
    CHECK(mid.b_barrier < mid.b_s);
    CHECK(mid.v_at_min > 0.0);

    PhaseReport high = classify(GeneratingFunction::pure(3, 0.95));
    CHECK(high.label == PhaseLabel::Unsat);
    CHECK(high.v_at_min < 0.0);

    // labels only ever move forward as alpha grows
    int stage = 0;
    for (double a = 0.5; a <= 1.2 + 1e-9; a += 0.05) {
        PhaseReport rep = classify(GeneratingFunction::pure(3, a));
        int s = rep.label == PhaseLabel::Unclustered ? 0
                : rep.label == PhaseLabel::ClusteredSat ? 1
                                                        : 2;
        CHECK(s >= stage);
        stage = std::max(stage, s);
    }
    CHECK(stage == 2);
}

TEST_CASE("phase label names") {
    CHECK(std::string(phase_label_name(PhaseLabel::Unclustered)) == "unclustered");
    CHECK(std::string(phase_label_name(PhaseLabel::ClusteredSat)) == "clustered_sat");
    CHECK(std::string(phase_label_name(PhaseLabel::Unsat)) == "unsat");
}

TEST_CASE("surface section endpoints and coherence") {
    SurfaceSectionSpec spec;  // k = 3, sweep c_2 in [0, 0.5], solve c_3
    spec.num_points = 11;
    std::vector<SurfaceSectionPoint> pts = surface_section(spec);
    REQUIRE(pts.size() == 11);

    CHECK(pts.front().sweep_value == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(std::abs(pts.front().c_crit_d - 0.8184691608) < 1e-4);
    CHECK(std::abs(pts.front().c_crit_s - 0.9179352767) < 1e-4);

    double prev_d = 1e9, prev_s = 1e9;
    for (const SurfaceSectionPoint& p : pts) {
        if (std::isnan(p.c_crit_d) || std::isnan(p.c_crit_s)) continue;
        CHECK(p.c_crit_d <= p.c_crit_s + 1e-9);
        CHECK(p.c_crit_d <= prev_d + 1e-9);  // more c_2 mass needs less c_3
        CHECK(p.c_crit_s <= prev_s + 1e-9);
        prev_d = p.c_crit_d;
        prev_s = p.c_crit_s;

        if (p.sweep_value < 0.45 && p.c_crit_d > 1e-3) {
            PhaseReport below = classify(GeneratingFunction(
                std::vector<double>{0, 0, p.sweep_value, p.c_crit_d * (1 - 1e-3)}));
            PhaseReport above = classify(GeneratingFunction(
                std::vector<double>{0, 0, p.sweep_value, p.c_crit_d * (1 + 1e-3)}));
            CHECK(below.label == PhaseLabel::Unclustered);
            CHECK(above.has_roots);
        }
    }
    // both surfaces close onto the corner (1/2, 1/6)
    CHECK(std::abs(pts.back().sweep_value - 0.5) < 1e-12);
    if (!std::isnan(pts.back().c_crit_d)) CHECK(std::abs(pts.back().c_crit_d - 1.0 / 6) < 2e-3);
}

TEST_CASE("degenerate sections cross the three surfaces consistently") {
    // c_2 = 1/2 is the contradiction plane regardless of the rest
    std::vector<std::pair<std::uint32_t, double>> fix3{{3u, 0.2}};
    SectionCrossings q = section_crossings(3, fix3, 2, 0.0, 0.5);
    CHECK(std::abs(q.sweep_at_q - 0.5) < 1e-6);
    REQUIRE(!std::isnan(q.sweep_at_d));
    REQUIRE(!std::isnan(q.sweep_at_s));
    CHECK(q.sweep_at_d < q.sweep_at_s);
    CHECK(q.sweep_at_s < 0.5);

    // cross-validation between the two section solvers on Sigma_d
    std::vector<std::pair<std::uint32_t, double>> fixed_c3{{3u, 0.25}};
    SectionCrossings by_c2 = section_crossings(3, fixed_c3, 2, 0.0, 0.5);
    REQUIRE(!std::isnan(by_c2.sweep_at_d));
    std::vector<std::pair<std::uint32_t, double>> fixed_c2{{2u, by_c2.sweep_at_d}};
    SectionCrossings by_c3 = section_crossings(3, fixed_c2, 3, 0.02, 0.5);
    REQUIRE(!std::isnan(by_c3.sweep_at_d));
    CHECK(std::abs(by_c3.sweep_at_d - 0.25) < 1e-4);
    CHECK(by_c2.sweep_at_d < by_c2.sweep_at_s);
}

TEST_CASE("second-order scaling near the corner") {
    // on Sigma_d near (c_2, c_3) = (1/2, 1/6): 1/2 - c_2 = (3/8) eps^2 and
    // b_d = (3/2) eps with eps = 3 c_3 - 1/2
    std::vector<double> log_eps, log_gap, log_bd;
    for (double le = -2.0; le <= -1.0 + 1e-9; le += 0.25) {
        double eps = std::pow(10.0, le);
        double c3 = (0.5 + eps) / 3.0;
        std::vector<std::pair<std::uint32_t, double>> fixed{{3u, c3}};
        SectionCrossings sc = section_crossings(3, fixed, 2, 0.3, 0.5);
        REQUIRE(!std::isnan(sc.sweep_at_d));
        double gap = 0.5 - sc.sweep_at_d;
        REQUIRE(gap > 0.0);
        PhaseReport rep = classify(
            GeneratingFunction(std::vector<double>{0, 0, sc.sweep_at_d + 1e-8, c3}));
        REQUIRE(rep.has_roots);
        double b_d = rep.b_s;  // just past tangency the pair of roots has barely split
        log_eps.push_back(std::log(eps));
        log_gap.push_back(std::log(gap));
        log_bd.push_back(std::log(b_d));
    }
    LinearFit gap_fit = least_squares(log_eps, log_gap);
    LinearFit bd_fit = least_squares(log_eps, log_bd);
    CHECK(std::abs(gap_fit.slope - 2.0) < 0.15);
    CHECK(std::abs(bd_fit.slope - 1.0) < 0.15);
}

TEST_CASE("transition lines for the unit-clause flow at alpha = 0.8") {
    TrajectoryOptions opts;
    opts.dt = 1e-5;
    std::vector<double> alphas{0.8};
    TransitionLines lines = transition_lines(3, alphas, MeanfieldPolicy::uc(), opts);
    REQUIRE(lines.points.size() == 1);
    const TransitionPoint& p = lines.points[0];

    CHECK(std::abs(p.t_d - 0.02957) < 1e-3);
    CHECK(std::abs(p.t_s - 0.11697) < 1e-3);
    CHECK(std::abs(p.t_q - 0.295875854768) < 5e-4);  // 3 alpha t(1-t) = 1/2
    CHECK(p.t_d < p.t_s);
    CHECK(p.t_s < p.t_q);
    CHECK(p.b_d > 0.4);
    CHECK(p.b_d < 0.9);
    CHECK(p.b_s > p.b_d);

    // slope diagnostics against closed forms of the evolved ensemble
    auto ct2 = [&](double t) { return uc_ctilde2(3, p.alpha, t); };
    double a = p.alpha;
    {
        double t = p.t_d, b = p.b_d;
        double num = 1.0 - 2.0 * ct2(t);
        double den = 3.0 * (1 - t) * (std::pow(1 - (1 - b) * (1 - t), 2) - t * t);
        CHECK(p.num_d == doctest::Approx(num).epsilon(1e-2));
        CHECK(p.den_d == doctest::Approx(den).epsilon(1e-2));
    }
    {
        double t = p.t_s, b = p.b_s;
        double num = b * (1.0 - 2.0 * ct2(t));
        double den = std::pow(1 - (1 - b) * (1 - t), 3) - t * t * (3 * b * (1 - t) + t);
        CHECK(p.num_s == doctest::Approx(num).epsilon(1e-2));
        CHECK(p.den_s == doctest::Approx(den).epsilon(1e-2));
    }
    {
        double t = p.t_q;
        double num = 1.0 + 2.0 * 3.0 * a * (1 - t) * (1 - 3 * t);
        double den = 6.0 * t * (1 - t) * (1 - t);
        CHECK(p.num_q == doctest::Approx(num).epsilon(1e-2));
        CHECK(p.den_q == doctest::Approx(den).epsilon(1e-2));
    }
}

TEST_CASE("transition lines are ordered and monotone in alpha") {
    TrajectoryOptions opts;
    opts.dt = 1e-4;
    std::vector<double> alphas{0.70, 0.75, 0.80};  // all below the static clustering threshold
    TransitionLines lines = transition_lines(3, alphas, MeanfieldPolicy::uc(), opts);
    REQUIRE(lines.points.size() == 3);
    for (const TransitionPoint& p : lines.points) {
        CHECK(p.t_d > 0.0);
        CHECK(p.t_d < p.t_s);
        CHECK(p.t_s < p.t_q);
    }
    for (int i = 0; i < 2; ++i) {
        CHECK(lines.points[i].t_d > lines.points[i + 1].t_d);
        CHECK(lines.points[i].t_s > lines.points[i + 1].t_s);
        CHECK(lines.points[i].t_q > lines.points[i + 1].t_q);
    }

    std::vector<double> sub{0.60};  // below the algorithmic threshold: no crossings
    TransitionLines none = transition_lines(3, sub, MeanfieldPolicy::uc(), opts);
    REQUIRE(none.points.size() == 1);
    CHECK(none.points[0].t_d < 0.0);
    CHECK(none.points[0].t_s < 0.0);
    CHECK(none.points[0].t_q < 0.0);

    std::vector<double> sup{0.90};  // already clustered at t = 0, not yet unsat
    TransitionLines start = transition_lines(3, sup, MeanfieldPolicy::uc(), opts);
    REQUIRE(start.points.size() == 1);
    CHECK(start.points[0].t_d == 0.0);
    CHECK(start.points[0].t_s > 0.0);
}

TEST_CASE("algorithmic critical points with tangency residuals") {
    CriticalPoint uc = critical_point(3, MeanfieldPolicy::uc());
    CHECK(uc.converged);
    CHECK(std::abs(uc.alpha_a - 2.0 / 3.0) < 1e-4);
    CHECK(std::abs(uc.t_a - 0.5) < 5e-3);
    CHECK(uc.residual_c2 < 1e-3);
    CHECK(uc.residual_c3 < 1e-3);

    CriticalPoint guc = critical_point(3, MeanfieldPolicy::guc());
    CHECK(guc.converged);
    CHECK(std::abs(guc.alpha_a - 0.750873582632) < 5e-4);
    CHECK(std::abs(guc.t_a - 0.528869780142) < 2e-3);
    CHECK(guc.residual_c2 < 1e-3);
    CHECK(guc.residual_c3 < 1e-3);
}

TEST_CASE("no escape: phase labels only advance along a trajectory") {
    TrajectoryOptions opts;
    opts.dt = 1e-4;
    opts.sample_stride = 50;
    TrajectoryResult traj = integrate_trajectory(3, 0.8, MeanfieldPolicy::uc(), opts);
    int stage = 0;
    int seen[3] = {0, 0, 0};
    for (const TrajectorySample& smp : traj.samples) {
        if (smp.t >= 1.0 - 1e-9) break;
        PhaseReport rep = classify(evolved_generating_function(smp.c, smp.t));
        int s = rep.label == PhaseLabel::Unclustered ? 0
                : rep.label == PhaseLabel::ClusteredSat ? 1
                                                        : 2;
        CHECK(s >= stage);
        stage = std::max(stage, s);
        ++seen[s];
    }
    CHECK(seen[0] > 0);  // starts unclustered (alpha = 0.8 < alpha_d)
    CHECK(seen[2] > 0);  // ends beyond the sat surface before the contradiction
}

TEST_CASE("phase csv formats") {
    TrajectoryOptions opts;
    opts.dt = 1e-4;
    std::vector<double> alphas{0.8};
    TransitionLines lines = transition_lines(3, alphas, MeanfieldPolicy::uc(), opts);
    std::ostringstream oss;
    transition_lines_to_csv(lines, oss, "crossings");
    CHECK(oss.str().rfind("# crossings", 0) == 0);
    CHECK(oss.str().find("alpha,t_d,t_s,t_q") != std::string::npos);

    SurfaceSectionSpec spec;
    spec.num_points = 5;
    std::vector<SurfaceSectionPoint> pts = surface_section(spec);
    std::ostringstream sss;
    surface_section_to_csv(pts, sss, "section");
    CHECK(sss.str().rfind("# section", 0) == 0);
    CHECK(sss.str().find("sweep_value,c_crit_d,c_crit_s") != std::string::npos);
}
