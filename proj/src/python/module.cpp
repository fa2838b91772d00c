#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "uecsp/formula.hpp"
#include "uecsp/leaf_removal.hpp"
#include "uecsp/linear_solver.hpp"
#include "uecsp/meanfield.hpp"
#include "uecsp/phase.hpp"
#include "uecsp/scaling.hpp"
#include "uecsp/search.hpp"

namespace py = pybind11;
using namespace uecsp;

namespace {

HeuristicPolicy search_policy(const std::string& name) {
    if (name == "uc") return HeuristicPolicy::uc();
    if (name == "guc") return HeuristicPolicy::guc();
    throw std::invalid_argument("policy must be 'uc' or 'guc'");
}

MeanfieldPolicy field_policy(const std::string& name) {
    if (name == "uc") return MeanfieldPolicy::uc();
    if (name == "guc") return MeanfieldPolicy::guc();
    throw std::invalid_argument("policy must be 'uc' or 'guc'");
}

Assignment to_assignment(const Formula& f, const std::vector<std::int32_t>& values) {
    if (values.size() != f.num_vars())
        throw std::invalid_argument("assignment length must equal num_vars");
    Assignment a(values.size());
    a.value = values;
    return a;
}

const char* reason_name(StopReason r) {
    switch (r) {
        case StopReason::TimeLimit: return "time_limit";
        case StopReason::Contradiction: return "contradiction";
        case StopReason::Exhausted: return "exhausted";
        case StopReason::StepSizeFloor: return "step_size_floor";
    }
    return "unknown";
}

}  // namespace

PYBIND11_MODULE(_uecsp, m) {
    m.doc() = "simulation and mean-field analysis of random unit-coefficient equation CSPs";

    py::class_<Formula>(m, "Formula")
        .def_static("random", &Formula::random, py::arg("num_vars"), py::arg("arity"),
                    py::arg("alpha"), py::arg("domain"), py::arg("seed"))
        .def_static("parse_text", &Formula::parse_text, py::arg("text"))
        .def("to_text", &Formula::to_text)
        .def_property_readonly("num_vars", &Formula::num_vars)
        .def_property_readonly("arity", &Formula::arity)
        .def_property_readonly("domain", &Formula::domain)
        .def_property_readonly("num_clauses",
                               [](const Formula& f) { return f.clauses().size(); })
        .def_property_readonly("alive_clauses", &Formula::alive_clauses)
        .def("__repr__", [](const Formula& f) {
            std::ostringstream os;
            os << "Formula(d=" << f.domain() << ", N=" << f.num_vars() << ", M="
               << f.clauses().size() << ", k=" << f.arity() << ")";
            return os.str();
        });

    m.def(
        "check_solution",
        [](const Formula& f, const std::vector<std::int32_t>& values) {
            return check_solution(f, to_assignment(f, values));
        },
        py::arg("formula"), py::arg("values"));

    m.def(
        "gaussian_solve",
        [](const Formula& f) {
            SatVerdict v = gaussian_solve(f);
            py::dict out;
            out["satisfiable"] = v.satisfiable;
            out["rank"] = v.rank;
            out["witness"] = v.witness ? py::cast(v.witness->value) : py::none().cast<py::object>();
            return out;
        },
        py::arg("formula"));

    m.def(
        "leaf_remove",
        [](Formula& f, std::uint64_t seed) {
            CoreReport rep = leaf_remove(f, seed);
            py::dict out;
            out["empty"] = rep.empty;
            out["core_vars"] = rep.core_vars;
            out["core_clauses_by_len"] = rep.core_clauses_by_len;
            out["backbone_vars"] = rep.backbone_vars;
            out["backbone_fraction"] = rep.backbone_fraction;
            out["peel_steps"] = rep.peel_order.size();
            return out;
        },
        py::arg("formula"), py::arg("seed"),
        "Peels the formula to its 2-core in place and reports the core structure.");

    m.def(
        "run_search",
        [](Formula& f, const std::string& policy, std::uint64_t seed, std::uint64_t trace_stride) {
            auto [outcome, trace] = run_search(f, search_policy(policy), seed, trace_stride);
            py::dict out;
            out["result"] =
                outcome.result == SearchOutcome::Result::Satisfied ? "satisfied" : "contradiction";
            out["steps"] = outcome.steps;
            out["assignment"] = outcome.assignment.value;
            if (trace_stride > 0) {
                std::vector<double> ts, c2;
                for (const TracePoint& p : trace.points) {
                    ts.push_back(p.t);
                    c2.push_back(p.ctilde2);
                }
                out["trace_t"] = ts;
                out["trace_ctilde2"] = c2;
            }
            return out;
        },
        py::arg("formula"), py::arg("policy"), py::arg("seed"), py::arg("trace_stride") = 0,
        "Runs the heuristic to termination, mutating the formula.");

    m.def(
        "estimate_success_probability",
        [](std::uint32_t num_vars, std::uint32_t arity, std::uint32_t domain, double alpha,
           const std::string& policy, std::uint32_t runs, std::uint64_t seed, unsigned threads) {
            EnsembleSpec spec{num_vars, arity, domain, alpha};
            SuccessEstimate est =
                estimate_success_probability(spec, search_policy(policy), runs, seed, threads);
            py::dict out;
            out["p_hat"] = est.p_hat;
            out["stderr"] = est.stderr_;
            out["successes"] = est.successes;
            out["runs"] = est.runs;
            return out;
        },
        py::arg("num_vars"), py::arg("arity"), py::arg("domain"), py::arg("alpha"),
        py::arg("policy"), py::arg("runs"), py::arg("seed"), py::arg("threads") = 1);

    m.def(
        "integrate_trajectory",
        [](std::uint32_t k, double alpha, const std::string& policy, double dt, double t_max,
           std::uint64_t sample_stride) {
            TrajectoryOptions opts;
            opts.dt = dt;
            opts.t_max = t_max;
            opts.sample_stride = sample_stride;
            TrajectoryResult traj = integrate_trajectory(k, alpha, field_policy(policy), opts);
            py::dict out;
            out["reason"] = reason_name(traj.reason);
            out["t_end"] = traj.t_end;
            out["max_ctilde2"] = traj.max_ctilde2;
            out["t_at_max"] = traj.t_at_max;
            out["ctilde3_at_max"] = traj.ctilde3_at_max;
            out["t_contradiction"] = traj.t_contradiction;
            std::vector<double> ts, c2;
            for (const TrajectorySample& smp : traj.samples) {
                ts.push_back(smp.t);
                c2.push_back(smp.t < 1.0 ? smp.c[2] / (1.0 - smp.t) : 0.0);
            }
            out["sample_t"] = ts;
            out["sample_ctilde2"] = c2;
            out["tstar"] = traj.tstar.drops;
            return out;
        },
        py::arg("k"), py::arg("alpha"), py::arg("policy"), py::arg("dt") = 1e-5,
        py::arg("t_max") = 1.0 - 1e-6, py::arg("sample_stride") = 100);

    m.def("clustering_threshold", &clustering_threshold_pure, py::arg("k"));
    m.def("sat_threshold", &sat_threshold_pure, py::arg("k"));

    m.def(
        "critical_point",
        [](std::uint32_t k, const std::string& policy, double alpha_tol, double dt) {
            CriticalPointOptions opts;
            opts.alpha_tol = alpha_tol;
            opts.trajectory.dt = dt;
            CriticalPoint cp = critical_point(k, field_policy(policy), opts);
            py::dict out;
            out["alpha_a"] = cp.alpha_a;
            out["t_a"] = cp.t_a;
            out["residual_c2"] = cp.residual_c2;
            out["residual_c3"] = cp.residual_c3;
            out["converged"] = cp.converged;
            out["iterations"] = cp.iterations;
            return out;
        },
        py::arg("k"), py::arg("policy"), py::arg("alpha_tol") = 1e-6, py::arg("dt") = 1e-5);

    m.def(
        "transition_lines",
        [](std::uint32_t k, const std::vector<double>& alphas, const std::string& policy,
           double dt) {
            TrajectoryOptions opts;
            opts.dt = dt;
            TransitionLines lines = transition_lines(k, alphas, field_policy(policy), opts);
            py::list out;
            for (const TransitionPoint& p : lines.points) {
                py::dict row;
                row["alpha"] = p.alpha;
                row["t_d"] = p.t_d;
                row["t_s"] = p.t_s;
                row["t_q"] = p.t_q;
                row["b_d"] = p.b_d;
                row["b_s"] = p.b_s;
                out.append(row);
            }
            return out;
        },
        py::arg("k"), py::arg("alphas"), py::arg("policy"), py::arg("dt") = 1e-5);

    m.def(
        "classify",
        [](const std::vector<double>& densities) {
            PhaseReport rep = classify(GeneratingFunction(densities));
            py::dict out;
            out["label"] = phase_label_name(rep.label);
            out["b_s"] = rep.b_s;
            out["b_barrier"] = rep.b_barrier;
            out["v_at_min"] = rep.v_at_min;
            return out;
        },
        py::arg("densities"), "densities[j] is the length-j clause density; entries 0,1 must be 0.");

    m.def(
        "guc_threshold_sweep",
        [](const std::vector<std::uint32_t>& ks, double dt, double alpha_tol) {
            CriticalPointOptions opts;
            opts.alpha_tol = alpha_tol;
            opts.trajectory.dt = dt;
            ScalingSweep sweep = guc_threshold_sweep(ks, opts);
            py::list out;
            for (const ScalingPoint& pt : sweep.points) {
                py::dict row;
                row["k"] = pt.k;
                row["alpha_a"] = pt.alpha_a;
                row["k_alpha_minus_logk"] = pt.k_alpha_minus_logk;
                row["ok"] = pt.ok;
                row["error"] = pt.error;
                out.append(row);
            }
            return out;
        },
        py::arg("ks"), py::arg("dt") = 1e-5, py::arg("alpha_tol") = 1e-6);
}
