// uecsp: command-line front end for the (k,d)-UE-CSP toolkit.
//
// Subcommands: generate, solve, search, leafremove, trajectory, phase,
// thresholds, scaling. Every output file begins with a comment line (or, for
// JSON, an "_invocation" field) carrying the full invocation and seed, so any
// artifact can be regenerated bit-identically. Exit code 0 iff all requested
// computations converged.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "uecsp/formula.hpp"
#include "uecsp/leaf_removal.hpp"
#include "uecsp/linear_solver.hpp"
#include "uecsp/meanfield.hpp"
#include "uecsp/phase.hpp"
#include "uecsp/scaling.hpp"
#include "uecsp/search.hpp"

namespace {

using namespace uecsp;

std::string g_invocation;

std::string quote_args(int argc, char** argv) {
    std::ostringstream os;
    for (int i = 0; i < argc; ++i) {
        if (i) os << ' ';
        std::string a = argv[i];
        if (a.find(' ') != std::string::npos) os << '"' << a << '"';
        else os << a;
    }
    return os.str();
}

std::string json_escape(const std::string& s) {
    std::string out;
    for (char ch : s) {
        if (ch == '"' || ch == '\\') out += '\\';
        out += ch;
    }
    return out;
}

// Output sink: path or stdout ("-").
class Sink {
public:
    explicit Sink(const std::string& path) {
        if (!path.empty() && path != "-") {
            file_.open(path);
            if (!file_) throw CLI::RuntimeError("cannot open output file: " + path, 4);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

// inclusive lo:hi:step range, or a single value
std::vector<double> parse_range(const std::string& text) {
    std::vector<double> vals;
    std::size_t p1 = text.find(':');
    if (p1 == std::string::npos) {
        vals.push_back(std::stod(text));
        return vals;
    }
    std::size_t p2 = text.find(':', p1 + 1);
    if (p2 == std::string::npos) throw CLI::ValidationError("range must be lo:hi:step");
    double lo = std::stod(text.substr(0, p1));
    double hi = std::stod(text.substr(p1 + 1, p2 - p1 - 1));
    double step = std::stod(text.substr(p2 + 1));
    if (step <= 0 || hi < lo) throw CLI::ValidationError("range must satisfy lo <= hi, step > 0");
    for (int i = 0;; ++i) {
        double v = lo + step * i;
        if (v > hi + step * 1e-9) break;
        vals.push_back(std::min(v, hi));
    }
    return vals;
}

// "c2=0.4,c3=0.1" -> [(2,0.4),(3,0.1)]
std::vector<std::pair<std::uint32_t, double>> parse_density_fixes(const std::string& text) {
    std::vector<std::pair<std::uint32_t, double>> fixes;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        std::size_t eq = item.find('=');
        if (eq == std::string::npos || item[0] != 'c')
            throw CLI::ValidationError("density list must look like c2=0.4,c3=0.1");
        fixes.emplace_back(static_cast<std::uint32_t>(std::stoul(item.substr(1, eq - 1))),
                           std::stod(item.substr(eq + 1)));
    }
    return fixes;
}

HeuristicPolicy search_policy(const std::string& name) {
    if (name == "uc") return HeuristicPolicy::uc();
    if (name == "guc") return HeuristicPolicy::guc();
    throw CLI::ValidationError("policy must be uc or guc");
}

MeanfieldPolicy field_policy(const std::string& name) {
    if (name == "uc") return MeanfieldPolicy::uc();
    if (name == "guc") return MeanfieldPolicy::guc();
    throw CLI::ValidationError("policy must be uc or guc");
}

struct InstanceArgs {
    std::string in_path;
    std::uint32_t k = 3, d = 2, n = 1000;
    double alpha = 0.5;
    std::uint64_t seed = 1;
};

void add_instance_flags(CLI::App* cmd, InstanceArgs& args, bool allow_file) {
    if (allow_file)
        cmd->add_option("--in", args.in_path, "read the formula from a file instead of sampling one");
    cmd->add_option("--k", args.k, "clause arity")->check(CLI::Range(2u, 1u << 20));
    cmd->add_option("--d", args.d, "domain size")->check(CLI::Range(2u, 1u << 20));
    cmd->add_option("--n", args.n, "number of variables");
    cmd->add_option("--alpha", args.alpha, "clause density M/N")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", args.seed, "RNG seed");
}

Formula load_or_sample(const InstanceArgs& args) {
    if (!args.in_path.empty()) {
        std::ifstream in(args.in_path);
        if (!in) throw CLI::RuntimeError("cannot open formula file: " + args.in_path, 4);
        return Formula::parse(in);
    }
    if (args.n < args.k) throw CLI::ValidationError("need n >= k");
    return Formula::random(args.n, args.k, args.alpha, args.d, args.seed);
}

// ---------------------------------------------------------------------------

int cmd_generate(const InstanceArgs& args, const std::string& out_path) {
    Formula f = load_or_sample(args);
    Sink sink(out_path);
    sink.stream() << "# " << g_invocation << " [seed=" << args.seed << "]\n";
    f.serialize(sink.stream());
    return 0;
}

int cmd_solve(const InstanceArgs& args, const std::string& out_path, const std::string& witness_path) {
    Formula f = load_or_sample(args);
    SatVerdict verdict = gaussian_solve(f);
    Sink sink(out_path);
    sink.stream() << "{\"_invocation\":\"" << json_escape(g_invocation) << "\",\"satisfiable\":"
                  << (verdict.satisfiable ? "true" : "false") << ",\"rank\":" << verdict.rank
                  << ",\"num_vars\":" << f.num_vars() << ",\"num_clauses\":" << f.alive_clauses()
                  << "}\n";
    if (!witness_path.empty() && verdict.witness) {
        std::ofstream w(witness_path);
        w << "# " << g_invocation << "\n";
        for (std::size_t v = 0; v < verdict.witness->value.size(); ++v)
            w << v << ' ' << verdict.witness->value[v] << '\n';
    }
    return 0;
}

int cmd_search(const InstanceArgs& args, const std::string& alphas_text, const std::string& policy_name,
               std::uint32_t runs, unsigned threads, const std::string& out_path) {
    std::vector<double> alphas =
        alphas_text.empty() ? std::vector<double>{args.alpha} : parse_range(alphas_text);
    HeuristicPolicy policy = search_policy(policy_name);
    Sink sink(out_path);
    std::ostream& os = sink.stream();
    os << "# " << g_invocation << " [seed=" << args.seed << "]\n";
    os << "alpha,p_hat,stderr\n";
    os.precision(10);
    for (double a : alphas) {
        EnsembleSpec spec{args.n, args.k, args.d, a};
        SuccessEstimate est = estimate_success_probability(spec, policy, runs, args.seed, threads);
        os << a << ',' << est.p_hat << ',' << est.stderr_ << '\n';
    }
    return 0;
}

int cmd_leafremove(const InstanceArgs& args, std::uint64_t peel_seed, const std::string& out_path) {
    Formula f = load_or_sample(args);
    CoreReport rep = leaf_remove(f, peel_seed);
    std::string body = core_report_json(rep);
    Sink sink(out_path);
    sink.stream() << "{\"_invocation\":\"" << json_escape(g_invocation) << "\","
                  << body.substr(1) << "\n";
    return 0;
}

// Potential snapshot: b, V(b), V'(b) on a uniform grid for the evolved instance at time t.
void write_potential_snapshot(std::uint32_t k, double alpha, const MeanfieldPolicy& policy,
                              const TrajectoryOptions& base, double t, const std::string& path) {
    TrajectoryOptions opts = base;
    opts.sample_stride = 0;
    opts.stop_at_contradiction = false;
    opts.t_max = t;
    GeneratingFunction g = GeneratingFunction::pure(k, alpha);
    if (t > 0) {
        TrajectoryResult r = integrate_trajectory(k, alpha, policy, opts);
        g = evolved_generating_function(r.c_end, r.t_end);
    }
    std::ofstream out(path);
    out << "# " << g_invocation << " [t=" << t << "]\n";
    out << "b,v,v1\n";
    out.precision(12);
    for (int i = 0; i <= 999; ++i) {
        double b = i / 1000.0;
        Potential p = potential(g, b);
        out << b << ',' << p.v << ',' << p.v1 << '\n';
    }
}

int cmd_trajectory(std::uint32_t k, double alpha, const std::string& policy_name, double dt,
                   std::uint64_t stride, const std::string& out_path, const std::string& tstar_path,
                   bool crossings, const std::string& snapshot_prefix) {
    MeanfieldPolicy policy = field_policy(policy_name);
    TrajectoryOptions opts;
    opts.dt = dt;
    opts.sample_stride = stride;
    TrajectoryResult traj = integrate_trajectory(k, alpha, policy, opts);

    if (!out_path.empty()) {
        Sink sink(out_path);
        trajectory_to_csv(traj, k, sink.stream(), g_invocation);
    }
    if (!tstar_path.empty()) {
        Sink sink(tstar_path);
        tstar_to_csv(traj.tstar, sink.stream(), g_invocation);
    }

    double t_d = -1, t_s = -1, t_q = -1;
    if (crossings || !snapshot_prefix.empty()) {
        std::vector<double> one{alpha};
        TransitionLines lines = transition_lines(k, one, policy, opts);
        const TransitionPoint& p = lines.points.front();
        t_d = p.t_d;
        t_s = p.t_s;
        t_q = p.t_q;
        if (crossings) {
            std::ostringstream js;
            js.precision(10);
            js << "{\"_invocation\":\"" << json_escape(g_invocation) << "\",\"alpha\":" << alpha
               << ",\"t_d\":" << t_d << ",\"t_s\":" << t_s << ",\"t_q\":" << t_q << "}";
            std::cout << js.str() << '\n';
        }
    }
    if (!snapshot_prefix.empty()) {
        std::vector<double> times{0.0};
        if (t_d >= 0) times.push_back(t_d);
        if (t_d >= 0 && t_s >= 0) times.push_back(0.5 * (t_d + t_s));
        if (t_s >= 0) times.push_back(t_s);
        if (t_s >= 0 && t_q >= 0) times.push_back(0.5 * (t_s + t_q));
        for (std::size_t i = 0; i < times.size(); ++i)
            write_potential_snapshot(k, alpha, policy, opts, times[i],
                                     snapshot_prefix + std::to_string(i) + ".csv");
    }
    return traj.reason == StopReason::StepSizeFloor ? 3 : 0;
}

int cmd_phase(std::uint32_t k, const std::string& alphas_text, const std::string& policy_name,
              double dt, const std::string& section_text, const std::string& densities_text,
              std::uint32_t sweep_index, std::uint32_t solve_index, double lo, double hi,
              std::uint32_t points, const std::string& out_path) {
    if (!densities_text.empty()) {
        auto fixes = parse_density_fixes(densities_text);
        std::vector<double> c(k + 1, 0.0);
        for (auto [j, v] : fixes) {
            if (j < 2 || j > k) throw CLI::ValidationError("density index out of range");
            c[j] = v;
        }
        PhaseReport rep = classify(GeneratingFunction{std::move(c)});
        Sink sink(out_path);
        std::ostream& os = sink.stream();
        os.precision(10);
        os << "{\"_invocation\":\"" << json_escape(g_invocation) << "\",\"label\":\""
           << phase_label_name(rep.label) << "\",\"b_s\":" << rep.b_s << ",\"b_barrier\":"
           << rep.b_barrier << ",\"v_at_min\":" << rep.v_at_min << "}\n";
        return 0;
    }
    if (!alphas_text.empty()) {
        std::vector<double> alphas = parse_range(alphas_text);
        TrajectoryOptions opts;
        opts.dt = dt;
        TransitionLines lines = transition_lines(k, alphas, field_policy(policy_name), opts);
        Sink sink(out_path);
        transition_lines_to_csv(lines, sink.stream(), g_invocation);
        return 0;
    }
    SurfaceSectionSpec spec;
    spec.k = k;
    spec.fixed = parse_density_fixes(section_text);  // "" -> no fixes
    spec.sweep_index = sweep_index;
    spec.solve_index = solve_index;
    spec.sweep_lo = lo;
    spec.sweep_hi = hi;
    spec.num_points = points;
    std::vector<SurfaceSectionPoint> pts = surface_section(spec);
    Sink sink(out_path);
    surface_section_to_csv(pts, sink.stream(), g_invocation);
    return 0;
}

int cmd_thresholds(std::uint32_t k, double tol, double dt, const std::string& out_path) {
    double alpha_d = clustering_threshold_pure(k);
    double alpha_s = sat_threshold_pure(k);
    CriticalPointOptions opts;
    opts.alpha_tol = tol;
    opts.trajectory.dt = dt;
    CriticalPoint uc = critical_point(k, MeanfieldPolicy::uc(), opts);
    CriticalPoint guc = critical_point(k, MeanfieldPolicy::guc(), opts);
    Sink sink(out_path);
    std::ostream& os = sink.stream();
    os.precision(10);
    os << "{\"_invocation\":\"" << json_escape(g_invocation) << "\",\"k\":" << k
       << ",\"alpha_d\":" << alpha_d << ",\"alpha_s\":" << alpha_s
       << ",\"alpha_a_uc\":" << uc.alpha_a << ",\"alpha_a_guc\":" << guc.alpha_a
       << ",\"t_a_uc\":" << uc.t_a << ",\"t_a_guc\":" << guc.t_a << "}\n";
    return uc.converged && guc.converged ? 0 : 3;
}

int cmd_scaling(const std::string& ks_text, std::uint32_t kmax, bool allow_large, double dt,
                double tol, const std::string& sweep_path, const std::string& collapse_path,
                const std::string& out_path) {
    std::vector<std::uint32_t> ks;
    if (!ks_text.empty()) {
        std::stringstream ss(ks_text);
        std::string item;
        while (std::getline(ss, item, ',')) ks.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    } else {
        for (std::uint32_t k = 256; k <= kmax; k *= 2) ks.push_back(k);
    }
    for (std::uint32_t k : ks)
        if (k > 4096 && !allow_large)
            throw CLI::ValidationError("k > 4096 requires --allow-large (expect a long run)");

    CriticalPointOptions opts;
    opts.alpha_tol = tol;
    opts.trajectory.dt = dt;
    ScalingSweep sweep = guc_threshold_sweep(ks, opts);
    if (!sweep_path.empty()) {
        Sink sink(sweep_path);
        sweep_to_csv(sweep, sink.stream(), g_invocation);
    }
    CollapseFit fit = collapse_fit(sweep.points);
    if (!collapse_path.empty() && fit.ok) {
        Sink sink(collapse_path);
        collapse_to_csv(sweep.points, fit.nu, sink.stream(), g_invocation);
    }
    Sink sink(out_path);
    std::ostream& os = sink.stream();
    os.precision(10);
    os << "{\"_invocation\":\"" << json_escape(g_invocation) << "\",\"nu\":" << fit.nu
       << ",\"mu\":" << fit.mu << ",\"c\":" << fit.c << ",\"dispersion_ratio\":"
       << fit.dispersion_ratio << ",\"ok\":" << (fit.ok ? "true" : "false");
    if (!fit.ok) os << ",\"error\":\"" << json_escape(fit.error) << "\"";
    os << "}\n";
    bool all_ok = fit.ok;
    for (const ScalingPoint& p : sweep.points) all_ok = all_ok && p.ok;
    return all_ok ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    g_invocation = quote_args(argc, argv);

    CLI::App app{"(k,d)-UE-CSP simulation and mean-field analysis toolkit"};
    app.require_subcommand(1);

    InstanceArgs inst;
    std::string out_path = "-";
    std::string witness_path, alphas_text, policy_name = "uc";
    std::uint32_t runs = 100;
    unsigned threads = 1;
    double dt = 1e-5, tol = 1e-6;
    std::uint64_t peel_seed = 1, stride = 100;
    bool crossings = false;
    std::string tstar_path, snapshot_prefix, section_text, densities_text;
    std::uint32_t sweep_index = 2, solve_index = 3, points = 51;
    double lo = 0.0, hi = 0.5;
    std::string ks_text, sweep_path, collapse_path;
    std::uint32_t kmax = 4096;
    bool allow_large = false;

    CLI::App* c_gen = app.add_subcommand("generate", "sample a random instance and write it out");
    add_instance_flags(c_gen, inst, false);
    c_gen->add_option("--out", out_path, "output path (- for stdout)");

    CLI::App* c_solve = app.add_subcommand("solve", "exact satisfiability by Gaussian elimination");
    add_instance_flags(c_solve, inst, true);
    c_solve->add_option("--out", out_path, "output path (- for stdout)");
    c_solve->add_option("--witness", witness_path, "write a satisfying assignment here");

    CLI::App* c_search = app.add_subcommand("search", "success probability of a search heuristic");
    add_instance_flags(c_search, inst, false);
    c_search->add_option("--alphas", alphas_text, "alpha sweep lo:hi:step (inclusive)");
    c_search->add_option("--policy", policy_name, "uc or guc");
    c_search->add_option("--runs", runs, "instances per alpha");
    c_search->add_option("--threads", threads, "worker threads");
    c_search->add_option("--out", out_path, "output path (- for stdout)");

    CLI::App* c_leaf = app.add_subcommand("leafremove", "peel to the 2-core and report it");
    add_instance_flags(c_leaf, inst, true);
    c_leaf->add_option("--peel-seed", peel_seed, "seed for the random peel order");
    c_leaf->add_option("--out", out_path, "output path (- for stdout)");

    CLI::App* c_traj = app.add_subcommand("trajectory", "integrate the mean-field equations");
    c_traj->add_option("--k", inst.k, "clause arity")->check(CLI::Range(2u, 1u << 20));
    c_traj->add_option("--alpha", inst.alpha, "initial clause density")->check(CLI::NonNegativeNumber);
    c_traj->add_option("--policy", policy_name, "uc or guc");
    c_traj->add_option("--dt", dt, "Euler step");
    c_traj->add_option("--stride", stride, "sample every this many steps (0 = none)");
    c_traj->add_option("--out", out_path, "trajectory CSV path (- for stdout)");
    c_traj->add_option("--tstar", tstar_path, "write the t*(j) schedule CSV here");
    c_traj->add_flag("--crossings", crossings, "also print t_d/t_s/t_q as JSON");
    c_traj->add_option("--snapshots", snapshot_prefix,
                       "write potential snapshots <prefix>0..4.csv at {0, t_d, mid, t_s, mid}");

    CLI::App* c_phase = app.add_subcommand("phase", "static phase diagram and transition lines");
    c_phase->add_option("--k", inst.k, "clause arity")->check(CLI::Range(2u, 1u << 20));
    c_phase->add_option("--alphas", alphas_text, "transition lines over alpha sweep lo:hi:step");
    c_phase->add_option("--policy", policy_name, "uc or guc (with --alphas)");
    c_phase->add_option("--dt", dt, "Euler step (with --alphas)");
    c_phase->add_option("--section", section_text, "fixed densities, e.g. c4=0 (surface section mode)");
    c_phase->add_option("--densities", densities_text, "classify one density vector, e.g. c2=0.4,c3=0.2");
    c_phase->add_option("--sweep", sweep_index, "section sweep coordinate index");
    c_phase->add_option("--solve", solve_index, "section solved coordinate index");
    c_phase->add_option("--lo", lo, "sweep lower endpoint");
    c_phase->add_option("--hi", hi, "sweep upper endpoint");
    c_phase->add_option("--points", points, "sweep point count");
    c_phase->add_option("--out", out_path, "output path (- for stdout)");

    CLI::App* c_thr = app.add_subcommand("thresholds", "static and algorithmic thresholds at one k");
    c_thr->add_option("--k", inst.k, "clause arity")->check(CLI::Range(2u, 1u << 20));
    c_thr->add_option("--tol", tol, "bisection tolerance in alpha");
    c_thr->add_option("--dt", dt, "Euler step for the algorithmic thresholds");
    c_thr->add_option("--out", out_path, "output path (- for stdout)");

    CLI::App* c_scale = app.add_subcommand("scaling", "large-k GUC threshold sweep and collapse fit");
    c_scale->add_option("--ks", ks_text, "comma-separated k list (default 256,512,...,kmax)");
    c_scale->add_option("--kmax", kmax, "largest k of the default power-of-two sweep");
    c_scale->add_flag("--allow-large", allow_large, "permit k > 4096 (8192..65536)");
    c_scale->add_option("--dt", dt, "Euler step");
    c_scale->add_option("--tol", tol, "bisection tolerance in alpha");
    c_scale->add_option("--sweep-out", sweep_path, "write k,alpha_a CSV here");
    c_scale->add_option("--collapse-out", collapse_path, "write collapsed-cloud CSV here");
    c_scale->add_option("--out", out_path, "fit JSON path (- for stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_gen->parsed()) return cmd_generate(inst, out_path);
        if (c_solve->parsed()) return cmd_solve(inst, out_path, witness_path);
        if (c_search->parsed())
            return cmd_search(inst, alphas_text, policy_name, runs, threads, out_path);
        if (c_leaf->parsed()) return cmd_leafremove(inst, peel_seed, out_path);
        if (c_traj->parsed())
            return cmd_trajectory(inst.k, inst.alpha, policy_name, dt, stride, out_path, tstar_path,
                                  crossings, snapshot_prefix);
        if (c_phase->parsed())
            return cmd_phase(inst.k, alphas_text, policy_name, dt, section_text, densities_text,
                             sweep_index, solve_index, lo, hi, points, out_path);
        if (c_thr->parsed()) return cmd_thresholds(inst.k, tol, dt, out_path);
        if (c_scale->parsed())
            return cmd_scaling(ks_text, kmax, allow_large, dt, tol, sweep_path, collapse_path,
                               out_path);
    } catch (const CLI::Error& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
