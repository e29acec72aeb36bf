#include "fokas/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace fokas::cli {

using nlohmann::json;

namespace {

void reject_unknown(const json& j, const std::set<std::string>& allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

double num(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("missing '" + key + "' in " + where);
    if (!j[key].is_number()) throw ConfigError("'" + key + "' must be a number in " + where);
    return j[key].get<double>();
}

double num_or(const json& j, const std::string& key, double dflt) {
    return j.contains(key) ? j[key].get<double>() : dflt;
}

std::vector<double> num_list(const json& j, const std::string& where) {
    if (!j.is_array()) throw ConfigError(where + " must be an array of numbers");
    std::vector<double> v;
    for (const auto& e : j) {
        if (!e.is_number()) throw ConfigError(where + " must contain numbers only");
        v.push_back(e.get<double>());
    }
    return v;
}

RobinCoeff parse_robin(const json& j, const std::string& where) {
    if (j.is_string() && j.get<std::string>() == "neumann") return RobinCoeff::neumann();
    if (j.is_number()) return RobinCoeff::finite(j.get<double>());
    throw ConfigError(where + " must be a number or \"neumann\"");
}

InitialData parse_initial(const json& j) {
    reject_unknown(j, {"type", "height", "split", "value", "growth", "samples"}, "problem.initial");
    const std::string type = j.value("type", "");
    if (type == "piecewise_step")
        return InitialData::piecewise_step(num(j, "height", "initial"), num(j, "split", "initial"));
    if (type == "half_cosine") return InitialData::half_cosine();
    if (type == "full_sine") return InitialData::full_sine();
    if (type == "exp_sine") return InitialData::exp_sine(num(j, "growth", "initial"));
    if (type == "constant") return InitialData::constant(num(j, "value", "initial"));
    if (type == "zero") return InitialData::zero();
    if (type == "tabulated") {
        if (!j.contains("samples")) throw ConfigError("tabulated initial needs 'samples'");
        std::vector<std::pair<double, double>> samples;
        for (const auto& e : j["samples"]) {
            if (!e.is_array() || e.size() != 2)
                throw ConfigError("tabulated samples must be [x, value] pairs");
            samples.emplace_back(e[0].get<double>(), e[1].get<double>());
        }
        return InitialData::tabulated(std::move(samples));
    }
    throw ConfigError("unknown initial type '" + type + "'");
}

BoundarySignal parse_signal(const json& j, const std::string& where) {
    reject_unknown(j, {"type", "value", "coeffs", "tau", "T"}, where);
    const std::string type = j.value("type", "zero");
    if (type == "zero") return BoundarySignal::zero();
    if (type == "constant") return BoundarySignal::constant(num(j, "value", where));
    if (type == "sine_series") {
        if (!j.contains("coeffs")) throw ConfigError(where + ": sine_series needs 'coeffs'");
        return BoundarySignal::sine_series(num_list(j["coeffs"], where + ".coeffs"),
                                           num_or(j, "tau", 0.0), num(j, "T", where));
    }
    throw ConfigError("unknown signal type '" + type + "' in " + where);
}

BcKind parse_bc(const std::string& s) {
    if (s == "robin_robin") return BcKind::RobinRobin;
    if (s == "robin_dirichlet") return BcKind::RobinDirichlet;
    if (s == "dirichlet_dirichlet") return BcKind::DirichletDirichlet;
    if (s == "neumann_neumann") return BcKind::NeumannNeumann;
    throw ConfigError("unknown bc kind '" + s + "'");
}

void parse_problem(const json& j, RunConfig& cfg) {
    if (j.contains("preset")) {
        const json& pj = j["preset"];
        reject_unknown(j, {"preset"}, "problem");
        reject_unknown(pj, {"name", "q", "theta0", "thetas", "D0", "L", "R"}, "problem.preset");
        cfg.preset = pj.value("name", "");
        if (cfg.preset == "braester") {
            cfg.preset_q = num_or(pj, "q", 0.3e-3);
            cfg.preset_theta0 = num_or(pj, "theta0", 65e-3);
            cfg.preset_thetas = num_or(pj, "thetas", 397e-3);
            cfg.spec = braester_spec(cfg.preset_q, cfg.preset_theta0, cfg.preset_thetas,
                                     num_or(pj, "D0", 0.208e-1), num_or(pj, "L", 60.0));
            cfg.time_scale = 60.0; // grid times in minutes
        } else if (cfg.preset == "philip") {
            cfg.preset_R = num_or(pj, "R", 1.6);
            cfg.spec = philip_spec(cfg.preset_R, num_or(pj, "L", 0.05));
        } else {
            throw ConfigError("unknown preset '" + cfg.preset + "'");
        }
        return;
    }
    reject_unknown(j, {"D0", "K0", "L", "alpha", "beta", "bc", "initial", "left", "right"},
                   "problem");
    IbvpSpec spec;
    spec.params.D0 = num(j, "D0", "problem");
    spec.params.K0 = num_or(j, "K0", 0.0);
    spec.params.L = num(j, "L", "problem");
    spec.params.alpha = j.contains("alpha") ? parse_robin(j["alpha"], "problem.alpha")
                                            : RobinCoeff::finite(0.0);
    spec.params.beta = j.contains("beta") ? parse_robin(j["beta"], "problem.beta")
                                          : RobinCoeff::finite(0.0);
    if (!j.contains("bc")) throw ConfigError("missing 'bc' in problem");
    spec.bc_kind = parse_bc(j["bc"].get<std::string>());
    if (j.contains("initial")) spec.initial = parse_initial(j["initial"]);
    if (j.contains("left")) spec.left = parse_signal(j["left"], "problem.left");
    if (j.contains("right")) spec.right = parse_signal(j["right"], "problem.right");
    cfg.spec = spec;
}

void parse_numerics(const json& j, RunConfig& cfg) {
    reject_unknown(j,
                   {"profile", "ray_angle", "offset_default", "clearance_dist", "rel_quad_tol",
                    "s_cap", "nodes_per_panel", "grading", "min_panels", "eps_budget",
                    "vertex_growth_budget", "max_panels"},
                   "numerics");
    cfg.profile_name = j.value("profile", "default");
    cfg.profile = AccuracyProfile::named(cfg.profile_name);
    if (j.contains("ray_angle")) cfg.profile.ray_angle = j["ray_angle"].get<double>();
    if (j.contains("offset_default")) cfg.profile.offset_default = j["offset_default"].get<double>();
    if (j.contains("clearance_dist")) cfg.profile.clearance_dist = j["clearance_dist"].get<double>();
    if (j.contains("rel_quad_tol")) cfg.profile.rel_quad_tol = j["rel_quad_tol"].get<double>();
    if (j.contains("s_cap")) cfg.profile.s_cap = j["s_cap"].get<double>();
    if (j.contains("nodes_per_panel")) cfg.profile.nodes_per_panel = j["nodes_per_panel"].get<int>();
    if (j.contains("grading")) cfg.profile.grading = j["grading"].get<double>();
    if (j.contains("min_panels")) cfg.profile.min_panels = j["min_panels"].get<int>();
    if (j.contains("eps_budget")) cfg.profile.eps_budget = j["eps_budget"].get<double>();
    if (j.contains("vertex_growth_budget"))
        cfg.profile.vertex_growth_budget = j["vertex_growth_budget"].get<double>();
    if (j.contains("max_panels")) cfg.profile.max_panels = j["max_panels"].get<int>();
}

void parse_grid(const json& j, RunConfig& cfg) {
    reject_unknown(j, {"xs", "x_count", "ts"}, "grid");
    const double L = cfg.spec ? cfg.spec->params.L : 1.0;
    if (j.contains("xs"))
        cfg.xs = num_list(j["xs"], "grid.xs");
    else {
        const int n = j.value("x_count", 21);
        for (int i = 0; i < n; ++i) cfg.xs.push_back(L * i / (n - 1));
    }
    if (j.contains("ts")) cfg.ts = num_list(j["ts"], "grid.ts");
}

void parse_control(const json& j, RunConfig& cfg) {
    reject_unknown(j, {"T", "tau", "N", "solve", "coeffs"}, "control");
    ControlProblem pb;
    if (!cfg.spec) throw ConfigError("control block requires a problem block");
    pb.params = cfg.spec->params;
    pb.initial = cfg.spec->initial;
    pb.T = num(j, "T", "control");
    pb.tau = num_or(j, "tau", 0.0);
    pb.N = j.value("N", 2);
    cfg.control = pb;
    if (j.contains("solve")) {
        const json& s = j["solve"];
        if (s.is_string() && s.get<std::string>() == "exact") {
            cfg.solve_mode = SolveMode::Exact;
        } else if (s.is_object()) {
            reject_unknown(s, {"delta", "target_error"}, "control.solve");
            if (s.contains("delta")) {
                cfg.solve_mode = SolveMode::Delta;
                cfg.delta = s["delta"].get<double>();
            } else if (s.contains("target_error")) {
                cfg.solve_mode = SolveMode::TargetError;
                cfg.target_error = s["target_error"].get<double>();
            } else {
                throw ConfigError("control.solve needs 'delta' or 'target_error'");
            }
        } else {
            throw ConfigError("control.solve must be \"exact\" or an object");
        }
    }
    if (j.contains("coeffs")) cfg.verify_coeffs = num_list(j["coeffs"], "control.coeffs");
}

void parse_sweep(const json& j, RunConfig& cfg) {
    reject_unknown(j, {"Ns", "Ts", "solve"}, "sweep");
    if (!j.contains("Ns") || !j.contains("Ts")) throw ConfigError("sweep needs 'Ns' and 'Ts'");
    for (const auto& e : j["Ns"]) cfg.sweep_Ns.push_back(e.get<int>());
    cfg.sweep_Ts = num_list(j["Ts"], "sweep.Ts");
    if (j.contains("solve")) {
        const json& s = j["solve"];
        if (s.is_string() && s.get<std::string>() == "exact")
            cfg.solve_mode = SolveMode::Exact;
        else if (s.is_object() && s.contains("delta")) {
            cfg.solve_mode = SolveMode::Delta;
            cfg.delta = s["delta"].get<double>();
        } else if (s.is_object() && s.contains("target_error")) {
            cfg.solve_mode = SolveMode::TargetError;
            cfg.target_error = s["target_error"].get<double>();
        } else
            throw ConfigError("sweep.solve must be \"exact\" or {delta}/{target_error}");
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

struct CsvWriter {
    std::ofstream out;
    explicit CsvWriter(const std::filesystem::path& path) : out(path) {
        if (!out) throw Error("cannot open output file " + path.string());
        out.setf(std::ios::fmtflags(0));
    }
    void row(const std::vector<std::string>& cells) {
        for (size_t i = 0; i < cells.size(); ++i) {
            if (i) out << ',';
            out << cells[i];
        }
        out << '\n';
    }
};

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    reject_unknown(j, {"command", "problem", "numerics", "grid", "control", "sweep", "output"},
                   "config");
    RunConfig cfg;
    const std::string cmd = j.value("command", "");
    if (cmd == "direct")
        cfg.command = Command::Direct;
    else if (cmd == "control")
        cfg.command = Command::Control;
    else if (cmd == "roots")
        cfg.command = Command::Roots;
    else if (cmd == "verify")
        cfg.command = Command::Verify;
    else if (cmd == "sweep")
        cfg.command = Command::Sweep;
    else
        throw ConfigError("missing or unknown 'command'");

    if (j.contains("numerics")) parse_numerics(j["numerics"], cfg);
    if (!j.contains("problem")) throw ConfigError("missing 'problem' block");
    parse_problem(j["problem"], cfg);
    if (j.contains("grid")) parse_grid(j["grid"], cfg);
    if (j.contains("control")) parse_control(j["control"], cfg);
    if (j.contains("sweep")) parse_sweep(j["sweep"], cfg);
    if (j.contains("output")) {
        reject_unknown(j["output"], {"prefix"}, "output");
        cfg.prefix = j["output"].value("prefix", "run");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

namespace {

int run_direct(const RunConfig& cfg, const std::filesystem::path& dir) {
    if (!cfg.spec) throw ConfigError("direct run needs a problem");
    if (cfg.ts.empty()) throw ConfigError("direct run needs grid.ts");
    std::vector<double> ts_internal;
    for (double t : cfg.ts) ts_internal.push_back(t * cfg.time_scale);

    SolutionGrid grid = solve_grid(*cfg.spec, cfg.xs, ts_internal, cfg.profile);
    if (cfg.preset == "braester") grid.values.array() += cfg.preset_theta0;

    CsvWriter w(dir / (cfg.prefix + "_direct.csv"));
    w.row({"x", "t", "theta", "converged"});
    bool all_ok = true;
    for (int j = 0; j < grid.ts.size(); ++j)
        for (int i = 0; i < grid.xs.size(); ++i) {
            w.row({fmt(grid.xs[i]), fmt(cfg.ts[j]), fmt(grid.values(i, j)),
                   grid.converged(i, j) ? "1" : "0"});
            all_ok = all_ok && grid.converged(i, j);
        }
    std::cout << "wrote " << (dir / (cfg.prefix + "_direct.csv")).string() << "\n";
    return all_ok ? 0 : 3;
}

int run_roots(const RunConfig& cfg, const std::filesystem::path& dir) {
    if (!cfg.spec) throw ConfigError("roots run needs a problem");
    const RootReport rep = find_roots(cfg.spec->params);
    {
        CsvWriter w(dir / (cfg.prefix + "_roots_summary.csv"));
        w.row({"sigma", "rho", "classification_valid", "ambiguous", "predicted_count",
               "n_roots", "max_upper_imag"});
        w.row({fmt(rep.sigma), fmt(rep.rho), rep.classification_valid ? "1" : "0",
               rep.ambiguous ? "1" : "0", std::to_string(rep.predicted_count),
               std::to_string(rep.roots.size()),
               rep.max_upper_imag ? fmt(*rep.max_upper_imag) : "nan"});
    }
    {
        CsvWriter w(dir / (cfg.prefix + "_roots.csv"));
        w.row({"re", "im"});
        for (const Complex& r : rep.roots) w.row({fmt(r.real()), fmt(r.imag())});
    }
    std::cout << "wrote " << (dir / (cfg.prefix + "_roots_summary.csv")).string() << "\n";
    return 0;
}

void write_control_outputs(const RunConfig& cfg, const std::filesystem::path& dir,
                           const ControlProblem& pb, const ControlSolution& sol) {
    {
        CsvWriter w(dir / (cfg.prefix + "_coefficients.csv"));
        w.row({"n", "c_n"});
        for (int n = 0; n < sol.coeffs.size(); ++n)
            w.row({std::to_string(n + 1), fmt(sol.coeffs[n])});
    }
    {
        CsvWriter w(dir / (cfg.prefix + "_summary.csv"));
        w.row({"N", "T", "tau", "control_norm", "residual_norm", "verified_error",
               "condition", "regularized", "delta", "solve_path"});
        w.row({std::to_string(pb.N), fmt(pb.T), fmt(pb.tau), fmt(sol.control_norm),
               fmt(sol.residual_norm), fmt(sol.verified_error), fmt(sol.condition_estimate),
               sol.regularized ? "1" : "0", sol.delta ? fmt(*sol.delta) : "0",
               sol.solve_path});
    }
    {
        CsvWriter w(dir / (cfg.prefix + "_control.csv"));
        w.row({"t", "v"});
        const int npts = 401;
        for (int i = 0; i < npts; ++i) {
            const double t = pb.T * i / (npts - 1);
            w.row({fmt(t), fmt(reconstruct_control(sol.coeffs, t, pb.tau, pb.T))});
        }
    }
    const VerifyResult ver = verify_control(pb, sol.coeffs, cfg.profile);
    {
        CsvWriter w(dir / (cfg.prefix + "_final_profile.csv"));
        w.row({"x", "theta_T", "converged"});
        for (int i = 0; i < ver.final_profile.xs.size(); ++i)
            w.row({fmt(ver.final_profile.xs[i]), fmt(ver.final_profile.values(i, 0)),
                   ver.final_profile.converged(i, 0) ? "1" : "0"});
    }
}

int run_control_cmd(const RunConfig& cfg, const std::filesystem::path& dir) {
    if (!cfg.control) throw ConfigError("control run needs a control block");
    const ControlProblem& pb = *cfg.control;
    std::optional<double> delta;
    if (cfg.solve_mode == SolveMode::Delta) delta = cfg.delta;
    ControlSolution sol;
    if (cfg.solve_mode == SolveMode::TargetError) {
        const ControlSystem sys = assemble_system(pb, cfg.profile);
        const double d = choose_delta(pb, sys, cfg.target_error, 1e-6, 1e-1, cfg.profile);
        sol = run_control(pb, d, cfg.profile);
    } else {
        sol = run_control(pb, delta, cfg.profile);
    }
    write_control_outputs(cfg, dir, pb, sol);
    std::cout << "wrote " << (dir / (cfg.prefix + "_summary.csv")).string() << "\n";
    return 0;
}

int run_verify(const RunConfig& cfg, const std::filesystem::path& dir) {
    if (!cfg.control) throw ConfigError("verify run needs a control block");
    if (cfg.verify_coeffs.empty()) throw ConfigError("verify run needs control.coeffs");
    const ControlProblem& pb = *cfg.control;
    if (static_cast<int>(cfg.verify_coeffs.size()) != pb.N + 1)
        throw ConfigError("verify: coeffs length must equal N+1");
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(cfg.verify_coeffs.data(),
                                                          cfg.verify_coeffs.size());
    const VerifyResult ver = verify_control(pb, c, cfg.profile);
    {
        CsvWriter w(dir / (cfg.prefix + "_final_profile.csv"));
        w.row({"x", "theta_T", "converged"});
        for (int i = 0; i < ver.final_profile.xs.size(); ++i)
            w.row({fmt(ver.final_profile.xs[i]), fmt(ver.final_profile.values(i, 0)),
                   ver.final_profile.converged(i, 0) ? "1" : "0"});
    }
    {
        CsvWriter w(dir / (cfg.prefix + "_verify_summary.csv"));
        w.row({"final_error_norm", "control_norm"});
        w.row({fmt(ver.final_error_norm), fmt(norm_l2_time(c, pb.tau, pb.T))});
    }
    std::cout << "wrote " << (dir / (cfg.prefix + "_verify_summary.csv")).string() << "\n";
    return 0;
}

int run_sweep(const RunConfig& cfg, const std::filesystem::path& dir) {
    if (!cfg.control && !cfg.spec) throw ConfigError("sweep needs a problem");
    if (cfg.sweep_Ns.empty() || cfg.sweep_Ts.empty())
        throw ConfigError("sweep needs Ns and Ts");
    CsvWriter w(dir / (cfg.prefix + "_sweep.csv"));
    w.row({"N", "T", "control_norm", "final_error", "residual_norm", "condition", "delta",
           "solve_path"});
    for (int N : cfg.sweep_Ns) {
        for (double T : cfg.sweep_Ts) {
            ControlProblem pb;
            pb.params = cfg.spec->params;
            pb.initial = cfg.spec->initial;
            pb.T = T;
            pb.tau = cfg.control ? cfg.control->tau : 0.0;
            pb.N = N;
            ControlSolution sol;
            if (cfg.solve_mode == SolveMode::TargetError) {
                const ControlSystem sys = assemble_system(pb, cfg.profile);
                const double d = choose_delta(pb, sys, cfg.target_error, 1e-6, 1e-1, cfg.profile);
                sol = run_control(pb, d, cfg.profile);
            } else if (cfg.solve_mode == SolveMode::Delta) {
                sol = run_control(pb, cfg.delta, cfg.profile);
            } else {
                sol = run_control(pb, std::nullopt, cfg.profile);
            }
            w.row({std::to_string(N), fmt(T), fmt(sol.control_norm), fmt(sol.verified_error),
                   fmt(sol.residual_norm), fmt(sol.condition_estimate),
                   sol.delta ? fmt(*sol.delta) : "0", sol.solve_path});
        }
    }
    std::cout << "wrote " << (dir / (cfg.prefix + "_sweep.csv")).string() << "\n";
    return 0;
}

} // namespace

int run(const RunConfig& cfg, const std::string& out_dir) {
    std::filesystem::path dir(out_dir.empty() ? "." : out_dir);
    std::filesystem::create_directories(dir);
    switch (cfg.command) {
        case Command::Direct: return run_direct(cfg, dir);
        case Command::Roots: return run_roots(cfg, dir);
        case Command::Control: return run_control_cmd(cfg, dir);
        case Command::Verify: return run_verify(cfg, dir);
        case Command::Sweep: return run_sweep(cfg, dir);
    }
    return 2;
}

} // namespace fokas::cli

#include <CLI11.hpp>

namespace fokas::cli {

int main_entry(int argc, char** argv) {
    CLI::App app{"unified-transform advection-diffusion solver and boundary-control synthesis"};
    app.require_subcommand(0, 1);

    std::string config_path, out_dir = ".", profile_override;
    app.add_option("--config", config_path, "path to a JSON run config");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--profile", profile_override, "accuracy profile: fast|default|paper")
        ->check(CLI::IsMember({"fast", "default", "paper"}));

    std::string sub_cmd;
    for (const char* name : {"direct", "control", "roots", "verify", "sweep"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "path to a JSON run config");
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--profile", profile_override, "accuracy profile")
            ->check(CLI::IsMember({"fast", "default", "paper"}));
        sub->callback([&sub_cmd, name] { sub_cmd = name; });
    }

    CLI11_PARSE(app, argc, argv);

    try {
        if (config_path.empty()) throw ConfigError("--config is required");
        RunConfig cfg = parse_config_file(config_path);
        if (!sub_cmd.empty()) {
            RunConfig probe;
            if ((sub_cmd == "direct" && cfg.command != Command::Direct) ||
                (sub_cmd == "control" && cfg.command != Command::Control) ||
                (sub_cmd == "roots" && cfg.command != Command::Roots) ||
                (sub_cmd == "verify" && cfg.command != Command::Verify) ||
                (sub_cmd == "sweep" && cfg.command != Command::Sweep))
                throw ConfigError("subcommand '" + sub_cmd + "' disagrees with config command");
            (void)probe;
        }
        if (!profile_override.empty()) {
            cfg.profile = AccuracyProfile::named(profile_override);
            cfg.profile_name = profile_override;
        }
        return run(cfg, out_dir);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

} // namespace fokas::cli
