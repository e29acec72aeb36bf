#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fokas/control.hpp"
#include "fokas/solver.hpp"

namespace fokas::cli {

enum class Command { Direct, Control, Roots, Verify, Sweep };

enum class SolveMode { Exact, Delta, TargetError };

/// A fully parsed run: one config file determines one run.
struct RunConfig {
    Command command = Command::Direct;

    std::optional<IbvpSpec> spec;
    std::string preset; // "", "braester", "philip"
    double preset_q = 0.3e-3, preset_theta0 = 0.065, preset_thetas = 0.397;
    double preset_R = 1.6;
    double time_scale = 1.0; // display -> internal time units

    std::optional<ControlProblem> control;
    SolveMode solve_mode = SolveMode::Exact;
    double delta = 0.0;
    double target_error = 0.0;
    std::vector<double> verify_coeffs;

    std::vector<int> sweep_Ns;
    std::vector<double> sweep_Ts;

    std::vector<double> xs, ts;

    AccuracyProfile profile = AccuracyProfile::defaults();
    std::string profile_name = "default";

    std::string prefix = "run";
};

/// Parse and schema-validate a JSON config (unknown keys rejected).
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Execute a run, writing CSV artifacts under out_dir.
/// Returns 0 on success; throws ConfigError / numerical errors.
int run(const RunConfig& config, const std::string& out_dir);

/// Full CLI entry: parse args, load config, dispatch.
/// Exit codes: 0 success, 2 config error, 3 numerical failure.
int main_entry(int argc, char** argv);

} // namespace fokas::cli
