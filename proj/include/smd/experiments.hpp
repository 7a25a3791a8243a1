#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "smd/bounds.hpp"
#include "smd/core.hpp"
#include "smd/damping.hpp"
#include "smd/solver.hpp"

namespace smd {

enum class RunMode { run, sweep, bounds, damping_table, verify };

RunMode parse_mode(const std::string& name);

/// Parsed experiment description: plain-text "key = value" lines grouped by
/// [section] headers, lists comma-separated.
struct ExperimentConfig {
    // [domain]
    double box_length = 1.0;
    double lid_speed = 1.0;
    double viscosity = 0.01;
    double model_scale = 0.0;  // 0: default to the largest cell width
    double c_s = 0.1;
    double kappa = 1.0;

    // [grid]
    int nx = 32, ny = 32, nz = 32;

    // [profile]
    std::string profile_kind = "constant";
    int alpha = 2;
    std::string table_file;

    // [solver]
    SolverConfig solver;

    // [sweep]
    std::vector<double> sweep_re;
    std::vector<double> sweep_delta;
    std::vector<int> sweep_alpha;
    std::vector<std::string> sweep_profile;

    // [output]
    std::string out_dir = "out";
    int damping_samples = 1001;

    DomainParams domain() const;
    Grid grid(const DomainParams& dom) const;
    DampingProfile profile(const DomainParams& dom) const;
};

/// Parse a config file; errors carry the offending line number.
ExperimentConfig parse_config_file(const std::filesystem::path& path);
ExperimentConfig parse_config(std::istream& in, const std::string& name);

/// Execute one mode. Returns a process exit code: 0 on success, 1 when the
/// verify mode finds failures.
int run_experiment(const ExperimentConfig& config, RunMode mode, std::ostream& log);

struct VerifyResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

/// Property suite spanning all modules; used by the verify mode.
std::vector<VerifyResult> run_verification_suite();

}  // namespace smd
