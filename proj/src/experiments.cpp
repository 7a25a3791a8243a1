#include "smd/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "smd/background.hpp"
#include "smd/dissipation.hpp"
#include "smd/quadrature.hpp"

namespace smd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

[[noreturn]] void config_fail(const std::string& name, int line, const std::string& what) {
    throw std::invalid_argument(name + ":" + std::to_string(line) + ": " + what);
}

double to_double(const std::string& v, const std::string& name, int line) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        config_fail(name, line, "expected a number, got '" + v + "'");
    }
}

long to_long(const std::string& v, const std::string& name, int line) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (...) {
        config_fail(name, line, "expected an integer, got '" + v + "'");
    }
}

bool to_bool(const std::string& v, const std::string& name, int line) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    config_fail(name, line, "expected a boolean, got '" + v + "'");
}

}  // namespace

RunMode parse_mode(const std::string& name) {
    if (name == "run") return RunMode::run;
    if (name == "sweep") return RunMode::sweep;
    if (name == "bounds") return RunMode::bounds;
    if (name == "damping-table") return RunMode::damping_table;
    if (name == "verify") return RunMode::verify;
    throw std::invalid_argument("unknown mode '" + name + "'");
}

DomainParams ExperimentConfig::domain() const {
    double delta = model_scale;
    if (delta <= 0.0)
        delta = box_length / std::min({nx, ny, nz});  // largest cell width
    return make_domain(box_length, lid_speed, viscosity, delta, c_s, kappa);
}

Grid ExperimentConfig::grid(const DomainParams& dom) const {
    return make_grid(dom, nx, ny, nz);
}

DampingProfile ExperimentConfig::profile(const DomainParams& dom) const {
    if (profile_kind == "constant") return constant_profile();
    if (profile_kind == "van-driest") return van_driest_profile();
    if (profile_kind == "algebraic") return algebraic_profile(alpha);
    if (profile_kind == "hermite") return hermite_profile(dom, alpha);
    if (profile_kind == "tabulated") {
        if (table_file.empty())
            throw std::invalid_argument("tabulated profile needs table_file");
        return load_tabulated(table_file, dom);
    }
    throw std::invalid_argument("unknown profile kind '" + profile_kind + "'");
}

ExperimentConfig parse_config_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config file " + path.string());
    return parse_config(in, path.string());
}

ExperimentConfig parse_config(std::istream& in, const std::string& name) {
    ExperimentConfig cfg;
    std::string section;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') config_fail(name, lineno, "unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) config_fail(name, lineno, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) config_fail(name, lineno, "empty key or value");

        if (section == "domain") {
            if (key == "box_length" || key == "L") cfg.box_length = to_double(value, name, lineno);
            else if (key == "lid_speed" || key == "U") cfg.lid_speed = to_double(value, name, lineno);
            else if (key == "viscosity" || key == "nu") cfg.viscosity = to_double(value, name, lineno);
            else if (key == "model_scale" || key == "delta") cfg.model_scale = to_double(value, name, lineno);
            else if (key == "c_s") cfg.c_s = to_double(value, name, lineno);
            else if (key == "kappa") cfg.kappa = to_double(value, name, lineno);
            else config_fail(name, lineno, "unknown domain key '" + key + "'");
        } else if (section == "grid") {
            if (key == "nx") cfg.nx = static_cast<int>(to_long(value, name, lineno));
            else if (key == "ny") cfg.ny = static_cast<int>(to_long(value, name, lineno));
            else if (key == "nz") cfg.nz = static_cast<int>(to_long(value, name, lineno));
            else config_fail(name, lineno, "unknown grid key '" + key + "'");
        } else if (section == "profile") {
            if (key == "kind") cfg.profile_kind = value;
            else if (key == "alpha") cfg.alpha = static_cast<int>(to_long(value, name, lineno));
            else if (key == "table_file") cfg.table_file = value;
            else config_fail(name, lineno, "unknown profile key '" + key + "'");
        } else if (section == "solver") {
            if (key == "cfl") cfg.solver.cfl = to_double(value, name, lineno);
            else if (key == "projection_tolerance")
                cfg.solver.projection_tolerance = to_double(value, name, lineno);
            else if (key == "end_time") cfg.solver.end_time = to_double(value, name, lineno);
            else if (key == "sample_interval")
                cfg.solver.sample_interval = to_double(value, name, lineno);
            else if (key == "deterministic")
                cfg.solver.deterministic_reduction = to_bool(value, name, lineno);
            else if (key == "initial_condition") {
                if (value == "couette") cfg.solver.initial_condition = InitialCondition::couette;
                else if (value == "perturbed")
                    cfg.solver.initial_condition = InitialCondition::perturbed_couette;
                else if (value == "checkpoint")
                    cfg.solver.initial_condition = InitialCondition::checkpoint;
                else config_fail(name, lineno, "unknown initial condition '" + value + "'");
            } else if (key == "perturbation_amplitude")
                cfg.solver.perturbation_amplitude = to_double(value, name, lineno);
            else if (key == "seed")
                cfg.solver.seed = static_cast<std::uint64_t>(to_long(value, name, lineno));
            else if (key == "checkpoint_file") cfg.solver.checkpoint_path = value;
            else if (key == "max_steps") cfg.solver.max_steps = to_long(value, name, lineno);
            else if (key == "steady_tolerance")
                cfg.solver.steady_tolerance = to_double(value, name, lineno);
            else config_fail(name, lineno, "unknown solver key '" + key + "'");
        } else if (section == "sweep") {
            if (key == "re")
                for (const auto& v : split_list(value))
                    cfg.sweep_re.push_back(to_double(v, name, lineno));
            else if (key == "delta")
                for (const auto& v : split_list(value))
                    cfg.sweep_delta.push_back(to_double(v, name, lineno));
            else if (key == "alpha")
                for (const auto& v : split_list(value))
                    cfg.sweep_alpha.push_back(static_cast<int>(to_long(v, name, lineno)));
            else if (key == "profile")
                for (const auto& v : split_list(value)) cfg.sweep_profile.push_back(v);
            else config_fail(name, lineno, "unknown sweep key '" + key + "'");
        } else if (section == "output") {
            if (key == "directory") cfg.out_dir = value;
            else if (key == "damping_samples")
                cfg.damping_samples = static_cast<int>(to_long(value, name, lineno));
            else config_fail(name, lineno, "unknown output key '" + key + "'");
        } else if (section.empty()) {
            config_fail(name, lineno, "key outside any [section]");
        } else {
            config_fail(name, lineno, "unknown section [" + section + "]");
        }
    }
    return cfg;
}

// ---------------------------------------------------------------------------
// mode drivers
// ---------------------------------------------------------------------------

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct RunRow {
    DomainParams dom;
    Grid grid;
    std::string profile_name;
    int alpha = 0;
    long steps = 0;
    double end_time = 0.0;
    double measured_avg = 0.0;
    double limsup_proxy = 0.0;
    BoundReport general;
    bool has_closed_form = false;
    BoundReport closed_form;
    ReferenceRates rates;
    std::string status = "ok";

    bool bound_checked() const { return grid.strip_resolved && status == "ok"; }
    bool bound_satisfied() const { return limsup_proxy <= general.bound_value; }
};

const char* kRowHeader =
    "re,kappa,gamma,nx,ny,nz,strip_resolved,profile,alpha,delta,c_s,end_time,steps,"
    "measured_avg,limsup_proxy,bound_general,bound_closed_form,rate_boundary_layer,"
    "rate_interior,bound_checked,bound_satisfied,status\n";

void write_row(std::ostream& out, const RunRow& r) {
    out << fmt(r.dom.reynolds) << ',' << fmt(r.dom.kappa) << ',' << fmt(r.dom.strip_fraction)
        << ',' << r.grid.nx << ',' << r.grid.ny << ',' << r.grid.nz << ','
        << (r.grid.strip_resolved ? 1 : 0) << ',' << r.profile_name << ',' << r.alpha << ','
        << fmt(r.dom.model_scale) << ',' << fmt(r.dom.c_s) << ',' << fmt(r.end_time) << ','
        << r.steps << ',' << fmt(r.measured_avg) << ',' << fmt(r.limsup_proxy) << ','
        << fmt(r.general.bound_value) << ','
        << (r.has_closed_form ? fmt(r.closed_form.bound_value) : std::string("")) << ','
        << fmt(r.rates.boundary_layer.bound_value) << ',' << fmt(r.rates.interior.bound_value)
        << ',' << (r.bound_checked() ? 1 : 0) << ','
        << (r.bound_checked() ? (r.bound_satisfied() ? "1" : "0") : std::string("")) << ','
        << r.status << '\n';
}

bool closed_form_for(const DampingProfile& p, const DomainParams& dom, BoundReport& out) {
    if (p.kind == ProfileKind::algebraic) {
        out = closed_form_bound(dom, BoundKind::algebraic, p.alpha);
        return true;
    }
    if (p.kind == ProfileKind::hermite && p.alpha >= 2) {
        out = closed_form_bound(dom, BoundKind::hermite, p.alpha);
        return true;
    }
    if (p.kind == ProfileKind::hermite && p.alpha == 1) {
        out = closed_form_bound(dom, BoundKind::hermite_linear, 1);
        return true;
    }
    return false;
}

VelocityField initial_field(const ExperimentConfig& cfg, const DomainParams& dom,
                            const Grid& g) {
    switch (cfg.solver.initial_condition) {
        case InitialCondition::couette:
            return couette_field(g, dom);
        case InitialCondition::perturbed_couette:
            return perturbed_couette_field(g, dom, cfg.solver.perturbation_amplitude,
                                           cfg.solver.seed);
        case InitialCondition::checkpoint: {
            Checkpoint cp = load_checkpoint(cfg.solver.checkpoint_path);
            if (cp.grid.nx != g.nx || cp.grid.ny != g.ny || cp.grid.nz != g.nz)
                throw std::runtime_error("checkpoint grid does not match the configured grid");
            return std::move(cp.field);
        }
    }
    throw std::logic_error("unhandled initial condition");
}

RunRow execute_point(const ExperimentConfig& cfg, const std::filesystem::path& series_csv,
                     const std::filesystem::path& checkpoint_path) {
    const DomainParams dom = cfg.domain();
    const Grid g = cfg.grid(dom);
    const DampingProfile profile = cfg.profile(dom);

    RunRow row;
    row.dom = dom;
    row.grid = g;
    row.profile_name = to_string(profile.kind);
    row.alpha = profile.alpha;
    row.end_time = cfg.solver.end_time;
    row.general = dissipation_bound(dom, profile);
    row.has_closed_form = closed_form_for(profile, dom, row.closed_form);
    row.rates = reference_rates(dom);

    Solver solver(initial_field(cfg, dom, g), profile, dom, g, cfg.solver);
    RunResult result = solver.run();
    row.steps = result.step_count;
    row.measured_avg = result.series.back().running_average;
    row.limsup_proxy = result.series.limsup_proxy();

    if (!series_csv.empty()) {
        std::ofstream out(series_csv);
        if (!out) throw std::runtime_error("cannot write " + series_csv.string());
        result.series.write_csv(out);
    }
    if (!checkpoint_path.empty())
        save_checkpoint(checkpoint_path, solver.field(), dom, g);
    return row;
}

int mode_run(const ExperimentConfig& cfg, std::ostream& log) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    RunRow row = execute_point(cfg, dir / "diagnostics.csv", dir / "checkpoint.smdl");

    {
        std::ofstream out(dir / "summary.csv");
        out << kRowHeader;
        write_row(out, row);
    }
    {
        std::ofstream out(dir / "summary.txt");
        out << "measured running average  = " << fmt(row.measured_avg) << "\n"
            << "limsup proxy              = " << fmt(row.limsup_proxy) << "\n"
            << "strip resolved            = " << (row.grid.strip_resolved ? "yes" : "no") << "\n\n"
            << "--- general bound ---\n" << row.general.derivation << "\n";
        if (row.has_closed_form)
            out << "--- closed-form bound ---\n" << row.closed_form.derivation << "\n";
        out << "--- reference rates ---\n"
            << row.rates.boundary_layer.derivation << "\n"
            << row.rates.interior.derivation << "\n";
    }
    log << "run finished: avg = " << fmt(row.measured_avg)
        << ", proxy = " << fmt(row.limsup_proxy)
        << ", bound = " << fmt(row.general.bound_value) << "\n";
    return 0;
}

int mode_sweep(const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.sweep_re.empty() || cfg.sweep_delta.empty() || cfg.sweep_alpha.empty() ||
        cfg.sweep_profile.empty())
        throw std::invalid_argument("sweep mode needs non-empty re, delta, alpha and profile axes");

    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    std::ofstream combined(dir / "sweep.csv");
    combined << kRowHeader;

    // model-term samples per (profile, alpha) for the slope fits
    std::map<std::pair<std::string, int>, std::vector<std::pair<double, double>>> model_terms;

    int point = 0;
    int failures = 0;
    for (const auto& profile_name : cfg.sweep_profile)
        for (int alpha : cfg.sweep_alpha)
            for (double delta : cfg.sweep_delta)
                for (double re : cfg.sweep_re) {
                    ExperimentConfig point_cfg = cfg;
                    point_cfg.profile_kind = profile_name;
                    point_cfg.alpha = alpha;
                    point_cfg.model_scale = delta;
                    point_cfg.viscosity = cfg.lid_speed * cfg.box_length / re;
                    char name[64];
                    std::snprintf(name, sizeof name, "point%03d.csv", point);
                    ++point;
                    try {
                        RunRow row = execute_point(point_cfg, dir / name, {});
                        write_row(combined, row);
                        // slopes use the closed-form bound where one exists
                        model_terms[{profile_name, alpha}].emplace_back(
                            row.dom.reynolds, row.has_closed_form ? row.closed_form.model_term
                                                                : row.general.model_term);
                    } catch (const std::exception& e) {
                        ++failures;
                        RunRow row;
                        row.status = std::string("failed: ") + e.what();
                        row.profile_name = profile_name;
                        row.alpha = alpha;
                        try { row.dom = point_cfg.domain(); } catch (...) {}
                        write_row(combined, row);
                        log << "sweep point failed (profile = " << profile_name
                            << ", alpha = " << alpha << ", delta = " << delta
                            << ", re = " << re << "): " << e.what() << "\n";
                    }
                }

    std::ofstream slopes(dir / "slopes.csv");
    slopes << "profile,alpha,model_term_slope\n";
    for (const auto& [key, samples] : model_terms) {
        std::vector<double> re, val;
        for (const auto& [r, v] : samples)
            if (v > 0.0) { re.push_back(r); val.push_back(v); }
        if (re.size() < 2) continue;
        slopes << key.first << ',' << key.second << ',' << fmt(fit_loglog_slope(re, val))
               << '\n';
    }
    log << "sweep finished: " << point << " points, " << failures << " failures\n";
    return 0;
}

int mode_bounds(const ExperimentConfig& cfg, std::ostream& log) {
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);

    std::vector<double> re_list = cfg.sweep_re;
    if (re_list.empty()) re_list = {cfg.domain().reynolds};
    std::vector<std::string> profiles = cfg.sweep_profile;
    if (profiles.empty()) profiles = {cfg.profile_kind};

    std::ofstream out(dir / "bounds.csv");
    out << "re,profile,alpha,delta,c_s,gamma,prefactor_m,c1,c2,strip_integral,"
           "model_term,bound_value,scaling_exponent\n";
    std::ofstream derivations(dir / "derivations.txt");
    for (const auto& profile_name : profiles)
        for (double re : re_list) {
            ExperimentConfig point_cfg = cfg;
            point_cfg.profile_kind = profile_name;
            point_cfg.viscosity = cfg.lid_speed * cfg.box_length / re;
            const DomainParams dom = point_cfg.domain();
            const DampingProfile profile = point_cfg.profile(dom);
            const BoundReport r = dissipation_bound(dom, profile);
            out << fmt(dom.reynolds) << ',' << profile_name << ',' << profile.alpha << ','
                << fmt(dom.model_scale) << ',' << fmt(dom.c_s) << ','
                << fmt(dom.strip_fraction) << ',' << fmt(r.prefactor_m) << ',' << fmt(r.c1)
                << ',' << fmt(r.c2) << ',' << fmt(r.strip_integral_value) << ','
                << fmt(r.model_term) << ',' << fmt(r.bound_value) << ','
                << fmt(r.scaling_exponent) << '\n';
            derivations << r.derivation << "\n";
        }
    log << "bounds written to " << (dir / "bounds.csv").string() << "\n";
    return 0;
}

int mode_damping_table(const ExperimentConfig& cfg, std::ostream& log) {
    if (cfg.damping_samples < 2)
        throw std::invalid_argument("damping_samples must be at least 2");
    const std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    const DomainParams dom = cfg.domain();
    const DampingProfile profile = cfg.profile(dom);

    std::ofstream out(dir / "damping_table.dat");
    for (int i = 0; i < cfg.damping_samples; ++i) {
        const double z = dom.box_length * i / (cfg.damping_samples - 1);
        out << fmt(z) << ' ' << fmt(eval_beta(profile, z, dom)) << '\n';
    }
    log << "damping table written to " << (dir / "damping_table.dat").string() << "\n";
    return 0;
}

int mode_verify(std::ostream& log) {
    const auto results = run_verification_suite();
    int failed = 0;
    for (const auto& r : results) {
        log << (r.pass ? "PASS" : "FAIL") << "  " << r.name;
        if (!r.detail.empty()) log << "  (" << r.detail << ")";
        log << "\n";
        if (!r.pass) ++failed;
    }
    log << results.size() - failed << "/" << results.size() << " checks passed\n";
    return failed == 0 ? 0 : 1;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, RunMode mode, std::ostream& log) {
    switch (mode) {
        case RunMode::run: return mode_run(config, log);
        case RunMode::sweep: return mode_sweep(config, log);
        case RunMode::bounds: return mode_bounds(config, log);
        case RunMode::damping_table: return mode_damping_table(config, log);
        case RunMode::verify: return mode_verify(log);
    }
    throw std::logic_error("unhandled mode");
}

}  // namespace smd
