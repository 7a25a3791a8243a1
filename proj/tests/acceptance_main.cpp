// Acceptance suite: end-to-end checks of the dissipation laboratory against
// its analytic oracles and proven bounds. Each criterion prints one PASS or
// FAIL line; the process exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "smd/background.hpp"
#include "smd/bounds.hpp"
#include "smd/damping.hpp"
#include "smd/dissipation.hpp"
#include "smd/experiments.hpp"
#include "smd/solver.hpp"

using namespace smd;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

double couette_deviation(const VelocityField& f, const Grid& g, const DomainParams& dom) {
    double dev = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        const double ref = dom.lid_speed * g.z_center(k) / dom.box_length;
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                dev = std::max(dev, std::abs(f.u(i, j, k) - ref));
    }
    return dev / dom.lid_speed;
}

// 1. Steady linear shear: profile within 1e-6 of the ramp, measured
//    dissipation equal to the hand value at both stated parameter readings.
Outcome criterion_laminar_oracle() {
    std::string detail;
    for (double re : {1.0, 100.0}) {
        const DomainParams dom = make_domain(1.0, 1.0, 1.0 / re, 0.5, 0.2);  // c_s d = 0.1
        const Grid g = make_grid(dom, 32, 32, 32);
        SolverConfig cfg;
        cfg.end_time = 0.05;
        cfg.sample_interval = 0.05;
        Solver solver(couette_field(g, dom), constant_profile(), dom, g, cfg);
        const RunResult r = solver.run();

        const double dev = couette_deviation(solver.field(), g, dom);
        // hand value: nu (U/L)^2 + (c_s d)^2 (U/L)^3
        const double expected = dom.viscosity + 0.01;
        const double eps_err =
            std::abs(r.series.back().eps_total - expected) / expected;
        const double avg_err =
            std::abs(r.series.back().running_average - expected) / expected;
        detail += fmt("Re=%g: profile dev %.2e, eps err %.2e; ", re, dev, eps_err);
        if (dev > 1e-6 || eps_err > 1e-4 || avg_err > 1e-4)
            return {false, detail};
    }
    return {true, detail + "expected 1.01 and 0.02"};
}

// 2. Three-dimensional steady state against the one-dimensional oracle with
//    second-order grid convergence and the power-balance identity.
Outcome criterion_oracle_cross_check() {
    const DomainParams dom = make_domain(1.0, 1.0, 1.0, 0.5, 0.2);  // Re = 1
    const DampingProfile profile = hermite_profile(dom, 2);
    const SteadyShearProfile oracle = steady_shear_profile(profile, dom, 4096);

    double errs[2] = {0, 0};
    double balance_err_max = 0.0;
    int idx = 0;
    for (int nz : {32, 64}) {
        const Grid g = make_grid(dom, 4, 4, nz);
        VelocityField start =
            field_from_profile(g, [&](double z) { return oracle.evaluate(z); });
        apply_boundary(start, g, dom.lid_speed);
        SolverConfig cfg;
        cfg.end_time = 5.0;
        cfg.steady_tolerance = 1e-13;
        cfg.sample_interval = 1e9;
        Solver solver(std::move(start), profile, dom, g, cfg);
        const RunResult r = solver.run();
        if (!r.reached_steady) return {false, fmt("nz=%g never reached steady state", nz)};

        double err = 0.0;
        for (int k = 0; k < g.nz; ++k)
            err = std::max(err, std::abs(solver.field().u(0, 0, k) -
                                         oracle.evaluate(g.z_center(k))));
        errs[idx++] = err / dom.lid_speed;

        // eps |O| against tau U L^2
        const EpsSplit eps = eps_instant(solver.field(), profile, dom, g);
        const double lhs = eps.total() * std::pow(dom.box_length, 3);
        const double rhs = oracle.tau * dom.lid_speed * dom.box_length * dom.box_length;
        balance_err_max = std::max(balance_err_max, std::abs(lhs - rhs) / rhs);
    }
    const double order = std::log2(errs[0] / errs[1]);
    const std::string detail = fmt("errors %.3e -> %.3e (order %.2f), ", errs[0], errs[1],
                                   order) +
                               fmt("power balance err %.2e", balance_err_max);
    const bool pass = errs[1] < errs[0] && errs[0] / errs[1] >= 3.0 && errs[0] < 1e-4 &&
                      balance_err_max <= 1e-3;
    return {pass, detail};
}

// 3. Finite-horizon time-average proxy under the general bound with the
//    traced constants, on strip-resolved grids with perturbed starts.
Outcome criterion_bound_inequality() {
    std::string detail;
    for (double re : {50.0, 100.0}) {
        const int nz = re == 50.0 ? 512 : 1024;
        const DomainParams probe = make_domain(1.0, 1.0, 1.0 / re, 0.25, 0.1);
        const Grid g = make_grid(probe, 4, 4, nz);
        if (!g.strip_resolved) return {false, fmt("grid nz=%g not strip-resolved", nz)};

        std::vector<DampingProfile> profiles = {constant_profile(), algebraic_profile(2),
                                                hermite_profile(probe, 2)};
        for (const auto& profile : profiles) {
            const BoundReport bound = dissipation_bound(probe, profile);
            if (std::abs(bound.c1 - 583.1) > 1e-9 ||
                std::abs(bound.c2 - 4510.134) > 1e-6)
                return {false, "traced constants drifted"};

            SolverConfig cfg;
            cfg.end_time = 0.15;
            cfg.sample_interval = 1e-3;
            cfg.initial_condition = InitialCondition::perturbed_couette;
            cfg.perturbation_amplitude = 0.02;
            cfg.seed = 7;
            Solver solver(perturbed_couette_field(g, probe, 0.02, 7), profile, probe, g,
                          cfg);
            const RunResult r = solver.run();
            const double proxy = r.series.limsup_proxy();
            detail += fmt("Re=%g ", re) + std::string(to_string(profile.kind)) +
                      fmt(": proxy %.4g <= bound %.4g; ", proxy, bound.bound_value);
            if (!(proxy <= bound.bound_value)) return {false, detail};
        }
    }
    return {true, detail};
}

// 4. Re-scaling exponents of the closed-form bounds.
Outcome criterion_scaling_laws() {
    const std::vector<double> res = {1e2, 1e3, 1e4};
    auto slope_for = [&](BoundKind kind, int alpha) {
        std::vector<double> re, val;
        for (double r : res) {
            const DomainParams dom = make_domain(1.0, 1.0, 1.0 / r, 0.1, 0.1);
            re.push_back(r);
            val.push_back(closed_form_bound(dom, kind, alpha).model_term);
        }
        return fit_loglog_slope(re, val);
    };
    const double s_alg = slope_for(BoundKind::algebraic, 2);
    const double s_h2 = slope_for(BoundKind::hermite, 2);
    const double s_h3 = slope_for(BoundKind::hermite, 3);
    const double s_lin = slope_for(BoundKind::hermite_linear, 1);
    const bool pass = std::abs(s_alg - 2.0) <= 0.01 && std::abs(s_h2) <= 0.01 &&
                      std::abs(s_h3) <= 0.01 && std::abs(s_lin - 1.0) <= 0.01;
    return {pass, fmt("slopes: algebraic %.4f, ", s_alg) +
                      fmt("hermite a2 %.4f a3 %.4f, ", s_h2, s_h3) +
                      fmt("linear contact %.4f", s_lin)};
}

// 5. Randomized trace-zero fields satisfy the thin-strip and wall-distance
//    inequalities; background-flow norms match quadrature.
Outcome criterion_functional_inequalities() {
    const DomainParams dom = make_domain(1.0, 1.0, 0.05, 0.1, 0.1);  // Re = 20
    const StripRegion strip = strip_region(dom);
    const double gl = strip.thickness();
    const double L = dom.box_length;

    const NormsReport n = phi_norms(make_background(dom));
    if (std::abs(n.phi_sq - n.phi_sq_quad) > 1e-10 * n.phi_sq ||
        std::abs(n.grad_phi_sq - n.grad_phi_sq_quad) > 1e-10 * n.grad_phi_sq)
        return {false, "background norms disagree with quadrature"};

    std::mt19937_64 rng(20260811);
    std::uniform_real_distribution<double> coeff(-1.0, 1.0);
    std::uniform_int_distribution<int> power(1, 4);
    std::uniform_int_distribution<int> wave(0, 3);

    int evaluated = 0;
    double worst_p = 0.0, worst_h = 0.0;
    while (evaluated < 100) {
        struct Term { double c; int q, mx, my; double px, py; };
        std::vector<Term> terms;
        for (int t = 0; t < 4; ++t)
            terms.push_back({coeff(rng), power(rng), wave(rng), wave(rng),
                             3.0 * coeff(rng), 3.0 * coeff(rng)});
        auto v = [&, terms](double x, double y, double z) {
            double sum = 0.0;
            for (const auto& t : terms)
                sum += t.c * std::pow((L - z) / gl, t.q) *
                       std::cos(2.0 * std::numbers::pi * t.mx * x / L + t.px) *
                       std::cos(2.0 * std::numbers::pi * t.my * y / L + t.py);
            return sum;
        };
        double pr = 0.0;
        try {
            pr = poincare_ratio(v, dom, strip);
        } catch (const std::runtime_error&) {
            continue;
        }
        ++evaluated;
        worst_p = std::max(worst_p, pr / gl);
        if (pr > gl) return {false, fmt("thin-strip ratio violated: %.6g > %.6g", pr, gl)};
        for (double p : {1.5, 2.0, 3.0}) {
            const double hr = hardy_ratio(v, p, dom, strip);
            worst_h = std::max(worst_h, hr / (p / (p - 1.0)));
            if (hr > p / (p - 1.0))
                return {false, fmt("wall-distance ratio violated at p=%.1f: %.6g", p, hr)};
        }
    }
    return {true, fmt("100 trials; worst ratios %.3f and %.3f of their limits", worst_p,
                      worst_h)};
}

// 6. Damping-profile suite: junction continuity, strip integrals, series
//    against the exact van Driest factor.
Outcome criterion_damping_suite() {
    double worst_junction = 0.0, worst_strip = 0.0, worst_taylor = 0.0;
    for (double re : {1.0, 100.0})
        for (int alpha : {1, 2, 3}) {
            const DomainParams dom = make_domain(1.0, 1.0, 1.0 / re, 0.5, 0.1);
            const DampingProfile p = hermite_profile(dom, alpha);
            const double gl = dom.strip_height();
            const double L = dom.box_length;
            for (double zj : {gl, 2 * gl, L - 2 * gl, L - gl}) {
                const double lo = eval_beta(p, std::nextafter(zj, 0.0), dom);
                const double hi = eval_beta(p, std::nextafter(zj, L), dom);
                worst_junction = std::max(
                    worst_junction,
                    std::abs(lo - hi) / std::max({std::abs(lo), std::abs(hi), 1.0}));
                const double sl = eval_beta_derivative(p, zj, dom, -1);
                const double sr = eval_beta_derivative(p, zj, dom, +1);
                worst_junction = std::max(
                    worst_junction,
                    std::abs(sl - sr) / std::max({std::abs(sl), std::abs(sr), 1.0 / gl}));
            }
        }
    if (worst_junction >= 1e-10)
        return {false, fmt("junction mismatch %.3e", worst_junction)};

    for (double re : {1.0, 50.0, 100.0}) {
        const DomainParams dom = make_domain(1.0, 1.0, 1.0 / re, 0.5, 0.1);
        std::vector<std::pair<double, double>> table;
        for (int i = 0; i <= 64; ++i) {
            const double z = dom.box_length * i / 64.0;
            table.emplace_back(z, 0.5 + 0.5 * std::cos(3.0 * z) * std::cos(3.0 * z));
        }
        for (const auto& p :
             {constant_profile(), van_driest_profile(), algebraic_profile(2),
              hermite_profile(dom, 2), tabulated_profile(table, dom)}) {
            const StripIntegral s = strip_integral(p, dom);
            worst_strip = std::max(worst_strip,
                                   std::abs(s.difference) /
                                       std::max({std::abs(s.closed_form), 1e-30}));
        }
    }
    if (worst_strip >= 1e-10) return {false, fmt("strip integral mismatch %.3e", worst_strip)};

    for (double re : {50.0, 100.0}) {
        const DomainParams dom = make_domain(1.0, 1.0, 1.0 / re, 0.5, 0.1);
        for (int i = 1; i <= 400; ++i) {
            const double z = 1.0 - 0.999 * (1.0 / re) * i / 400.0;
            worst_taylor = std::max(worst_taylor, std::abs(taylor_approx_f_w(z, dom, 8) -
                                                           van_driest_exact(z, dom)));
        }
    }
    if (worst_taylor >= 1e-6) return {false, fmt("series error %.3e", worst_taylor)};
    return {true, fmt("junctions %.1e, strips %.1e, series %.1e", worst_junction,
                      worst_strip, worst_taylor)};
}

// 7. Discrete structure over a 500-step run: skew advection, projection,
//    model-term sign and the energy boundedness guard.
Outcome criterion_discrete_structure() {
    const DomainParams dom = make_domain(1.0, 1.0, 0.001, 0.03125, 0.1);  // Re = 1000
    const Grid g = make_grid(dom, 32, 32, 32);
    const DampingProfile profile = hermite_profile(dom, 2);
    SolverConfig cfg;
    cfg.end_time = 1e9;
    Solver solver(perturbed_couette_field(g, dom, 0.05, 3), profile, dom, g, cfg);

    double worst_div = 0.0, worst_skew = 0.0;
    std::vector<double> energies;
    for (int step = 0; step < 500; ++step) {
        const StepInfo info = solver.advance();
        worst_div = std::max(worst_div, info.max_divergence);
        if (worst_div > 1e-10) return {false, fmt("divergence %.3e at step %g", worst_div,
                                                  double(step))};

        const FaceDissipation d = face_dissipation(solver.field(), profile, dom, g);
        if (d.model < 0.0)
            return {false, fmt("model energy drain negative: %.3e", d.model)};

        const double ke = kinetic_energy(solver.field(), dom, g);
        if (!energies.empty()) {
            std::vector<double> sorted = energies;
            std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                             sorted.end());
            const double median = sorted[sorted.size() / 2];
            if (ke > 100.0 * median)
                return {false, fmt("boundedness guard would trip: ke %.3g vs median %.3g",
                                   ke, median)};
        }
        energies.push_back(ke);

        if (step % 50 == 0) {
            VelocityField self = solver.field();
            const double b =
                advection_energy_rate(solver.field(), self, g, dom, dom.lid_speed);
            const double grad_norm = std::sqrt(d.viscous / dom.viscosity);
            const double v_norm = std::sqrt(2.0 * ke);
            const double scale = std::max(1.0, dom.lid_speed * grad_norm * v_norm);
            worst_skew = std::max(worst_skew, std::abs(b) / scale);
            if (worst_skew > 1e-12)
                return {false, fmt("skew advection residual %.3e", worst_skew)};
        }
    }
    return {true, fmt("max divergence %.2e, skew residual %.2e over 500 steps", worst_div,
                      worst_skew)};
}

// 8. Byte-identical CSV outputs for identical config + seed in deterministic
//    mode, through the config-file path.
Outcome criterion_reproducibility() {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "smd_acceptance_repro";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const fs::path config_path = dir / "exp.cfg";
    {
        std::ofstream out(config_path);
        out << "[domain]\nnu = 0.002\ndelta = 0.25\nc_s = 0.1\n"
            << "[grid]\nnx = 8\nny = 8\nnz = 16\n"
            << "[profile]\nkind = hermite\nalpha = 2\n"
            << "[solver]\nend_time = 0.05\nsample_interval = 0.005\n"
            << "initial_condition = perturbed\nperturbation_amplitude = 0.05\n"
            << "seed = 42\ndeterministic = true\n";
    }
    auto run_into = [&](const fs::path& out_dir) {
        ExperimentConfig cfg = parse_config_file(config_path);
        cfg.out_dir = out_dir.string();
        std::ostringstream log;
        return run_experiment(cfg, RunMode::run, log);
    };
    if (run_into(dir / "a") != 0 || run_into(dir / "b") != 0)
        return {false, "run mode failed"};

    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        return ss.str();
    };
    const bool same_diag =
        slurp(dir / "a" / "diagnostics.csv") == slurp(dir / "b" / "diagnostics.csv");
    const bool same_summary =
        slurp(dir / "a" / "summary.csv") == slurp(dir / "b" / "summary.csv");
    const bool nonempty = !slurp(dir / "a" / "diagnostics.csv").empty();
    fs::remove_all(dir);
    if (!nonempty) return {false, "empty diagnostics"};
    if (!same_diag || !same_summary) return {false, "outputs differ between runs"};
    return {true, "diagnostics and summary byte-identical across two runs"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"laminar oracle equality", criterion_laminar_oracle},
        {"steady-state cross-check against the 1-D oracle", criterion_oracle_cross_check},
        {"time-average proxy under the general bound", criterion_bound_inequality},
        {"Re-scaling exponents of the closed-form bounds", criterion_scaling_laws},
        {"thin-strip and wall-distance inequalities", criterion_functional_inequalities},
        {"damping-profile suite", criterion_damping_suite},
        {"discrete structure over a long run", criterion_discrete_structure},
        {"byte-level reproducibility", criterion_reproducibility},
    };

    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome;
        try {
            outcome = criteria[i].run();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%zu/%zu] %s  %s  (%.1fs)  %s\n", i + 1, criteria.size(),
                    outcome.pass ? "PASS" : "FAIL", criteria[i].name, seconds,
                    outcome.detail.c_str());
        std::fflush(stdout);
        if (!outcome.pass) ++failed;
    }
    std::printf("RESULT: %zu/%zu criteria passed\n", criteria.size() - failed,
                criteria.size());
    return failed == 0 ? 0 : 1;
}
