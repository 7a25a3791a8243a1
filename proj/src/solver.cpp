#include "smd/solver.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <queue>
#include <random>
#include <stdexcept>

#include "poisson.hpp"
#include "stencils.hpp"

namespace smd {

namespace {

// ---------------------------------------------------------------------------
// advection: half-sum of divergence and advective forms with two-point face
// interpolation of the advecting velocity. With a discretely divergence-free
// advecting field and impermeable walls this form drains no kinetic energy.
// ---------------------------------------------------------------------------

double adv_u(const VelocityField& a, const VelocityField& t, const Grid& g,
             int i, int j, int k) {
    const double uce = 0.5 * (a.u(i, j, k) + a.u(i + 1, j, k));
    const double ucw = 0.5 * (a.u(i - 1, j, k) + a.u(i, j, k));
    const double vn = 0.5 * (a.v(i - 1, j + 1, k) + a.v(i, j + 1, k));
    const double vs = 0.5 * (a.v(i - 1, j, k) + a.v(i, j, k));
    const double wt = 0.5 * (a.w(i - 1, j, k + 1) + a.w(i, j, k + 1));
    const double wb = 0.5 * (a.w(i - 1, j, k) + a.w(i, j, k));

    const double div =
        (uce * 0.5 * (t.u(i, j, k) + t.u(i + 1, j, k)) -
         ucw * 0.5 * (t.u(i - 1, j, k) + t.u(i, j, k))) / g.hx +
        (vn * 0.5 * (t.u(i, j, k) + t.u(i, j + 1, k)) -
         vs * 0.5 * (t.u(i, j - 1, k) + t.u(i, j, k))) / g.hy +
        (wt * 0.5 * (t.u(i, j, k) + t.u(i, j, k + 1)) -
         wb * 0.5 * (t.u(i, j, k - 1) + t.u(i, j, k))) / g.hz;
    const double adv =
        (uce * (t.u(i + 1, j, k) - t.u(i, j, k)) +
         ucw * (t.u(i, j, k) - t.u(i - 1, j, k))) / (2.0 * g.hx) +
        (vn * (t.u(i, j + 1, k) - t.u(i, j, k)) +
         vs * (t.u(i, j, k) - t.u(i, j - 1, k))) / (2.0 * g.hy) +
        (wt * (t.u(i, j, k + 1) - t.u(i, j, k)) +
         wb * (t.u(i, j, k) - t.u(i, j, k - 1))) / (2.0 * g.hz);
    return 0.5 * (div + adv);
}

double adv_v(const VelocityField& a, const VelocityField& t, const Grid& g,
             int i, int j, int k) {
    const double ue = 0.5 * (a.u(i + 1, j - 1, k) + a.u(i + 1, j, k));
    const double uw = 0.5 * (a.u(i, j - 1, k) + a.u(i, j, k));
    const double vcn = 0.5 * (a.v(i, j, k) + a.v(i, j + 1, k));
    const double vcs = 0.5 * (a.v(i, j - 1, k) + a.v(i, j, k));
    const double wt = 0.5 * (a.w(i, j - 1, k + 1) + a.w(i, j, k + 1));
    const double wb = 0.5 * (a.w(i, j - 1, k) + a.w(i, j, k));

    const double div =
        (ue * 0.5 * (t.v(i, j, k) + t.v(i + 1, j, k)) -
         uw * 0.5 * (t.v(i - 1, j, k) + t.v(i, j, k))) / g.hx +
        (vcn * 0.5 * (t.v(i, j, k) + t.v(i, j + 1, k)) -
         vcs * 0.5 * (t.v(i, j - 1, k) + t.v(i, j, k))) / g.hy +
        (wt * 0.5 * (t.v(i, j, k) + t.v(i, j, k + 1)) -
         wb * 0.5 * (t.v(i, j, k - 1) + t.v(i, j, k))) / g.hz;
    const double adv =
        (ue * (t.v(i + 1, j, k) - t.v(i, j, k)) +
         uw * (t.v(i, j, k) - t.v(i - 1, j, k))) / (2.0 * g.hx) +
        (vcn * (t.v(i, j + 1, k) - t.v(i, j, k)) +
         vcs * (t.v(i, j, k) - t.v(i, j - 1, k))) / (2.0 * g.hy) +
        (wt * (t.v(i, j, k + 1) - t.v(i, j, k)) +
         wb * (t.v(i, j, k) - t.v(i, j, k - 1))) / (2.0 * g.hz);
    return 0.5 * (div + adv);
}

double adv_w(const VelocityField& a, const VelocityField& t, const Grid& g,
             int i, int j, int k) {
    const double ue = 0.5 * (a.u(i + 1, j, k - 1) + a.u(i + 1, j, k));
    const double uw = 0.5 * (a.u(i, j, k - 1) + a.u(i, j, k));
    const double vn = 0.5 * (a.v(i, j + 1, k - 1) + a.v(i, j + 1, k));
    const double vs = 0.5 * (a.v(i, j, k - 1) + a.v(i, j, k));
    const double wct = 0.5 * (a.w(i, j, k) + a.w(i, j, k + 1));
    const double wcb = 0.5 * (a.w(i, j, k - 1) + a.w(i, j, k));

    const double div =
        (ue * 0.5 * (t.w(i, j, k) + t.w(i + 1, j, k)) -
         uw * 0.5 * (t.w(i - 1, j, k) + t.w(i, j, k))) / g.hx +
        (vn * 0.5 * (t.w(i, j, k) + t.w(i, j + 1, k)) -
         vs * 0.5 * (t.w(i, j - 1, k) + t.w(i, j, k))) / g.hy +
        (wct * 0.5 * (t.w(i, j, k) + t.w(i, j, k + 1)) -
         wcb * 0.5 * (t.w(i, j, k - 1) + t.w(i, j, k))) / g.hz;
    const double adv =
        (ue * (t.w(i + 1, j, k) - t.w(i, j, k)) +
         uw * (t.w(i, j, k) - t.w(i - 1, j, k))) / (2.0 * g.hx) +
        (vn * (t.w(i, j + 1, k) - t.w(i, j, k)) +
         vs * (t.w(i, j, k) - t.w(i, j - 1, k))) / (2.0 * g.hy) +
        (wct * (t.w(i, j, k + 1) - t.w(i, j, k)) +
         wcb * (t.w(i, j, k) - t.w(i, j, k - 1))) / (2.0 * g.hz);
    return 0.5 * (div + adv);
}

// ---------------------------------------------------------------------------
// stress divergence with effective viscosity nu_eff = nu + beta (c_s d)^2
// |grad u| held at cell centers and averaged onto faces/edges.
// ---------------------------------------------------------------------------

double diff_u(const VelocityField& f, const Field3& nu, const Grid& g,
              int i, int j, int k) {
    const double fxe = nu(i, j, k) * (f.u(i + 1, j, k) - f.u(i, j, k)) / g.hx;
    const double fxw = nu(i - 1, j, k) * (f.u(i, j, k) - f.u(i - 1, j, k)) / g.hx;

    const double nyn = 0.25 * (nu(i - 1, j, k) + nu(i, j, k) +
                               nu(i - 1, j + 1, k) + nu(i, j + 1, k));
    const double nys = 0.25 * (nu(i - 1, j - 1, k) + nu(i, j - 1, k) +
                               nu(i - 1, j, k) + nu(i, j, k));
    const double fyn = nyn * (f.u(i, j + 1, k) - f.u(i, j, k)) / g.hy;
    const double fys = nys * (f.u(i, j, k) - f.u(i, j - 1, k)) / g.hy;

    const double nzt = 0.25 * (nu(i - 1, j, k) + nu(i, j, k) +
                               nu(i - 1, j, k + 1) + nu(i, j, k + 1));
    const double nzb = 0.25 * (nu(i - 1, j, k - 1) + nu(i, j, k - 1) +
                               nu(i - 1, j, k) + nu(i, j, k));
    const double fzt = nzt * (f.u(i, j, k + 1) - f.u(i, j, k)) / g.hz;
    const double fzb = nzb * (f.u(i, j, k) - f.u(i, j, k - 1)) / g.hz;

    return (fxe - fxw) / g.hx + (fyn - fys) / g.hy + (fzt - fzb) / g.hz;
}

double diff_v(const VelocityField& f, const Field3& nu, const Grid& g,
              int i, int j, int k) {
    const double nxe = 0.25 * (nu(i, j - 1, k) + nu(i + 1, j - 1, k) +
                               nu(i, j, k) + nu(i + 1, j, k));
    const double nxw = 0.25 * (nu(i - 1, j - 1, k) + nu(i, j - 1, k) +
                               nu(i - 1, j, k) + nu(i, j, k));
    const double fxe = nxe * (f.v(i + 1, j, k) - f.v(i, j, k)) / g.hx;
    const double fxw = nxw * (f.v(i, j, k) - f.v(i - 1, j, k)) / g.hx;

    const double fyn = nu(i, j, k) * (f.v(i, j + 1, k) - f.v(i, j, k)) / g.hy;
    const double fys = nu(i, j - 1, k) * (f.v(i, j, k) - f.v(i, j - 1, k)) / g.hy;

    const double nzt = 0.25 * (nu(i, j - 1, k) + nu(i, j, k) +
                               nu(i, j - 1, k + 1) + nu(i, j, k + 1));
    const double nzb = 0.25 * (nu(i, j - 1, k - 1) + nu(i, j, k - 1) +
                               nu(i, j - 1, k) + nu(i, j, k));
    const double fzt = nzt * (f.v(i, j, k + 1) - f.v(i, j, k)) / g.hz;
    const double fzb = nzb * (f.v(i, j, k) - f.v(i, j, k - 1)) / g.hz;

    return (fxe - fxw) / g.hx + (fyn - fys) / g.hy + (fzt - fzb) / g.hz;
}

double diff_w(const VelocityField& f, const Field3& nu, const Grid& g,
              int i, int j, int k) {
    const double nxe = 0.25 * (nu(i, j, k - 1) + nu(i + 1, j, k - 1) +
                               nu(i, j, k) + nu(i + 1, j, k));
    const double nxw = 0.25 * (nu(i - 1, j, k - 1) + nu(i, j, k - 1) +
                               nu(i - 1, j, k) + nu(i, j, k));
    const double fxe = nxe * (f.w(i + 1, j, k) - f.w(i, j, k)) / g.hx;
    const double fxw = nxw * (f.w(i, j, k) - f.w(i - 1, j, k)) / g.hx;

    const double nyn = 0.25 * (nu(i, j, k - 1) + nu(i, j + 1, k - 1) +
                               nu(i, j, k) + nu(i, j + 1, k));
    const double nys = 0.25 * (nu(i, j - 1, k - 1) + nu(i, j, k - 1) +
                               nu(i, j - 1, k) + nu(i, j, k));
    const double fyn = nyn * (f.w(i, j + 1, k) - f.w(i, j, k)) / g.hy;
    const double fys = nys * (f.w(i, j, k) - f.w(i, j - 1, k)) / g.hy;

    const double fzt = nu(i, j, k) * (f.w(i, j, k + 1) - f.w(i, j, k)) / g.hz;
    const double fzb = nu(i, j, k - 1) * (f.w(i, j, k) - f.w(i, j, k - 1)) / g.hz;

    return (fxe - fxw) / g.hx + (fyn - fys) / g.hy + (fzt - fzb) / g.hz;
}

void fill_center_ghosts(Field3& a, int nx, int ny, int nz) {
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            a(i, j, -1) = a(i, j, 0);
            a(i, j, nz) = a(i, j, nz - 1);
        }
    for (int k = -1; k <= nz; ++k) {
        for (int j = 0; j < ny; ++j) {
            a(-1, j, k) = a(nx - 1, j, k);
            a(nx, j, k) = a(0, j, k);
        }
        for (int i = -1; i <= nx; ++i) {
            a(i, -1, k) = a(i, ny - 1, k);
            a(i, ny, k) = a(i, 0, k);
        }
    }
}

// effective viscosity at cell centers; returns the interior maximum
double fill_nu_eff(const VelocityField& f, const DomainParams& dom, const Grid& g,
                   const std::vector<double>& beta_centers, Field3& nu) {
    const double cs_delta_sq = dom.cs_delta() * dom.cs_delta();
    double nu_max = 0.0;
    for (int k = 0; k < g.nz; ++k) {
        const double beta = beta_centers[k];
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double val =
                    dom.viscosity + beta * cs_delta_sq * detail::grad_frobenius(f, g, i, j, k);
                nu(i, j, k) = val;
                nu_max = std::max(nu_max, val);
            }
    }
    fill_center_ghosts(nu, g.nx, g.ny, g.nz);
    return nu_max;
}

std::vector<double> beta_at_centers(const DampingProfile& profile, const DomainParams& dom,
                                    const Grid& g) {
    std::vector<double> beta(g.nz);
    for (int k = 0; k < g.nz; ++k) beta[k] = eval_beta(profile, g.z_center(k), dom);
    return beta;
}

// streaming median for the kinetic-energy boundedness guard
class StreamingMedian {
public:
    void push(double x) {
        if (lower_.empty() || x <= lower_.top()) lower_.push(x);
        else upper_.push(x);
        if (lower_.size() > upper_.size() + 1) {
            upper_.push(lower_.top());
            lower_.pop();
        } else if (upper_.size() > lower_.size()) {
            lower_.push(upper_.top());
            upper_.pop();
        }
    }
    bool empty() const { return lower_.empty(); }
    double value() const {
        if (lower_.size() == upper_.size())
            return 0.5 * (lower_.top() + upper_.top());
        return lower_.top();
    }

private:
    std::priority_queue<double> lower_;  // max-heap of the lower half
    std::priority_queue<double, std::vector<double>, std::greater<>> upper_;
};

}  // namespace

void SolverConfig::validate() const {
    if (!(cfl > 0.0 && cfl < 1.0))
        throw std::invalid_argument("cfl number must lie in (0, 1)");
    if (!(end_time > 0.0))
        throw std::invalid_argument("end_time must be positive");
    if (!(projection_tolerance > 0.0))
        throw std::invalid_argument("projection_tolerance must be positive");
    if (sample_interval < 0.0)
        throw std::invalid_argument("sample_interval must be nonnegative");
    if (perturbation_amplitude < 0.0)
        throw std::invalid_argument("perturbation_amplitude must be nonnegative");
    if (initial_condition == InitialCondition::checkpoint && checkpoint_path.empty())
        throw std::invalid_argument("checkpoint initial condition needs checkpoint_path");
}

struct Solver::Impl {
    DomainParams dom;
    Grid grid;
    DampingProfile profile;
    SolverConfig config;
    VelocityField field;

    detail::PoissonSolver poisson;
    std::vector<double> beta_centers;
    Field3 nu_eff;
    Field3 div_rhs, psi;
    Field3 ru1, rv1, rw1, ru2, rv2, rw2;
    VelocityField stage;

    Impl(VelocityField f, DampingProfile p, DomainParams d, Grid g, SolverConfig c)
        : dom(d), grid(g), profile(std::move(p)), config(c), field(std::move(f)),
          poisson(g), beta_centers(beta_at_centers(profile, dom, g)),
          nu_eff(g.nx, g.ny, g.nz), div_rhs(g.nx, g.ny, g.nz), psi(g.nx, g.ny, g.nz),
          ru1(g.nx, g.ny, g.nz), rv1(g.nx, g.ny, g.nz), rw1(g.nx, g.ny, g.nz + 1),
          ru2(g.nx, g.ny, g.nz), rv2(g.nx, g.ny, g.nz), rw2(g.nx, g.ny, g.nz + 1),
          stage(g) {
        config.validate();
    }

    void project(VelocityField& f) {
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i)
                    div_rhs(i, j, k) = cell_divergence(f, grid, i, j, k);
        poisson.solve(div_rhs, psi);
        fill_center_ghosts(psi, grid.nx, grid.ny, grid.nz);
        for (int k = 0; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i) {
                    f.u(i, j, k) -= (psi(i, j, k) - psi(i - 1, j, k)) / grid.hx;
                    f.v(i, j, k) -= (psi(i, j, k) - psi(i, j - 1, k)) / grid.hy;
                }
        for (int k = 1; k < grid.nz; ++k)
            for (int j = 0; j < grid.ny; ++j)
                for (int i = 0; i < grid.nx; ++i)
                    f.w(i, j, k) -= (psi(i, j, k) - psi(i, j, k - 1)) / grid.hz;
        apply_boundary(f, grid, dom.lid_speed);
    }

    void rhs(const VelocityField& f, const Field3& nu, Field3& ru, Field3& rv, Field3& rw) {
        const Grid& g = grid;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    ru(i, j, k) = -adv_u(f, f, g, i, j, k) + diff_u(f, nu, g, i, j, k);
                    rv(i, j, k) = -adv_v(f, f, g, i, j, k) + diff_v(f, nu, g, i, j, k);
                }
        for (int k = 1; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    rw(i, j, k) = -adv_w(f, f, g, i, j, k) + diff_w(f, nu, g, i, j, k);
    }

    double stable_dt(double nu_max) const {
        const Grid& g = grid;
        double umax = 0.0, vmax = 0.0, wmax = 0.0;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    umax = std::max(umax, std::abs(field.u(i, j, k)));
                    vmax = std::max(vmax, std::abs(field.v(i, j, k)));
                    wmax = std::max(wmax, std::abs(field.w(i, j, k)));
                }
        const double tiny = 1e-300;
        const double dt_adv = std::min({g.hx / (umax + tiny), g.hy / (vmax + tiny),
                                        g.hz / (wmax + tiny)});
        const double h = g.min_h();
        const double dt_diff = h * h / (6.0 * nu_max);
        const double dt = config.cfl * std::min(dt_adv, dt_diff);
        if (!std::isfinite(dt) || dt < 1e-15 * config.end_time)
            throw std::runtime_error(
                "time step underflow: effective viscosity or velocity blew up");
        return dt;
    }

    StepInfo advance(double dt_cap) {
        const Grid& g = grid;
        apply_boundary(field, g, dom.lid_speed);
        const double nu_max = fill_nu_eff(field, dom, g, beta_centers, nu_eff);
        const double dt = std::min(stable_dt(nu_max), dt_cap);

        rhs(field, nu_eff, ru1, rv1, rw1);

        stage = field;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    stage.u(i, j, k) += dt * ru1(i, j, k);
                    stage.v(i, j, k) += dt * rv1(i, j, k);
                }
        for (int k = 1; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    stage.w(i, j, k) += dt * rw1(i, j, k);
        apply_boundary(stage, g, dom.lid_speed);
        project(stage);

        fill_nu_eff(stage, dom, g, beta_centers, nu_eff);
        rhs(stage, nu_eff, ru2, rv2, rw2);

        double max_change = 0.0;
        const double half_dt = 0.5 * dt;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double du = half_dt * (ru1(i, j, k) + ru2(i, j, k));
                    const double dv = half_dt * (rv1(i, j, k) + rv2(i, j, k));
                    field.u(i, j, k) += du;
                    field.v(i, j, k) += dv;
                    max_change = std::max({max_change, std::abs(du), std::abs(dv)});
                }
        for (int k = 1; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    const double dw = half_dt * (rw1(i, j, k) + rw2(i, j, k));
                    field.w(i, j, k) += dw;
                    max_change = std::max(max_change, std::abs(dw));
                }
        apply_boundary(field, g, dom.lid_speed);
        project(field);
        field.time += dt;

        StepInfo info;
        info.time = field.time;
        info.dt = dt;
        info.nu_eff_max = nu_max;
        info.max_velocity_change = max_change;
        info.max_divergence = max_divergence(field, grid);
        if (info.max_divergence > config.projection_tolerance)
            throw std::runtime_error("pressure projection failed to reach tolerance");
        return info;
    }
};

Solver::Solver(VelocityField initial, DampingProfile profile, DomainParams dom, Grid grid,
               SolverConfig config)
    : impl_(std::make_unique<Impl>(std::move(initial), std::move(profile), dom, grid,
                                   config)) {}

Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

StepInfo Solver::advance(double dt_cap) { return impl_->advance(dt_cap); }

VelocityField& Solver::field() { return impl_->field; }
const VelocityField& Solver::field() const { return impl_->field; }
const Grid& Solver::grid() const { return impl_->grid; }
const DomainParams& Solver::domain() const { return impl_->dom; }

RunResult Solver::run() {
    Impl& s = *impl_;
    RunResult out;
    StreamingMedian ke_median;
    const double ke_floor =
        1e-12 * s.dom.lid_speed * s.dom.lid_speed * std::pow(s.dom.box_length, 3);

    auto sample = [&] {
        EpsSplit e = eps_instant(s.field, s.profile, s.dom, s.grid);
        const double ke = kinetic_energy(s.field, s.dom, s.grid);
        if (!ke_median.empty()) {
            const double med = ke_median.value();
            if (ke > s.config.ke_guard_factor * std::max(med, ke_floor)) {
                char msg[256];
                std::snprintf(msg, sizeof msg,
                              "kinetic energy boundedness guard tripped at t = %.6g: "
                              "ke = %.6g exceeds %g x running median %.6g",
                              s.field.time, ke, s.config.ke_guard_factor, med);
                throw std::runtime_error(msg);
            }
        }
        ke_median.push(ke);
        out.series.add(s.field.time, ke, e.viscous, e.model);
    };

    sample();
    const double t_end = s.field.time + s.config.end_time;
    double next_sample = s.field.time + s.config.sample_interval;

    while (s.field.time < t_end * (1.0 - 1e-14)) {
        if (s.config.max_steps > 0 && out.step_count >= s.config.max_steps) break;
        StepInfo info = advance(t_end - s.field.time);
        ++out.step_count;
        if (s.config.collect_step_diagnostics) out.steps.push_back(info);

        const bool due = s.config.sample_interval == 0.0 || s.field.time >= next_sample ||
                         s.field.time >= t_end * (1.0 - 1e-14);
        if (due) {
            sample();
            if (s.config.sample_interval > 0.0)
                while (next_sample <= s.field.time) next_sample += s.config.sample_interval;
        }
        if (s.config.steady_tolerance > 0.0 &&
            info.max_velocity_change <= s.config.steady_tolerance * s.dom.lid_speed) {
            out.reached_steady = true;
            break;
        }
    }
    if (out.series.back().time < s.field.time) sample();
    return out;
}

// ---------------------------------------------------------------------------
// initial conditions
// ---------------------------------------------------------------------------

VelocityField couette_field(const Grid& g, const DomainParams& dom) {
    VelocityField f = field_from_profile(g, [&](double z) {
        return dom.lid_speed * z / dom.box_length;
    });
    apply_boundary(f, g, dom.lid_speed);
    return f;
}

VelocityField perturbed_couette_field(const Grid& g, const DomainParams& dom,
                                      double amplitude, std::uint64_t seed) {
    VelocityField f = couette_field(g, dom);
    if (amplitude <= 0.0) return f;

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);

    const double L = dom.box_length;
    struct Mode { int mx, my; double ra, rb, rc, pa, pb; };
    std::vector<Mode> modes;
    for (auto [mx, my] : {std::pair{1, 0}, {0, 1}, {1, 1}, {2, 1}, {1, 2}, {2, 2}})
        modes.push_back({mx, my, unit(rng), unit(rng), unit(rng), angle(rng), angle(rng)});

    // curl of a trigonometric potential: vanishes at the walls together with
    // its tangential components, divergence-free before discretization
    auto fz = [&](double z) { const double s = std::sin(std::numbers::pi * z / L); return s * s; };
    auto dfz = [&](double z) { return std::numbers::pi / L * std::sin(2.0 * std::numbers::pi * z / L); };
    auto du = [&](double x, double y, double z) {
        double sum = 0.0;
        for (const auto& m : modes) {
            const double kx = 2.0 * std::numbers::pi * m.mx / L;
            const double ky = 2.0 * std::numbers::pi * m.my / L;
            sum += -m.rc * ky * fz(z) * std::cos(kx * x + m.pa) * std::sin(ky * y + m.pb) -
                   m.rb * dfz(z) * std::sin(kx * x + m.pb);
        }
        return sum;
    };
    auto dv = [&](double x, double y, double z) {
        double sum = 0.0;
        for (const auto& m : modes) {
            const double kx = 2.0 * std::numbers::pi * m.mx / L;
            const double ky = 2.0 * std::numbers::pi * m.my / L;
            sum += m.ra * dfz(z) * std::sin(ky * y + m.pa) +
                   m.rc * kx * fz(z) * std::sin(kx * x + m.pa) * std::cos(ky * y + m.pb);
        }
        return sum;
    };
    auto dw = [&](double x, double y, double z) {
        double sum = 0.0;
        for (const auto& m : modes) {
            const double kx = 2.0 * std::numbers::pi * m.mx / L;
            const double ky = 2.0 * std::numbers::pi * m.my / L;
            sum += m.rb * kx * fz(z) * std::cos(kx * x + m.pb) -
                   m.ra * ky * fz(z) * std::cos(ky * y + m.pa);
        }
        return sum;
    };

    VelocityField pert(g);
    double peak = 0.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                pert.u(i, j, k) = du(i * g.hx, (j + 0.5) * g.hy, g.z_center(k));
                pert.v(i, j, k) = dv((i + 0.5) * g.hx, j * g.hy, g.z_center(k));
                peak = std::max({peak, std::abs(pert.u(i, j, k)), std::abs(pert.v(i, j, k))});
            }
    for (int k = 1; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                pert.w(i, j, k) = dw((i + 0.5) * g.hx, (j + 0.5) * g.hy, g.z_face(k));
                peak = std::max(peak, std::abs(pert.w(i, j, k)));
            }
    if (peak > 0.0) {
        const double scale = amplitude * dom.lid_speed / peak;
        for (int k = 0; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i) {
                    f.u(i, j, k) += scale * pert.u(i, j, k);
                    f.v(i, j, k) += scale * pert.v(i, j, k);
                }
        for (int k = 1; k < g.nz; ++k)
            for (int j = 0; j < g.ny; ++j)
                for (int i = 0; i < g.nx; ++i)
                    f.w(i, j, k) += scale * pert.w(i, j, k);
    }
    project_field(f, g, dom.lid_speed);
    return f;
}

// ---------------------------------------------------------------------------
// diagnostics
// ---------------------------------------------------------------------------

double advection_energy_rate(VelocityField& advecting, VelocityField& advected,
                             const Grid& g, const DomainParams& dom,
                             double advected_lid_speed) {
    apply_boundary(advecting, g, dom.lid_speed);
    apply_boundary(advected, g, advected_lid_speed);
    const double vol = g.cell_volume();
    double sum = 0.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                sum += adv_u(advecting, advected, g, i, j, k) * advected.u(i, j, k);
                sum += adv_v(advecting, advected, g, i, j, k) * advected.v(i, j, k);
            }
    for (int k = 1; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                sum += adv_w(advecting, advected, g, i, j, k) * advected.w(i, j, k);
    return sum * vol;
}

namespace {

// accumulate nu * (difference/h)^2 * site volume for every face-gradient
// site of the discretization; wall-ghost sites of u,v carry half volume
template <typename Acc>
void for_each_dissipation_site(const VelocityField& f, const Field3& nu, const Grid& g,
                               Acc&& acc) {
    const double vol = g.cell_volume();
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                // u sites
                acc(nu(i, j, k), (f.u(i + 1, j, k) - f.u(i, j, k)) / g.hx, vol);
                acc(0.25 * (nu(i - 1, j - 1, k) + nu(i, j - 1, k) + nu(i - 1, j, k) + nu(i, j, k)),
                    (f.u(i, j, k) - f.u(i, j - 1, k)) / g.hy, vol);
                {
                    const double nzb = 0.25 * (nu(i - 1, j, k - 1) + nu(i, j, k - 1) +
                                               nu(i - 1, j, k) + nu(i, j, k));
                    const double grad = (f.u(i, j, k) - f.u(i, j, k - 1)) / g.hz;
                    acc(nzb, grad, k == 0 ? 0.5 * vol : vol);
                }
                // v sites
                acc(0.25 * (nu(i - 1, j - 1, k) + nu(i, j - 1, k) + nu(i - 1, j, k) + nu(i, j, k)),
                    (f.v(i, j, k) - f.v(i - 1, j, k)) / g.hx, vol);
                acc(nu(i, j, k), (f.v(i, j + 1, k) - f.v(i, j, k)) / g.hy, vol);
                {
                    const double nzb = 0.25 * (nu(i, j - 1, k - 1) + nu(i, j, k - 1) +
                                               nu(i, j - 1, k) + nu(i, j, k));
                    const double grad = (f.v(i, j, k) - f.v(i, j, k - 1)) / g.hz;
                    acc(nzb, grad, k == 0 ? 0.5 * vol : vol);
                }
                // w z-sites (differences across cell centers)
                acc(nu(i, j, k), (f.w(i, j, k + 1) - f.w(i, j, k)) / g.hz, vol);
            }
    // top ghost sites of u and v (half volume)
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const int k = g.nz;
            const double nzu = 0.25 * (nu(i - 1, j, k - 1) + nu(i, j, k - 1) +
                                       nu(i - 1, j, k) + nu(i, j, k));
            acc(nzu, (f.u(i, j, k) - f.u(i, j, k - 1)) / g.hz, 0.5 * vol);
            const double nzv = 0.25 * (nu(i, j - 1, k - 1) + nu(i, j, k - 1) +
                                       nu(i, j - 1, k) + nu(i, j, k));
            acc(nzv, (f.v(i, j, k) - f.v(i, j, k - 1)) / g.hz, 0.5 * vol);
        }
    // w lateral sites (interior z faces only; wall values are fixed)
    for (int k = 1; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double nxw = 0.25 * (nu(i - 1, j, k - 1) + nu(i, j, k - 1) +
                                           nu(i - 1, j, k) + nu(i, j, k));
                acc(nxw, (f.w(i, j, k) - f.w(i - 1, j, k)) / g.hx, vol);
                const double nys = 0.25 * (nu(i, j - 1, k - 1) + nu(i, j, k - 1) +
                                           nu(i, j - 1, k) + nu(i, j, k));
                acc(nys, (f.w(i, j, k) - f.w(i, j - 1, k)) / g.hy, vol);
            }
}

}  // namespace

FaceDissipation face_dissipation(VelocityField& f, const DampingProfile& profile,
                                 const DomainParams& dom, const Grid& g) {
    apply_boundary(f, g, dom.lid_speed);
    Field3 nu(g.nx, g.ny, g.nz);
    fill_nu_eff(f, dom, g, beta_at_centers(profile, dom, g), nu);

    FaceDissipation d;
    for_each_dissipation_site(f, nu, g, [&](double nu_site, double grad, double site_vol) {
        const double g2 = grad * grad * site_vol;
        d.viscous += dom.viscosity * g2;
        d.model += (nu_site - dom.viscosity) * g2;
    });
    return d;
}

double lid_power(VelocityField& f, const DampingProfile& profile,
                 const DomainParams& dom, const Grid& g) {
    apply_boundary(f, g, dom.lid_speed);
    Field3 nu(g.nx, g.ny, g.nz);
    fill_nu_eff(f, dom, g, beta_at_centers(profile, dom, g), nu);

    const int k = g.nz;
    double power = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double nzt = 0.25 * (nu(i - 1, j, k - 1) + nu(i, j, k - 1) +
                                       nu(i - 1, j, k) + nu(i, j, k));
            const double flux = nzt * (f.u(i, j, k) - f.u(i, j, k - 1)) / g.hz;
            power += flux * dom.lid_speed;
        }
    return power * g.hx * g.hy;
}

double staggered_kinetic_energy(const VelocityField& f, const Grid& g) {
    double sum = 0.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                sum += f.u(i, j, k) * f.u(i, j, k);
                sum += f.v(i, j, k) * f.v(i, j, k);
            }
    for (int k = 1; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                sum += f.w(i, j, k) * f.w(i, j, k);
    return 0.5 * sum * g.cell_volume();
}

void project_field(VelocityField& f, const Grid& g, double lid_speed) {
    apply_boundary(f, g, lid_speed);
    detail::PoissonSolver poisson(g);
    Field3 rhs(g.nx, g.ny, g.nz), psi(g.nx, g.ny, g.nz);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                rhs(i, j, k) = cell_divergence(f, g, i, j, k);
    poisson.solve(rhs, psi);
    fill_center_ghosts(psi, g.nx, g.ny, g.nz);
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                f.u(i, j, k) -= (psi(i, j, k) - psi(i - 1, j, k)) / g.hx;
                f.v(i, j, k) -= (psi(i, j, k) - psi(i, j - 1, k)) / g.hy;
            }
    for (int k = 1; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f.w(i, j, k) -= (psi(i, j, k) - psi(i, j, k - 1)) / g.hz;
    apply_boundary(f, g, lid_speed);
}

// ---------------------------------------------------------------------------
// checkpoints: little-endian binary, magic "SMDL"
// ---------------------------------------------------------------------------

namespace {

static_assert(std::endian::native == std::endian::little,
              "checkpoint format assumes a little-endian host");

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
void write_f64(std::ostream& out, double v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}
std::uint32_t read_u32(std::istream& in) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}
double read_f64(std::istream& in) {
    double v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

void write_array(std::ostream& out, const Field3& a, int nx, int ny, int nz) {
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) write_f64(out, a(i, j, k));
}

void read_array(std::istream& in, Field3& a, int nx, int ny, int nz) {
    for (int k = 0; k < nz; ++k)
        for (int j = 0; j < ny; ++j)
            for (int i = 0; i < nx; ++i) a(i, j, k) = read_f64(in);
}

constexpr std::uint32_t kCheckpointVersion = 1;

}  // namespace

void save_checkpoint(const std::filesystem::path& path, const VelocityField& f,
                     const DomainParams& dom, const Grid& g) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open checkpoint for writing: " + path.string());
    out.write("SMDL", 4);
    write_u32(out, kCheckpointVersion);
    write_u32(out, static_cast<std::uint32_t>(g.nx));
    write_u32(out, static_cast<std::uint32_t>(g.ny));
    write_u32(out, static_cast<std::uint32_t>(g.nz));
    write_f64(out, dom.box_length);
    write_f64(out, dom.lid_speed);
    write_f64(out, dom.viscosity);
    write_f64(out, dom.model_scale);
    write_f64(out, dom.c_s);
    write_f64(out, dom.kappa);
    write_f64(out, f.time);
    write_array(out, f.u, g.nx, g.ny, g.nz);
    write_array(out, f.v, g.nx, g.ny, g.nz);
    write_array(out, f.w, g.nx, g.ny, g.nz + 1);
    write_array(out, f.p, g.nx, g.ny, g.nz);
    if (!out) throw std::runtime_error("short write to checkpoint: " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path.string());
    char magic[4] = {};
    in.read(magic, 4);
    if (std::memcmp(magic, "SMDL", 4) != 0)
        throw std::runtime_error("bad checkpoint magic in " + path.string());
    const std::uint32_t version = read_u32(in);
    if (version != kCheckpointVersion)
        throw std::runtime_error("unsupported checkpoint version in " + path.string());
    const int nx = static_cast<int>(read_u32(in));
    const int ny = static_cast<int>(read_u32(in));
    const int nz = static_cast<int>(read_u32(in));
    const double L = read_f64(in);
    const double U = read_f64(in);
    const double nu = read_f64(in);
    const double delta = read_f64(in);
    const double c_s = read_f64(in);
    const double kappa = read_f64(in);
    const double time = read_f64(in);
    if (!in) throw std::runtime_error("truncated checkpoint header in " + path.string());

    Checkpoint cp{make_domain(L, U, nu, delta, c_s, kappa), Grid{}, VelocityField{}};
    cp.grid = make_grid(cp.domain, nx, ny, nz);
    cp.field = VelocityField(cp.grid);
    cp.field.time = time;
    read_array(in, cp.field.u, nx, ny, nz);
    read_array(in, cp.field.v, nx, ny, nz);
    read_array(in, cp.field.w, nx, ny, nz + 1);
    read_array(in, cp.field.p, nx, ny, nz);
    if (!in) throw std::runtime_error("truncated checkpoint data in " + path.string());
    apply_boundary(cp.field, cp.grid, cp.domain.lid_speed);
    return cp;
}

}  // namespace smd
