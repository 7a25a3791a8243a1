#include "smd/core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace smd {

DomainParams make_domain(double box_length, double lid_speed, double viscosity,
                         double model_scale, double c_s, double kappa) {
    auto require_positive = [](double x, const char* name) {
        if (!(x > 0.0) || !std::isfinite(x))
            throw std::invalid_argument(std::string("domain parameter ") + name +
                                        " must be positive and finite");
    };
    require_positive(box_length, "box_length");
    require_positive(lid_speed, "lid_speed");
    require_positive(viscosity, "viscosity");
    require_positive(model_scale, "model_scale");
    require_positive(c_s, "c_s");
    if (!(kappa > 0.0 && kappa <= 1.0))
        throw std::invalid_argument("kappa must lie in (0, 1]");
    if (!(model_scale < box_length))
        throw std::invalid_argument("model_scale must be smaller than box_length");

    DomainParams dom;
    dom.box_length = box_length;
    dom.lid_speed = lid_speed;
    dom.viscosity = viscosity;
    dom.model_scale = model_scale;
    dom.c_s = c_s;
    dom.kappa = kappa;
    dom.reynolds = lid_speed * box_length / viscosity;
    dom.strip_fraction = dom.gamma_re() / dom.reynolds;

    if (!(dom.gamma_re() < 0.2))
        throw std::invalid_argument("gamma * Re must stay below 1/5");
    if (!(dom.strip_fraction < 1.0))
        throw std::invalid_argument("strip fraction reaches the box size; Re too small for this kappa");
    return dom;
}

Grid make_grid(const DomainParams& dom, int nx, int ny, int nz) {
    if (nx < 4 || ny < 4 || nz < 4)
        throw std::invalid_argument("grid needs at least 4 cells per direction");
    Grid g;
    g.nx = nx;
    g.ny = ny;
    g.nz = nz;
    g.hx = dom.box_length / nx;
    g.hy = dom.box_length / ny;
    g.hz = dom.box_length / nz;
    g.strip_resolved = nz * dom.strip_fraction >= 2.0;
    return g;
}

void apply_boundary(VelocityField& f, const Grid& g, double lid_speed) {
    const int nx = g.nx, ny = g.ny, nz = g.nz;

    // wall-normal velocity pinned on both wall planes
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            f.w(i, j, 0) = 0.0;
            f.w(i, j, nz) = 0.0;
        }

    // z ghosts: tangential components by reflection about the wall value
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            f.u(i, j, -1) = -f.u(i, j, 0);
            f.u(i, j, nz) = 2.0 * lid_speed - f.u(i, j, nz - 1);
            f.v(i, j, -1) = -f.v(i, j, 0);
            f.v(i, j, nz) = -f.v(i, j, nz - 1);
            f.w(i, j, -1) = -f.w(i, j, 1);
            f.w(i, j, nz + 1) = -f.w(i, j, nz - 1);
            f.p(i, j, -1) = f.p(i, j, 0);
            f.p(i, j, nz) = f.p(i, j, nz - 1);
        }

    // periodic wrap, x then y (corner ghosts resolved by the y pass)
    auto wrap_x = [nx, ny](Field3& a, int klo, int khi) {
        for (int k = klo; k <= khi; ++k)
            for (int j = 0; j < ny; ++j) {
                a(-1, j, k) = a(nx - 1, j, k);
                a(nx, j, k) = a(0, j, k);
            }
    };
    auto wrap_y = [nx, ny](Field3& a, int klo, int khi) {
        for (int k = klo; k <= khi; ++k)
            for (int i = -1; i <= nx; ++i) {
                a(i, -1, k) = a(i, ny - 1, k);
                a(i, ny, k) = a(i, 0, k);
            }
    };
    wrap_x(f.u, -1, nz);
    wrap_x(f.v, -1, nz);
    wrap_x(f.w, -1, nz + 1);
    wrap_x(f.p, -1, nz);
    wrap_y(f.u, -1, nz);
    wrap_y(f.v, -1, nz);
    wrap_y(f.w, -1, nz + 1);
    wrap_y(f.p, -1, nz);
}

double cell_divergence(const VelocityField& f, const Grid& g, int i, int j, int k) {
    return (f.u(i + 1, j, k) - f.u(i, j, k)) / g.hx +
           (f.v(i, j + 1, k) - f.v(i, j, k)) / g.hy +
           (f.w(i, j, k + 1) - f.w(i, j, k)) / g.hz;
}

double max_divergence(const VelocityField& f, const Grid& g) {
    double m = 0.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                m = std::max(m, std::abs(cell_divergence(f, g, i, j, k)));
    return m;
}

VelocityField field_from_profile(const Grid& g, const std::function<double(double)>& u_of_z) {
    VelocityField f(g);
    for (int k = 0; k < g.nz; ++k) {
        const double uk = u_of_z(g.z_center(k));
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i)
                f.u(i, j, k) = uk;
    }
    return f;
}

}  // namespace smd
