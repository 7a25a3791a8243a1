#include "smd/background.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "smd/quadrature.hpp"

namespace smd {

StripRegion strip_region(const DomainParams& dom) {
    StripRegion s;
    s.z_hi = dom.box_length;
    s.z_lo = dom.box_length - dom.strip_height();
    s.volume = s.thickness() * dom.box_length * dom.box_length;
    return s;
}

BackgroundFlow make_background(const DomainParams& dom) { return BackgroundFlow{dom}; }

double eval_phi(double z, const BackgroundFlow& bf) {
    const DomainParams& dom = bf.domain;
    if (!(z >= 0.0 && z <= dom.box_length))
        throw std::domain_error("height z outside [0, L]");
    const double foot = dom.box_length - dom.strip_height();
    if (z <= foot) return 0.0;
    return dom.lid_speed * (z - foot) / dom.strip_height();
}

NormsReport phi_norms(const BackgroundFlow& bf) {
    const DomainParams& dom = bf.domain;
    const double U = dom.lid_speed;
    const double L = dom.box_length;
    const double g = dom.strip_fraction;
    const double gl = dom.strip_height();
    const StripRegion strip = strip_region(dom);

    NormsReport r;
    r.sup_phi = U;
    r.sup_grad_phi = U / gl;
    // the ramp integrates exactly: L^2 int phi^2 = U^2 g L^3 / 3, and the
    // constant slope gives L^2 int (phi')^2 = U^2 L / g
    r.phi_sq = U * U * g * L * L * L / 3.0;
    r.grad_phi_sq = U * U * L / g;

    const double area = L * L;
    r.phi_sq_quad = area * integrate([&](double z) {
        const double p = eval_phi(z, bf);
        return p * p;
    }, strip.z_lo, strip.z_hi, 1e-13);
    const double slope = U / gl;
    r.grad_phi_sq_quad = area * integrate([&](double) { return slope * slope; },
                                          strip.z_lo, strip.z_hi, 1e-13);

    // independent suprema from dense samples and their difference quotients
    const int n = 4096;
    double prev = eval_phi(strip.z_lo, bf);
    for (int i = 1; i <= n; ++i) {
        const double z = std::min(strip.z_lo + strip.thickness() * i / n, strip.z_hi);
        const double val = eval_phi(z, bf);
        r.sup_phi_sampled = std::max(r.sup_phi_sampled, std::abs(val));
        r.sup_grad_phi_sampled = std::max(
            r.sup_grad_phi_sampled, std::abs(val - prev) / (strip.thickness() / n));
        prev = val;
    }
    return r;
}

namespace {

struct StripGrid {
    int nx, ny, nz;
    double hx, hy, hz;
    double x(int i) const { return (i + 0.5) * hx; }
    double y(int j) const { return (j + 0.5) * hy; }
    double z(const StripRegion& s, int k) const { return s.z_lo + (k + 0.5) * hz; }
    double cell_volume() const { return hx * hy * hz; }
};

StripGrid make_strip_grid(const DomainParams& dom, const StripRegion& strip,
                          const StripSampling& s) {
    if (s.nx < 2 || s.ny < 2 || s.nz < 4)
        throw std::invalid_argument("strip sampling too coarse");
    StripGrid g;
    g.nx = s.nx;
    g.ny = s.ny;
    g.nz = s.nz;
    g.hx = dom.box_length / s.nx;
    g.hy = dom.box_length / s.ny;
    g.hz = strip.thickness() / s.nz;
    return g;
}

void check_lid_trace(const ScalarField& v, const StripRegion& strip,
                     const StripGrid& g, double scale) {
    for (int j = 0; j < g.ny; j += 3)
        for (int i = 0; i < g.nx; i += 3)
            if (std::abs(v(g.x(i), g.y(j), strip.z_hi)) > 1e-10 * std::max(scale, 1e-30))
                throw std::invalid_argument("test field does not vanish on the lid plane");
}

}  // namespace

double poincare_ratio(const ScalarField& v, const DomainParams& dom,
                      const StripRegion& strip, StripSampling s) {
    const StripGrid g = make_strip_grid(dom, strip, s);

    double sum_v2 = 0.0, sum_g2 = 0.0, sup = 0.0;
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i), y = g.y(j), z = g.z(strip, k);
                const double val = v(x, y, z);
                sup = std::max(sup, std::abs(val));
                sum_v2 += val * val;
                const double dx = (v(x + g.hx, y, z) - v(x - g.hx, y, z)) / (2.0 * g.hx);
                const double dy = (v(x, y + g.hy, z) - v(x, y - g.hy, z)) / (2.0 * g.hy);
                const double dz = (v(x, y, z + g.hz) - v(x, y, z - g.hz)) / (2.0 * g.hz);
                sum_g2 += dx * dx + dy * dy + dz * dz;
            }
    check_lid_trace(v, strip, g, sup);
    if (!(sum_g2 > 0.0) || sum_g2 < 1e-28 * sum_v2 + 1e-300)
        throw std::runtime_error("gradient vanishes on the strip: ratio undefined");
    return std::sqrt(sum_v2 / sum_g2);
}

double hardy_ratio(const ScalarField& v, double p, const DomainParams& dom,
                   const StripRegion& strip, StripSampling s) {
    if (!(p > 1.0))
        throw std::invalid_argument("exponent p must exceed 1");
    const StripGrid g = make_strip_grid(dom, strip, s);
    const double L = dom.box_length;

    double sum_q = 0.0, sum_d = 0.0, sup = 0.0;
    const double eps = 1e-7 * strip.thickness();
    for (int k = 0; k < g.nz; ++k)
        for (int j = 0; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) {
                const double x = g.x(i), y = g.y(j), z = g.z(strip, k);
                const double val = v(x, y, z);
                sup = std::max(sup, std::abs(val));
                double quotient;
                if (L - z > eps) {
                    quotient = val / (L - z);
                } else {
                    // one-sided difference quotient against the lid value
                    quotient = (v(x, y, L - eps) - v(x, y, L)) / eps;
                }
                const double dz = (v(x, y, z + g.hz) - v(x, y, z - g.hz)) / (2.0 * g.hz);
                sum_q += std::pow(std::abs(quotient), p);
                sum_d += std::pow(std::abs(dz), p);
            }
    check_lid_trace(v, strip, g, sup);
    if (!(sum_d > 0.0))
        throw std::runtime_error("z-derivative vanishes on the strip: ratio undefined");
    return std::pow(sum_q / sum_d, 1.0 / p);
}

}  // namespace smd
