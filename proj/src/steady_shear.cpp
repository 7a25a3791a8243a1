#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "smd/solver.hpp"

namespace smd {

namespace {

// grid of quadrature nodes for the profile: uniform nodes plus the
// breakpoints of the damping profile, so every interval is smooth
std::vector<double> oracle_nodes(const DampingProfile& profile, const DomainParams& dom,
                                 int n_nodes) {
    const double L = dom.box_length;
    std::vector<double> nodes;
    nodes.reserve(n_nodes + 8);
    for (int i = 0; i <= n_nodes; ++i) nodes.push_back(L * i / n_nodes);
    const double gl = dom.strip_height();
    std::vector<double> breaks;
    switch (profile.kind) {
        case ProfileKind::algebraic: breaks = {gl, L - gl}; break;
        case ProfileKind::hermite: breaks = {gl, 2 * gl, L - 2 * gl, L - gl}; break;
        case ProfileKind::tabulated:
            for (const auto& s : profile.table) breaks.push_back(s.first);
            break;
        default: break;
    }
    for (double b : breaks)
        if (b > 0.0 && b < L) nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
    return nodes;
}

// u' solving (nu + beta (c_s d)^2 u') u' = tau for u' >= 0, written to avoid
// cancellation when the model coefficient is small
double slope_from_stress(double tau, double beta_csd2, double nu) {
    if (beta_csd2 <= 0.0) return tau / nu;
    return 2.0 * tau / (nu + std::sqrt(nu * nu + 4.0 * beta_csd2 * tau));
}

}  // namespace

SteadyShearProfile steady_shear_profile(const DampingProfile& profile,
                                        const DomainParams& dom, int n_nodes) {
    if (n_nodes < 64)
        throw std::invalid_argument("steady shear oracle needs at least 64 nodes");

    SteadyShearProfile out;
    out.profile = profile;
    out.domain = dom;
    out.z_nodes = oracle_nodes(profile, dom, n_nodes);

    const double csd2 = dom.cs_delta() * dom.cs_delta();
    const double nu = dom.viscosity;
    const double U = dom.lid_speed;
    const std::size_t n = out.z_nodes.size();

    // beta cached at nodes and interval midpoints (z never changes with tau)
    std::vector<double> beta_node(n), beta_mid(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        beta_node[i] = eval_beta(profile, out.z_nodes[i], dom);
    for (std::size_t i = 0; i + 1 < n; ++i)
        beta_mid[i] = eval_beta(profile, 0.5 * (out.z_nodes[i] + out.z_nodes[i + 1]), dom);

    // lid velocity reached by integrating the slope for a candidate stress
    auto span = [&](double tau) {
        double total = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            const double h = out.z_nodes[i + 1] - out.z_nodes[i];
            const double fa = slope_from_stress(tau, beta_node[i] * csd2, nu);
            const double fm = slope_from_stress(tau, beta_mid[i] * csd2, nu);
            const double fb = slope_from_stress(tau, beta_node[i + 1] * csd2, nu);
            total += h / 6.0 * (fa + 4.0 * fm + fb);
        }
        return total;
    };

    // bracket then bisect on the (monotone) stress -> lid-speed map
    double lo = 0.0;
    double hi = nu * U / dom.box_length;
    int doubling = 0;
    while (span(hi) < U) {
        hi *= 2.0;
        if (++doubling > 200)
            throw std::runtime_error("stress bracket failure in the steady shear oracle");
    }
    const double tol = 1e-12 * U;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double u_mid = span(mid);
        if (std::abs(u_mid - U) <= tol) { lo = hi = mid; break; }
        (u_mid < U ? lo : hi) = mid;
    }
    out.tau = 0.5 * (lo + hi);
    if (std::abs(span(out.tau) - U) > 10.0 * tol)
        throw std::runtime_error("bisection failed to pin the lid speed in the oracle");

    // cumulative profile and the pointwise stress defect
    out.u_of_z.assign(n, 0.0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double h = out.z_nodes[i + 1] - out.z_nodes[i];
        const double fa = slope_from_stress(out.tau, beta_node[i] * csd2, nu);
        const double fm = slope_from_stress(out.tau, beta_mid[i] * csd2, nu);
        const double fb = slope_from_stress(out.tau, beta_node[i + 1] * csd2, nu);
        out.u_of_z[i + 1] = out.u_of_z[i] + h / 6.0 * (fa + 4.0 * fm + fb);
    }
    out.residual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double up = slope_from_stress(out.tau, beta_node[i] * csd2, nu);
        const double defect = (nu + beta_node[i] * csd2 * std::abs(up)) * up - out.tau;
        out.residual = std::max(out.residual, std::abs(defect));
    }
    return out;
}

double SteadyShearProfile::evaluate(double z) const {
    if (!(z >= 0.0 && z <= domain.box_length))
        throw std::domain_error("height z outside [0, L]");
    const auto it = std::upper_bound(z_nodes.begin(), z_nodes.end(), z);
    const std::size_t hi = std::min<std::size_t>(it - z_nodes.begin(), z_nodes.size() - 1);
    const std::size_t lo = hi - (hi > 0 ? 1 : 0);
    if (hi == lo) return u_of_z[lo];

    const double csd2 = domain.cs_delta() * domain.cs_delta();
    const double nu = domain.viscosity;
    auto slope = [&](double zz) {
        return slope_from_stress(tau, eval_beta(profile, zz, domain) * csd2, nu);
    };
    // short Simpson panel from the node below z
    const double a = z_nodes[lo];
    const double h = z - a;
    if (h == 0.0) return u_of_z[lo];
    return u_of_z[lo] + h / 6.0 * (slope(a) + 4.0 * slope(a + 0.5 * h) + slope(z));
}

double SteadyShearProfile::dissipation() const {
    const double csd2 = domain.cs_delta() * domain.cs_delta();
    const double nu = domain.viscosity;
    auto density = [&](double z) {
        const double up = slope_from_stress(tau, eval_beta(profile, z, domain) * csd2, nu);
        return nu * up * up + csd2 * eval_beta(profile, z, domain) * up * up * up;
    };
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < z_nodes.size(); ++i) {
        const double a = z_nodes[i], b = z_nodes[i + 1];
        const double m = 0.5 * (a + b);
        total += (b - a) / 6.0 * (density(a) + 4.0 * density(m) + density(b));
    }
    return total / domain.box_length;
}

}  // namespace smd
