#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "smd/core.hpp"

namespace smd {

enum class ProfileKind {
    constant_one,      // no damping, plain Smagorinsky
    van_driest_exact,  // 1 - exp(-z+/A+) with the equilibrium wall-stress estimate
    algebraic,         // (Re (1 - z/L))^alpha cutoff profile, both walls
    hermite,           // algebraic contact blended to an interior plateau of 1
    tabulated,         // piecewise-linear user table
};

const char* to_string(ProfileKind kind);

/// Cubic blend coefficients of the hermite profile. a1,b1,c1,d1 belong to
/// the lower blend [gL, 2gL]; a2,b2 to the upper blend [L-2gL, L-gL].
struct HermiteCoefficients {
    double a1 = 0.0, b1 = 0.0, c1 = 0.0, d1 = 0.0;
    double a2 = 0.0, b2 = 0.0;
};

/// Coefficients computed two independent ways. The solved values come from
/// the 4x4 linear system of value/slope matching at the blend junctions and
/// are the ones used for evaluation; the closed-form expressions are kept as
/// a cross-check.
struct HermiteDerivation {
    HermiteCoefficients closed_form;
    HermiteCoefficients solved;
    double max_rel_difference = 0.0;
};

/// Wall-unit scales under the statistical-equilibrium shear estimate
/// u_tau = U / 2^(1/4); distances are measured from the moving lid.
struct WallScales {
    double u_tau = 0.0;
    double a_plus = 26.0;
    double eps_wall = 0.0;  // near-wall mean dissipation estimate U^4 / (2 nu)
    double lid_z = 0.0;     // z of the moving wall
    double viscosity = 0.0;

    double z_plus(double z) const { return u_tau * (lid_z - z) / viscosity; }
};

WallScales wall_scales(const DomainParams& dom);

struct DampingProfile {
    ProfileKind kind = ProfileKind::constant_one;
    int alpha = 2;                                   // contact order (algebraic, hermite)
    HermiteCoefficients coeffs;                      // hermite only
    std::vector<std::pair<double, double>> table;    // tabulated only, (z, beta)
};

DampingProfile constant_profile();
DampingProfile van_driest_profile();
DampingProfile algebraic_profile(int alpha);
DampingProfile hermite_profile(const DomainParams& dom, int alpha);
DampingProfile tabulated_profile(std::vector<std::pair<double, double>> samples,
                                 const DomainParams& dom);
DampingProfile load_tabulated(const std::filesystem::path& path, const DomainParams& dom);

/// Damping factor at height z in [0, L].
double eval_beta(const DampingProfile& profile, double z, const DomainParams& dom);

/// One-sided derivative d beta / dz, approaching z from below (side < 0)
/// or above (side > 0). Used for the C1 junction checks.
double eval_beta_derivative(const DampingProfile& profile, double z,
                            const DomainParams& dom, int side);

/// Blend coefficients both ways with their discrepancy.
HermiteDerivation hermite_coefficients(const DomainParams& dom, int alpha);

/// Exact van Driest factor 1 - exp(-z+/26) at height z.
double van_driest_exact(double z, const DomainParams& dom);

/// Truncated series expansion of the van Driest factor near the lid, valid
/// where Re (1 - z/L) < 1; k terms of the expansion of 1 - exp(-y).
double taylor_approx_f_w(double z, const DomainParams& dom, int k);

struct StripIntegral {
    double closed_form = 0.0;
    double quadrature = 0.0;
    double difference = 0.0;
};

/// Integral of beta over the near-lid strip [L - gL, L], computed in closed
/// form and by adaptive quadrature.
StripIntegral strip_integral(const DampingProfile& profile, const DomainParams& dom);

/// Quadrature of beta over an arbitrary [a, b] inside [0, L].
double integrate_beta(const DampingProfile& profile, const DomainParams& dom,
                      double a, double b, double tol = 1e-12);

/// Positive-term envelope constant of the hermite strip integral: the strip
/// integral is bounded by envelope_constant(alpha) * L * gamma^(alpha+1).
double hermite_envelope_constant(int alpha);

}  // namespace smd
