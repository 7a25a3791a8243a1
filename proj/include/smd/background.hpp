#pragma once

#include <functional>

#include "smd/core.hpp"

namespace smd {

/// Near-lid region [L - gL, L] where the background flow lives.
struct StripRegion {
    double z_lo = 0.0;
    double z_hi = 0.0;
    double volume = 0.0;  // (z_hi - z_lo) * L^2

    double thickness() const { return z_hi - z_lo; }
};

StripRegion strip_region(const DomainParams& dom);

/// Divergence-free extension of the shear boundary data: (phi(z), 0, 0) with
/// phi zero below the strip and ramping linearly to the lid speed at z = L.
struct BackgroundFlow {
    DomainParams domain;
};

BackgroundFlow make_background(const DomainParams& dom);

double eval_phi(double z, const BackgroundFlow& bf);

/// Norms of the background flow: closed forms next to an independent route
/// (quadrature for the squared norms, dense sampling for the suprema).
struct NormsReport {
    double sup_phi = 0.0;
    double sup_phi_sampled = 0.0;
    double sup_grad_phi = 0.0;
    double sup_grad_phi_sampled = 0.0;
    double phi_sq = 0.0;            // closed form of the squared L2 norm
    double phi_sq_quad = 0.0;
    double grad_phi_sq = 0.0;
    double grad_phi_sq_quad = 0.0;
};

NormsReport phi_norms(const BackgroundFlow& bf);

/// Scalar test field on the strip, given analytically. Periodic in x and y
/// with the box period; must vanish on the lid plane z = z_hi.
using ScalarField = std::function<double(double x, double y, double z)>;

struct StripSampling {
    int nx = 16;
    int ny = 16;
    int nz = 64;
};

/// Discrete ||v|| / ||grad v|| over the strip for a field vanishing at the
/// lid. Throws if the lid trace is not zero or the gradient vanishes.
double poincare_ratio(const ScalarField& v, const DomainParams& dom,
                      const StripRegion& strip, StripSampling s = {});

/// Discrete ||v/(L-z)||_p / ||dv/dz||_p over the strip; p > 1. The quotient
/// at the lid itself is taken as the one-sided difference quotient.
double hardy_ratio(const ScalarField& v, double p, const DomainParams& dom,
                   const StripRegion& strip, StripSampling s = {});

}  // namespace smd
