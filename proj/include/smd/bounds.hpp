#pragma once

#include <string>

#include "smd/core.hpp"
#include "smd/damping.hpp"

namespace smd {

enum class BoundKind {
    general,           // any damping profile, via its strip integral
    algebraic,         // algebraic cutoff profile: model term grows like Re^2
    hermite,           // hermite profile, contact order >= 2: Re-independent
    hermite_linear,    // hermite profile, contact order 1: model term ~ Re
    rate_boundary_layer,  // undamped reference rate with boundary layers
    rate_interior,        // reference rate without boundary layers
};

const char* to_string(BoundKind kind);

/// Evaluated upper bound on the long-time mean dissipation, with the
/// explicit constants obtained by tracing the energy estimate.
struct BoundReport {
    BoundKind kind = BoundKind::general;
    int alpha = 0;
    double prefactor_m = 0.0;          // min{1/2 - (5/2) gamma Re, 1/3}
    double c1 = 0.0;                   // viscous/advective constant
    double c2 = 0.0;                   // model-term constant
    double strip_integral_value = 0.0; // integral of beta over the lid strip
    double model_term = 0.0;           // model contribution, in U^3/L units
    double bound_value = 0.0;          // full bound, absolute units
    double scaling_exponent = 0.0;     // Re power of the model term
    std::string derivation;            // human-readable constant trace
};

/// Bound for an arbitrary damping profile. Requires gamma*Re < 1/5 so the
/// traced prefactor stays positive.
BoundReport dissipation_bound(const DomainParams& dom, const DampingProfile& profile);

/// Closed-form specializations. `kind` must be one of algebraic, hermite,
/// hermite_linear; hermite requires alpha >= 2 and hermite_linear pins
/// alpha = 1.
BoundReport closed_form_bound(const DomainParams& dom, BoundKind kind, int alpha);

struct ReferenceRates {
    BoundReport boundary_layer;  // [1 + c_s^2 (d/L)^2 (1+Re)^2] U^3/L
    BoundReport interior;        // U^3/L
};

ReferenceRates reference_rates(const DomainParams& dom);

/// Least-squares slope of log(model term) against log(Re); used by the
/// scaling checks and the sweep driver.
double fit_loglog_slope(const std::vector<double>& re, const std::vector<double>& value);

}  // namespace smd
