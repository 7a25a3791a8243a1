#include "smd/bounds.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace smd {

namespace {

struct TracedConstants {
    double m;   // positive prefactor of the dissipation term
    double c1;
    double c2;
};

// Constant trace of the energy estimate with gamma tied to kappa/(5.1 Re):
//   m <eps> <= (19/6) U^3/L + (nu / 2 gamma) U^2/L^2 + (1/3) model integral
// which, divided through by m and written in U^3/L units, gives
//   c1 = (19/6 + 1/(2 gamma Re)) / m,  c2 = 1 / (3 m (gamma Re)^3).
TracedConstants trace_constants(const DomainParams& dom) {
    const double g_re = dom.gamma_re();
    const double m = std::min(0.5 - 2.5 * g_re, 1.0 / 3.0);
    if (!(m > 0.0))
        throw std::invalid_argument(
            "gamma * Re must stay below 1/5 so the traced prefactor is positive");
    TracedConstants t;
    t.m = m;
    t.c1 = (19.0 / 6.0 + 0.5 / g_re) / m;
    t.c2 = 1.0 / (3.0 * m * g_re * g_re * g_re);
    return t;
}

double profile_scaling_exponent(const DampingProfile& p) {
    switch (p.kind) {
        case ProfileKind::constant_one: return 2.0;
        case ProfileKind::algebraic: return 2.0;
        case ProfileKind::hermite:
            if (p.alpha == 0) return 2.0;
            return p.alpha == 1 ? 1.0 : 0.0;
        default: return std::nan("");
    }
}

std::string describe(const BoundReport& r, const DomainParams& dom) {
    char buf[1024];
    const double u3_l = std::pow(dom.lid_speed, 3) / dom.box_length;
    std::snprintf(buf, sizeof buf,
                  "kind = %s (alpha = %d)\n"
                  "gamma = %.17g, gamma*Re = %.17g\n"
                  "prefactor m = min{1/2 - (5/2) gamma Re, 1/3} = %.17g\n"
                  "c1 = (19/6 + 1/(2 gamma Re)) / m = %.17g\n"
                  "c2 = 1 / (3 m (gamma Re)^3) = %.17g\n"
                  "strip integral of beta = %.17g\n"
                  "model term = c2 (c_s delta / L)^2 Re^3 (strip integral / L) = %.17g [U^3/L]\n"
                  "bound = (c1 + model term) U^3/L = %.17g (U^3/L = %.17g)\n",
                  to_string(r.kind), r.alpha, dom.strip_fraction, dom.gamma_re(), r.prefactor_m,
                  r.c1, r.c2, r.strip_integral_value, r.model_term, r.bound_value, u3_l);
    return buf;
}

BoundReport assemble(const DomainParams& dom, BoundKind kind, int alpha,
                     double strip_value, double model_term, double exponent) {
    const TracedConstants t = trace_constants(dom);
    BoundReport r;
    r.kind = kind;
    r.alpha = alpha;
    r.prefactor_m = t.m;
    r.c1 = t.c1;
    r.c2 = t.c2;
    r.strip_integral_value = strip_value;
    r.model_term = model_term;
    r.scaling_exponent = exponent;
    r.bound_value = (t.c1 + model_term) * std::pow(dom.lid_speed, 3) / dom.box_length;
    r.derivation = describe(r, dom);
    return r;
}

}  // namespace

const char* to_string(BoundKind kind) {
    switch (kind) {
        case BoundKind::general: return "general";
        case BoundKind::algebraic: return "algebraic";
        case BoundKind::hermite: return "hermite";
        case BoundKind::hermite_linear: return "hermite-linear";
        case BoundKind::rate_boundary_layer: return "rate-boundary-layer";
        case BoundKind::rate_interior: return "rate-interior";
    }
    return "unknown";
}

BoundReport dissipation_bound(const DomainParams& dom, const DampingProfile& profile) {
    const TracedConstants t = trace_constants(dom);
    const double strip = strip_integral(profile, dom).closed_form;
    const double cs_delta_rel = dom.cs_delta() / dom.box_length;
    const double model = t.c2 * cs_delta_rel * cs_delta_rel *
                         std::pow(dom.reynolds, 3) * strip / dom.box_length;
    return assemble(dom, BoundKind::general, profile.alpha, strip, model,
                    profile_scaling_exponent(profile));
}

BoundReport closed_form_bound(const DomainParams& dom, BoundKind kind, int alpha) {
    const TracedConstants t = trace_constants(dom);
    const double g = dom.strip_fraction;
    const double g_re = dom.gamma_re();
    const double L = dom.box_length;
    const double cs2 = dom.cs_delta() / L * (dom.cs_delta() / L);
    const double re = dom.reynolds;

    switch (kind) {
        case BoundKind::algebraic: {
            if (alpha < 0) throw std::invalid_argument("alpha must be >= 0");
            const double strip = L * g * std::pow(g_re, alpha) / (alpha + 1);
            const double model =
                t.c2 * cs2 * re * re * std::pow(g_re, alpha + 1) / (alpha + 1);
            return assemble(dom, kind, alpha, strip, model, 2.0);
        }
        case BoundKind::hermite: {
            if (alpha < 2)
                throw std::invalid_argument(
                    "the Re-independent hermite bound needs contact order alpha >= 2");
            const double c_alpha = hermite_envelope_constant(alpha);
            const double strip = c_alpha * L * std::pow(g, alpha + 1);
            const double model = t.c2 * c_alpha * g_re * g_re * g_re * cs2;
            return assemble(dom, kind, alpha, strip, model, 0.0);
        }
        case BoundKind::hermite_linear: {
            if (alpha != 1)
                throw std::invalid_argument("the linear-contact hermite bound pins alpha = 1");
            const double c_alpha = hermite_envelope_constant(1);  // = 1/2
            const double strip = c_alpha * L * g * g;
            const double model = t.c2 * c_alpha * g_re * g_re * cs2 * re;
            return assemble(dom, kind, alpha, strip, model, 1.0);
        }
        default:
            throw std::invalid_argument("closed_form_bound expects a closed-form bound kind");
    }
}

ReferenceRates reference_rates(const DomainParams& dom) {
    const double u3_l = std::pow(dom.lid_speed, 3) / dom.box_length;
    const double d_rel = dom.model_scale / dom.box_length;
    const double re1 = 1.0 + dom.reynolds;

    ReferenceRates rates;

    BoundReport& bl = rates.boundary_layer;
    bl.kind = BoundKind::rate_boundary_layer;
    bl.c1 = 1.0;
    bl.model_term = dom.c_s * dom.c_s * d_rel * d_rel * re1 * re1;
    bl.bound_value = (bl.c1 + bl.model_term) * u3_l;
    bl.scaling_exponent = 2.0;
    bl.derivation = "reference rate with boundary layers: [1 + c_s^2 (delta/L)^2 (1+Re)^2] U^3/L";

    BoundReport& in = rates.interior;
    in.kind = BoundKind::rate_interior;
    in.c1 = 1.0;
    in.model_term = 0.0;
    in.bound_value = u3_l;
    in.scaling_exponent = 0.0;
    in.derivation = "reference rate without boundary layers: U^3/L";

    return rates;
}

double fit_loglog_slope(const std::vector<double>& re, const std::vector<double>& value) {
    if (re.size() != value.size() || re.size() < 2)
        throw std::invalid_argument("slope fit needs matching lists of at least two points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(re.size());
    for (std::size_t i = 0; i < re.size(); ++i) {
        if (!(re[i] > 0.0) || !(value[i] > 0.0))
            throw std::invalid_argument("slope fit needs positive data");
        const double x = std::log(re[i]);
        const double y = std::log(value[i]);
        sx += x; sy += y; sxx += x * x; sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw std::invalid_argument("slope fit needs distinct Re values");
    return (n * sxy - sx * sy) / denom;
}

}  // namespace smd
