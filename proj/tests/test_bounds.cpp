#include <doctest.h>

#include <stdexcept>

#include <cmath>

#include "smd/bounds.hpp"

using namespace smd;

namespace {

DomainParams domain_re(double re, double delta = 0.5, double c_s = 0.2) {
    return make_domain(1.0, 1.0, 1.0 / re, delta, c_s);
}

}  // namespace

TEST_CASE("traced constants at kappa = 1") {
    const DomainParams dom = domain_re(100.0);
    const DampingProfile off = tabulated_profile({{0.0, 0.0}, {1.0, 0.0}}, dom);
    const BoundReport r = dissipation_bound(dom, off);
    CHECK(r.prefactor_m == doctest::Approx(1.0 / 102.0).epsilon(1e-12));
    CHECK(r.c1 == doctest::Approx(583.1).epsilon(1e-12));
    CHECK(r.c2 == doctest::Approx(4510.134).epsilon(1e-12));
    CHECK(r.model_term == 0.0);
    CHECK(r.bound_value == doctest::Approx(583.1).epsilon(1e-12));
    CHECK(r.derivation.find("583.1") != std::string::npos);
}

TEST_CASE("general bound with the undamped profile") {
    const DomainParams dom = domain_re(100.0);
    const BoundReport r = dissipation_bound(dom, constant_profile());
    // strip integral gamma L: model term reduces to c2 (c_s d/L)^2 Re^2 / 5.1
    const double expected = r.c2 * 0.01 * 100.0 * 100.0 / 5.1;
    CHECK(r.model_term == doctest::Approx(expected).epsilon(1e-12));
    CHECK(r.scaling_exponent == 2.0);
    CHECK(r.bound_value >= r.c1);  // model term is nonnegative
}

TEST_CASE("bound scales as the cube of the lid speed at fixed Re") {
    const DomainParams slow = make_domain(1.0, 1.0, 0.01, 0.5, 0.2);
    const DomainParams fast = make_domain(1.0, 2.0, 0.02, 0.5, 0.2);
    REQUIRE(slow.reynolds == doctest::Approx(fast.reynolds).epsilon(1e-15));
    const BoundReport a = dissipation_bound(slow, constant_profile());
    const BoundReport b = dissipation_bound(fast, constant_profile());
    CHECK(b.bound_value == doctest::Approx(8.0 * a.bound_value).epsilon(1e-13));
}

TEST_CASE("closed-form bound for the algebraic profile") {
    const DomainParams dom = domain_re(100.0);  // c_s delta / L = 0.1
    const BoundReport r = closed_form_bound(dom, BoundKind::algebraic, 2);
    const double expected_model = r.c2 * 0.01 * 100.0 * 100.0 * std::pow(1.0 / 5.1, 3) / 3.0;
    CHECK(r.model_term == doctest::Approx(expected_model).epsilon(1e-12));
    CHECK(r.model_term == doctest::Approx(1133.3).epsilon(1e-4));
    CHECK(r.bound_value == doctest::Approx(1716.4).epsilon(1e-4));
    CHECK(r.scaling_exponent == 2.0);

    // matches the general bound evaluated on the actual profile
    const BoundReport general = dissipation_bound(dom, algebraic_profile(2));
    CHECK(r.bound_value == doctest::Approx(general.bound_value).epsilon(1e-10));
}

TEST_CASE("closed-form bound for the hermite profile") {
    const DomainParams dom = domain_re(100.0);

    SUBCASE("contact order two and above: Re-independent") {
        for (int alpha : {2, 3, 4}) {
            const BoundReport r = closed_form_bound(dom, BoundKind::hermite, alpha);
            CHECK(r.scaling_exponent == 0.0);
            const double expected = r.c2 * hermite_envelope_constant(alpha) *
                                    std::pow(1.0 / 5.1, 3) * 0.01;
            CHECK(r.model_term == doctest::Approx(expected).epsilon(1e-12));
            // envelope dominates the exact strip integral
            const BoundReport general = dissipation_bound(dom, hermite_profile(dom, alpha));
            CHECK(r.model_term >= general.model_term);
            // and by exactly the envelope factor: the positive-term strip
            // ratio together with gamma^(alpha-2) bounded by one
            const double strip_ratio = r.strip_integral_value / general.strip_integral_value;
            const double envelope_factor =
                strip_ratio / std::pow(dom.strip_fraction, alpha - 2);
            CHECK(r.model_term ==
                  doctest::Approx(general.model_term * envelope_factor).epsilon(1e-10));
        }
        CHECK_THROWS_AS(closed_form_bound(dom, BoundKind::hermite, 1), std::invalid_argument);
    }

    SUBCASE("contact order one: linear in Re") {
        const BoundReport r = closed_form_bound(dom, BoundKind::hermite_linear, 1);
        CHECK(r.scaling_exponent == 1.0);
        const double expected = r.c2 * 0.5 * std::pow(1.0 / 5.1, 2) * 0.01 * dom.reynolds;
        CHECK(r.model_term == doctest::Approx(expected).epsilon(1e-12));
        CHECK_THROWS_AS(closed_form_bound(dom, BoundKind::hermite_linear, 2),
                        std::invalid_argument);
    }

    SUBCASE("only closed-form kinds are accepted") {
        CHECK_THROWS_AS(closed_form_bound(dom, BoundKind::general, 2), std::invalid_argument);
        CHECK_THROWS_AS(closed_form_bound(dom, BoundKind::rate_interior, 2),
                        std::invalid_argument);
    }
}

TEST_CASE("reference rates") {
    const DomainParams dom = domain_re(100.0, 0.5, 0.2);
    const ReferenceRates r = reference_rates(dom);
    CHECK(r.interior.bound_value == doctest::Approx(1.0).epsilon(1e-15));
    const double expected = 1.0 + 0.04 * 0.25 * 101.0 * 101.0;
    CHECK(r.boundary_layer.bound_value == doctest::Approx(expected).epsilon(1e-13));

    // near-zero Re limit: 1 + c_s^2 (delta/L)^2
    const DomainParams slow = make_domain(1.0, 1.0, 2.0, 0.5, 0.2);
    const ReferenceRates rs = reference_rates(slow);
    const double re = slow.reynolds;
    CHECK(rs.boundary_layer.bound_value ==
          doctest::Approx(1.0 + 0.04 * 0.25 * (1.0 + re) * (1.0 + re)).epsilon(1e-13));

    // vanishing model scale recovers the bare rate
    const DomainParams tiny_delta = make_domain(1.0, 1.0, 0.01, 1e-12, 0.2);
    CHECK(reference_rates(tiny_delta).boundary_layer.bound_value ==
          doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("monotonicity of the general bound") {
    const DomainParams base = domain_re(100.0, 0.5, 0.2);

    // increasing the strip integral increases the bound
    const DampingProfile low = tabulated_profile({{0.0, 0.2}, {1.0, 0.2}}, base);
    const DampingProfile high = tabulated_profile({{0.0, 0.9}, {1.0, 0.9}}, base);
    CHECK(dissipation_bound(base, low).bound_value < dissipation_bound(base, high).bound_value);

    // increasing delta or c_s increases the bound
    for (double scale : {1.5, 2.0, 3.0}) {
        const DomainParams wider = make_domain(1.0, 1.0, 0.01, 0.5 * scale / 3.0, 0.2);
        const DomainParams base_d = make_domain(1.0, 1.0, 0.01, 0.5 / 3.0, 0.2);
        CHECK(dissipation_bound(wider, constant_profile()).bound_value >
              dissipation_bound(base_d, constant_profile()).bound_value);
        const DomainParams sharper = make_domain(1.0, 1.0, 0.01, 0.5, 0.2 * scale);
        CHECK(dissipation_bound(sharper, constant_profile()).bound_value >
              dissipation_bound(base, constant_profile()).bound_value);
    }
}

TEST_CASE("scaling slopes over three decades of Re") {
    const std::vector<double> res = {1e2, 1e3, 1e4};
    auto slope_for = [&](BoundKind kind, int alpha) {
        std::vector<double> re, val;
        for (double r : res) {
            const DomainParams dom = domain_re(r, 0.1, 0.1);
            re.push_back(r);
            val.push_back(closed_form_bound(dom, kind, alpha).model_term);
        }
        return fit_loglog_slope(re, val);
    };
    CHECK(std::abs(slope_for(BoundKind::algebraic, 2) - 2.0) <= 0.01);
    CHECK(std::abs(slope_for(BoundKind::hermite, 2) - 0.0) <= 0.01);
    CHECK(std::abs(slope_for(BoundKind::hermite, 3) - 0.0) <= 0.01);
    CHECK(std::abs(slope_for(BoundKind::hermite_linear, 1) - 1.0) <= 0.01);
}

TEST_CASE("vanishing model scale recovers the viscosity-free rate") {
    for (double delta : {1e-3, 1e-6, 1e-9}) {
        const DomainParams dom = make_domain(1.0, 1.0, 0.01, delta, 0.1);
        const BoundReport r = dissipation_bound(dom, hermite_profile(dom, 2));
        CHECK(r.bound_value == doctest::Approx(r.c1).epsilon(1e-9));
    }
}

TEST_CASE("prefactor positivity precondition") {
    // only reachable with hand-assembled parameters; make_domain caps kappa
    DomainParams bad = domain_re(100.0);
    bad.kappa = 1.05;  // gamma Re = 0.2058 > 1/5
    CHECK_THROWS_AS(dissipation_bound(bad, constant_profile()), std::invalid_argument);
    CHECK_THROWS_WITH_AS(dissipation_bound(bad, constant_profile()),
                         doctest::Contains("positive"), std::invalid_argument);
}

TEST_CASE("smaller kappa keeps the full prefactor") {
    // below kappa = 0.34 the 1/3 branch of the prefactor takes over
    DomainParams dom = make_domain(1.0, 1.0, 0.01, 0.5, 0.2, 0.2);
    const BoundReport r = dissipation_bound(dom, constant_profile());
    CHECK(r.prefactor_m == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
    DomainParams mid = make_domain(1.0, 1.0, 0.01, 0.5, 0.2, 0.7);
    const BoundReport rm = dissipation_bound(mid, constant_profile());
    CHECK(rm.prefactor_m == doctest::Approx(0.5 - 2.5 * 0.7 / 5.1).epsilon(1e-13));
}

TEST_CASE("log-log fit input validation") {
    CHECK_THROWS_AS(fit_loglog_slope({1.0}, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {2.0}), std::invalid_argument);
    CHECK_THROWS_AS(fit_loglog_slope({1.0, 2.0}, {2.0, -1.0}), std::invalid_argument);
    CHECK(fit_loglog_slope({10.0, 100.0, 1000.0}, {5.0, 500.0, 50000.0}) ==
          doctest::Approx(2.0).epsilon(1e-12));
}
