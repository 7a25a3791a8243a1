#pragma once

#include <functional>

namespace smd {

/// Adaptive Simpson quadrature of f over [a, b]. The tolerance is applied
/// as |error| <= tol * max(|integral|, scale_floor). Throws on failure to
/// converge within the recursion depth limit.
double integrate(const std::function<double(double)>& f, double a, double b,
                 double tol = 1e-13, double scale_floor = 1e-30);

}  // namespace smd
