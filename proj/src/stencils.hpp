#pragma once

#include <cmath>

#include "smd/core.hpp"

// Shared finite-difference stencils on the staggered grid. Ghost layers must
// be current before any of these are called.

namespace smd::detail {

// Frobenius norm of the full velocity-gradient tensor at cell center (i,j,k).
inline double grad_frobenius(const VelocityField& f, const Grid& g, int i, int j, int k) {
    const double dudx = (f.u(i + 1, j, k) - f.u(i, j, k)) / g.hx;
    const double dvdy = (f.v(i, j + 1, k) - f.v(i, j, k)) / g.hy;
    const double dwdz = (f.w(i, j, k + 1) - f.w(i, j, k)) / g.hz;

    const double dudy = (f.u(i, j + 1, k) + f.u(i + 1, j + 1, k) -
                         f.u(i, j - 1, k) - f.u(i + 1, j - 1, k)) / (4.0 * g.hy);
    const double dudz = (f.u(i, j, k + 1) + f.u(i + 1, j, k + 1) -
                         f.u(i, j, k - 1) - f.u(i + 1, j, k - 1)) / (4.0 * g.hz);
    const double dvdx = (f.v(i + 1, j, k) + f.v(i + 1, j + 1, k) -
                         f.v(i - 1, j, k) - f.v(i - 1, j + 1, k)) / (4.0 * g.hx);
    const double dvdz = (f.v(i, j, k + 1) + f.v(i, j + 1, k + 1) -
                         f.v(i, j, k - 1) - f.v(i, j + 1, k - 1)) / (4.0 * g.hz);
    const double dwdx = (f.w(i + 1, j, k) + f.w(i + 1, j, k + 1) -
                         f.w(i - 1, j, k) - f.w(i - 1, j, k + 1)) / (4.0 * g.hx);
    const double dwdy = (f.w(i, j + 1, k) + f.w(i, j + 1, k + 1) -
                         f.w(i, j - 1, k) - f.w(i, j - 1, k + 1)) / (4.0 * g.hy);

    return std::sqrt(dudx * dudx + dudy * dudy + dudz * dudz +
                     dvdx * dvdx + dvdy * dvdy + dvdz * dvdz +
                     dwdx * dwdx + dwdy * dwdy + dwdz * dwdz);
}

}  // namespace smd::detail
