// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Cubic spline SPH kernel with compact support radius r:
//
//   W(p, r) = 8 / (pi r^3) * (6 q^2 (q - 1) + 1)   0   <= q <= 1/2
//           = 16 / (pi r^3) * (1 - q)^3            1/2 <  q <= 1
//           = 0                                     otherwise,   q = |p| / r

#pragma once

#include <splatdyn/math/vec.hpp>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace splatdyn {

struct SphKernelParams {
    double radius = 1.0;

    void validate() const {
        if (!(radius > 0.0) || !std::isfinite(radius))
            throw std::invalid_argument("SphKernelParams: radius must be positive and finite");
    }
};

namespace detail {

inline double cubic_kernel(double dist, double r) {
    const double q = dist / r;
    if (q > 1.0) return 0.0;
    const double norm = 8.0 / (std::numbers::pi * r * r * r);
    if (q <= 0.5) return norm * (6.0 * q * q * (q - 1.0) + 1.0);
    const double t = 1.0 - q;
    return 2.0 * norm * t * t * t;
}

inline Vec3 cubic_kernel_gradient(const Vec3 &p, double r) {
    const double dist = p.norm();
    const double q = dist / r;
    if (q > 1.0 || dist <= 0.0) return {};
    const double norm = 48.0 / (std::numbers::pi * r * r * r * r * r);
    if (q <= 0.5) return p * (norm * (3.0 * q - 2.0));
    const double t = 1.0 - q;
    return p * (-norm * t * t / q);
}

inline void check_kernel_args(const Vec3 &p, double r) {
    if (!p.finite() || !std::isfinite(r))
        throw std::invalid_argument("sph kernel: non-finite input");
    if (!(r > 0.0)) throw std::invalid_argument("sph kernel: radius must be positive");
}

}  // namespace detail

/// Integral of W over the half-space lying at signed distance d beyond a
/// plane (d < 0: the point is inside that half-space). Dimensionless; 1/2 at
/// d = 0 and 0 for d >= r.
inline double half_space_integral(double d, double r) {
    const double u = std::abs(d) / r;
    double v = 0.0;
    if (u <= 0.5) {
        v = 16.0 * (((u / 5.0 - 0.3) * u * u + 1.0 / 6.0) * u * u * u - 7.0 * u / 80.0 + 1.0 / 32.0);
    } else if (u < 1.0) {
        v = 16.0 * ((((-u / 15.0 + 0.3) * u - 0.5) * u + 1.0 / 3.0) * u * u * u - u / 10.0 + 1.0 / 30.0);
    }
    return d < 0.0 ? 1.0 - v : v;
}

/// Kernel mass crossing the plane at distance d: -d/dd of half_space_integral,
/// units 1/length. Even in d.
inline double half_space_flux(double d, double r) {
    const double u = std::abs(d) / r;
    if (u >= 1.0) return 0.0;
    if (u <= 0.5) return 16.0 / r * ((-1.2 * u + 1.5) * u * u * u * u - 0.5 * u * u + 7.0 / 80.0);
    return 16.0 / r * ((((0.4 * u - 1.5) * u + 2.0) * u - 1.0) * u * u + 0.1);
}

/// Kernel value, units 1/length^3.
inline double sph_kernel(const Vec3 &p, double r) {
    detail::check_kernel_args(p, r);
    return detail::cubic_kernel(p.norm(), r);
}

/// Gradient with respect to p, units 1/length^4. Zero at p = 0 and outside the support.
inline Vec3 sph_kernel_gradient(const Vec3 &p, double r) {
    detail::check_kernel_args(p, r);
    return detail::cubic_kernel_gradient(p, r);
}

}  // namespace splatdyn
