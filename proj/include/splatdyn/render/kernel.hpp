// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Anisotropic Gaussian render kernels and their deformation.

#pragma once

#include <splatdyn/math/linalg.hpp>
#include <splatdyn/math/vec.hpp>

#include <cmath>
#include <stdexcept>
#include <string>

namespace splatdyn::render {

struct GaussianKernel {
    Vec3 center;
    Vec3 scaling{1, 1, 1};  // standard deviations along the rotated axes, descending
    Quat rotation;
    double opacity = 1.0;
    Vec3 diffuse{0.5, 0.5, 0.5};
    Vec3 specular{0, 0, 0};
    double roughness = 1.0;
    Vec3 normal{0, 0, 1};

    /// A = R diag(S^2) R^T.
    Mat3 covariance() const {
        const Mat3 r = rotation.to_matrix();
        return r * Mat3::diagonal(scaling.cwise(scaling)) * r.transposed();
    }

    /// Throws std::invalid_argument naming the first violated invariant.
    void validate() const {
        auto fail = [](const std::string &what) { throw std::invalid_argument("GaussianKernel: " + what); };
        if (!center.finite()) fail("center not finite");
        if (!scaling.finite() || !(scaling.z > 0.0)) fail("scaling must be positive");
        if (scaling.x < scaling.y || scaling.y < scaling.z) fail("scaling must be in descending order");
        if (!(std::abs(rotation.norm() - 1.0) < 1e-6)) fail("rotation must be a unit quaternion");
        if (!(opacity >= 0.0 && opacity <= 1.0)) fail("opacity must lie in [0, 1]");
        if (!(roughness > 0.0 && roughness <= 1.0)) fail("roughness must lie in (0, 1]");
        if (!(std::abs(normal.norm() - 1.0) < 1e-6)) fail("normal must have unit length");
        if (!diffuse.finite() || !specular.finite()) fail("colour not finite");
    }
};

/// Kernel looking the same from every direction (rotation = identity).
inline GaussianKernel spherical_kernel(const Vec3 &center, double radius) {
    GaussianKernel k;
    k.center = center;
    k.scaling = Vec3::splat(radius);
    return k;
}

/// Splits a symmetric positive definite covariance into rotation and
/// descending standard deviations. The rotation is proper.
inline void factor_covariance(const Mat3 &a, Quat &rotation, Vec3 &scaling) {
    const auto eig = symmetric_eigen<3>(to_square(a));
    Mat3 r = from_square(eig.vectors);
    if (r.determinant() < 0.0)
        for (std::size_t row = 0; row < 3; ++row) r(row, 2) = -r(row, 2);
    for (double v : eig.values)
        if (!(v > 0.0) || !std::isfinite(v)) throw std::invalid_argument("factor_covariance: not positive definite");
    rotation = Quat::from_matrix(r);
    scaling = {std::sqrt(eig.values[0]), std::sqrt(eig.values[1]), std::sqrt(eig.values[2])};
}

/// A' = F A F^T and n' = F^-T n / |F^-T n|. Centre and material are unchanged.
inline GaussianKernel deform_kernel(const GaussianKernel &k, const Mat3 &F) {
    const double det = F.determinant();
    const double scale = F.frobenius_norm();
    if (!(det > 1e-12 * scale * scale * scale) || !F.finite())
        throw std::invalid_argument("deform_kernel: deformation gradient is singular or inverted");
    GaussianKernel out = k;
    factor_covariance(F * k.covariance() * F.transposed(), out.rotation, out.scaling);
    out.normal = (F.inverse().transposed() * k.normal).normalized();
    return out;
}

}  // namespace splatdyn::render
