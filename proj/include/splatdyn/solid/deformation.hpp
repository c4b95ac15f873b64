// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Per-particle deformation gradient by kernel-weighted least squares over
// the rest-state neighbourhood.

#pragma once

#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/log.hpp>
#include <splatdyn/math/linalg.hpp>
#include <splatdyn/math/sph_kernel.hpp>

#include <algorithm>
#include <span>
#include <vector>

namespace splatdyn::solid {

inline constexpr double kMinStretch = 0.05;
inline constexpr double kMaxStretch = 20.0;

struct DeformationEstimate {
    Mat3 F = Mat3::identity();
    bool singular = false;  // moment matrix could not be inverted; F = I
};

/// F = (sum w dx dx0^T)(sum w dx0 dx0^T)^-1 with w = W(dx0, r), then
/// singular values clamped to [0.05, 20] (which also makes det F > 0).
inline DeformationEstimate compute_deformation_gradient(std::size_t i, std::span<const Vec3> positions,
                                                        std::span<const Vec3> rest,
                                                        std::span<const std::uint32_t> neighbors, double r) {
    DeformationEstimate out;
    Mat3 shape{}, moment{};
    for (auto j : neighbors) {
        const Vec3 d0 = rest[j] - rest[i];
        const double w = detail::cubic_kernel(d0.norm(), r);
        if (w <= 0.0) continue;
        const Vec3 d = positions[j] - positions[i];
        shape += Mat3::outer(d * w, d0);
        moment += Mat3::outer(d0 * w, d0);
    }
    const double scale = moment.trace();
    const double det = moment.determinant();
    // Relative determinant test: det / (trace / 3)^3 is 1 for an isotropic cloud.
    if (!(scale > 0.0) || !(det > 1e-9 * scale * scale * scale / 27.0)) {
        out.singular = true;
        return out;
    }
    Mat3 F = shape * moment.inverse();
    auto svd = signed_svd(F);
    const Vec3 s0 = svd.sigma;
    auto clamp = [](double s) { return std::clamp(s, kMinStretch, kMaxStretch); };
    const Vec3 s{clamp(s0.x), clamp(s0.y), clamp(s0.z)};
    if (!(s == s0)) F = svd.u * Mat3::diagonal(s) * svd.v.transposed();
    out.F = F;
    return out;
}

/// F for every particle; singular neighbourhoods are counted and reported once.
inline std::vector<Mat3> compute_deformation_gradients(std::span<const Vec3> positions,
                                                       std::span<const Vec3> rest,
                                                       const fluid::NeighborLists &neighbors,
                                                       double r) {
    std::vector<Mat3> out(positions.size(), Mat3::identity());
    std::size_t singular = 0;
    const long n = static_cast<long>(positions.size());
#pragma omp parallel for schedule(static) reduction(+ : singular) if (n > 1024)
    for (long il = 0; il < n; ++il) {
        const auto i = static_cast<std::size_t>(il);
        const auto e = compute_deformation_gradient(i, positions, rest, neighbors[i], r);
        out[i] = e.F;
        singular += e.singular ? 1 : 0;
    }
    if (singular > 0) warn(std::to_string(singular) + " particles with singular rest neighbourhood, F = I");
    return out;
}

}  // namespace splatdyn::solid
