// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/math/linalg.hpp>
#include <splatdyn/math/vec.hpp>

#include <span>
#include <stdexcept>
#include <vector>

namespace splatdyn::solid {

inline Vec3 weighted_centroid(std::span<const Vec3> points, std::span<const double> masses) {
    Vec3 c{};
    double total = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        c += points[k] * masses[k];
        total += masses[k];
    }
    return c / total;
}

/// Best-fit rigid transform of a cluster. The rotation is proper; when the
/// moment matrix is rank-deficient (collinear or coincident points) the
/// incoming rotation is kept.
struct ShapeMatchFit {
    Mat3 rotation = Mat3::identity();
    Vec3 centroid;
    bool degenerate = false;
};

/// rest_offsets are rest positions relative to the rest mass centroid.
inline ShapeMatchFit fit_shape(std::span<const Vec3> current, std::span<const Vec3> rest_offsets,
                               std::span<const double> masses, const Mat3 &previous_rotation) {
    ShapeMatchFit fit;
    fit.centroid = weighted_centroid(current, masses);
    Mat3 moment{};
    for (std::size_t k = 0; k < current.size(); ++k)
        moment += Mat3::outer((current[k] - fit.centroid) * masses[k], rest_offsets[k]);
    const auto svd = signed_svd(moment);
    if (!(std::abs(svd.sigma.y) > 1e-12 * std::max(svd.sigma.x, 1e-300)) || !moment.finite()) {
        fit.rotation = previous_rotation;
        fit.degenerate = true;
    } else {
        fit.rotation = svd.u * svd.v.transposed();
    }
    return fit;
}

/// Goal positions g_k = R (x0_k - c0) + c for a cluster.
inline std::vector<Vec3> shape_match_project(std::span<const Vec3> current,
                                             std::span<const Vec3> rest,
                                             std::span<const double> masses,
                                             Mat3 *rotation_inout = nullptr) {
    if (current.size() != rest.size() || current.size() != masses.size() || current.empty())
        throw std::invalid_argument("shape_match_project: mismatched cluster sizes");
    const Vec3 c0 = weighted_centroid(rest, masses);
    std::vector<Vec3> offsets(rest.size());
    for (std::size_t k = 0; k < rest.size(); ++k) offsets[k] = rest[k] - c0;
    const Mat3 previous = rotation_inout ? *rotation_inout : Mat3::identity();
    const auto fit = fit_shape(current, offsets, masses, previous);
    if (rotation_inout) *rotation_inout = fit.rotation;
    std::vector<Vec3> goals(current.size());
    for (std::size_t k = 0; k < current.size(); ++k)
        goals[k] = fit.rotation * offsets[k] + fit.centroid;
    return goals;
}

}  // namespace splatdyn::solid
