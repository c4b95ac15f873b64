// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Surface tension constraint functions: the summed area of a surface
// particle's triangle fan, and the one-sided push-apart distance.

#pragma once

#include <splatdyn/math/vec.hpp>

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace splatdyn::fluid {

using LocalTriangle = std::array<std::uint32_t, 3>;

/// C = sum_t 1/2 |(p2 - p1) x (p3 - p1)|. Triangles index into participants.
/// For each triangle: dA/dp1 = n x (p3 - p2) / (2|n|), and cyclically.
/// Zero-area triangles contribute no gradient.
inline double area_value_and_gradients(std::span<const std::uint32_t> participants,
                                       std::span<const LocalTriangle> triangles,
                                       std::span<const Vec3> x, std::span<Vec3> grads) {
    for (std::size_t k = 0; k < participants.size(); ++k) grads[k] = {};
    double area = 0.0;
    for (const auto &t : triangles) {
        const Vec3 p1 = x[participants[t[0]]];
        const Vec3 p2 = x[participants[t[1]]];
        const Vec3 p3 = x[participants[t[2]]];
        const Vec3 n = (p2 - p1).cross(p3 - p1);
        const double len = n.norm();
        area += 0.5 * len;
        const double scale = std::max({(p2 - p1).squared_norm(), (p3 - p1).squared_norm(),
                                       (p3 - p2).squared_norm()});
        if (!(len > 1e-14 * scale) || len == 0.0) continue;
        const double inv = 0.5 / len;
        grads[t[0]] += n.cross(p3 - p2) * inv;
        grads[t[1]] += n.cross(p1 - p3) * inv;
        grads[t[2]] += n.cross(p2 - p1) * inv;
    }
    return area;
}

struct DistanceEvaluation {
    double value = 0.0;
    Vec3 grad_i;  // grad_j = -grad_i
    bool fallback_direction = false;
};

/// Unit direction from j to i; +x when the points coincide.
inline Vec3 separation_direction(const Vec3 &pi, const Vec3 &pj, double &dist, bool &fallback) {
    const Vec3 d = pi - pj;
    dist = d.norm();
    fallback = !(dist > 1e-300);
    return fallback ? Vec3{1, 0, 0} : d / dist;
}

/// C = min{0, |p_i - p_j| - d0}; gradients are zero when |p_i - p_j| >= d0.
inline DistanceEvaluation tension_distance(const Vec3 &pi, const Vec3 &pj, double d0) {
    DistanceEvaluation e;
    double dist = 0.0;
    const Vec3 dir = separation_direction(pi, pj, dist, e.fallback_direction);
    if (dist < d0) {
        e.value = dist - d0;
        e.grad_i = dir;
    } else {
        e.fallback_direction = false;
    }
    return e;
}

}  // namespace splatdyn::fluid
