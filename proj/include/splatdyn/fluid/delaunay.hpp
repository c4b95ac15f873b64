// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Incremental Bowyer-Watson triangulation for the small planar point sets
// produced by projecting a surface particle's neighbourhood.

#pragma once

#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/math/linalg.hpp>
#include <splatdyn/math/vec.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

namespace splatdyn::fluid {

using Triangle2 = std::array<std::uint32_t, 3>;

inline double orient2d(const Vec2 &a, const Vec2 &b, const Vec2 &c) {
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

/// Positive when d lies strictly inside the circumcircle of the
/// counter-clockwise triangle (a, b, c).
inline double in_circle(const Vec2 &a, const Vec2 &b, const Vec2 &c, const Vec2 &d) {
    const long double adx = a.x - d.x, ady = a.y - d.y;
    const long double bdx = b.x - d.x, bdy = b.y - d.y;
    const long double cdx = c.x - d.x, cdy = c.y - d.y;
    const long double ad = adx * adx + ady * ady;
    const long double bd = bdx * bdx + bdy * bdy;
    const long double cd = cdx * cdx + cdy * cdy;
    return static_cast<double>(adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                               ad * (bdx * cdy - bdy * cdx));
}

/// Delaunay triangulation of points (counter-clockwise triangles indexing
/// into points). Returns no triangles for fewer than three points, collinear
/// input, or if a robustness check fails.
inline std::vector<Triangle2> delaunay_triangulate(std::span<const Vec2> points) {
    const std::size_t n = points.size();
    if (n < 3) return {};

    Vec2 lo = points[0], hi = points[0];
    for (const auto &p : points) {
        lo = {std::min(lo.x, p.x), std::min(lo.y, p.y)};
        hi = {std::max(hi.x, p.x), std::max(hi.y, p.y)};
    }
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    if (!(span > 0.0) || !std::isfinite(span)) return {};
    const double area_tol = 1e-12 * span * span;

    bool collinear = true;
    for (std::size_t i = 2; i < n && collinear; ++i)
        for (std::size_t j = 1; j < i && collinear; ++j)
            if (std::abs(orient2d(points[0], points[j], points[i])) > area_tol) collinear = false;
    if (collinear) return {};

    std::vector<Vec2> v(points.begin(), points.end());
    const Vec2 mid{0.5 * (lo.x + hi.x), 0.5 * (lo.y + hi.y)};
    const double big = 64.0 * span;
    v.push_back({mid.x - 2.0 * big, mid.y - big});
    v.push_back({mid.x + 2.0 * big, mid.y - big});
    v.push_back({mid.x, mid.y + 2.0 * big});
    const auto s0 = static_cast<std::uint32_t>(n);

    std::vector<Triangle2> tris{{s0, s0 + 1, s0 + 2}};
    std::vector<Triangle2> keep;
    std::vector<std::array<std::uint32_t, 2>> edges;
    const double circle_tol = 1e-12 * span * span * span * span;

    for (std::uint32_t p = 0; p < n; ++p) {
        const Vec2 &q = v[p];
        bool duplicate = false;
        for (std::uint32_t k = 0; k < p; ++k)
            if (std::abs(v[k].x - q.x) + std::abs(v[k].y - q.y) <= 1e-12 * span) duplicate = true;
        if (duplicate) continue;

        keep.clear();
        edges.clear();
        for (const auto &t : tris) {
            if (in_circle(v[t[0]], v[t[1]], v[t[2]], q) > circle_tol) {
                for (int e = 0; e < 3; ++e) edges.push_back({t[e], t[(e + 1) % 3]});
            } else {
                keep.push_back(t);
            }
        }
        // Cavity boundary: edges not shared (in opposite direction) by two bad triangles.
        std::vector<std::array<std::uint32_t, 2>> boundary;
        for (std::size_t a = 0; a < edges.size(); ++a) {
            bool shared = false;
            for (std::size_t b = 0; b < edges.size() && !shared; ++b)
                if (a != b && edges[a][0] == edges[b][1] && edges[a][1] == edges[b][0]) shared = true;
            if (!shared) boundary.push_back(edges[a]);
        }
        tris.swap(keep);
        for (const auto &e : boundary) {
            if (orient2d(v[e[0]], v[e[1]], q) <= 0.0) return {};
            tris.push_back({e[0], e[1], p});
        }
    }

    std::vector<Triangle2> out;
    for (const auto &t : tris)
        if (t[0] < s0 && t[1] < s0 && t[2] < s0) out.push_back(t);
    return out;
}

/// Triangle fan of particle i: surface neighbours are projected onto the
/// plane through p_i perpendicular to normal, triangulated together with
/// p_i, and the triangles touching p_i are returned as global indices with
/// i first, oriented counter-clockwise about the normal.
inline std::vector<std::array<std::uint32_t, 3>> triangulate_local_surface(
    std::uint32_t i, std::span<const std::uint32_t> surface_neighbors, const Vec3 &normal,
    std::span<const Vec3> positions) {
    if (surface_neighbors.size() < 2) return {};
    const Vec3 n = normal.normalized();
    const Vec3 u = any_orthogonal(n);
    const Vec3 w = n.cross(u);
    std::vector<Vec2> pts;
    pts.reserve(surface_neighbors.size() + 1);
    pts.push_back({0.0, 0.0});
    for (auto j : surface_neighbors) {
        const Vec3 d = positions[j] - positions[i];
        pts.push_back({d.dot(u), d.dot(w)});
    }
    const auto tris = delaunay_triangulate(pts);
    std::vector<std::array<std::uint32_t, 3>> fan;
    for (const auto &t : tris) {
        const auto it = std::find(t.begin(), t.end(), 0u);
        if (it == t.end()) continue;
        const auto k = static_cast<std::size_t>(it - t.begin());
        const std::uint32_t a = t[(k + 1) % 3], b = t[(k + 2) % 3];
        fan.push_back({i, surface_neighbors[a - 1], surface_neighbors[b - 1]});
    }
    return fan;
}

}  // namespace splatdyn::fluid
