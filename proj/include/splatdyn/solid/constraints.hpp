// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/log.hpp>
#include <splatdyn/solid/shape_match.hpp>
#include <splatdyn/xpbd/constraint.hpp>

#include <algorithm>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace splatdyn::solid {

enum class BodyMode { Rigid, Deformable };

struct BodySpec {
    BodyMode mode = BodyMode::Rigid;
    double compliance = 0.0;     // deformable distance and cluster constraints
    double sample_radius = 0.05;  // Poisson radius; clusters span 2x this
    std::size_t neighbors = 8;    // k of the k-NN distance graph
};

/// Shape-match constraint over `members` (global particle indices) at their rest positions.
inline xpbd::Constraint make_shape_match(std::span<const std::uint32_t> members,
                                         std::span<const Vec3> rest, std::span<const double> masses,
                                         double compliance) {
    xpbd::ShapeMatchPayload p;
    std::vector<Vec3> pts(members.size());
    p.masses.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) {
        pts[k] = rest[members[k]];
        p.masses[k] = masses[members[k]];
    }
    const Vec3 c0 = weighted_centroid(pts, p.masses);
    p.rest_offsets.resize(members.size());
    for (std::size_t k = 0; k < members.size(); ++k) p.rest_offsets[k] = pts[k] - c0;
    return {std::vector<std::uint32_t>(members.begin(), members.end()), compliance, 0.0, std::move(p)};
}

/// Constraints holding one body together. `members` are global indices into
/// rest / masses. Bodies with fewer than four particles cannot carry a stable
/// shape match and are held by hard distance constraints between all pairs.
inline std::vector<xpbd::Constraint> build_solid_constraints(std::span<const std::uint32_t> members,
                                                             std::span<const Vec3> rest,
                                                             std::span<const double> masses,
                                                             const BodySpec &spec) {
    std::vector<xpbd::Constraint> out;
    const std::size_t n = members.size();
    if (n < 2) return out;
    if (n < 4) {
        warn("solid body with " + std::to_string(n) + " particles held by pairwise distances");
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = a + 1; b < n; ++b)
                out.push_back(xpbd::make_distance(members[a], members[b],
                                                  (rest[members[a]] - rest[members[b]]).norm()));
        return out;
    }
    if (spec.mode == BodyMode::Rigid) {
        out.push_back(make_shape_match(members, rest, masses, 0.0));
        return out;
    }

    std::vector<Vec3> local(n);
    for (std::size_t k = 0; k < n; ++k) local[k] = rest[members[k]];
    std::set<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        // k + 1 because the query point itself comes first.
        for (auto j : fluid::k_nearest(local, local[i], spec.neighbors + 1)) {
            if (j == i) continue;
            edges.insert({std::min<std::uint32_t>(static_cast<std::uint32_t>(i), j),
                          std::max<std::uint32_t>(static_cast<std::uint32_t>(i), j)});
        }
    }
    for (const auto &[a, b] : edges)
        out.push_back(xpbd::make_distance(members[a], members[b], (local[a] - local[b]).norm(), spec.compliance));

    const auto nb = fluid::find_neighbors(local, 2.0 * spec.sample_radius);
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<std::uint32_t> cluster{members[i]};
        for (auto j : nb[i]) cluster.push_back(members[j]);
        if (cluster.size() < 4) continue;
        out.push_back(make_shape_match(cluster, rest, masses, spec.compliance));
    }
    return out;
}

}  // namespace splatdyn::solid
