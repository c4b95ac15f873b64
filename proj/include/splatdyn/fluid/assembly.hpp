// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Per-step assembly of the fluid constraint set: one density constraint per
// particle, plus area and push-apart distance constraints on the surface.

#pragma once

#include <splatdyn/fluid/delaunay.hpp>
#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/fluid/params.hpp>
#include <splatdyn/fluid/surface.hpp>
#include <splatdyn/xpbd/solver.hpp>

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace splatdyn::fluid {

/// Surface classification carried between steps (indexed like the fluid
/// particle list passed to build_fluid_constraints).
struct FluidState {
    std::vector<SurfaceInfo> surface;
    long long last_update = -1;
    NeighborLists neighbors;  // fluid-local neighbour lists from the latest build
    std::vector<std::vector<std::array<std::uint32_t, 3>>> fans;  // fluid-local, refreshed with the surface

    std::size_t surface_count() const {
        return static_cast<std::size_t>(
            std::count_if(surface.begin(), surface.end(), [](const SurfaceInfo &s) { return s.is_surface; }));
    }
};

struct FluidBuildCounts {
    std::size_t density = 0;
    std::size_t area = 0;
    std::size_t distance = 0;
    std::size_t surface = 0;
};

/// Recomputes surface flags and normals for every fluid particle.
inline void update_surface(std::span<const Vec3> local, const NeighborLists &neighbors,
                           const FluidParams &params, std::vector<SurfaceInfo> &out) {
    out.assign(local.size(), SurfaceInfo{});
    const long n = static_cast<long>(local.size());
#pragma omp parallel for schedule(dynamic, 64) if (n > 512)
    for (long il = 0; il < n; ++il) {
        const auto i = static_cast<std::size_t>(il);
        if (params.occlusion_threshold <= 0.0) continue;
        SurfaceInfo s = detect_surface(i, local, neighbors[i], params);
        if (s.is_surface) {
            if (const auto nrm = surface_normal(i, local, neighbors[i], params)) {
                s.has_normal = true;
                s.normal = *nrm;
            }
        }
        out[i] = s;
    }
}

/// Appends the fluid constraints for the particles `fluid` (global indices
/// into x) to `out`. Walls, if given, add to every density estimate. Surface flags are refreshed when step_index is a
/// multiple of the update stride, or when the particle count changed.
inline FluidBuildCounts build_fluid_constraints(std::span<const std::uint32_t> fluid,
                                                std::span<const Vec3> x, const FluidParams &params,
                                                long long step_index, FluidState &state,
                                                xpbd::ConstraintSet &out,
                                                const DensityWalls &walls = {}) {
    FluidBuildCounts counts;
    const std::size_t n = fluid.size();
    std::vector<Vec3> local(n);
    for (std::size_t i = 0; i < n; ++i) local[i] = x[fluid[i]];
    state.neighbors = find_neighbors(local, params.kernel_radius);
    const NeighborLists &nb = state.neighbors;

    bool refreshed = false;
    if (state.surface.size() != n || step_index % params.surface_update_stride == 0) {
        update_surface(local, nb, params, state.surface);
        state.last_update = step_index;
        refreshed = true;
    }
    counts.surface = state.surface_count();

    const double m_rho = params.mass_over_rest_density();
    out.constraints.reserve(out.constraints.size() + n + counts.surface * 2);
    for (std::size_t i = 0; i < n; ++i) {
        xpbd::Constraint c;
        c.participants.reserve(nb[i].size() + 1);
        c.participants.push_back(fluid[i]);
        for (auto j : nb[i]) c.participants.push_back(fluid[j]);
        c.payload = xpbd::DensityPayload{m_rho, params.kernel_radius, params.unilateral_density, walls};
        out.constraints.push_back(std::move(c));
    }
    counts.density = n;
    if (!params.tension_enabled || counts.surface == 0) return counts;

    auto tension_ready = [&](std::size_t i) {
        return state.surface[i].is_surface && state.surface[i].has_normal;
    };

    // Local fans, built independently per particle.
    if (refreshed || !params.hold_fans || state.fans.size() != n) {
        state.fans.assign(n, {});
        const long nl = static_cast<long>(n);
#pragma omp parallel for schedule(dynamic, 32) if (nl > 512)
        for (long il = 0; il < nl; ++il) {
            const auto i = static_cast<std::size_t>(il);
            if (!tension_ready(i)) continue;
            std::vector<std::uint32_t> surf;
            for (auto j : nb[i])
                if (state.surface[j].is_surface) surf.push_back(j);
            state.fans[i] = triangulate_local_surface(static_cast<std::uint32_t>(i), surf,
                                                      state.surface[i].normal, local);
        }
    }
    const auto &fans = state.fans;

    for (std::size_t i = 0; i < n; ++i) {
        if (fans[i].empty()) continue;
        xpbd::Constraint c;
        c.compliance = params.tension_compliance;
        c.participants.push_back(fluid[i]);
        std::vector<std::uint32_t> local_ids{static_cast<std::uint32_t>(i)};
        auto slot = [&](std::uint32_t v) {
            const auto it = std::find(local_ids.begin(), local_ids.end(), v);
            if (it != local_ids.end()) return static_cast<std::uint32_t>(it - local_ids.begin());
            local_ids.push_back(v);
            c.participants.push_back(fluid[v]);
            return static_cast<std::uint32_t>(local_ids.size() - 1);
        };
        xpbd::AreaPayload area;
        for (const auto &t : fans[i]) area.triangles.push_back({slot(t[0]), slot(t[1]), slot(t[2])});
        c.payload = std::move(area);
        out.constraints.push_back(std::move(c));
        ++counts.area;
    }

    for (std::size_t i = 0; i < n; ++i) {
        if (!tension_ready(i)) continue;
        for (auto j : nb[i]) {
            if (j <= i || !tension_ready(j)) continue;
            if ((local[i] - local[j]).norm() >= params.tension_distance) continue;
            out.constraints.push_back(xpbd::make_distance(fluid[i], fluid[j], params.tension_distance,
                                                          params.tension_compliance, true));
            ++counts.distance;
        }
    }
    return counts;
}

}  // namespace splatdyn::fluid
