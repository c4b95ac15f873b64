// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Surface particle detection by occlusion of a spherical screen around each
// particle, and density-gradient surface normals.
//
// The screen is an 18 x 36 map over elevation theta in [-pi/2, pi/2] (rows)
// and azimuth phi in [-pi, pi) (columns). Elevation is measured from the xz
// plane towards +y, azimuth is atan2(dx, dz). Column c of the mask holds one
// bit per row.

#pragma once

#include <splatdyn/fluid/density.hpp>
#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/fluid/params.hpp>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>

namespace splatdyn::fluid {

inline constexpr int kScreenRows = 18;
inline constexpr int kScreenColumns = 36;
inline constexpr int kScreenCells = kScreenRows * kScreenColumns;

struct SurfaceInfo {
    bool is_surface = false;
    bool has_normal = false;  // false also when the gradient degenerates
    Vec3 normal;
    std::array<std::uint32_t, kScreenColumns> occlusion_mask{};

    int masked_cells() const {
        int n = 0;
        for (auto c : occlusion_mask) n += std::popcount(c);
        return n;
    }
    double masked_fraction() const { return static_cast<double>(masked_cells()) / kScreenCells; }
};

/// Footprint of one neighbour on the screen, in radians.
struct ScreenFootprint {
    double theta = 0.0, phi = 0.0;
    double half_theta = 0.0, half_phi = 0.0;
    // Overlapping neighbour: hides every cell within 90 degrees of `direction`
    // (the whole screen if direction is zero).
    bool hemisphere = false;
    Vec3 direction;
};

inline ScreenFootprint screen_footprint(const Vec3 &dp, double particle_radius,
                                        OcclusionExtent extent, AzimuthExtent azimuth) {
    constexpr double half_pi = 0.5 * std::numbers::pi;
    ScreenFootprint f;
    const double d2 = dp.squared_norm();
    const double r2 = particle_radius * particle_radius;
    f.theta = std::atan2(dp.y, std::hypot(dp.x, dp.z));
    f.phi = std::atan2(dp.x, dp.z);
    if (d2 <= r2) {
        f.hemisphere = true;
        f.direction = dp;
        f.half_theta = half_pi;
        f.half_phi = std::numbers::pi;
        return f;
    }
    if (extent == OcclusionExtent::Tangent) {
        f.half_theta = std::atan(particle_radius / std::sqrt(d2 - r2));
    } else {
        f.half_theta = std::atan(particle_radius / (d2 - r2));
    }
    if (azimuth == AzimuthExtent::EqualToPolar) {
        f.half_phi = f.half_theta;
    } else {
        const double c = std::cos(f.theta);
        if (std::abs(f.theta) + f.half_theta >= half_pi || c <= 1e-12) {
            f.half_phi = std::numbers::pi;
        } else {
            f.half_phi = std::asin(std::min(1.0, std::sin(f.half_theta) / c));
        }
    }
    return f;
}

/// Marks every cell whose centre lies in [theta +- dtheta] x [phi +- dphi] (phi wraps).
inline void mark_footprint(const ScreenFootprint &f,
                           std::array<std::uint32_t, kScreenColumns> &mask) {
    constexpr double pi = std::numbers::pi;
    constexpr double cell = pi / kScreenRows;  // 10 degrees in both directions
    if (f.hemisphere) {
        for (int c = 0; c < kScreenColumns; ++c) {
            const double phi = -pi + (c + 0.5) * cell;
            for (int r = 0; r < kScreenRows; ++r) {
                const double theta = -0.5 * pi + (r + 0.5) * cell;
                const Vec3 dir{std::cos(theta) * std::sin(phi), std::sin(theta),
                               std::cos(theta) * std::cos(phi)};
                if (dir.dot(f.direction) >= 0.0) mask[static_cast<std::size_t>(c)] |= 1u << r;
            }
        }
        return;
    }
    std::uint32_t rows = 0;
    for (int r = 0; r < kScreenRows; ++r) {
        const double centre = -0.5 * pi + (r + 0.5) * cell;
        if (std::abs(centre - f.theta) <= f.half_theta) rows |= 1u << r;
    }
    if (rows == 0) return;
    for (int c = 0; c < kScreenColumns; ++c) {
        const double centre = -pi + (c + 0.5) * cell;
        double d = std::abs(centre - f.phi);
        d = std::fmod(d, 2.0 * pi);
        if (d > pi) d = 2.0 * pi - d;
        if (d <= f.half_phi) mask[static_cast<std::size_t>(c)] |= rows;
    }
}

/// Occlusion screen of particle i built from its neighbours.
inline SurfaceInfo detect_surface(std::size_t i, std::span<const Vec3> positions,
                                  std::span<const std::uint32_t> neighbors,
                                  const FluidParams &params) {
    SurfaceInfo info;
    for (auto j : neighbors) {
        const auto f = screen_footprint(positions[j] - positions[i], params.particle_radius,
                                        params.occlusion_extent, params.azimuth_extent);
        mark_footprint(f, info.occlusion_mask);
    }
    info.is_surface = info.masked_fraction() < params.occlusion_threshold;
    return info;
}

/// sum_j (m / rho0) grad W(p_i - p_j) over the neighbours of i.
inline Vec3 density_gradient_at(std::size_t i, std::span<const Vec3> positions,
                                std::span<const std::uint32_t> neighbors, double mass_over_rho0,
                                double r) {
    Vec3 g{};
    for (auto j : neighbors)
        g += detail::cubic_kernel_gradient(positions[i] - positions[j], r) * mass_over_rho0;
    return g;
}

/// n = normalize(-grad_{p_i} C_i); empty when |grad| < 1e-10.
inline std::optional<Vec3> surface_normal(std::size_t i, std::span<const Vec3> positions,
                                          std::span<const std::uint32_t> neighbors,
                                          const FluidParams &params) {
    const Vec3 g = density_gradient_at(i, positions, neighbors, params.mass_over_rest_density(),
                                       params.kernel_radius);
    const double len = g.norm();
    if (!(len >= 1e-10)) return std::nullopt;
    return -g / len;
}

}  // namespace splatdyn::fluid
