// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Fluid appearance: per-particle spherical kernels coloured by Beer-Lambert
// absorption of the refracted background plus an environment reflection.

#pragma once

#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/log.hpp>
#include <splatdyn/render/splat.hpp>

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace splatdyn::render {

struct FluidRenderParams {
    double particle_radius = 0.025;
    Vec3 absorption{0.30, 0.12, 0.06};  // per unit thickness, rgb
    double distortion = 8.0;            // pixels of offset per unit screen normal
    Vec3 specular{1, 1, 1};
    double roughness = 0.05;
};

/// d_p = exp(-k * tau) * c_bg, with tau read at the projected centre and the
/// background read at the centre offset by distortion * (screen normal).
/// Lookups are bilinear and clamp at the image border.
inline Rgb fluid_refraction_color(const Vec3 &center, const Vec3 &normal, const Camera &cam,
                                  const ScalarImage &thickness, const RgbImage &background, double distortion,
                                  const Vec3 &absorption) {
    const auto px = cam.project(center);
    if (!px) return {0, 0, 0};
    const Vec3 n = cam.rotation * normal;
    const double tau = thickness.bilinear(px->x, px->y);
    const Rgb bg = background.bilinear(px->x + distortion * n.x, px->y + distortion * n.y);
    return {std::exp(-absorption.x * tau) * bg.x, std::exp(-absorption.y * tau) * bg.y,
            std::exp(-absorption.z * tau) * bg.z};
}

/// Normal of the nearest surface particle for each particle. Surface
/// particles keep their own. Particles are matched through a grid search with
/// a growing radius.
inline std::vector<Vec3> nearest_surface_normals(std::span<const Vec3> positions, std::span<const std::uint8_t> surface,
                                                 std::span<const Vec3> normals, double search_radius) {
    std::vector<Vec3> surf_pos;
    std::vector<Vec3> surf_nrm;
    for (std::size_t i = 0; i < positions.size(); ++i)
        if (surface[i]) {
            surf_pos.push_back(positions[i]);
            surf_nrm.push_back(normals[i]);
        }
    std::vector<Vec3> out(positions.size());
    if (surf_pos.empty()) return out;
    const fluid::HashGrid grid(surf_pos, search_radius);
    const long n = static_cast<long>(positions.size());
#pragma omp parallel for schedule(static) if (n > 2048)
    for (long il = 0; il < n; ++il) {
        const auto i = static_cast<std::size_t>(il);
        if (surface[i]) {
            out[i] = normals[i];
            continue;
        }
        double radius = search_radius;
        std::uint32_t best = std::numeric_limits<std::uint32_t>::max();
        for (int round = 0; round < 6 && best == std::numeric_limits<std::uint32_t>::max(); ++round, radius *= 2.0) {
            double best_d2 = std::numeric_limits<double>::infinity();
            grid.for_each_within(positions[i], radius, [&](std::uint32_t j, double d2) {
                if (d2 < best_d2 || (d2 == best_d2 && j < best)) {
                    best_d2 = d2;
                    best = j;
                }
            });
        }
        if (best == std::numeric_limits<std::uint32_t>::max()) {
            best = fluid::k_nearest(surf_pos, positions[i], 1)[0];
        }
        out[i] = surf_nrm[best];
    }
    return out;
}

/// Builds the fluid kernels (spherical, radius = particle radius, opacity 1)
/// with shading applied, and splats them.
inline SplatResult render_fluid(std::span<const Vec3> positions, std::span<const std::uint8_t> surface,
                                std::span<const Vec3> normals, const Camera &cam, const EnvironmentMap &env,
                                const RgbImage &background, const FluidRenderParams &params,
                                ScalarImage *thickness_out = nullptr) {
    std::vector<GaussianKernel> kernels(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i) {
        kernels[i] = spherical_kernel(positions[i], params.particle_radius);
        kernels[i].specular = params.specular;
        kernels[i].roughness = params.roughness;
        kernels[i].opacity = 1.0;
    }
    ScalarImage tau = splat_thickness(kernels, cam, params.particle_radius);

    bool any_surface = false;
    for (auto s : surface) any_surface |= s != 0;
    std::vector<Vec3> n;
    if (any_surface) {
        n = nearest_surface_normals(positions, surface, normals, 4.0 * params.particle_radius);
    } else {
        if (!positions.empty()) warn("render_fluid: no surface particles, normals face the camera");
        n.resize(positions.size());
        for (std::size_t i = 0; i < positions.size(); ++i) n[i] = -cam.view_direction(positions[i]);
    }

    std::vector<Rgb> colors(positions.size());
    const long count = static_cast<long>(positions.size());
#pragma omp parallel for schedule(static) if (count > 2048)
    for (long il = 0; il < count; ++il) {
        const auto i = static_cast<std::size_t>(il);
        auto &k = kernels[i];
        k.normal = n[i];
        k.diffuse = fluid_refraction_color(k.center, k.normal, cam, tau, background, params.distortion, params.absorption);
        colors[i] = shade_kernel(k, cam.view_direction(k.center), env);
    }
    auto out = splat_color(kernels, cam, colors);
    if (thickness_out) *thickness_out = std::move(tau);
    return out;
}

}  // namespace splatdyn::render
