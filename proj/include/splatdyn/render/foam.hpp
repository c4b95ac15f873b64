// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Secondary foam particles: seeding at fast, converging surface particles,
// advection with the local fluid, and splatting into an intensity image.

#pragma once

#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/math/sph_kernel.hpp>
#include <splatdyn/render/camera.hpp>
#include <splatdyn/render/image.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace splatdyn::render {

enum class FoamType : std::uint32_t { Spray = 0, Foam = 1, Bubble = 2 };

struct FoamParticle {
    Vec3 position;
    Vec3 velocity;
    double lifetime = 0.0;  // seconds remaining
    FoamType type = FoamType::Foam;
    bool operator==(const FoamParticle &) const = default;
};

struct FoamParams {
    double min_speed = 1.0;          // m/s
    double min_trapped_air = 1.0;    // threshold on the convergence proxy, m/s
    double lifetime = 1.5;           // seconds
    double kernel_radius = 0.1;      // neighbourhood for classification and advection
    int spray_below = 6;             // fewer fluid neighbours: spray
    int bubble_above = 20;           // more fluid neighbours: bubble
    std::size_t max_particles = 20000;
    Vec3 gravity{0, -9.8, 0};
    std::uint64_t seed = 7;
};

/// Velocity convergence around particle i: sum_j |v_ij| (1 - v_ij . x_ij / (|v_ij||x_ij|)) (1 - |x_ij| / r).
/// Large when neighbours move into each other, near zero for rigid motion.
inline double trapped_air_potential(std::size_t i, std::span<const Vec3> x, std::span<const Vec3> v,
                                    std::span<const std::uint32_t> neighbors, double r) {
    double phi = 0.0;
    for (auto j : neighbors) {
        const Vec3 xij = x[i] - x[j], vij = v[i] - v[j];
        const double dx = xij.norm(), dv = vij.norm();
        if (dx <= 0.0 || dv <= 0.0 || dx >= r) continue;
        phi += dv * (1.0 - vij.dot(xij) / (dv * dx)) * (1.0 - dx / r);
    }
    return phi;
}

/// One step of the foam population: age and advect existing particles,
/// drop expired ones, then seed new ones. Fluid arrays are indexed locally;
/// `neighbors` are the fluid neighbour lists for those positions.
inline void generate_foam(std::vector<FoamParticle> &foam, std::span<const Vec3> x, std::span<const Vec3> v,
                          std::span<const std::uint8_t> surface, const fluid::NeighborLists &neighbors, double dt,
                          std::uint64_t step, const FoamParams &params) {
    const double r = params.kernel_radius;
    // Advection and classification of existing particles.
    if (!foam.empty() && !x.empty()) {
        const fluid::HashGrid grid(x, r);
        const long n = static_cast<long>(foam.size());
#pragma omp parallel for schedule(static) if (n > 2048)
        for (long il = 0; il < n; ++il) {
            auto &f = foam[static_cast<std::size_t>(il)];
            f.lifetime -= dt;
            if (f.lifetime <= 0.0) continue;
            int count = 0;
            double wsum = 0.0;
            Vec3 vel{};
            grid.for_each_within(f.position, r, [&](std::uint32_t j, double d2) {
                const double w = splatdyn::detail::cubic_kernel(std::sqrt(d2), r);
                ++count;
                wsum += w;
                vel += v[j] * w;
            });
            if (count < params.spray_below || !(wsum > 0.0)) {
                f.type = FoamType::Spray;
                f.velocity += params.gravity * dt;
            } else {
                f.type = count > params.bubble_above ? FoamType::Bubble : FoamType::Foam;
                f.velocity = vel / wsum;
            }
            f.position += f.velocity * dt;
        }
    } else {
        for (auto &f : foam) {
            f.lifetime -= dt;
            f.velocity += params.gravity * dt;
            f.position += f.velocity * dt;
            f.type = FoamType::Spray;
        }
    }
    std::erase_if(foam, [](const FoamParticle &f) { return !(f.lifetime > 0.0); });

    // Seeding from fast surface particles with converging neighbourhoods.
    std::mt19937_64 rng(params.seed ^ (0x9e3779b97f4a7c15ULL * (step + 1)));
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (std::size_t i = 0; i < x.size() && foam.size() < params.max_particles; ++i) {
        if (!surface[i] || v[i].norm() < params.min_speed) continue;
        if (trapped_air_potential(i, x, v, neighbors[i], r) < params.min_trapped_air) continue;
        FoamParticle f;
        f.position = x[i] + Vec3{u(rng), u(rng), u(rng)} * (0.25 * r);
        f.velocity = v[i];
        f.lifetime = params.lifetime;
        f.type = FoamType::Foam;
        foam.push_back(f);
    }
}

struct FoamSplatParams {
    double radius_px = 2.0;         // at the reference depth
    double reference_depth = 2.0;   // world units
    double foam_weight = 1.0;
    double spray_weight = 0.3;
    double bubble_weight = 0.6;
    double curve = 1.5;             // I <- 1 - exp(-curve * I)
};

/// Additive intensity: foam and spray are filled discs, bubbles are rings.
/// The pixel radius shrinks in proportion to depth; the result is mapped
/// into [0, 1] by the exponential curve.
inline ScalarImage foam_splat(std::span<const FoamParticle> foam, const Camera &cam, const FoamSplatParams &p = {}) {
    ScalarImage img(cam.width, cam.height);
    for (const auto &f : foam) {
        const Vec3 c = cam.to_camera(f.position);
        const auto px = cam.project_camera(c);
        if (!px) continue;
        const double radius = std::max(1.0, cam.orthographic ? p.radius_px : p.radius_px * p.reference_depth / c.z);
        const double weight = f.type == FoamType::Foam ? p.foam_weight
                              : f.type == FoamType::Spray ? p.spray_weight
                                                          : p.bubble_weight;
        const int x0 = std::max(0, static_cast<int>(std::floor(px->x - radius - 1.5)));
        const int x1 = std::min(cam.width - 1, static_cast<int>(std::floor(px->x + radius + 1.5)));
        const int y0 = std::max(0, static_cast<int>(std::floor(px->y - radius - 1.5)));
        const int y1 = std::min(cam.height - 1, static_cast<int>(std::floor(px->y + radius + 1.5)));
        for (int y = y0; y <= y1; ++y)
            for (int x = x0; x <= x1; ++x) {
                const double d = std::hypot(x + 0.5 - px->x, y + 0.5 - px->y);
                const double cover = f.type == FoamType::Bubble ? std::clamp(1.0 - std::abs(d - radius), 0.0, 1.0)
                                                                : std::clamp(radius + 0.5 - d, 0.0, 1.0);
                img(x, y) += weight * cover;
            }
    }
    for (auto &v : img.pixels) v = 1.0 - std::exp(-p.curve * v);
    return img;
}

}  // namespace splatdyn::render
