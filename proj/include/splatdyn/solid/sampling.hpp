// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Poisson disk sampling of a mesh interior (Bridson's algorithm in 3D with a
// background grid of cell radius / sqrt(3)).

#pragma once

#include <splatdyn/solid/mesh.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace splatdyn::solid {

struct PoissonOptions {
    int attempts = 30;  // candidates per active sample
    std::uint64_t seed = 1;
};

/// Samples strictly inside a watertight mesh with pairwise distance >= radius.
/// Once the active list runs dry, a scan over cells of size radius restarts
/// the process in any region not yet covered, so disconnected pieces are filled.
inline std::vector<Vec3> poisson_sample_volume(const TriangleMesh &mesh, double radius,
                                               const PoissonOptions &opt = {}) {
    if (!(radius > 0.0) || !std::isfinite(radius))
        throw std::invalid_argument("poisson_sample_volume: radius must be positive");
    if (!is_watertight(mesh)) throw std::invalid_argument("poisson_sample_volume: mesh is not watertight");

    const auto [lo, hi] = mesh.bounds();
    const double cell = radius / std::sqrt(3.0);
    auto cell_of = [&](const Vec3 &p) {
        return std::array<long long, 3>{static_cast<long long>(std::floor((p.x - lo.x) / cell)),
                                        static_cast<long long>(std::floor((p.y - lo.y) / cell)),
                                        static_cast<long long>(std::floor((p.z - lo.z) / cell))};
    };
    auto key = [](long long x, long long y, long long z) {
        return (static_cast<std::uint64_t>(x + (1 << 20)) << 42) ^
               (static_cast<std::uint64_t>(y + (1 << 20)) << 21) ^ static_cast<std::uint64_t>(z + (1 << 20));
    };
    std::unordered_map<std::uint64_t, std::uint32_t> grid;
    std::vector<Vec3> samples;
    std::vector<std::uint32_t> active;
    std::mt19937_64 rng(opt.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    auto far_enough = [&](const Vec3 &p) {
        const auto c = cell_of(p);
        for (long long dx = -2; dx <= 2; ++dx)
            for (long long dy = -2; dy <= 2; ++dy)
                for (long long dz = -2; dz <= 2; ++dz) {
                    const auto it = grid.find(key(c[0] + dx, c[1] + dy, c[2] + dz));
                    if (it != grid.end() && (samples[it->second] - p).squared_norm() < radius * radius)
                        return false;
                }
        return true;
    };
    auto accept = [&](const Vec3 &p) {
        const auto c = cell_of(p);
        grid.emplace(key(c[0], c[1], c[2]), static_cast<std::uint32_t>(samples.size()));
        active.push_back(static_cast<std::uint32_t>(samples.size()));
        samples.push_back(p);
    };
    auto in_bounds = [&](const Vec3 &p) {
        return p.x > lo.x && p.y > lo.y && p.z > lo.z && p.x < hi.x && p.y < hi.y && p.z < hi.z;
    };
    auto grow = [&] {
        while (!active.empty()) {
            const auto slot = static_cast<std::size_t>(unit(rng) * static_cast<double>(active.size())) % active.size();
            const Vec3 centre = samples[active[slot]];
            bool placed = false;
            for (int a = 0; a < opt.attempts && !placed; ++a) {
                // Uniform in the spherical shell [r, 2r].
                const double z = 2.0 * unit(rng) - 1.0, phi = 2.0 * std::numbers::pi * unit(rng);
                const double s = std::sqrt(std::max(0.0, 1.0 - z * z));
                const double rr = radius * std::cbrt(1.0 + 7.0 * unit(rng));
                const Vec3 p = centre + Vec3{s * std::cos(phi), s * std::sin(phi), z} * rr;
                if (in_bounds(p) && far_enough(p) && contains(mesh, p)) {
                    accept(p);
                    placed = true;
                }
            }
            if (!placed) {
                active[slot] = active.back();
                active.pop_back();
            }
        }
    };

    // Seed scan over a jittered lattice of spacing `radius`.
    const Vec3 ext = hi - lo;
    const auto steps = [&](double e) { return std::max<long long>(1, static_cast<long long>(std::ceil(e / radius))); };
    const long long nx = steps(ext.x), ny = steps(ext.y), nz = steps(ext.z);
    for (long long i = 0; i < nx; ++i)
        for (long long j = 0; j < ny; ++j)
            for (long long k = 0; k < nz; ++k) {
                const Vec3 p = lo + Vec3{(static_cast<double>(i) + 0.25 + 0.5 * unit(rng)) * ext.x / static_cast<double>(nx),
                                         (static_cast<double>(j) + 0.25 + 0.5 * unit(rng)) * ext.y / static_cast<double>(ny),
                                         (static_cast<double>(k) + 0.25 + 0.5 * unit(rng)) * ext.z / static_cast<double>(nz)};
                if (far_enough(p) && contains(mesh, p)) {
                    accept(p);
                    grow();
                }
            }
    return samples;
}

}  // namespace splatdyn::solid
