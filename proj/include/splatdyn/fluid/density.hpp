// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/math/sph_kernel.hpp>
#include <splatdyn/math/vec.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

namespace splatdyn::fluid {

/// Planar wall seen by the density estimate: the region n . x < offset is
/// treated as filled with fluid at `weight` times the rest density.
struct DensityWall {
    Vec3 normal{0, 1, 0};
    double offset = 0.0;
    double weight = 1.0;
};

using DensityWalls = std::shared_ptr<const std::vector<DensityWall>>;

/// Adds the walls' share of C at p and its gradient with respect to p.
inline double wall_density(const DensityWalls &walls, const Vec3 &p, double r, Vec3 *grad) {
    if (!walls) return 0.0;
    double sum = 0.0;
    for (const auto &w : *walls) {
        const double d = w.normal.dot(p) - w.offset;
        if (d >= r) continue;
        sum += w.weight * half_space_integral(d, r);
        if (grad) *grad -= w.normal * (w.weight * half_space_flux(d, r));
    }
    return sum;
}

/// Particle mass that puts the interior of a cubic lattice with the given
/// spacing exactly at rest density: rho0 / sum_lattice W.
inline double lattice_mass(double spacing, double rest_density, double r) {
    if (!(spacing > 0.0) || !(r > 0.0)) throw std::invalid_argument("lattice_mass: spacing and radius must be positive");
    const int reach = static_cast<int>(std::ceil(r / spacing));
    double sum = 0.0;
    for (int i = -reach; i <= reach; ++i)
        for (int j = -reach; j <= reach; ++j)
            for (int k = -reach; k <= reach; ++k)
                sum += detail::cubic_kernel(spacing * std::sqrt(static_cast<double>(i * i + j * j + k * k)), r);
    return rest_density / sum;
}

/// Wall weight that puts the first layer of a cubic lattice with the given
/// spacing (centres at spacing / 2 from the wall) exactly at rest density.
inline double calibrate_wall_weight(double spacing, double mass_over_rho0, double r) {
    const int reach = static_cast<int>(std::ceil(r / spacing));
    double half = 0.0;
    for (int i = -reach; i <= reach; ++i)
        for (int j = 0; j <= reach; ++j)
            for (int k = -reach; k <= reach; ++k)
                half += detail::cubic_kernel(spacing * std::sqrt(static_cast<double>(i * i + j * j + k * k)), r);
    const double deficit = 1.0 - mass_over_rho0 * half;
    const double phi = half_space_integral(0.5 * spacing, r);
    return phi > 0.0 ? std::max(0.0, deficit) / phi : 0.0;
}

/// Density constraint C = sum_j (m / rho0) W(p_i - p_j) - 1 over participants
/// {i, j0, j1, ...} (participants[0] is i), self term included. Writes
/// dC/dp for every participant into grads.
inline double density_value_and_gradients(std::span<const std::uint32_t> participants,
                                          std::span<const Vec3> x, double mass_over_rho0,
                                          double r, std::span<Vec3> grads,
                                          const DensityWalls &walls = {}) {
    const Vec3 pi = x[participants[0]];
    double sum = detail::cubic_kernel(0.0, r);
    Vec3 grad_i{};
    for (std::size_t k = 1; k < participants.size(); ++k) {
        const Vec3 d = pi - x[participants[k]];
        sum += detail::cubic_kernel(d.norm(), r);
        const Vec3 g = detail::cubic_kernel_gradient(d, r) * mass_over_rho0;
        grad_i += g;
        grads[k] = -g;
    }
    const double wall = wall_density(walls, pi, r, &grad_i);
    grads[0] = grad_i;
    return mass_over_rho0 * sum + wall - 1.0;
}

inline double density_value(std::span<const std::uint32_t> participants, std::span<const Vec3> x,
                            double mass_over_rho0, double r, const DensityWalls &walls = {}) {
    const Vec3 pi = x[participants[0]];
    double sum = detail::cubic_kernel(0.0, r);
    for (std::size_t k = 1; k < participants.size(); ++k)
        sum += detail::cubic_kernel((pi - x[participants[k]]).norm(), r);
    return mass_over_rho0 * sum + wall_density(walls, pi, r, nullptr) - 1.0;
}

}  // namespace splatdyn::fluid
