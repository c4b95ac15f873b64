// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/math/vec.hpp>

#include <cstdint>
#include <span>
#include <vector>

namespace splatdyn::xpbd {

/// Fluid particles carry body = -1; solid particles carry their body id.
struct Phase {
    std::int32_t body = -1;

    static constexpr Phase fluid() { return {-1}; }
    static constexpr Phase solid(std::int32_t id) { return {id}; }
    constexpr bool is_fluid() const { return body < 0; }
    constexpr bool is_solid() const { return body >= 0; }
    constexpr bool operator==(const Phase &) const = default;
};

struct Particle {
    Vec3 position;
    Vec3 velocity;
    double inverse_mass = 1.0;  // 0 pins the particle
    Phase phase;
    Vec3 rest_position;

    bool pinned() const { return inverse_mass == 0.0; }
};

inline std::vector<Vec3> positions_of(std::span<const Particle> particles) {
    std::vector<Vec3> out(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) out[i] = particles[i].position;
    return out;
}

inline std::vector<double> inverse_masses_of(std::span<const Particle> particles) {
    std::vector<double> out(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) out[i] = particles[i].inverse_mass;
    return out;
}

}  // namespace splatdyn::xpbd
