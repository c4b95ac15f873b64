// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// XPBD time step: predict, project constraint groups for a fixed number of
// iterations, then derive velocities from the position change.

#pragma once

#include <splatdyn/parallel.hpp>
#include <splatdyn/xpbd/coloring.hpp>
#include <splatdyn/xpbd/constraint.hpp>
#include <splatdyn/xpbd/particle.hpp>

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace splatdyn::xpbd {

struct SolverSettings {
    double dt = 0.005;
    int fluid_iterations = 10;
    int solid_iterations = 50;
    Vec3 gravity{0.0, -9.8, 0.0};

    void validate() const {
        if (!(dt > 0.0)) throw std::invalid_argument("SolverSettings.dt: must be positive");
        if (fluid_iterations < 1)
            throw std::invalid_argument("SolverSettings.fluid_iterations: must be at least 1");
        if (solid_iterations < 1)
            throw std::invalid_argument("SolverSettings.solid_iterations: must be at least 1");
    }
};

/// A batch of constraints projected for `iterations` passes per step.
struct ConstraintSet {
    std::vector<Constraint> constraints;
    std::vector<std::vector<std::uint32_t>> groups;
    int iterations = 1;

    void recolor() { groups = color_constraints(constraints); }
    void clear() {
        constraints.clear();
        groups.clear();
    }
};

struct StepStats {
    std::size_t projections = 0;
    std::size_t degenerate = 0;
    std::size_t fallback_directions = 0;
};

/// Raised when a position turns non-finite; carries the pre-step state.
class NonFiniteError : public std::runtime_error {
public:
    NonFiniteError(const std::string &what, std::vector<Particle> snapshot, std::size_t particle)
        : std::runtime_error(what), snapshot_(std::move(snapshot)), particle_(particle) {}
    const std::vector<Particle> &snapshot() const { return snapshot_; }
    std::size_t particle() const { return particle_; }

private:
    std::vector<Particle> snapshot_;
    std::size_t particle_;
};

/// x~ = x + dt v + dt^2 a. The acceleration only acts on particles with w > 0.
inline std::vector<Vec3> predict_positions(std::span<const Particle> particles, double dt,
                                           const Vec3 &acceleration) {
    if (!(dt > 0.0)) throw std::invalid_argument("predict_positions: dt must be positive");
    std::vector<Vec3> out(particles.size());
    for (std::size_t i = 0; i < particles.size(); ++i) {
        const auto &p = particles[i];
        out[i] = p.position + p.velocity * dt;
        if (p.inverse_mass > 0.0) out[i] += acceleration * (dt * dt);
    }
    return out;
}

/// Projects every constraint of every group once. Groups are processed in
/// order; constraints inside a group touch disjoint particles, so they are
/// computed from group-start positions and applied without conflicts.
inline void project_groups(ConstraintSet &set, std::span<Vec3> x,
                           std::span<const double> inverse_mass, double dt, StepStats &stats) {
    for (const auto &group : set.groups) {
        const long count = static_cast<long>(group.size());
        std::size_t degenerate = 0, fallback = 0;
#pragma omp parallel for schedule(static) reduction(+ : degenerate, fallback) if (count > kParallelGrain)
        for (long g = 0; g < count; ++g) {
            thread_local ProjectionScratch scratch;
            Constraint &c = set.constraints[group[static_cast<std::size_t>(g)]];
            const auto r = project_constraint(c, x, inverse_mass, dt, scratch);
            degenerate += r.degenerate ? 1 : 0;
            fallback += r.fallback_direction ? 1 : 0;
            if (!r.active || r.degenerate) continue;
            for (std::size_t k = 0; k < c.participants.size(); ++k)
                x[c.participants[k]] += scratch.corrections[k];
        }
        stats.projections += group.size();
        stats.degenerate += degenerate;
        stats.fallback_directions += fallback;
    }
}

/// Runs the solver loop over the given sets. Each set is projected while the
/// pass index is below its own iteration count; sets are visited in order
/// inside every pass.
inline StepStats solve(std::span<ConstraintSet *const> sets, std::span<Vec3> x,
                       std::span<const double> inverse_mass, double dt) {
    StepStats stats;
    int passes = 0;
    for (auto *s : sets) {
        for (auto &c : s->constraints) c.lambda = 0.0;
        if (s->groups.empty() && !s->constraints.empty()) s->recolor();
        passes = std::max(passes, s->iterations);
    }
    for (int it = 0; it < passes; ++it)
        for (auto *s : sets)
            if (it < s->iterations) project_groups(*s, x, inverse_mass, dt, stats);
    return stats;
}

/// One time step. `provider(predicted)` returns the constraint sets to solve
/// (as a range of ConstraintSet*) built against the predicted positions.
template <typename Provider>
StepStats step(std::vector<Particle> &particles, const SolverSettings &settings,
               Provider &&provider) {
    settings.validate();
    const double dt = settings.dt;
    std::vector<Vec3> x = predict_positions(particles, dt, settings.gravity);
    const std::vector<double> w = inverse_masses_of(particles);
    auto sets = provider(std::span<const Vec3>(x));
    const StepStats stats = solve(std::span<ConstraintSet *const>(sets.data(), sets.size()), x, w, dt);

    for (std::size_t i = 0; i < particles.size(); ++i) {
        if (!x[i].finite())
            throw NonFiniteError("non-finite position for particle " + std::to_string(i), particles, i);
    }
    for (std::size_t i = 0; i < particles.size(); ++i) {
        auto &p = particles[i];
        p.velocity = (x[i] - p.position) / dt;
        p.position = x[i];
    }
    return stats;
}

}  // namespace splatdyn::xpbd
