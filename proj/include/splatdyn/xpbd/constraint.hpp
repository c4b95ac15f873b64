// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/fluid/density.hpp>
#include <splatdyn/fluid/tension.hpp>
#include <splatdyn/math/linalg.hpp>
#include <splatdyn/math/vec.hpp>
#include <splatdyn/solid/shape_match.hpp>

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace splatdyn::xpbd {

enum class ConstraintKind { Distance, Density, Area, ShapeMatch, Plane };

/// C = |x_a - x_b| - rest_length. A unilateral constraint is only active
/// while C < 0 (it pushes apart, never pulls together).
struct DistancePayload {
    double rest_length = 0.0;
    bool unilateral = false;
};

/// Participants are {i, neighbours...}.
struct DensityPayload {
    double mass_over_rest_density = 0.0;
    double kernel_radius = 0.0;
    bool unilateral = true;  // active only while compressed (C > 0)
    fluid::DensityWalls walls;
};

struct AreaPayload {
    std::vector<fluid::LocalTriangle> triangles;  // indices into participants
};

struct ShapeMatchPayload {
    std::vector<Vec3> rest_offsets;  // rest position minus rest mass centroid
    std::vector<double> masses;
    Mat3 rotation = Mat3::identity();  // last fitted rotation
};

/// Unilateral half-space constraint C = normal . x - offset >= 0.
struct PlanePayload {
    Vec3 normal{0, 1, 0};
    double offset = 0.0;
};

using ConstraintPayload =
    std::variant<DistancePayload, DensityPayload, AreaPayload, ShapeMatchPayload, PlanePayload>;

struct Constraint {
    std::vector<std::uint32_t> participants;
    double compliance = 0.0;
    double lambda = 0.0;
    ConstraintPayload payload;

    ConstraintKind kind() const { return static_cast<ConstraintKind>(payload.index()); }

    void validate(std::size_t particle_count) const {
        if (!(compliance >= 0.0)) throw std::invalid_argument("Constraint: negative compliance");
        if (participants.empty()) throw std::invalid_argument("Constraint: no participants");
        for (auto p : participants)
            if (p >= particle_count)
                throw std::invalid_argument("Constraint: participant " + std::to_string(p) +
                                            " out of range");
    }
};

inline Constraint make_distance(std::uint32_t a, std::uint32_t b, double rest_length,
                                double compliance = 0.0, bool unilateral = false) {
    return {{a, b}, compliance, 0.0, DistancePayload{rest_length, unilateral}};
}

inline Constraint make_plane(std::uint32_t a, const Vec3 &normal, double offset) {
    return {{a}, 0.0, 0.0, PlanePayload{normal, offset}};
}

/// Per-thread buffers sized to the largest constraint seen.
struct ProjectionScratch {
    std::vector<Vec3> gradients;
    std::vector<Vec3> corrections;
    std::vector<Vec3> gathered;

    void resize(std::size_t n) {
        if (gradients.size() < n) {
            gradients.resize(n);
            corrections.resize(n);
            gathered.resize(n);
        }
    }
};

struct Evaluation {
    double value = 0.0;
    bool active = false;
    bool fallback_direction = false;
};

/// Evaluates C and writes dC/dx per participant into scratch.gradients.
/// Shape-match constraints refresh their stored rotation.
inline Evaluation evaluate(Constraint &c, std::span<const Vec3> x, ProjectionScratch &scratch) {
    const std::size_t n = c.participants.size();
    scratch.resize(n);
    std::span<Vec3> grads(scratch.gradients.data(), n);
    Evaluation e;
    switch (c.kind()) {
    case ConstraintKind::Distance: {
        const auto &p = std::get<DistancePayload>(c.payload);
        double dist = 0.0;
        const Vec3 dir = fluid::separation_direction(x[c.participants[0]], x[c.participants[1]],
                                                     dist, e.fallback_direction);
        e.value = dist - p.rest_length;
        e.active = p.unilateral ? e.value < 0.0 : true;
        if (!e.active) e.fallback_direction = false;
        grads[0] = dir;
        grads[1] = -dir;
        break;
    }
    case ConstraintKind::Plane: {
        const auto &p = std::get<PlanePayload>(c.payload);
        e.value = p.normal.dot(x[c.participants[0]]) - p.offset;
        e.active = e.value < 0.0;
        grads[0] = p.normal;
        break;
    }
    case ConstraintKind::Density: {
        const auto &p = std::get<DensityPayload>(c.payload);
        e.value = fluid::density_value_and_gradients(c.participants, x, p.mass_over_rest_density,
                                                     p.kernel_radius, grads, p.walls);
        e.active = p.unilateral ? e.value > 0.0 : true;
        break;
    }
    case ConstraintKind::Area: {
        const auto &p = std::get<AreaPayload>(c.payload);
        e.value = fluid::area_value_and_gradients(c.participants, p.triangles, x, grads);
        e.active = e.value > 0.0;
        break;
    }
    case ConstraintKind::ShapeMatch: {
        auto &p = std::get<ShapeMatchPayload>(c.payload);
        std::span<Vec3> current(scratch.gathered.data(), n);
        for (std::size_t k = 0; k < n; ++k) current[k] = x[c.participants[k]];
        const auto fit = solid::fit_shape(current, p.rest_offsets, p.masses, p.rotation);
        p.rotation = fit.rotation;
        double sum = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const Vec3 d = current[k] - (fit.rotation * p.rest_offsets[k] + fit.centroid);
            grads[k] = d * p.masses[k];
            sum += p.masses[k] * d.squared_norm();
        }
        e.value = std::sqrt(sum);
        e.active = e.value > 0.0;
        if (e.active)
            for (std::size_t k = 0; k < n; ++k) grads[k] = grads[k] / e.value;
        break;
    }
    }
    return e;
}

struct ProjectionResult {
    double delta_lambda = 0.0;
    bool active = false;
    bool degenerate = false;
    bool fallback_direction = false;
};

/// One XPBD projection of a single constraint:
///   dlambda = (-dt^2 C - alpha lambda) / (dt^2 grad C M^-1 grad C^T + alpha)
///   dx      = M^-1 grad C^T dlambda
/// Accumulates lambda and leaves dx per participant in scratch.corrections
/// (zero when inactive or degenerate). Positions are not modified.
inline ProjectionResult project_constraint(Constraint &c, std::span<const Vec3> x,
                                           std::span<const double> inverse_mass, double dt,
                                           ProjectionScratch &scratch) {
    const std::size_t n = c.participants.size();
    scratch.resize(n);
    for (std::size_t k = 0; k < n; ++k) scratch.corrections[k] = {};

    ProjectionResult r;
    const Evaluation e = evaluate(c, x, scratch);
    r.fallback_direction = e.fallback_direction;
    if (!e.active) return r;
    r.active = true;

    const double dt2 = dt * dt;
    double weight = 0.0;
    for (std::size_t k = 0; k < n; ++k)
        weight += inverse_mass[c.participants[k]] * scratch.gradients[k].squared_norm();
    const double denom = dt2 * weight + c.compliance;
    if (!(denom > 0.0) || !std::isfinite(denom)) {
        r.degenerate = true;
        return r;
    }
    r.delta_lambda = (-dt2 * e.value - c.compliance * c.lambda) / denom;
    c.lambda += r.delta_lambda;
    for (std::size_t k = 0; k < n; ++k)
        scratch.corrections[k] =
            scratch.gradients[k] * (inverse_mass[c.participants[k]] * r.delta_lambda);
    return r;
}

/// Constraint value only (positions unchanged). Shape-match rotation is updated.
inline double constraint_value(Constraint &c, std::span<const Vec3> x) {
    ProjectionScratch scratch;
    return evaluate(c, x, scratch).value;
}

}  // namespace splatdyn::xpbd
