// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace splatdyn::fluid {

/// Angular half-extent of a neighbour's footprint on the occlusion screen.
enum class OcclusionExtent {
    /// atan(R / sqrt(|dp|^2 - R^2)): half-angle of the cone subtended by a sphere.
    Tangent,
    /// atan(R / (|dp|^2 - R^2)), kept for comparison (mixes length units).
    Printed,
};

/// How the azimuthal half-width of a footprint is chosen.
enum class AzimuthExtent {
    /// Width of the spherical cap in azimuth: asin(sin(dtheta) / cos(theta)),
    /// full circle when the cap contains a pole.
    SphericalCap,
    /// dphi = dtheta.
    EqualToPolar,
};

struct FluidParams {
    double rest_density = 1000.0;
    double kernel_radius = 0.1;
    double particle_mass = 0.125;
    double particle_radius = 0.025;
    double tension_distance = 0.05;
    double occlusion_threshold = 0.8;
    int surface_update_stride = 2;
    double tension_compliance = 0.0;
    bool tension_enabled = true;
    bool unilateral_density = true;
    bool hold_fans = false;  // reuse triangle fans until the next surface update
    OcclusionExtent occlusion_extent = OcclusionExtent::Tangent;
    AzimuthExtent azimuth_extent = AzimuthExtent::SphericalCap;

    double mass_over_rest_density() const { return particle_mass / rest_density; }

    void validate() const {
        auto fail = [](const std::string &field, const std::string &why) {
            throw std::invalid_argument("FluidParams." + field + ": " + why);
        };
        if (!(rest_density > 0.0)) fail("rest_density", "must be positive");
        if (!(kernel_radius > 0.0)) fail("kernel_radius", "must be positive");
        if (!(particle_mass > 0.0)) fail("particle_mass", "must be positive");
        if (!(particle_radius > 0.0)) fail("particle_radius", "must be positive");
        if (!(particle_radius < kernel_radius)) fail("particle_radius", "must be below kernel_radius");
        if (!(tension_distance > 0.0)) fail("tension_distance", "must be positive");
        if (!(tension_distance <= kernel_radius)) fail("tension_distance", "must not exceed kernel_radius");
        // 0 disables surface detection entirely.
        if (!(occlusion_threshold >= 0.0 && occlusion_threshold < 1.0))
            fail("occlusion_threshold", "must lie in [0, 1)");
        if (surface_update_stride < 1) fail("surface_update_stride", "must be at least 1");
        if (!(tension_compliance >= 0.0)) fail("tension_compliance", "must be non-negative");
    }
};

}  // namespace splatdyn::fluid
