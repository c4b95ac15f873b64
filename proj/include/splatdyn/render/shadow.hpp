// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Variance shadow maps: depth moments splatted from the light, box-blurred,
// and tested with the one-sided Chebyshev bound.

#pragma once

#include <splatdyn/render/splat.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

namespace splatdyn::render {

struct ShadowParams {
    double resolution_scale = 3.0;  // light map size relative to the main image
    int blur_radius = 2;            // box half-width in light-map pixels (5 x 5)
    double min_variance = 1e-5;     // world units^2; keeps lit surfaces from self-shadowing
};

/// First and second depth moments as seen from the light, after blurring.
/// Uncovered texels take the far depth so they never occlude.
struct ShadowMap {
    Camera light;
    ScalarImage mean;
    ScalarImage second;
};

inline ShadowMap build_shadow_map(std::span<const GaussianKernel> occluders, const Camera &light,
                                  const ShadowParams &params = {}) {
    ShadowMap sm;
    sm.light = light.scaled(params.resolution_scale);
    const Camera &lc = sm.light;
    std::vector<Rgb> moments(occluders.size());
    double far = 1.0;
    for (std::size_t i = 0; i < occluders.size(); ++i) {
        const double z = lc.to_camera(occluders[i].center).z;
        moments[i] = {z, z * z, 0.0};
        far = std::max(far, 2.0 * std::abs(z));
    }
    const auto splat = splat_color(occluders, lc, moments);
    ScalarImage m1(lc.width, lc.height), m2(lc.width, lc.height);
    for (std::size_t p = 0; p < m1.pixels.size(); ++p) {
        // Mix the normalized occluder moments with the far plane by coverage.
        const double a = splat.alpha.pixels[p];
        const double z1 = a > 0.0 ? splat.color.pixels[p].x / a : 0.0;
        const double z2 = a > 0.0 ? splat.color.pixels[p].y / a : 0.0;
        m1.pixels[p] = a * z1 + (1.0 - a) * far;
        m2.pixels[p] = a * z2 + (1.0 - a) * far * far;
    }
    // Separable box blur.
    auto blur = [&](const ScalarImage &src) {
        const int r = std::max(0, params.blur_radius);
        ScalarImage tmp(src.width, src.height), dst(src.width, src.height);
        const double inv = 1.0 / (2 * r + 1);
        for (int y = 0; y < src.height; ++y)
            for (int x = 0; x < src.width; ++x) {
                double s = 0.0;
                for (int d = -r; d <= r; ++d) s += src.clamped(x + d, y);
                tmp(x, y) = s * inv;
            }
        for (int y = 0; y < src.height; ++y)
            for (int x = 0; x < src.width; ++x) {
                double s = 0.0;
                for (int d = -r; d <= r; ++d) s += tmp.clamped(x, y + d);
                dst(x, y) = s * inv;
            }
        return dst;
    };
    sm.mean = blur(m1);
    sm.second = blur(m2);
    return sm;
}

/// Fraction of light reaching world point p, in [0, 1]. Points outside the
/// light frustum are lit.
inline double shadow_factor(const ShadowMap &sm, const Vec3 &p, double min_variance) {
    const Vec3 c = sm.light.to_camera(p);
    const auto px = sm.light.project_camera(c);
    if (!px || px->x < 0.0 || px->y < 0.0 || px->x > sm.light.width || px->y > sm.light.height) return 1.0;
    const double mu = sm.mean.bilinear(px->x, px->y);
    const double d = c.z;
    if (d <= mu) return 1.0;
    const double var = std::max(sm.second.bilinear(px->x, px->y) - mu * mu, min_variance);
    return std::clamp(var / (var + (d - mu) * (d - mu)), 0.0, 1.0);
}

/// Shadow factor for every pixel of the main view; pixels with no geometry
/// (infinite depth) are lit.
inline ScalarImage shadow_pass(std::span<const GaussianKernel> occluders, const Camera &light, const Camera &main,
                               const ScalarImage &main_depth, const ShadowParams &params = {}) {
    if (!main_depth.same_size(main.width, main.height))
        throw std::invalid_argument("shadow_pass: depth buffer does not match the camera");
    ScalarImage out(main.width, main.height, 1.0);
    if (occluders.empty()) return out;
    const ShadowMap sm = build_shadow_map(occluders, light, params);
    const long n = static_cast<long>(out.pixels.size());
#pragma omp parallel for schedule(static)
    for (long il = 0; il < n; ++il) {
        const auto i = static_cast<std::size_t>(il);
        const double z = main_depth.pixels[i];
        if (!std::isfinite(z)) continue;
        const int x = static_cast<int>(i % std::size_t(main.width)), y = static_cast<int>(i / std::size_t(main.width));
        out.pixels[i] = shadow_factor(sm, main.unproject(x + 0.5, y + 0.5, z), params.min_variance);
    }
    return out;
}

}  // namespace splatdyn::render
