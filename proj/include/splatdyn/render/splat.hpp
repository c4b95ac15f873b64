// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Kernel projection, shading and tile-based rasterization.

#pragma once

#include <splatdyn/render/camera.hpp>
#include <splatdyn/render/envmap.hpp>
#include <splatdyn/render/image.hpp>
#include <splatdyn/render/kernel.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace splatdyn::render {

inline constexpr int kTileSize = 16;
inline constexpr double kCutoffSigma = 3.0;
// Early exit only once the remaining contributions are at rounding level, so
// the front-to-back sum matches the full product formula.
inline constexpr double kMinTransmittance = 1e-14;

struct ProjectedKernel {
    Vec2 mean;                   // pixel coordinates
    double cxx = 0, cxy = 0, cyy = 0;  // 2D covariance, pixels^2
    double ixx = 0, ixy = 0, iyy = 0;  // its inverse
    double depth = 0;            // camera-space z
    std::uint32_t index = 0;     // position in the input kernel list

    /// Gaussian falloff at pixel coordinate p; 0 beyond the cutoff ellipse.
    double falloff(double px, double py) const {
        const double dx = px - mean.x, dy = py - mean.y;
        const double m = dx * (ixx * dx + 2.0 * ixy * dy) + iyy * dy * dy;
        if (!(m <= kCutoffSigma * kCutoffSigma)) return 0.0;
        return std::exp(-0.5 * m);
    }
};

/// EWA projection: covariance J W A W^T J^T with the perspective Jacobian
/// J taken at the kernel centre. nullopt when the centre is not in front of
/// the near plane.
inline std::optional<ProjectedKernel> project_kernel(const GaussianKernel &k, const Camera &cam,
                                                     std::uint32_t index = 0) {
    const Vec3 t = cam.to_camera(k.center);
    const auto mean = cam.project_camera(t);
    if (!mean) return std::nullopt;
    const Mat3 a = cam.rotation * k.covariance() * cam.rotation.transposed();
    // Rows of J (the third row is irrelevant for the 2D footprint).
    Vec3 j0{cam.fx, 0.0, 0.0}, j1{0.0, cam.fy, 0.0};
    if (!cam.orthographic) {
        j0 = Vec3{cam.fx / t.z, 0.0, -cam.fx * t.x / (t.z * t.z)};
        j1 = Vec3{0.0, cam.fy / t.z, -cam.fy * t.y / (t.z * t.z)};
    }
    ProjectedKernel p;
    p.mean = *mean;
    p.cxx = j0.dot(a * j0);
    p.cxy = j0.dot(a * j1);
    p.cyy = j1.dot(a * j1);
    const double det = p.cxx * p.cyy - p.cxy * p.cxy;
    if (!(det > 0.0) || !std::isfinite(det)) return std::nullopt;
    p.ixx = p.cyy / det;
    p.ixy = -p.cxy / det;
    p.iyy = p.cxx / det;
    p.depth = t.z;
    p.index = index;
    return p;
}

/// c = d + s * L(reflect(view, n), roughness), clamped to [0, 1].
inline Rgb shade_kernel(const GaussianKernel &k, const Vec3 &view_dir, const EnvironmentMap &env) {
    Rgb c = k.diffuse;
    if (k.specular.x != 0.0 || k.specular.y != 0.0 || k.specular.z != 0.0) {
        const Vec3 r = view_dir - k.normal * (2.0 * view_dir.dot(k.normal));
        c += k.specular.cwise(env.sample(r, k.roughness));
    }
    return {std::clamp(c.x, 0.0, 1.0), std::clamp(c.y, 0.0, 1.0), std::clamp(c.z, 0.0, 1.0)};
}

inline std::vector<Rgb> shade_kernels(std::span<const GaussianKernel> kernels, const Camera &cam,
                                      const EnvironmentMap &env) {
    std::vector<Rgb> out(kernels.size());
    const long n = static_cast<long>(kernels.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (long i = 0; i < n; ++i) {
        const auto &k = kernels[static_cast<std::size_t>(i)];
        out[static_cast<std::size_t>(i)] = shade_kernel(k, cam.view_direction(k.center), env);
    }
    return out;
}

/// Premultiplied colour, coverage (1 - transmittance) and expected depth.
/// Uncovered pixels have depth = +inf.
struct SplatResult {
    RgbImage color;
    ScalarImage alpha;
    ScalarImage depth;
};

namespace detail {

/// Projects every kernel; skips those behind the camera or with no footprint on screen.
inline std::vector<ProjectedKernel> project_all(std::span<const GaussianKernel> kernels, const Camera &cam) {
    std::vector<std::optional<ProjectedKernel>> tmp(kernels.size());
    const long n = static_cast<long>(kernels.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (long i = 0; i < n; ++i) {
        auto p = project_kernel(kernels[static_cast<std::size_t>(i)], cam, static_cast<std::uint32_t>(i));
        if (p) {
            const double rx = kCutoffSigma * std::sqrt(p->cxx), ry = kCutoffSigma * std::sqrt(p->cyy);
            if (p->mean.x + rx < 0.0 || p->mean.y + ry < 0.0 || p->mean.x - rx > cam.width || p->mean.y - ry > cam.height)
                p.reset();
        }
        tmp[static_cast<std::size_t>(i)] = p;
    }
    std::vector<ProjectedKernel> out;
    out.reserve(kernels.size());
    for (const auto &p : tmp)
        if (p) out.push_back(*p);
    return out;
}

/// Per-tile lists of positions into `ordered`, preserving its order.
inline std::vector<std::vector<std::uint32_t>> bin_tiles(std::span<const ProjectedKernel> ordered, int width,
                                                          int height, int &tiles_x) {
    tiles_x = (width + kTileSize - 1) / kTileSize;
    const int tiles_y = (height + kTileSize - 1) / kTileSize;
    std::vector<std::vector<std::uint32_t>> bins(std::size_t(tiles_x) * std::size_t(tiles_y));
    for (std::size_t s = 0; s < ordered.size(); ++s) {
        const auto &p = ordered[s];
        const double rx = kCutoffSigma * std::sqrt(p.cxx), ry = kCutoffSigma * std::sqrt(p.cyy);
        const int x0 = std::max(0, static_cast<int>(std::floor((p.mean.x - rx) / kTileSize)));
        const int x1 = std::min(tiles_x - 1, static_cast<int>(std::floor((p.mean.x + rx) / kTileSize)));
        const int y0 = std::max(0, static_cast<int>(std::floor((p.mean.y - ry) / kTileSize)));
        const int y1 = std::min(tiles_y - 1, static_cast<int>(std::floor((p.mean.y + ry) / kTileSize)));
        for (int ty = y0; ty <= y1; ++ty)
            for (int tx = x0; tx <= x1; ++tx) bins[std::size_t(ty) * std::size_t(tiles_x) + std::size_t(tx)].push_back(static_cast<std::uint32_t>(s));
    }
    return bins;
}

/// Calls fn(tile, x0, y0, x1, y1) for every tile, in parallel.
template <typename Fn>
void for_each_tile(int width, int height, Fn &&fn) {
    const int tiles_x = (width + kTileSize - 1) / kTileSize;
    const int tiles_y = (height + kTileSize - 1) / kTileSize;
    const long count = long(tiles_x) * long(tiles_y);
#pragma omp parallel for schedule(dynamic, 4)
    for (long t = 0; t < count; ++t) {
        const int tx = static_cast<int>(t % tiles_x), ty = static_cast<int>(t / tiles_x);
        fn(static_cast<std::size_t>(t), tx * kTileSize, ty * kTileSize, std::min(width, (tx + 1) * kTileSize),
           std::min(height, (ty + 1) * kTileSize));
    }
}

}  // namespace detail

/// Depth-ordered alpha compositing, c = sum_k c_k a_k prod_{j<k} (1 - a_j)
/// with a_k = G_k opacity_k. Kernels are sorted by centre depth, ties by index.
inline SplatResult splat_color(std::span<const GaussianKernel> kernels, const Camera &cam,
                               std::span<const Rgb> colors) {
    if (colors.size() != kernels.size()) throw std::invalid_argument("splat_color: one colour per kernel required");
    cam.validate();
    auto ordered = detail::project_all(kernels, cam);
    std::sort(ordered.begin(), ordered.end(), [](const ProjectedKernel &a, const ProjectedKernel &b) {
        return std::tie(a.depth, a.index) < std::tie(b.depth, b.index);
    });
    int tiles_x = 0;
    const auto bins = detail::bin_tiles(ordered, cam.width, cam.height, tiles_x);

    SplatResult out{RgbImage(cam.width, cam.height), ScalarImage(cam.width, cam.height),
                    ScalarImage(cam.width, cam.height, std::numeric_limits<double>::infinity())};
    detail::for_each_tile(cam.width, cam.height, [&](std::size_t tile, int x0, int y0, int x1, int y1) {
        const auto &bin = bins[tile];
        if (bin.empty()) return;
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) {
                const double px = x + 0.5, py = y + 0.5;
                double T = 1.0, z = 0.0;
                Rgb c{};
                for (auto s : bin) {
                    const auto &p = ordered[s];
                    const double g = p.falloff(px, py);
                    if (g == 0.0) continue;
                    const double a = g * kernels[p.index].opacity;
                    if (a <= 0.0) continue;
                    c += colors[p.index] * (a * T);
                    z += p.depth * (a * T);
                    T *= 1.0 - a;
                    if (T < kMinTransmittance) break;
                }
                out.color(x, y) = c;
                out.alpha(x, y) = 1.0 - T;
                if (T < 1.0) out.depth(x, y) = z / (1.0 - T);
            }
    });
    return out;
}

/// Additive splat: out(i) = sum_k G_k(i) weight_k. Contributions are summed
/// in an order fixed by kernel content, so the result does not depend on the
/// order of the input list.
inline ScalarImage splat_additive(std::span<const GaussianKernel> kernels, const Camera &cam,
                                  std::span<const double> weights) {
    if (weights.size() != kernels.size()) throw std::invalid_argument("splat_additive: one weight per kernel required");
    cam.validate();
    auto ordered = detail::project_all(kernels, cam);
    auto key = [&](const ProjectedKernel &p) {
        return std::make_tuple(p.depth, p.mean.x, p.mean.y, p.cxx, p.cxy, p.cyy, weights[p.index]);
    };
    std::sort(ordered.begin(), ordered.end(),
              [&](const ProjectedKernel &a, const ProjectedKernel &b) { return key(a) < key(b); });
    int tiles_x = 0;
    const auto bins = detail::bin_tiles(ordered, cam.width, cam.height, tiles_x);
    ScalarImage out(cam.width, cam.height);
    detail::for_each_tile(cam.width, cam.height, [&](std::size_t tile, int x0, int y0, int x1, int y1) {
        const auto &bin = bins[tile];
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) {
                double sum = 0.0;
                for (auto s : bin) {
                    const auto &p = ordered[s];
                    const double g = p.falloff(x + 0.5, y + 0.5);
                    if (g != 0.0) sum += g * weights[p.index];
                }
                out(x, y) = sum;
            }
    });
    return out;
}

/// Fluid thickness: each kernel adds G times the particle diameter.
inline ScalarImage splat_thickness(std::span<const GaussianKernel> kernels, const Camera &cam,
                                   double particle_radius) {
    const std::vector<double> w(kernels.size(), 2.0 * particle_radius);
    return splat_additive(kernels, cam, w);
}

/// Per-pixel background by environment lookup along each viewing ray.
inline RgbImage render_background(const EnvironmentMap &env, const Camera &cam) {
    RgbImage out(cam.width, cam.height);
    for (int y = 0; y < cam.height; ++y)
        for (int x = 0; x < cam.width; ++x) out(x, y) = env.sample(cam.ray_direction(x + 0.5, y + 0.5), 0.0);
    return out;
}

}  // namespace splatdyn::render
