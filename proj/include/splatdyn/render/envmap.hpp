// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Equirectangular environment map with a box-filtered mip chain. World +y is
// up; the image centre column looks along -z.

#pragma once

#include <splatdyn/render/image.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace splatdyn::render {

class EnvironmentMap {
public:
    EnvironmentMap() : EnvironmentMap(Rgb{0, 0, 0}) {}
    explicit EnvironmentMap(const Rgb &constant) { levels_.push_back(RgbImage(1, 1, constant)); }

    /// Mip 0 is the source; each further level averages 2 x 2 blocks down to 1 x 1.
    explicit EnvironmentMap(RgbImage source) {
        if (source.empty()) throw std::invalid_argument("EnvironmentMap: empty image");
        for (const auto &p : source.pixels)
            if (!p.finite() || p.x < 0.0 || p.y < 0.0 || p.z < 0.0)
                throw std::invalid_argument("EnvironmentMap: radiance must be finite and non-negative");
        levels_.push_back(std::move(source));
        while (levels_.back().width > 1 || levels_.back().height > 1) {
            const RgbImage &s = levels_.back();
            RgbImage d(std::max(1, s.width / 2), std::max(1, s.height / 2));
            for (int y = 0; y < d.height; ++y)
                for (int x = 0; x < d.width; ++x)
                    d(x, y) = (s.clamped(2 * x, 2 * y) + s.clamped(2 * x + 1, 2 * y) + s.clamped(2 * x, 2 * y + 1) +
                               s.clamped(2 * x + 1, 2 * y + 1)) *
                              0.25;
            levels_.push_back(std::move(d));
        }
    }

    std::size_t level_count() const { return levels_.size(); }
    const RgbImage &level(std::size_t i) const { return levels_.at(i); }

    /// Radiance along direction d at mip position roughness * (levels - 1),
    /// interpolated between the two nearest levels.
    Rgb sample(const Vec3 &d, double roughness) const {
        const Vec3 n = d.normalized();
        const double u = 0.5 + std::atan2(n.x, -n.z) / (2.0 * std::numbers::pi);
        const double v = std::acos(std::clamp(n.y, -1.0, 1.0)) / std::numbers::pi;
        const double m = std::clamp(roughness, 0.0, 1.0) * static_cast<double>(levels_.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(m));
        const std::size_t hi = std::min(lo + 1, levels_.size() - 1);
        const double t = m - static_cast<double>(lo);
        const Rgb a = lookup(levels_[lo], u, v);
        return t > 0.0 ? a * (1.0 - t) + lookup(levels_[hi], u, v) * t : a;
    }

private:
    // Bilinear, wrapping horizontally and clamping vertically.
    static Rgb lookup(const RgbImage &img, double u, double v) {
        const double fx = u * img.width - 0.5, fy = v * img.height - 0.5;
        const double x0 = std::floor(fx), y0 = std::floor(fy);
        const double tx = fx - x0, ty = fy - y0;
        auto wrap = [&](long x) { return static_cast<int>(((x % img.width) + img.width) % img.width); };
        const int xa = wrap(static_cast<long>(x0)), xb = wrap(static_cast<long>(x0) + 1);
        const int ya = static_cast<int>(y0), yb = ya + 1;
        return (img.clamped(xa, ya) * (1.0 - tx) + img.clamped(xb, ya) * tx) * (1.0 - ty) +
               (img.clamped(xa, yb) * (1.0 - tx) + img.clamped(xb, yb) * tx) * ty;
    }

    std::vector<RgbImage> levels_;
};

}  // namespace splatdyn::render
