// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/render/splat.hpp>

#include <algorithm>
#include <stdexcept>

namespace splatdyn::render {

/// shadow * (fluid over solids over background), then lerp toward white by
/// foam intensity. Layer colours are premultiplied by their coverage.
inline RgbImage composite(const RgbImage &background, const SplatResult &solids, const SplatResult &fluid,
                          const ScalarImage &foam, const ScalarImage &shadow) {
    const int w = background.width, h = background.height;
    if (!solids.color.same_size(w, h) || !solids.alpha.same_size(w, h) || !fluid.color.same_size(w, h) ||
        !fluid.alpha.same_size(w, h) || !foam.same_size(w, h) || !shadow.same_size(w, h))
        throw std::invalid_argument("composite: buffer dimensions differ");
    RgbImage out(w, h);
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        const Rgb under = solids.color.pixels[i] + background.pixels[i] * (1.0 - solids.alpha.pixels[i]);
        Rgb c = (fluid.color.pixels[i] + under * (1.0 - fluid.alpha.pixels[i])) * std::clamp(shadow.pixels[i], 0.0, 1.0);
        const double f = std::clamp(foam.pixels[i], 0.0, 1.0);
        c = c * (1.0 - f) + Rgb{1, 1, 1} * f;
        out.pixels[i] = {std::clamp(c.x, 0.0, 1.0), std::clamp(c.y, 0.0, 1.0), std::clamp(c.z, 0.0, 1.0)};
    }
    return out;
}

/// Solids over background, unshadowed: what the fluid refracts.
inline RgbImage over(const SplatResult &front, const RgbImage &back) {
    if (!front.color.same_size(back)) throw std::invalid_argument("over: buffer dimensions differ");
    RgbImage out(back.width, back.height);
    for (std::size_t i = 0; i < out.pixels.size(); ++i)
        out.pixels[i] = front.color.pixels[i] + back.pixels[i] * (1.0 - front.alpha.pixels[i]);
    return out;
}

/// Depth of the nearest layer with coverage at least one half; +inf elsewhere.
inline ScalarImage front_depth(const SplatResult &a, const SplatResult &b) {
    ScalarImage out(a.depth.width, a.depth.height, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < out.pixels.size(); ++i) {
        double z = std::numeric_limits<double>::infinity();
        if (a.alpha.pixels[i] >= 0.5) z = std::min(z, a.depth.pixels[i]);
        if (b.alpha.pixels[i] >= 0.5) z = std::min(z, b.depth.pixels[i]);
        out.pixels[i] = z;
    }
    return out;
}

/// Empty layer (no coverage) of the given size.
inline SplatResult empty_layer(int w, int h) {
    return {RgbImage(w, h), ScalarImage(w, h), ScalarImage(w, h, std::numeric_limits<double>::infinity())};
}

}  // namespace splatdyn::render
