// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Frame rendering from a dump: background, body and static kernels, fluid,
// shadows and foam, composited into one image.

#pragma once

#include <splatdyn/render/composite.hpp>
#include <splatdyn/render/envmap.hpp>
#include <splatdyn/render/fluid_render.hpp>
#include <splatdyn/render/foam.hpp>
#include <splatdyn/render/image.hpp>
#include <splatdyn/render/shadow.hpp>
#include <splatdyn/render/splat.hpp>
#include <splatdyn/scene/config.hpp>
#include <splatdyn/scene/frame.hpp>
#include <splatdyn/scene/world.hpp>

#include <stdexcept>
#include <string>
#include <vector>

namespace splatdyn::scene {

/// Everything a frame render needs besides the dump itself.
struct RenderAssets {
    render::EnvironmentMap environment;
    std::vector<render::GaussianKernel> materials;       // body kernels at rest, dump order
    std::vector<render::GaussianKernel> static_kernels;  // never move
};

inline render::EnvironmentMap load_environment(const SceneConfig &cfg) {
    if (cfg.environment.empty()) return render::EnvironmentMap(cfg.environment_color);
    return render::EnvironmentMap(render::load_image(cfg.environment));
}

inline RenderAssets make_render_assets(const World &world) {
    return {load_environment(world.config()), world.kernel_materials(), world.static_kernels()};
}

struct FrameImages {
    render::RgbImage color;
    render::ScalarImage shadow;     // light factor per pixel
    render::ScalarImage foam;       // post-curve intensity
    render::ScalarImage thickness;  // fluid
    render::ScalarImage depth;      // nearest covered layer
};

inline FrameImages render_frame(const SceneConfig &cfg, const RenderAssets &assets, const FrameDump &frame,
                                const CameraConfig &camera_config) {
    if (frame.kernels.size() != assets.materials.size())
        throw std::runtime_error("render_frame: dump has " + std::to_string(frame.kernels.size()) +
                                 " kernels, scene has " + std::to_string(assets.materials.size()));
    const render::Camera cam = camera_config.camera();
    const int w = cam.width, h = cam.height;
    FrameImages out;

    std::vector<render::GaussianKernel> solids = assets.static_kernels;
    solids.reserve(solids.size() + frame.kernels.size());
    for (std::size_t k = 0; k < frame.kernels.size(); ++k)
        solids.push_back(posed_kernel(assets.materials[k], frame.kernels[k]));

    const render::RgbImage background = render::render_background(assets.environment, cam);
    const auto solid_colors = render::shade_kernels(solids, cam, assets.environment);
    const render::SplatResult solid_layer = solids.empty() ? render::empty_layer(w, h)
                                                           : render::splat_color(solids, cam, solid_colors);
    const render::RgbImage refracted = render::over(solid_layer, background);

    std::vector<Vec3> fx, fn;
    std::vector<std::uint8_t> fs;
    for (const auto &p : frame.particles)
        if (p.phase.is_fluid()) {
            fx.push_back(p.position);
            fn.push_back(p.normal);
            fs.push_back(p.surface ? 1 : 0);
        }
    render::SplatResult fluid_layer = render::empty_layer(w, h);
    out.thickness = render::ScalarImage(w, h);
    if (!fx.empty())
        fluid_layer = render::render_fluid(fx, fs, fn, cam, assets.environment, refracted, cfg.render.fluid, &out.thickness);

    out.depth = render::front_depth(solid_layer, fluid_layer);
    out.shadow = render::ScalarImage(w, h, 1.0);
    if (cfg.render.shadows && cfg.light) {
        std::vector<render::GaussianKernel> occluders = solids;
        for (const auto &x : fx) occluders.push_back(render::spherical_kernel(x, cfg.fluid.particle_radius));
        out.shadow = render::shadow_pass(occluders, cfg.light->camera(w, h), cam, out.depth, cfg.render.shadow);
    }
    out.foam = cfg.render.foam ? render::foam_splat(frame.foam, cam, cfg.render.foam_splat) : render::ScalarImage(w, h);
    out.color = render::composite(background, solid_layer, fluid_layer, out.foam, out.shadow);
    return out;
}

}  // namespace splatdyn::scene
