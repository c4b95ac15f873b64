// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Invariant checks run by `splatdyn validate` on a freshly built scene.

#pragma once

#include <splatdyn/fluid/density.hpp>
#include <splatdyn/scene/kernel_asset.hpp>
#include <splatdyn/scene/world.hpp>

#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace splatdyn::scene {

struct CheckResult {
    std::string name;
    bool ok = true;
    std::string detail;
};

inline std::vector<CheckResult> validate_world(const World &world) {
    std::vector<CheckResult> out;
    const auto &cfg = world.config();
    const auto &ps = world.particles();
    auto add = [&](std::string name, bool ok, std::string detail) {
        out.push_back({std::move(name), ok, std::move(detail)});
    };

    {
        const std::size_t nf = world.fluid_indices().size();
        bool ok = nf == cfg.fluid_particle_count();
        std::ostringstream d;
        d << nf << " fluid";
        for (const auto &b : world.bodies()) {
            ok = ok && !b.members.empty();
            d << ", " << b.members.size() << " in '" << b.config.name << "'";
        }
        add("particle counts", ok, d.str());
    }

    if (cfg.has_domain) {
        std::size_t outside = 0;
        for (const auto &p : ps) {
            const Vec3 x = p.position;
            if (x.x < cfg.domain_min.x || x.y < cfg.domain_min.y || x.z < cfg.domain_min.z || x.x > cfg.domain_max.x ||
                x.y > cfg.domain_max.y || x.z > cfg.domain_max.z)
                ++outside;
        }
        add("inside domain", outside == 0, std::to_string(outside) + " particles outside the domain box");
    }

    {
        std::size_t bad = 0;
        std::string first;
        auto check = [&](const render::GaussianKernel &k) {
            try {
                k.validate();
            } catch (const std::invalid_argument &e) {
                if (bad++ == 0) first = e.what();
            }
        };
        for (const auto &k : world.body_kernels()) check(k);
        for (const auto &k : world.static_kernels()) check(k);
        add("kernel records", bad == 0,
            std::to_string(world.body_kernels().size()) + " body, " + std::to_string(world.static_kernels().size()) +
                " static" + (bad ? "; first error: " + first : ""));
    }

    if (!world.fluid_indices().empty()) {
        std::vector<Vec3> x;
        for (auto i : world.fluid_indices()) x.push_back(ps[i].position);
        const auto nb = fluid::find_neighbors(x, cfg.fluid.kernel_radius);
        double mean = 0.0, worst = 0.0;
        bool finite = true;
        for (std::uint32_t i = 0; i < x.size(); ++i) {
            std::vector<std::uint32_t> part{i};
            part.insert(part.end(), nb[i].begin(), nb[i].end());
            const double c = fluid::density_value(part, x, cfg.fluid.mass_over_rest_density(), cfg.fluid.kernel_radius,
                                                  world.walls());
            finite = finite && std::isfinite(c);
            mean += std::abs(c);
            worst = std::max(worst, c);
        }
        mean /= static_cast<double>(x.size());
        std::ostringstream d;
        d << "mean |C| " << mean << ", max C " << worst << " (particle mass " << cfg.fluid.particle_mass << ")";
        add("initial density", finite, d.str());
    }

    {
        // Fluid starting deep inside a body would be ejected violently.
        std::vector<Vec3> x(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) x[i] = ps[i].position;
        std::size_t deep = 0;
        if (!world.bodies().empty() && !world.fluid_indices().empty()) {
            const double reach = 2.0 * cfg.fluid.particle_radius;
            const fluid::HashGrid grid(x, reach);
            for (const auto &b : world.bodies()) {
                const double d0 = cfg.fluid.particle_radius + 0.5 * b.config.sample_radius;
                for (auto i : b.members)
                    grid.for_each_within(x[i], 0.5 * d0, [&](std::uint32_t j, double) {
                        if (ps[j].phase.is_fluid()) ++deep;
                    });
            }
        }
        add("fluid-solid overlap", deep == 0, std::to_string(deep) + " fluid particles inside half a contact distance");
    }

    for (const auto &b : world.bodies())
        add("kernel binding '" + b.config.name + "'", true,
            std::to_string(b.binding.size()) + " kernels, " + std::to_string(b.binding.fallback_count()) +
                " inverse-distance fallbacks");

    {
        std::vector<render::GaussianKernel> all = world.body_kernels();
        all.insert(all.end(), world.static_kernels().begin(), world.static_kernels().end());
        std::ostringstream d;
        if (all.empty())
            d << "no kernels";
        else
            d << "metric " << anisotropy_metric(all, cfg.anisotropy_threshold) << " at a = " << cfg.anisotropy_threshold;
        add("anisotropy", true, d.str());
    }

    for (const auto &c : cfg.cameras) {
        const auto cam = c.camera();
        std::size_t visible = 0;
        for (const auto &p : ps)
            if (const auto px = cam.project(p.position))
                if (px->x >= 0 && px->y >= 0 && px->x < cam.width && px->y < cam.height) ++visible;
        add("camera '" + c.id + "'", visible > 0 || ps.empty(),
            std::to_string(visible) + " of " + std::to_string(ps.size()) + " particles in view");
    }

    {
        World trial = world;
        trial.set_diagnostics_dir(std::filesystem::temp_directory_path().string());
        std::string detail = "positions finite after one step";
        bool ok = true;
        try {
            trial.step();
            for (const auto &p : trial.particles()) ok = ok && p.position.finite() && p.velocity.finite();
            if (!ok) detail = "non-finite state after one step";
        } catch (const std::exception &e) {
            ok = false;
            detail = e.what();
        }
        add("trial step", ok, detail);
    }
    return out;
}

}  // namespace splatdyn::scene
