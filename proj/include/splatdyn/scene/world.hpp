// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// The simulated scene: particles for fluid blocks and sampled bodies, the
// constraint sets that drive them, foam, and the body render kernels that
// follow the particles through the deformation gradient.

#pragma once

#include <splatdyn/fluid/assembly.hpp>
#include <splatdyn/log.hpp>
#include <splatdyn/render/envmap.hpp>
#include <splatdyn/render/foam.hpp>
#include <splatdyn/render/kernel.hpp>
#include <splatdyn/scene/config.hpp>
#include <splatdyn/scene/frame.hpp>
#include <splatdyn/scene/kernel_asset.hpp>
#include <splatdyn/solid/constraints.hpp>
#include <splatdyn/solid/deformation.hpp>
#include <splatdyn/solid/gmls.hpp>
#include <splatdyn/solid/mesh.hpp>
#include <splatdyn/solid/sampling.hpp>
#include <splatdyn/xpbd/solver.hpp>

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace splatdyn::scene {

struct BodyState {
    BodyConfig config;
    std::vector<std::uint32_t> members;  // global particle indices
    std::vector<Vec3> rest;              // rest positions of the members
    fluid::NeighborLists rest_neighbors; // member-local, fixed at rest
    double wls_radius = 0.0;
    solid::GmlsBinding binding;
    std::vector<render::GaussianKernel> rest_kernels;  // world space at rest
    double particle_mass = 0.0;
};

/// Kernel with the material of `material` and the transform of `pose`.
inline render::GaussianKernel posed_kernel(const render::GaussianKernel &material, const KernelPose &pose) {
    render::GaussianKernel k = material;
    k.center = pose.center;
    k.rotation = pose.rotation;
    k.scaling = pose.scaling;
    k.normal = pose.normal;
    return k;
}

inline KernelPose pose_of(const render::GaussianKernel &k) { return {k.center, k.rotation, k.scaling, k.normal}; }

class World {
public:
    explicit World(SceneConfig config) : cfg_(std::move(config)) {
        build_fluid();
        for (std::size_t b = 0; b < cfg_.bodies.size(); ++b) build_body(b);
        for (const auto &path : cfg_.static_kernels) {
            auto ks = load_kernel_asset(path);
            static_kernels_.insert(static_kernels_.end(), ks.begin(), ks.end());
        }
        fluid_set_.iterations = cfg_.solver.fluid_iterations;
        solid_set_.iterations = cfg_.solver.solid_iterations;
        contact_set_.iterations = std::max(cfg_.solver.fluid_iterations, cfg_.solver.solid_iterations);
        if (!solid_set_.constraints.empty()) solid_set_.recolor();
        if (cfg_.density_walls && cfg_.has_domain) {
            const Vec3 lo = cfg_.domain_min, hi = cfg_.domain_max;
            const double w = cfg_.wall_weight;
            walls_ = std::make_shared<const std::vector<fluid::DensityWall>>(std::vector<fluid::DensityWall>{
                {{1, 0, 0}, lo.x, w}, {{-1, 0, 0}, -hi.x, w}, {{0, 1, 0}, lo.y, w},
                {{0, -1, 0}, -hi.y, w}, {{0, 0, 1}, lo.z, w}, {{0, 0, -1}, -hi.z, w}});
        }
        kernels_.clear();
        for (const auto &b : bodies_) kernels_.insert(kernels_.end(), b.rest_kernels.begin(), b.rest_kernels.end());
    }

    const SceneConfig &config() const { return cfg_; }
    const std::vector<xpbd::Particle> &particles() const { return particles_; }
    std::vector<xpbd::Particle> &particles() { return particles_; }
    const std::vector<std::uint32_t> &fluid_indices() const { return fluid_; }
    const std::vector<BodyState> &bodies() const { return bodies_; }
    const std::vector<render::FoamParticle> &foam() const { return foam_; }
    const fluid::FluidState &fluid_state() const { return fstate_; }
    const fluid::DensityWalls &walls() const { return walls_; }
    const xpbd::ConstraintSet &solid_constraints() const { return solid_set_; }
    long long step_index() const { return step_; }
    std::uint64_t frame_index() const { return frame_; }

    /// Current body kernels, in body order.
    const std::vector<render::GaussianKernel> &body_kernels() const { return kernels_; }
    /// Body kernels at rest: the materials that frame poses are applied to.
    std::vector<render::GaussianKernel> kernel_materials() const {
        std::vector<render::GaussianKernel> out;
        for (const auto &b : bodies_) out.insert(out.end(), b.rest_kernels.begin(), b.rest_kernels.end());
        return out;
    }
    const std::vector<render::GaussianKernel> &static_kernels() const { return static_kernels_; }

    /// Directory for the diagnostic dump written when a step produces NaN.
    void set_diagnostics_dir(std::string dir) { diag_dir_ = std::move(dir); }

    /// One solver step followed by the foam update. A non-finite position
    /// leaves the state untouched, writes the pre-step state as a dump, and
    /// rethrows.
    void step() {
        try {
            xpbd::step(particles_, cfg_.solver, [&](std::span<const Vec3> x) { return build_sets(x); });
        } catch (const xpbd::NonFiniteError &e) {
            const auto path = (std::filesystem::path(diag_dir_) / ("nan_step_" + std::to_string(step_) + ".spdf"));
            FrameDump diag = make_dump(e.snapshot());
            diag.frame = frame_;
            dump_frame(path.string(), diag);
            warn(std::string(e.what()) + " at step " + std::to_string(step_) + "; state written to " + path.string());
            throw;
        }
        if (cfg_.render.foam) update_foam();
        ++step_;
    }

    /// steps_per_frame steps, then the body kernels are brought up to date.
    void advance_frame() {
        for (int s = 0; s < cfg_.steps_per_frame; ++s) step();
        update_kernels();
        ++frame_;
    }

    /// Re-evaluates every body kernel from the current particle positions.
    void update_kernels() {
        std::size_t offset = 0;
        std::size_t failed = 0;
        for (const auto &b : bodies_) {
            std::vector<Vec3> local(b.members.size());
            for (std::size_t k = 0; k < local.size(); ++k) local[k] = particles_[b.members[k]].position;
            const auto F = solid::compute_deformation_gradients(local, b.rest, b.rest_neighbors, b.wls_radius);
            const auto centers = solid::gmls_interpolate_positions(b.binding, local);
            const auto grads = solid::gmls_interpolate_gradients(b.binding, F);
            for (std::size_t k = 0; k < b.rest_kernels.size(); ++k) {
                render::GaussianKernel out;
                try {
                    out = render::deform_kernel(b.rest_kernels[k], grads[k]);
                } catch (const std::invalid_argument &) {
                    // Interpolated F lost orientation: keep the rotation only.
                    out = render::deform_kernel(b.rest_kernels[k], polar_rotation(grads[k]));
                    ++failed;
                }
                out.center = centers[k];
                kernels_[offset + k] = out;
            }
            offset += b.rest_kernels.size();
        }
        if (failed) warn(std::to_string(failed) + " body kernels with inverted interpolated F kept rotation only");
    }

    FrameDump snapshot() const {
        FrameDump f = make_dump(particles_);
        f.frame = frame_;
        return f;
    }

private:
    void build_fluid() {
        for (const auto &blk : cfg_.blocks)
            for (int i = 0; i < blk.dims[0]; ++i)
                for (int j = 0; j < blk.dims[1]; ++j)
                    for (int k = 0; k < blk.dims[2]; ++k) {
                        xpbd::Particle p;
                        p.position = blk.origin + Vec3{i + 0.5, j + 0.5, k + 0.5} * blk.spacing;
                        p.rest_position = p.position;
                        p.velocity = blk.velocity;
                        p.inverse_mass = 1.0 / cfg_.fluid.particle_mass;
                        p.phase = xpbd::Phase::fluid();
                        fluid_.push_back(static_cast<std::uint32_t>(particles_.size()));
                        radius_.push_back(cfg_.fluid.particle_radius);
                        particles_.push_back(p);
                    }
    }

    void build_body(std::size_t index) {
        BodyState b;
        b.config = cfg_.bodies[index];
        const auto &bc = b.config;
        solid::TriangleMesh mesh = solid::load_obj(bc.mesh);
        mesh.transform(bc.scale, bc.offset);
        const double volume = solid::mesh_volume(mesh);
        if (!(volume > 0.0)) throw ConfigError("bodies[" + std::to_string(index) + "].mesh", "mesh encloses no volume");
        b.rest = solid::poisson_sample_volume(mesh, bc.sample_radius);
        if (b.rest.empty())
            throw ConfigError("bodies[" + std::to_string(index) + "].sample_radius", "no samples fit inside the mesh");
        b.particle_mass = bc.density * volume / static_cast<double>(b.rest.size());
        for (const auto &x : b.rest) {
            xpbd::Particle p;
            p.position = x;
            p.rest_position = x;
            p.velocity = bc.velocity;
            p.inverse_mass = bc.fixed ? 0.0 : 1.0 / b.particle_mass;
            p.phase = xpbd::Phase::solid(static_cast<std::int32_t>(index));
            b.members.push_back(static_cast<std::uint32_t>(particles_.size()));
            radius_.push_back(0.5 * bc.sample_radius);
            particles_.push_back(p);
        }

        std::vector<Vec3> rest_all(particles_.size());
        std::vector<double> masses(particles_.size(), 0.0);
        for (std::size_t i = 0; i < particles_.size(); ++i) rest_all[i] = particles_[i].rest_position;
        for (auto m : b.members) masses[m] = b.particle_mass;
        solid::BodySpec spec;
        spec.mode = bc.mode;
        spec.compliance = bc.compliance;
        spec.sample_radius = bc.sample_radius;
        if (!bc.fixed) {
            auto cs = solid::build_solid_constraints(b.members, rest_all, masses, spec);
            for (auto &c : cs) solid_set_.constraints.push_back(std::move(c));
        }

        b.wls_radius = 2.5 * bc.sample_radius;
        b.rest_neighbors = fluid::find_neighbors(b.rest, b.wls_radius);

        if (!bc.kernels.empty()) {
            for (auto k : load_kernel_asset(bc.kernels)) {
                k.center = k.center * bc.scale + bc.offset;
                k.scaling = k.scaling * bc.scale;
                b.rest_kernels.push_back(k);
            }
        } else {
            const Vec3 c = std::accumulate(b.rest.begin(), b.rest.end(), Vec3{}) / static_cast<double>(b.rest.size());
            for (const auto &x : b.rest) {
                auto k = render::spherical_kernel(x, 0.5 * bc.sample_radius);
                k.diffuse = bc.color;
                k.opacity = bc.opacity;
                const Vec3 out = x - c;
                k.normal = out.norm() > 1e-12 ? out.normalized() : Vec3{0, 1, 0};
                b.rest_kernels.push_back(k);
            }
        }
        std::vector<Vec3> centers(b.rest_kernels.size());
        for (std::size_t k = 0; k < centers.size(); ++k) centers[k] = b.rest_kernels[k].center;
        b.binding = solid::bind_gmls(centers, b.rest, std::min<std::size_t>(8, std::max<std::size_t>(4, b.rest.size())));
        if (b.binding.fallback_count() > 0)
            warn("body '" + bc.name + "': " + std::to_string(b.binding.fallback_count()) +
                 " kernels bound with inverse-distance weights");
        bodies_.push_back(std::move(b));
    }

    std::vector<xpbd::ConstraintSet *> build_sets(std::span<const Vec3> x) {
        std::vector<xpbd::ConstraintSet *> sets;
        if (!fluid_.empty()) {
            fluid_set_.clear();
            fluid::build_fluid_constraints(fluid_, x, cfg_.fluid, step_, fstate_, fluid_set_, walls_);
            sets.push_back(&fluid_set_);
        }
        if (!solid_set_.constraints.empty()) sets.push_back(&solid_set_);
        contact_set_.clear();
        add_boundaries(x);
        add_contacts(x);
        if (!contact_set_.constraints.empty()) sets.push_back(&contact_set_);
        return sets;
    }

    /// Plane constraints keeping each particle's sphere inside the domain.
    /// Only particles within reach of a face get one.
    void add_boundaries(std::span<const Vec3> x) {
        if (!cfg_.has_domain) return;
        const Vec3 lo = cfg_.domain_min, hi = cfg_.domain_max;
        const double reach = cfg_.fluid.kernel_radius;
        for (std::uint32_t i = 0; i < x.size(); ++i) {
            if (particles_[i].pinned()) continue;
            const double r = radius_[i];
            const Vec3 p = x[i];
            auto add = [&](const Vec3 &n, double offset) {
                if (n.dot(p) - offset < reach) contact_set_.constraints.push_back(xpbd::make_plane(i, n, offset));
            };
            add({1, 0, 0}, lo.x + r);
            add({-1, 0, 0}, -(hi.x - r));
            add({0, 1, 0}, lo.y + r);
            add({0, -1, 0}, -(hi.y - r));
            add({0, 0, 1}, lo.z + r);
            add({0, 0, -1}, -(hi.z - r));
        }
    }

    /// Unilateral distances between fluid and solid particles and between
    /// particles of different bodies; the rest length is the sum of radii.
    void add_contacts(std::span<const Vec3> x) {
        if (bodies_.empty()) return;
        const double rmax = *std::max_element(radius_.begin(), radius_.end());
        const double reach = 3.0 * rmax;
        const fluid::HashGrid grid(x, reach);
        std::vector<std::uint32_t> found;
        for (const auto &b : bodies_) {
            for (auto i : b.members) {
                found.clear();
                grid.for_each_within(x[i], reach, [&](std::uint32_t j, double) {
                    const auto pj = particles_[j].phase;
                    if (pj == particles_[i].phase) return;
                    if (pj.is_solid() && j < i) return;  // solid pairs once
                    found.push_back(j);
                });
                std::sort(found.begin(), found.end());
                for (auto j : found) {
                    if (particles_[i].pinned() && particles_[j].pinned()) continue;
                    const double d0 = radius_[i] + radius_[j];
                    if ((x[i] - x[j]).norm() < 1.5 * d0)
                        contact_set_.constraints.push_back(xpbd::make_distance(i, j, d0, 0.0, true));
                }
            }
        }
    }

    void update_foam() {
        const std::size_t n = fluid_.size();
        if (n == 0) return;
        std::vector<Vec3> x(n), v(n);
        std::vector<std::uint8_t> surface(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = particles_[fluid_[i]].position;
            v[i] = particles_[fluid_[i]].velocity;
            if (i < fstate_.surface.size()) surface[i] = fstate_.surface[i].is_surface ? 1 : 0;
        }
        render::generate_foam(foam_, x, v, surface, fstate_.neighbors, cfg_.solver.dt,
                              static_cast<std::uint64_t>(step_), cfg_.foam);
        if (cfg_.has_domain) {
            // Spray leaving the tank is dropped.
            const Vec3 lo = cfg_.domain_min, hi = cfg_.domain_max;
            std::erase_if(foam_, [&](const render::FoamParticle &f) {
                const Vec3 p = f.position;
                return p.x < lo.x || p.y < lo.y || p.z < lo.z || p.x > hi.x || p.y > hi.y || p.z > hi.z;
            });
        }
    }

    FrameDump make_dump(const std::vector<xpbd::Particle> &ps) const {
        FrameDump f;
        f.particles.resize(ps.size());
        for (std::size_t i = 0; i < ps.size(); ++i) {
            auto &r = f.particles[i];
            r.position = ps[i].position;
            r.velocity = ps[i].velocity;
            r.phase = ps[i].phase;
        }
        for (std::size_t i = 0; i < fluid_.size() && i < fstate_.surface.size(); ++i) {
            const auto &s = fstate_.surface[i];
            auto &r = f.particles[fluid_[i]];
            r.surface = s.is_surface;
            if (s.has_normal) r.normal = s.normal;
        }
        f.foam = foam_;
        f.kernels.reserve(kernels_.size());
        for (const auto &k : kernels_) f.kernels.push_back(pose_of(k));
        return f;
    }

    SceneConfig cfg_;
    std::vector<xpbd::Particle> particles_;
    std::vector<double> radius_;  // collision radius per particle
    std::vector<std::uint32_t> fluid_;
    std::vector<BodyState> bodies_;
    std::vector<render::GaussianKernel> kernels_;
    std::vector<render::GaussianKernel> static_kernels_;
    std::vector<render::FoamParticle> foam_;
    fluid::FluidState fstate_;
    fluid::DensityWalls walls_;
    xpbd::ConstraintSet fluid_set_, solid_set_, contact_set_;
    long long step_ = 0;
    std::uint64_t frame_ = 0;
    std::string diag_dir_ = ".";
};

}  // namespace splatdyn::scene
