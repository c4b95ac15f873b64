// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Scene configuration: a versioned JSON document, validated on load. Every
// optional value has a default, and scene_to_json writes the fully resolved
// configuration back out so a run can be reproduced from its manifest.

#pragma once

#include <splatdyn/fluid/density.hpp>
#include <splatdyn/fluid/params.hpp>
#include <splatdyn/render/camera.hpp>
#include <splatdyn/render/fluid_render.hpp>
#include <splatdyn/render/foam.hpp>
#include <splatdyn/render/shadow.hpp>
#include <splatdyn/solid/constraints.hpp>
#include <splatdyn/xpbd/solver.hpp>

#include <json.hpp>

#include <array>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace splatdyn::scene {

using Json = nlohmann::ordered_json;

inline constexpr int kSceneVersion = 1;

/// Load failure; the message starts with the dotted path of the field.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string &field, const std::string &why)
        : std::runtime_error(field + ": " + why), field_(field) {}
    const std::string &field() const { return field_; }

private:
    std::string field_;
};

struct FluidBlock {
    Vec3 origin;                   // corner of the block; particles sit at origin + (i + 1/2) spacing
    std::array<int, 3> dims{1, 1, 1};
    double spacing = 0.05;
    Vec3 velocity;
};

struct BodyConfig {
    std::string name;
    std::string mesh;              // absolute path after load
    solid::BodyMode mode = solid::BodyMode::Rigid;
    double compliance = 0.0;
    double scale = 1.0;
    Vec3 offset;
    double sample_radius = 0.05;
    double density = 1000.0;
    Vec3 velocity;
    bool fixed = false;
    std::string kernels;           // optional asset in mesh coordinates; empty: one kernel per particle
    Vec3 color{0.6, 0.6, 0.6};     // auto kernels
    double opacity = 0.9;          // auto kernels
};

struct CameraConfig {
    std::string id;
    Vec3 eye{0, 0, 2};
    Vec3 target;
    Vec3 up{0, 1, 0};
    double fov = 45.0;  // degrees, vertical
    int width = 320;
    int height = 240;

    render::Camera camera() const { return render::look_at(eye, target, up, fov, width, height); }
};

/// Shadow-casting light. Directional lights use an orthographic view of
/// the given half height; point lights a perspective one. The light image
/// has the size of the camera being rendered.
struct LightConfig {
    Vec3 eye{0, 3, 0};
    Vec3 target;
    Vec3 up{0, 0, -1};
    bool directional = true;
    double half_height = 1.0;
    double fov = 60.0;

    render::Camera camera(int width, int height) const {
        return directional ? render::orthographic_look_at(eye, target, up, half_height, width, height)
                           : render::look_at(eye, target, up, fov, width, height);
    }
};

struct RenderConfig {
    bool shadows = true;
    bool foam = true;
    render::FluidRenderParams fluid;
    render::ShadowParams shadow;
    render::FoamSplatParams foam_splat;
};

struct SceneConfig {
    int version = kSceneVersion;
    std::string base_dir;  // directory relative paths were resolved against
    xpbd::SolverSettings solver;
    int steps_per_frame = 1;
    fluid::FluidParams fluid;
    double wall_weight = 0.0;  // resolved from the first block (or 2R) spacing
    std::vector<FluidBlock> blocks;
    bool has_domain = true;  // false: unbounded, no boundary planes
    Vec3 domain_min{0, 0, 0};
    Vec3 domain_max{1, 1, 1};
    bool density_walls = true;
    std::vector<BodyConfig> bodies;
    std::vector<std::string> static_kernels;
    std::vector<CameraConfig> cameras;
    std::optional<LightConfig> light;
    std::string environment;  // image path; empty: constant colour
    Vec3 environment_color{0.5, 0.5, 0.5};
    RenderConfig render;
    render::FoamParams foam;
    double anisotropy_threshold = 1.1;
    std::string output = "out";

    std::size_t fluid_particle_count() const {
        std::size_t n = 0;
        for (const auto &b : blocks) n += std::size_t(b.dims[0]) * std::size_t(b.dims[1]) * std::size_t(b.dims[2]);
        return n;
    }
    const CameraConfig &camera(const std::string &id) const {
        for (const auto &c : cameras)
            if (c.id == id) return c;
        throw ConfigError("cameras", "no camera with id '" + id + "'");
    }
};

namespace detail {

/// Typed accessors over one JSON object that remember the field path and
/// reject keys nobody asked for.
class Fields {
public:
    Fields(const Json &j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "must be an object");
    }

    std::string name(const std::string &key) const { return path_.empty() ? key : path_ + "." + key; }
    bool has(const std::string &key) {
        seen_.insert(key);
        return j_.contains(key) && !j_[key].is_null();
    }
    const Json &raw(const std::string &key) {
        seen_.insert(key);
        if (!j_.contains(key)) throw ConfigError(name(key), "missing");
        return j_[key];
    }

    double number(const std::string &key, double fallback) { return has(key) ? number(key) : fallback; }
    double number(const std::string &key) {
        const Json &v = raw(key);
        if (!v.is_number()) throw ConfigError(name(key), "must be a number");
        return v.get<double>();
    }
    int integer(const std::string &key, int fallback) {
        if (!has(key)) return fallback;
        const Json &v = raw(key);
        if (!v.is_number_integer()) throw ConfigError(name(key), "must be an integer");
        return v.get<int>();
    }
    bool boolean(const std::string &key, bool fallback) {
        if (!has(key)) return fallback;
        const Json &v = raw(key);
        if (!v.is_boolean()) throw ConfigError(name(key), "must be true or false");
        return v.get<bool>();
    }
    std::string string(const std::string &key, const std::string &fallback) { return has(key) ? string(key) : fallback; }
    std::string string(const std::string &key) {
        const Json &v = raw(key);
        if (!v.is_string()) throw ConfigError(name(key), "must be a string");
        return v.get<std::string>();
    }
    Vec3 vec3(const std::string &key, const Vec3 &fallback) { return has(key) ? vec3(key) : fallback; }
    Vec3 vec3(const std::string &key) {
        const Json &v = raw(key);
        if (!v.is_array() || v.size() != 3 || !v[0].is_number() || !v[1].is_number() || !v[2].is_number())
            throw ConfigError(name(key), "must be an array of three numbers");
        return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
    }
    Fields object(const std::string &key) { return Fields(raw(key), name(key)); }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.contains(it.key())) throw ConfigError(name(it.key()), "unknown field");
    }

private:
    const Json &j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline void require(bool ok, const std::string &field, const std::string &why) {
    if (!ok) throw ConfigError(field, why);
}

inline std::string resolve_path(const std::string &base, const std::string &p, const std::string &field) {
    namespace fs = std::filesystem;
    fs::path path(p);
    if (path.is_relative()) path = fs::path(base) / path;
    path = path.lexically_normal();
    if (!fs::exists(path)) throw ConfigError(field, "file not found: " + path.string());
    return path.string();
}

inline Json vec_json(const Vec3 &v) { return Json::array({v.x, v.y, v.z}); }

}  // namespace detail

/// Parses and validates a scene. Relative paths are resolved against base_dir.
inline SceneConfig parse_scene(const Json &root, const std::string &base_dir) {
    using detail::require;
    SceneConfig cfg;
    cfg.base_dir = base_dir;
    detail::Fields top(root, "");
    require(top.has("version"), "version", "missing");
    cfg.version = top.integer("version", 0);
    require(cfg.version == kSceneVersion, "version",
            "unsupported scene version " + std::to_string(cfg.version) + ", expected " + std::to_string(kSceneVersion));

    if (top.has("solver")) {
        auto s = top.object("solver");
        cfg.solver.dt = s.number("dt", cfg.solver.dt);
        cfg.solver.fluid_iterations = s.integer("fluid_iterations", cfg.solver.fluid_iterations);
        cfg.solver.solid_iterations = s.integer("solid_iterations", cfg.solver.solid_iterations);
        cfg.solver.gravity = s.vec3("gravity", cfg.solver.gravity);
        cfg.steps_per_frame = s.integer("steps_per_frame", cfg.steps_per_frame);
        s.finish();
    }
    require(cfg.solver.dt > 0.0, "solver.dt", "must be positive");
    require(cfg.solver.fluid_iterations >= 1, "solver.fluid_iterations", "must be at least 1");
    require(cfg.solver.solid_iterations >= 1, "solver.solid_iterations", "must be at least 1");
    require(cfg.solver.gravity.finite(), "solver.gravity", "must be finite");
    require(cfg.steps_per_frame >= 1, "solver.steps_per_frame", "must be at least 1");

    auto &fp = cfg.fluid;
    bool explicit_mass = false;
    if (top.has("fluid")) {
        auto f = top.object("fluid");
        fp.rest_density = f.number("rest_density", fp.rest_density);
        require(fp.rest_density > 0.0, "fluid.rest_density (rho0)", "must be positive");
        fp.kernel_radius = f.number("kernel_radius", fp.kernel_radius);
        fp.particle_radius = f.number("particle_radius", fp.particle_radius);
        explicit_mass = f.has("particle_mass");
        fp.particle_mass = f.number("particle_mass", fp.particle_mass);
        fp.occlusion_threshold = f.number("occlusion_threshold", fp.occlusion_threshold);
        fp.surface_update_stride = f.integer("surface_update_stride", fp.surface_update_stride);
        fp.unilateral_density = f.boolean("unilateral_density", fp.unilateral_density);
        if (f.has("tension")) {
            auto t = f.object("tension");
            fp.tension_enabled = t.boolean("enabled", fp.tension_enabled);
            fp.tension_compliance = t.number("compliance", fp.tension_compliance);
            fp.tension_distance = t.number("distance", fp.tension_distance);
            fp.hold_fans = t.boolean("hold_fans", fp.hold_fans);
            t.finish();
        }
        f.finish();
    }
    try {
        fp.validate();
    } catch (const std::invalid_argument &e) {
        // "FluidParams.field: why" -> field path under "fluid".
        std::string msg = e.what();
        const auto dot = msg.find('.'), colon = msg.find(':');
        std::string field = msg.substr(dot + 1, colon - dot - 1);
        if (field == "tension_compliance") field = "tension.compliance";
        if (field == "tension_distance") field = "tension.distance";
        throw ConfigError("fluid." + field, msg.substr(colon + 2));
    }

    if (top.has("fluid_blocks")) {
        const Json &arr = top.raw("fluid_blocks");
        require(arr.is_array(), "fluid_blocks", "must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            detail::Fields b(arr[i], "fluid_blocks[" + std::to_string(i) + "]");
            FluidBlock blk;
            blk.origin = b.vec3("origin");
            const Json &d = b.raw("dims");
            require(d.is_array() && d.size() == 3 && d[0].is_number_integer() && d[1].is_number_integer() &&
                        d[2].is_number_integer(),
                    b.name("dims"), "must be an array of three integers");
            for (int k = 0; k < 3; ++k) {
                blk.dims[k] = d[k].get<int>();
                require(blk.dims[k] >= 1, b.name("dims"), "entries must be at least 1");
            }
            blk.spacing = b.number("spacing", 2.0 * fp.particle_radius);
            require(blk.spacing > 0.0, b.name("spacing"), "must be positive");
            blk.velocity = b.vec3("velocity", {});
            b.finish();
            cfg.blocks.push_back(blk);
        }
    }
    const double spacing = cfg.blocks.empty() ? 2.0 * fp.particle_radius : cfg.blocks.front().spacing;
    if (!explicit_mass) fp.particle_mass = fluid::lattice_mass(spacing, fp.rest_density, fp.kernel_radius);

    if (top.has("domain")) {
        auto d = top.object("domain");
        cfg.domain_min = d.vec3("min");
        cfg.domain_max = d.vec3("max");
        cfg.density_walls = d.boolean("density_walls", cfg.density_walls);
        d.finish();
        const Vec3 ext = cfg.domain_max - cfg.domain_min;
        require(ext.x > 0.0 && ext.y > 0.0 && ext.z > 0.0, "domain.max", "must exceed domain.min on every axis");
    } else {
        cfg.has_domain = false;
        cfg.density_walls = false;
    }
    cfg.wall_weight = cfg.density_walls
                          ? fluid::calibrate_wall_weight(spacing, fp.mass_over_rest_density(), fp.kernel_radius)
                          : 0.0;

    if (top.has("bodies")) {
        const Json &arr = top.raw("bodies");
        require(arr.is_array(), "bodies", "must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            detail::Fields b(arr[i], "bodies[" + std::to_string(i) + "]");
            BodyConfig body;
            body.name = b.string("name", "body" + std::to_string(i));
            body.mesh = detail::resolve_path(base_dir, b.string("mesh"), b.name("mesh"));
            const std::string mode = b.string("mode", "rigid");
            require(mode == "rigid" || mode == "deformable", b.name("mode"), "must be \"rigid\" or \"deformable\"");
            body.mode = mode == "rigid" ? solid::BodyMode::Rigid : solid::BodyMode::Deformable;
            body.compliance = b.number("compliance", body.compliance);
            require(body.compliance >= 0.0, b.name("compliance"), "must be non-negative");
            body.scale = b.number("scale", body.scale);
            require(body.scale > 0.0, b.name("scale"), "must be positive");
            body.offset = b.vec3("offset", body.offset);
            body.sample_radius = b.number("sample_radius", body.sample_radius);
            require(body.sample_radius > 0.0, b.name("sample_radius"), "must be positive");
            body.density = b.number("density", body.density);
            require(body.density > 0.0, b.name("density"), "must be positive");
            body.velocity = b.vec3("velocity", body.velocity);
            body.fixed = b.boolean("fixed", body.fixed);
            if (b.has("kernels")) body.kernels = detail::resolve_path(base_dir, b.string("kernels"), b.name("kernels"));
            body.color = b.vec3("color", body.color);
            body.opacity = b.number("opacity", body.opacity);
            require(body.opacity > 0.0 && body.opacity <= 1.0, b.name("opacity"), "must lie in (0, 1]");
            b.finish();
            cfg.bodies.push_back(body);
        }
    }

    if (top.has("static_kernels")) {
        const Json &arr = top.raw("static_kernels");
        require(arr.is_array(), "static_kernels", "must be an array of paths");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const std::string field = "static_kernels[" + std::to_string(i) + "]";
            require(arr[i].is_string(), field, "must be a string");
            cfg.static_kernels.push_back(detail::resolve_path(base_dir, arr[i].get<std::string>(), field));
        }
    }

    {
        const Json &arr = top.raw("cameras");
        require(arr.is_array() && !arr.empty(), "cameras", "must be a non-empty array");
        std::set<std::string> ids;
        for (std::size_t i = 0; i < arr.size(); ++i) {
            detail::Fields c(arr[i], "cameras[" + std::to_string(i) + "]");
            CameraConfig cam;
            cam.id = c.string("id", "cam" + std::to_string(i));
            require(ids.insert(cam.id).second, c.name("id"), "duplicate camera id '" + cam.id + "'");
            cam.eye = c.vec3("eye");
            cam.target = c.vec3("target");
            cam.up = c.vec3("up", cam.up);
            cam.fov = c.number("fov", cam.fov);
            cam.width = c.integer("width", cam.width);
            cam.height = c.integer("height", cam.height);
            require(cam.width >= 1 && cam.height >= 1, c.name("width"), "image size must be positive");
            c.finish();
            try {
                (void)cam.camera();
            } catch (const std::invalid_argument &e) {
                throw ConfigError("cameras[" + std::to_string(i) + "]", e.what());
            }
            cfg.cameras.push_back(cam);
        }
    }

    if (top.has("light")) {
        auto l = top.object("light");
        LightConfig light;
        light.eye = l.vec3("eye");
        light.target = l.vec3("target");
        light.up = l.vec3("up", light.up);
        const std::string type = l.string("type", "directional");
        require(type == "directional" || type == "point", l.name("type"), "must be \"directional\" or \"point\"");
        light.directional = type == "directional";
        light.half_height = l.number("half_height", light.half_height);
        light.fov = l.number("fov", light.fov);
        l.finish();
        try {
            (void)light.camera(16, 16);
        } catch (const std::invalid_argument &e) {
            throw ConfigError("light", e.what());
        }
        cfg.light = light;
    }

    if (top.has("environment")) {
        auto e = top.object("environment");
        if (e.has("path")) cfg.environment = detail::resolve_path(base_dir, e.string("path"), e.name("path"));
        cfg.environment_color = e.vec3("color", cfg.environment_color);
        e.finish();
        const Vec3 c = cfg.environment_color;
        require(c.x >= 0.0 && c.y >= 0.0 && c.z >= 0.0, "environment.color", "must be non-negative");
    }

    auto &rc = cfg.render;
    if (top.has("render")) {
        auto r = top.object("render");
        rc.shadows = r.boolean("shadows", rc.shadows);
        rc.foam = r.boolean("foam", rc.foam);
        if (r.has("fluid")) {
            auto f = r.object("fluid");
            rc.fluid.absorption = f.vec3("absorption", rc.fluid.absorption);
            rc.fluid.distortion = f.number("distortion", rc.fluid.distortion);
            rc.fluid.specular = f.vec3("specular", rc.fluid.specular);
            rc.fluid.roughness = f.number("roughness", rc.fluid.roughness);
            f.finish();
        }
        if (r.has("shadow")) {
            auto s = r.object("shadow");
            rc.shadow.resolution_scale = s.number("resolution_scale", rc.shadow.resolution_scale);
            rc.shadow.blur_radius = s.integer("blur_radius", rc.shadow.blur_radius);
            rc.shadow.min_variance = s.number("min_variance", rc.shadow.min_variance);
            s.finish();
        }
        if (r.has("foam_splat")) {
            auto s = r.object("foam_splat");
            rc.foam_splat.radius_px = s.number("radius_px", rc.foam_splat.radius_px);
            rc.foam_splat.reference_depth = s.number("reference_depth", rc.foam_splat.reference_depth);
            rc.foam_splat.foam_weight = s.number("foam_weight", rc.foam_splat.foam_weight);
            rc.foam_splat.spray_weight = s.number("spray_weight", rc.foam_splat.spray_weight);
            rc.foam_splat.bubble_weight = s.number("bubble_weight", rc.foam_splat.bubble_weight);
            rc.foam_splat.curve = s.number("curve", rc.foam_splat.curve);
            s.finish();
        }
        r.finish();
    }
    const Vec3 k = rc.fluid.absorption;
    require(k.x >= 0.0 && k.y >= 0.0 && k.z >= 0.0, "render.fluid.absorption", "must be non-negative");
    require(rc.fluid.roughness > 0.0 && rc.fluid.roughness <= 1.0, "render.fluid.roughness", "must lie in (0, 1]");
    require(rc.shadow.resolution_scale > 0.0, "render.shadow.resolution_scale", "must be positive");
    require(rc.shadow.blur_radius >= 0, "render.shadow.blur_radius", "must be non-negative");
    require(rc.shadow.min_variance > 0.0, "render.shadow.min_variance", "must be positive");
    require(rc.foam_splat.radius_px > 0.0, "render.foam_splat.radius_px", "must be positive");
    require(rc.foam_splat.reference_depth > 0.0, "render.foam_splat.reference_depth", "must be positive");
    require(rc.foam_splat.curve > 0.0, "render.foam_splat.curve", "must be positive");
    rc.fluid.particle_radius = fp.particle_radius;

    auto &fo = cfg.foam;
    if (top.has("foam")) {
        auto f = top.object("foam");
        fo.min_speed = f.number("min_speed", fo.min_speed);
        fo.min_trapped_air = f.number("min_trapped_air", fo.min_trapped_air);
        fo.lifetime = f.number("lifetime", fo.lifetime);
        fo.spray_below = f.integer("spray_below", fo.spray_below);
        fo.bubble_above = f.integer("bubble_above", fo.bubble_above);
        const int max_particles = f.integer("max_particles", static_cast<int>(fo.max_particles));
        require(max_particles >= 0, f.name("max_particles"), "must be non-negative");
        fo.max_particles = static_cast<std::size_t>(max_particles);
        const int seed = f.integer("seed", static_cast<int>(fo.seed));
        require(seed >= 0, f.name("seed"), "must be non-negative");
        fo.seed = static_cast<std::uint64_t>(seed);
        f.finish();
    }
    require(fo.min_speed >= 0.0, "foam.min_speed", "must be non-negative");
    require(fo.lifetime > 0.0, "foam.lifetime", "must be positive");
    require(fo.spray_below <= fo.bubble_above, "foam.spray_below", "must not exceed foam.bubble_above");
    fo.kernel_radius = fp.kernel_radius;
    fo.gravity = cfg.solver.gravity;

    if (top.has("metrics")) {
        auto m = top.object("metrics");
        cfg.anisotropy_threshold = m.number("anisotropy_threshold", cfg.anisotropy_threshold);
        m.finish();
    }
    require(cfg.anisotropy_threshold > 0.0, "metrics.anisotropy_threshold", "must be positive");
    cfg.output = top.string("output", cfg.output);
    top.finish();
    require(!cfg.blocks.empty() || !cfg.bodies.empty(), "fluid_blocks", "scene has neither fluid nor bodies");
    return cfg;
}

inline SceneConfig load_scene_text(const std::string &text, const std::string &base_dir = ".") {
    Json root;
    try {
        root = Json::parse(text, nullptr, true, true);  // allow // and /* */ comments
    } catch (const Json::parse_error &e) {
        throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
    }
    return parse_scene(root, base_dir);
}

inline SceneConfig load_scene_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("<file>", "cannot open scene " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    const auto dir = std::filesystem::absolute(std::filesystem::path(path)).parent_path().lexically_normal();
    return load_scene_text(ss.str(), dir.string());
}

/// The resolved configuration, in the input schema, with every default made
/// explicit and every path absolute. Parsing it again gives the same scene.
inline Json scene_to_json(const SceneConfig &cfg) {
    using detail::vec_json;
    Json j;
    j["version"] = cfg.version;
    j["solver"] = {{"dt", cfg.solver.dt},
                   {"fluid_iterations", cfg.solver.fluid_iterations},
                   {"solid_iterations", cfg.solver.solid_iterations},
                   {"gravity", vec_json(cfg.solver.gravity)},
                   {"steps_per_frame", cfg.steps_per_frame}};
    const auto &fp = cfg.fluid;
    j["fluid"] = {{"rest_density", fp.rest_density},
                  {"kernel_radius", fp.kernel_radius},
                  {"particle_radius", fp.particle_radius},
                  {"particle_mass", fp.particle_mass},
                  {"occlusion_threshold", fp.occlusion_threshold},
                  {"surface_update_stride", fp.surface_update_stride},
                  {"unilateral_density", fp.unilateral_density},
                  {"tension",
                   {{"enabled", fp.tension_enabled},
                    {"compliance", fp.tension_compliance},
                    {"distance", fp.tension_distance},
                    {"hold_fans", fp.hold_fans}}}};
    j["fluid_blocks"] = Json::array();
    for (const auto &b : cfg.blocks)
        j["fluid_blocks"].push_back({{"origin", vec_json(b.origin)},
                                     {"dims", {b.dims[0], b.dims[1], b.dims[2]}},
                                     {"spacing", b.spacing},
                                     {"velocity", vec_json(b.velocity)}});
    if (cfg.has_domain)
        j["domain"] = {{"min", vec_json(cfg.domain_min)},
                       {"max", vec_json(cfg.domain_max)},
                       {"density_walls", cfg.density_walls}};
    j["bodies"] = Json::array();
    for (const auto &b : cfg.bodies) {
        Json o = {{"name", b.name},
                  {"mesh", b.mesh},
                  {"mode", b.mode == solid::BodyMode::Rigid ? "rigid" : "deformable"},
                  {"compliance", b.compliance},
                  {"scale", b.scale},
                  {"offset", vec_json(b.offset)},
                  {"sample_radius", b.sample_radius},
                  {"density", b.density},
                  {"velocity", vec_json(b.velocity)},
                  {"fixed", b.fixed}};
        if (!b.kernels.empty()) o["kernels"] = b.kernels;
        o["color"] = vec_json(b.color);
        o["opacity"] = b.opacity;
        j["bodies"].push_back(o);
    }
    j["static_kernels"] = cfg.static_kernels;
    j["cameras"] = Json::array();
    for (const auto &c : cfg.cameras)
        j["cameras"].push_back({{"id", c.id},
                                {"eye", vec_json(c.eye)},
                                {"target", vec_json(c.target)},
                                {"up", vec_json(c.up)},
                                {"fov", c.fov},
                                {"width", c.width},
                                {"height", c.height}});
    if (cfg.light)
        j["light"] = {{"eye", vec_json(cfg.light->eye)},
                      {"target", vec_json(cfg.light->target)},
                      {"up", vec_json(cfg.light->up)},
                      {"type", cfg.light->directional ? "directional" : "point"},
                      {"half_height", cfg.light->half_height},
                      {"fov", cfg.light->fov}};
    j["environment"] = Json::object();
    if (!cfg.environment.empty()) j["environment"]["path"] = cfg.environment;
    j["environment"]["color"] = vec_json(cfg.environment_color);
    const auto &rc = cfg.render;
    j["render"] = {{"shadows", rc.shadows},
                   {"foam", rc.foam},
                   {"fluid",
                    {{"absorption", vec_json(rc.fluid.absorption)},
                     {"distortion", rc.fluid.distortion},
                     {"specular", vec_json(rc.fluid.specular)},
                     {"roughness", rc.fluid.roughness}}},
                   {"shadow",
                    {{"resolution_scale", rc.shadow.resolution_scale},
                     {"blur_radius", rc.shadow.blur_radius},
                     {"min_variance", rc.shadow.min_variance}}},
                   {"foam_splat",
                    {{"radius_px", rc.foam_splat.radius_px},
                     {"reference_depth", rc.foam_splat.reference_depth},
                     {"foam_weight", rc.foam_splat.foam_weight},
                     {"spray_weight", rc.foam_splat.spray_weight},
                     {"bubble_weight", rc.foam_splat.bubble_weight},
                     {"curve", rc.foam_splat.curve}}}};
    const auto &fo = cfg.foam;
    j["foam"] = {{"min_speed", fo.min_speed},     {"min_trapped_air", fo.min_trapped_air},
                 {"lifetime", fo.lifetime},       {"spray_below", fo.spray_below},
                 {"bubble_above", fo.bubble_above}, {"max_particles", fo.max_particles},
                 {"seed", fo.seed}};
    j["metrics"] = {{"anisotropy_threshold", cfg.anisotropy_threshold}};
    j["output"] = cfg.output;
    return j;
}

}  // namespace splatdyn::scene
