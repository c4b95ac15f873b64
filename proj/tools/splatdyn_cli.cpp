// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// splatdyn sim | render | metrics | validate

#include <splatdyn/parallel.hpp>
#include <splatdyn/scene/config.hpp>
#include <splatdyn/scene/frame.hpp>
#include <splatdyn/scene/kernel_asset.hpp>
#include <splatdyn/scene/pipeline.hpp>
#include <splatdyn/scene/validate.hpp>
#include <splatdyn/scene/world.hpp>

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using namespace splatdyn;

namespace {

constexpr const char *kManifestName = "manifest.json";

std::string format_number(double v) {
    std::ostringstream s;
    s.precision(17);
    s << v;
    std::string out = s.str();
    if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
    return out;
}

int run_sim(const std::string &scene_path, int frames, std::string out_dir, bool point_clouds) {
    const auto cfg = scene::load_scene_file(scene_path);
    if (out_dir.empty()) out_dir = (fs::path(cfg.base_dir) / cfg.output).string();
    fs::create_directories(out_dir);
    scene::World world(cfg);
    world.set_diagnostics_dir(out_dir);

    scene::Json manifest;
    manifest["format"] = "splatdyn-manifest";
    manifest["version"] = 1;
    manifest["scene_file"] = fs::absolute(scene_path).lexically_normal().string();
    manifest["scene"] = scene::scene_to_json(cfg);
    manifest["particles"] = world.particles().size();
    manifest["fluid_particles"] = world.fluid_indices().size();
    manifest["body_kernels"] = world.body_kernels().size();
    manifest["static_kernels"] = world.static_kernels().size();
    manifest["frame_layout"] = {{"header_bytes", scene::kFrameHeaderBytes},
                                {"particle_bytes", scene::kParticleRecordBytes},
                                {"foam_bytes", scene::kFoamRecordBytes},
                                {"kernel_bytes", scene::kKernelRecordBytes},
                                {"version", scene::kFrameVersion}};
    manifest["frames"] = scene::Json::array();

    const auto t0 = std::chrono::steady_clock::now();
    for (int f = 0; f < frames; ++f) {
        world.advance_frame();
        auto dump = world.snapshot();
        dump.frame = static_cast<std::uint64_t>(f);
        const std::string name = scene::frame_file_name(dump.frame);
        scene::dump_frame((fs::path(out_dir) / name).string(), dump);
        if (point_clouds) {
            std::ofstream pc(fs::path(out_dir) / (name.substr(0, name.size() - 5) + ".xyz"));
            scene::export_point_cloud(pc, dump);
        }
        manifest["frames"].push_back(name);
        std::clog << "frame " << f + 1 << "/" << frames << ": " << dump.foam.size() << " foam particles\n";
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::ofstream(fs::path(out_dir) / kManifestName) << manifest.dump(2) << '\n';
    std::cout << "wrote " << frames << " frames to " << out_dir << " in " << secs << " s\n";
    return 0;
}

int run_render(const std::string &dir, std::string camera_id, std::string out_dir) {
    std::ifstream in(fs::path(dir) / kManifestName);
    if (!in) throw std::runtime_error("no " + std::string(kManifestName) + " in " + dir);
    const auto manifest = scene::Json::parse(in);
    const auto cfg = scene::parse_scene(manifest.at("scene"), dir);
    if (camera_id.empty()) camera_id = cfg.cameras.front().id;
    const auto &camera = cfg.camera(camera_id);
    if (out_dir.empty()) out_dir = dir;
    fs::create_directories(out_dir);

    const scene::World world(cfg);
    const auto assets = scene::make_render_assets(world);
    int count = 0;
    for (const auto &name : manifest.at("frames")) {
        const std::string file = name.get<std::string>();
        const auto dump = scene::load_frame((fs::path(dir) / file).string());
        const auto images = scene::render_frame(cfg, assets, dump, camera);
        const std::string stem = file.substr(0, file.rfind('.'));
        render::write_ppm((fs::path(out_dir) / (stem + "_" + camera_id + ".ppm")).string(), images.color);
        ++count;
    }
    std::cout << "rendered " << count << " frames from camera '" << camera_id << "' to " << out_dir << '\n';
    return 0;
}

int run_metrics(const std::string &path, double a) {
    const auto kernels = scene::load_kernel_asset(path);
    std::cout << format_number(scene::anisotropy_metric(kernels, a)) << '\n';
    return 0;
}

int run_validate(const std::string &scene_path) {
    const auto cfg = scene::load_scene_file(scene_path);
    const scene::World world(cfg);
    bool ok = true;
    for (const auto &c : scene::validate_world(world)) {
        std::cout << (c.ok ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.ok;
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char **argv) {
    configure_threads_from_env();
    CLI::App app{"splatdyn: particle fluids and solids rendered with Gaussian splats"};
    app.require_subcommand(1);

    std::string scene_path, dir, out, camera, kernels;
    int frames = 1;
    double aniso = 1.1;
    bool point_clouds = false;

    auto *sim = app.add_subcommand("sim", "simulate a scene and write frame dumps plus a manifest");
    sim->add_option("scene", scene_path, "scene JSON")->required()->check(CLI::ExistingFile);
    sim->add_option("--frames", frames, "number of frames")->check(CLI::PositiveNumber);
    sim->add_option("--out", out, "output directory (default: the scene's \"output\")");
    sim->add_flag("--point-cloud", point_clouds, "also write an ASCII .xyz per frame");

    auto *ren = app.add_subcommand("render", "render the dumps of a sim output directory to PPM");
    ren->add_option("dir", dir, "directory written by sim")->required()->check(CLI::ExistingDirectory);
    ren->add_option("--camera", camera, "camera id (default: the first camera)");
    ren->add_option("--out", out, "image directory (default: dir)");

    auto *met = app.add_subcommand("metrics", "print the kernel anisotropy metric of an asset");
    met->add_option("kernels", kernels, "kernel asset")->required()->check(CLI::ExistingFile);
    met->add_option("--aniso", aniso, "axis-ratio threshold a")->check(CLI::PositiveNumber);

    auto *val = app.add_subcommand("validate", "build a scene and run the invariant checks");
    val->add_option("scene", scene_path, "scene JSON")->required()->check(CLI::ExistingFile);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return e.get_exit_code() != 0 ? e.get_exit_code() : 2;
    }

    try {
        if (*sim) return run_sim(scene_path, frames, out, point_clouds);
        if (*ren) return run_render(dir, camera, out);
        if (*met) return run_metrics(kernels, aniso);
        if (*val) return run_validate(scene_path);
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
