// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#include <splatdyn/scene/config.hpp>
#include <splatdyn/scene/frame.hpp>
#include <splatdyn/scene/kernel_asset.hpp>
#include <splatdyn/scene/pipeline.hpp>
#include <splatdyn/scene/validate.hpp>
#include <splatdyn/scene/world.hpp>
#include <splatdyn/solid/mesh.hpp>

#include <splatdyn/log.hpp>

#include <gtest/gtest.h>

#include <unistd.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace splatdyn;
using namespace splatdyn::scene;
namespace fs = std::filesystem;

namespace {

struct SilenceWarnings {
    std::vector<std::string> seen;
    WarningSink previous;
    SilenceWarnings() {
        previous = set_warning_sink([this](const std::string &m) { seen.push_back(m); });
    }
    ~SilenceWarnings() { set_warning_sink(previous); }
};

/// Fresh directory under the system temp dir, removed on destruction.
struct TempDir {
    fs::path path;
    explicit TempDir(const std::string &tag) {
        static int counter = 0;
        path = fs::temp_directory_path() / ("splatdyn_" + tag + "_" + std::to_string(::getpid()) + "_" +
                                            std::to_string(counter++));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string &name) const { return (path / name).string(); }
    void write(const std::string &name, const std::string &text) const { std::ofstream(path / name) << text; }
};

const char *kMinimal = R"({
  "version": 1,
  "fluid_blocks": [ { "origin": [0, 0, 0], "dims": [3, 4, 5] } ],
  "cameras": [ { "eye": [0, 0, 2], "target": [0, 0, 0] } ]
})";

render::GaussianKernel sample_kernel(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0), p(0.01, 1.0);
    render::GaussianKernel k;
    k.center = {u(rng), u(rng), u(rng)};
    double s[3] = {p(rng), p(rng), p(rng)};
    std::sort(s, s + 3, std::greater<>());
    k.scaling = {s[0], s[1], s[2]};
    k.rotation = Quat{u(rng), u(rng), u(rng), u(rng)}.normalized();
    k.opacity = 0.5 * (u(rng) + 1.0);
    k.diffuse = {p(rng), p(rng), p(rng)};
    k.specular = {p(rng), p(rng), p(rng)};
    k.roughness = p(rng);
    k.normal = Vec3{u(rng), u(rng), 1.0}.normalized();
    return k;
}

FrameDump sample_frame(std::mt19937_64 &rng, std::size_t np, std::size_t nf, std::size_t nk) {
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    FrameDump f;
    f.frame = 123456789012ULL;
    for (std::size_t i = 0; i < np; ++i) {
        ParticleRecord r;
        r.position = {u(rng), u(rng), u(rng)};
        r.velocity = {u(rng), u(rng), u(rng)};
        r.normal = Vec3{u(rng), u(rng), u(rng)}.normalized();
        r.phase = xpbd::Phase{static_cast<std::int32_t>(i % 3) - 1};
        r.surface = i % 2 == 0;
        f.particles.push_back(r);
    }
    for (std::size_t i = 0; i < nf; ++i)
        f.foam.push_back({{u(rng), u(rng), u(rng)}, {u(rng), u(rng), u(rng)}, 0.5 + 0.1 * u(rng),
                          static_cast<render::FoamType>(i % 3)});
    for (std::size_t i = 0; i < nk; ++i) f.kernels.push_back(pose_of(sample_kernel(rng)));
    return f;
}

}  // namespace

// ---------------------------------------------------------------- kernel assets

TEST(KernelAsset, RoundTripIsExact) {
    std::mt19937_64 rng(3);
    std::vector<render::GaussianKernel> ks;
    for (int i = 0; i < 20; ++i) ks.push_back(sample_kernel(rng));
    std::stringstream ss;
    write_kernel_asset(ss, ks);
    const auto back = parse_kernel_asset(ss);
    ASSERT_EQ(back.size(), ks.size());
    for (std::size_t i = 0; i < ks.size(); ++i) {
        EXPECT_EQ(back[i].center, ks[i].center);
        EXPECT_EQ(back[i].scaling, ks[i].scaling);
        EXPECT_EQ(back[i].rotation.w, ks[i].rotation.w);
        EXPECT_EQ(back[i].rotation.z, ks[i].rotation.z);
        EXPECT_EQ(back[i].opacity, ks[i].opacity);
        EXPECT_EQ(back[i].diffuse, ks[i].diffuse);
        EXPECT_EQ(back[i].specular, ks[i].specular);
        EXPECT_EQ(back[i].roughness, ks[i].roughness);
        EXPECT_EQ(back[i].normal, ks[i].normal);
    }
}

TEST(KernelAsset, SkipsCommentsAndBlankLines) {
    std::istringstream in("# header\n\n   \n0 0 0 1 1 1 1 0 0 0 1 0.5 0.5 0.5 0 0 0 1 0 0 1\n");
    EXPECT_EQ(parse_kernel_asset(in).size(), 1u);
}

TEST(KernelAsset, ErrorsNameTheLine) {
    auto message = [](const std::string &text) {
        std::istringstream in(text);
        try {
            parse_kernel_asset(in, "k.txt");
        } catch (const std::runtime_error &e) {
            return std::string(e.what());
        }
        return std::string();
    };
    const std::string good = "0 0 0 1 1 1 1 0 0 0 1 0.5 0.5 0.5 0 0 0 1 0 0 1\n";
    EXPECT_NE(message(good + "0 0 0 1 1 1\n").find("k.txt:2"), std::string::npos);
    EXPECT_NE(message("# c\n0 0 0 1 2 1 1 0 0 0 1 0.5 0.5 0.5 0 0 0 1 0 0 1\n").find("k.txt:2: GaussianKernel: scaling"),
              std::string::npos);
    EXPECT_NE(message("0 0 x 1 1 1 1 0 0 0 1 0.5 0.5 0.5 0 0 0 1 0 0 1\n").find("malformed"), std::string::npos);
    EXPECT_NE(message(good + good.substr(0, good.size() - 1) + " 7\n").find("more than 21"), std::string::npos);
    EXPECT_THROW(load_kernel_asset("/nonexistent/kernels.txt"), std::runtime_error);
}

TEST(AnisotropyMetric, SpheresScoreZero) {
    std::vector<render::GaussianKernel> ks;
    for (int i = 0; i < 5; ++i) ks.push_back(render::spherical_kernel({double(i), 0, 0}, 0.1 * (i + 1)));
    EXPECT_EQ(anisotropy_metric(ks, 1.1), 0.0);
    EXPECT_EQ(anisotropy_metric(ks), 0.0);
}

TEST(AnisotropyMetric, ElongatedKernelIgnoresThirdAxis) {
    render::GaussianKernel k;
    k.scaling = {2.1, 1.0, 0.01};
    const std::vector<render::GaussianKernel> ks{k};
    EXPECT_EQ(anisotropy_metric(ks, 1.1), 1.0);
}

TEST(AnisotropyMetric, AveragesOverTheSet) {
    render::GaussianKernel a, b;
    a.scaling = {3.0, 1.0, 1.0};
    b.scaling = {1.0, 1.0, 1.0};
    const std::vector<render::GaussianKernel> ks{a, b};
    EXPECT_NEAR(anisotropy_metric(ks, 1.0), 1.0, 1e-15);
}

TEST(AnisotropyMetric, EmptySetThrows) {
    EXPECT_THROW(anisotropy_metric({}, 1.1), std::invalid_argument);
}

// ---------------------------------------------------------------- frame dumps

TEST(FrameDump, RoundTripIsFieldIdentical) {
    std::mt19937_64 rng(11);
    const FrameDump f = sample_frame(rng, 57, 13, 29);
    TempDir dir("frame");
    dump_frame(dir.file("a.spdf"), f);
    const FrameDump back = load_frame(dir.file("a.spdf"));
    EXPECT_TRUE(back == f);
    EXPECT_EQ(fs::file_size(dir.file("a.spdf")), frame_file_size(57, 13, 29));
}

TEST(FrameDump, EmptyFrameIsJustTheHeader) {
    const auto bytes = encode_frame({});
    EXPECT_EQ(bytes.size(), kFrameHeaderBytes);
    EXPECT_TRUE(decode_frame(bytes) == FrameDump{});
}

TEST(FrameDump, HeaderIsLittleEndian) {
    FrameDump f;
    f.frame = 0x0102030405060708ULL;
    f.particles.resize(2);
    const auto b = encode_frame(f);
    EXPECT_EQ(std::string(b.data(), 4), "SPDF");
    EXPECT_EQ(b[4], 1);  // version 1, low byte first
    EXPECT_EQ(b[5], 0);
    EXPECT_EQ(b[8], 0x08);
    EXPECT_EQ(b[15], 0x01);
    EXPECT_EQ(b[16], 2);  // particle count
}

TEST(FrameDump, HundredThousandParticleSizeMatchesLayout) {
    FrameDump f;
    f.particles.resize(100000);
    const auto bytes = encode_frame(f);
    EXPECT_EQ(bytes.size(), std::size_t(40 + 100000 * 80));
    EXPECT_EQ(bytes.size(), frame_file_size(100000, 0, 0));
}

TEST(FrameDump, TruncationIsAnError) {
    std::mt19937_64 rng(5);
    const auto bytes = encode_frame(sample_frame(rng, 10, 3, 4));
    for (std::size_t cut : {std::size_t(0), std::size_t(3), std::size_t(39), std::size_t(40), bytes.size() - 1}) {
        const std::vector<char> part(bytes.begin(), bytes.begin() + static_cast<long>(cut));
        EXPECT_THROW(decode_frame(part), std::runtime_error) << cut;
    }
    auto longer = bytes;
    longer.push_back(0);
    EXPECT_THROW(decode_frame(longer), std::runtime_error);
}

TEST(FrameDump, VersionMismatchIsAnError) {
    auto bytes = encode_frame({});
    bytes[4] = 2;
    try {
        decode_frame(bytes, "f.spdf");
        FAIL();
    } catch (const std::runtime_error &e) {
        EXPECT_NE(std::string(e.what()).find("version 2"), std::string::npos);
    }
    bytes[4] = 1;
    bytes[0] = 'X';
    EXPECT_THROW(decode_frame(bytes), std::runtime_error);
}

TEST(FrameDump, HugeCountsAreRejectedWithoutAllocating) {
    auto bytes = encode_frame({});
    for (int i = 16; i < 24; ++i) bytes[i] = static_cast<char>(0xff);
    EXPECT_THROW(decode_frame(bytes), std::runtime_error);
}

TEST(FrameDump, PointCloudHasOneLinePerParticle) {
    std::mt19937_64 rng(2);
    const auto f = sample_frame(rng, 7, 0, 0);
    std::stringstream ss;
    export_point_cloud(ss, f);
    std::string line;
    int n = 0;
    while (std::getline(ss, line))
        if (!line.empty() && line[0] != '#') ++n;
    EXPECT_EQ(n, 7);
    EXPECT_EQ(frame_file_name(12), "frame_00012.spdf");
}

// ---------------------------------------------------------------- configuration

TEST(SceneConfig, MinimalConfigHasBlockParticleCount) {
    const auto cfg = load_scene_text(kMinimal);
    EXPECT_EQ(cfg.fluid_particle_count(), 60u);
    const World w(cfg);
    EXPECT_EQ(w.particles().size(), 60u);
    EXPECT_EQ(w.fluid_indices().size(), 60u);
}

TEST(SceneConfig, DefaultsAreEchoed) {
    const auto cfg = load_scene_text(kMinimal);
    const Json j = scene_to_json(cfg);
    EXPECT_EQ(j["solver"]["dt"].get<double>(), 0.005);
    EXPECT_EQ(j["solver"]["fluid_iterations"].get<int>(), 10);
    EXPECT_EQ(j["solver"]["solid_iterations"].get<int>(), 50);
    EXPECT_EQ(j["metrics"]["anisotropy_threshold"].get<double>(), 1.1);
    EXPECT_EQ(j["render"]["shadow"]["resolution_scale"].get<double>(), 3.0);
    EXPECT_EQ(j["fluid"]["tension"]["compliance"].get<double>(), 0.0);
    // Mass calibrated so a lattice at the block spacing sits at rest density.
    EXPECT_NEAR(j["fluid"]["particle_mass"].get<double>(), fluid::lattice_mass(0.05, 1000.0, 0.1), 1e-15);
}

TEST(SceneConfig, ResolvedConfigReparsesToItself) {
    TempDir dir("cfg");
    std::ostringstream mesh;
    solid::write_obj(mesh, solid::make_box_mesh({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}));
    dir.write("box.obj", mesh.str());
    dir.write("scene.json", R"({
      "version": 1,
      "solver": { "dt": 0.004, "gravity": [0, -5, 0] },
      "fluid": { "rest_density": 900, "tension": { "compliance": 0.03 } },
      "fluid_blocks": [ { "origin": [0.1, 0.1, 0.1], "dims": [2, 2, 2], "velocity": [1, 0, 0] } ],
      "domain": { "min": [0, 0, 0], "max": [1, 1, 1] },
      "bodies": [ { "mesh": "box.obj", "scale": 0.2, "offset": [0.6, 0.3, 0.5], "mode": "deformable", "compliance": 1e-6 } ],
      "cameras": [ { "id": "a", "eye": [0.5, 0.5, 3], "target": [0.5, 0.5, 0.5] } ],
      "light": { "eye": [0.5, 3, 0.5], "target": [0.5, 0, 0.5] }
    })");
    const auto cfg = load_scene_file(dir.file("scene.json"));
    EXPECT_EQ(cfg.bodies.at(0).mesh, fs::path(dir.file("box.obj")).lexically_normal().string());
    const Json first = scene_to_json(cfg);
    const Json second = scene_to_json(parse_scene(first, "/elsewhere"));
    EXPECT_EQ(first.dump(), second.dump());
}

TEST(SceneConfig, NegativeRestDensityNamesRho0) {
    try {
        load_scene_text(R"({"version": 1, "fluid": {"rest_density": -1},
                            "fluid_blocks": [{"origin": [0,0,0], "dims": [1,1,1]}],
                            "cameras": [{"eye": [0,0,1], "target": [0,0,0]}]})");
        FAIL();
    } catch (const ConfigError &e) {
        EXPECT_NE(std::string(e.what()).find("rho0"), std::string::npos) << e.what();
        EXPECT_EQ(e.field(), "fluid.rest_density (rho0)");
    }
}

TEST(SceneConfig, ErrorsNameTheField) {
    auto field_of = [](const std::string &text) {
        try {
            load_scene_text(text, "/nonexistent");
        } catch (const ConfigError &e) {
            return e.field();
        }
        return std::string("<no error>");
    };
    const std::string cams = R"("cameras": [{"eye": [0,0,1], "target": [0,0,0]}])";
    const std::string blk = R"("fluid_blocks": [{"origin": [0,0,0], "dims": [1,1,1]}])";
    EXPECT_EQ(field_of(R"({"version": 2, )" + blk + "," + cams + "}"), "version");
    EXPECT_EQ(field_of(R"({"version": 1, )" + blk + "," + cams + R"(, "solver": {"dt": 0}})"), "solver.dt");
    EXPECT_EQ(field_of(R"({"version": 1, )" + blk + "," + cams + R"(, "solver": {"dtt": 0.1}})"), "solver.dtt");
    EXPECT_EQ(field_of(R"({"version": 1, )" + blk + "}"), "cameras");
    EXPECT_EQ(field_of(R"({"version": 1, )" + cams + R"(, "fluid_blocks": [{"origin": [0,0,0], "dims": [1,0,1]}]})"),
              "fluid_blocks[0].dims");
    EXPECT_EQ(field_of(R"({"version": 1, )" + blk + "," + cams + R"(, "bodies": [{"mesh": "missing.obj"}]})"),
              "bodies[0].mesh");
    EXPECT_EQ(field_of(R"({"version": 1, )" + blk + "," + cams + R"(, "fluid": {"particle_radius": 0.2}})"),
              "fluid.particle_radius");
    EXPECT_EQ(field_of(R"({"version": 1, )" + blk + "," + cams + R"(, "domain": {"min": [0,0,0], "max": [1,0,1]}})"),
              "domain.max");
    EXPECT_EQ(field_of(R"({"version": 1, )" + blk + "," + cams + R"(, "environment": {"path": "sky.pfm"}})"),
              "environment.path");
    EXPECT_EQ(field_of("{ not json"), "<root>");
}

TEST(SceneConfig, MissingSceneFileIsAnError) {
    EXPECT_THROW(load_scene_file("/nonexistent/scene.json"), ConfigError);
}

TEST(SceneConfig, AcceptsComments) {
    EXPECT_NO_THROW(load_scene_text(std::string("// header\n") + kMinimal));
}

// ---------------------------------------------------------------- world

namespace {

SceneConfig box_scene(const std::string &extra) {
    return load_scene_text(R"({"version": 1,
        "fluid_blocks": [{"origin": [0, 0, 0], "dims": [4, 4, 4]}],
        "domain": {"min": [0, 0, 0], "max": [0.3, 0.4, 0.3]},
        "cameras": [{"eye": [0.15, 0.2, 1.5], "target": [0.15, 0.1, 0.15], "width": 48, "height": 32}])" +
                           extra + "}");
}

}  // namespace

TEST(World, FluidStaysInsideDomain) {
    World w(box_scene(""));
    for (int s = 0; s < 60; ++s) w.step();
    for (const auto &p : w.particles()) {
        EXPECT_GE(p.position.y, 0.025 - 1e-9);
        EXPECT_LE(p.position.x, 0.3 - 0.025 + 1e-9);
        EXPECT_TRUE(p.position.finite());
    }
}

TEST(World, RunsAreBitIdentical) {
    World a(box_scene(R"(, "fluid_blocks": [{"origin": [0, 0.1, 0], "dims": [4, 4, 4], "velocity": [1, 0, 0.5]}])"));
    World b(a.config());
    for (int s = 0; s < 30; ++s) {
        a.step();
        b.step();
    }
    EXPECT_EQ(encode_frame(a.snapshot()), encode_frame(b.snapshot()));
}

TEST(World, NonFiniteStepWritesDiagnosticDump) {
    SilenceWarnings quiet;
    TempDir dir("nan");
    World w(box_scene(""));
    w.set_diagnostics_dir(dir.path.string());
    w.step();
    w.particles()[5].velocity = {std::nan(""), 0, 0};
    const auto before = w.particles();
    EXPECT_THROW(w.step(), xpbd::NonFiniteError);
    const auto dump = load_frame(dir.file("nan_step_1.spdf"));
    ASSERT_EQ(dump.particles.size(), before.size());
    EXPECT_EQ(dump.particles[0].position, before[0].position);
    EXPECT_TRUE(std::isnan(dump.particles[5].velocity.x));
    EXPECT_EQ(w.particles()[0].position, before[0].position);  // state not advanced
    EXPECT_FALSE(quiet.seen.empty());
}

namespace {

struct BodyScene {
    TempDir dir{"body"};
    SceneConfig cfg;
    BodyScene(const std::string &body, const std::string &extra = "") {
        std::ostringstream mesh;
        solid::write_obj(mesh, solid::make_box_mesh({-0.5, -0.5, -0.5}, {0.5, 0.5, 0.5}));
        dir.write("box.obj", mesh.str());
        dir.write("scene.json", R"({"version": 1,
            "solver": {"gravity": [0, -9.8, 0]},
            "domain": {"min": [-1, 0, -1], "max": [1, 2, 1]},
            "bodies": [)" + body + R"(],
            "cameras": [{"eye": [0, 0.5, 3], "target": [0, 0.3, 0], "width": 40, "height": 30}])" +
                                  extra + "}");
        cfg = load_scene_file(dir.file("scene.json"));
    }
};

}  // namespace

TEST(World, RigidBodyKernelsFollowTranslation) {
    BodyScene s(R"({"mesh": "box.obj", "scale": 0.3, "offset": [0, 1, 0], "sample_radius": 0.06})",
                R"(, "solver": {"gravity": [0, 0, 0]})");
    s.cfg.bodies[0].velocity = {0.4, 0, 0};
    World w(s.cfg);
    const auto rest = w.body_kernels();
    for (int i = 0; i < 10; ++i) w.advance_frame();
    const auto &now = w.body_kernels();
    ASSERT_EQ(now.size(), rest.size());
    for (std::size_t k = 0; k < now.size(); ++k) {
        EXPECT_NEAR((now[k].center - rest[k].center - Vec3{0.4 * 0.05, 0, 0}).norm(), 0.0, 1e-9);
        EXPECT_NEAR((now[k].scaling - rest[k].scaling).norm(), 0.0, 1e-9);
    }
}

TEST(World, DeformableCubeRestsOnFloor) {
    // Quasi-static rest under gravity: distance constraints violated by
    // less than 2% of their rest length.
    SilenceWarnings quiet;
    BodyScene s(R"({"mesh": "box.obj", "scale": 0.3, "offset": [0, 0.17, 0], "sample_radius": 0.05,
                    "mode": "deformable", "compliance": 1e-8, "density": 500})");
    World w(s.cfg);
    for (int i = 0; i < 400; ++i) w.step();
    double worst = 0.0, speed = 0.0, lowest = 1e9;
    std::size_t distances = 0;
    for (const auto &c : w.solid_constraints().constraints) {
        const auto *d = std::get_if<xpbd::DistancePayload>(&c.payload);
        if (!d) continue;
        ++distances;
        const double len = (w.particles()[c.participants[0]].position - w.particles()[c.participants[1]].position).norm();
        worst = std::max(worst, std::abs(len - d->rest_length) / d->rest_length);
    }
    for (const auto &p : w.particles()) {
        speed = std::max(speed, p.velocity.norm());
        lowest = std::min(lowest, p.position.y);
    }
    EXPECT_GT(distances, 0u);
    EXPECT_LT(worst, 0.02);
    EXPECT_LT(speed, 0.05);  // at rest
    EXPECT_GT(lowest, 0.025 - 1e-9);
}

TEST(World, ValidateReportsAllPassing) {
    BodyScene s(R"({"mesh": "box.obj", "scale": 0.3, "offset": [0, 0.5, 0], "sample_radius": 0.06})",
                R"(, "fluid_blocks": [{"origin": [-0.2, 0, -0.2], "dims": [4, 4, 4]}])");
    const World w(s.cfg);
    const auto checks = validate_world(w);
    EXPECT_GE(checks.size(), 8u);
    for (const auto &c : checks) EXPECT_TRUE(c.ok) << c.name << ": " << c.detail;
}

TEST(World, ValidateFlagsParticlesOutsideDomain) {
    auto cfg = box_scene("");
    cfg.blocks[0].origin = {0.2, 0, 0};
    const World w(cfg);
    bool flagged = false;
    for (const auto &c : validate_world(w))
        if (c.name == "inside domain") flagged = !c.ok;
    EXPECT_TRUE(flagged);
}

// ---------------------------------------------------------------- frame rendering

TEST(RenderFrame, BuffersStayInRange) {
    BodyScene s(R"({"mesh": "box.obj", "scale": 0.3, "offset": [0, 0.4, 0], "sample_radius": 0.06, "color": [0.8, 0.2, 0.1]})",
                R"(, "fluid_blocks": [{"origin": [-0.2, 0, -0.2], "dims": [6, 3, 6], "velocity": [2, 0, 0]}],
                    "light": {"eye": [0.3, 3, 0.2], "target": [0, 0, 0], "half_height": 1.2},
                    "foam": {"min_speed": 0.0, "min_trapped_air": 0.0})");
    World w(s.cfg);
    for (int i = 0; i < 5; ++i) w.advance_frame();
    ASSERT_FALSE(w.foam().empty());
    const auto assets = make_render_assets(w);
    const auto img = render_frame(s.cfg, assets, w.snapshot(), s.cfg.cameras[0]);
    EXPECT_EQ(img.color.width, 40);
    EXPECT_EQ(img.color.height, 30);
    double shadow_min = 1.0;
    for (std::size_t i = 0; i < img.shadow.pixels.size(); ++i) {
        EXPECT_GE(img.shadow.pixels[i], 0.0);
        EXPECT_LE(img.shadow.pixels[i], 1.0);
        EXPECT_GE(img.foam.pixels[i], 0.0);
        EXPECT_LE(img.foam.pixels[i], 1.0);
        EXPECT_GE(img.thickness.pixels[i], 0.0);
        const auto c = img.color.pixels[i];
        EXPECT_TRUE(c.x >= 0 && c.x <= 1 && c.y >= 0 && c.y <= 1 && c.z >= 0 && c.z <= 1);
        shadow_min = std::min(shadow_min, img.shadow.pixels[i]);
    }
    EXPECT_LT(shadow_min, 0.5);  // the box shades the fluid below it
}

TEST(RenderFrame, DumpRoundTripRendersIdentically) {
    BodyScene s(R"({"mesh": "box.obj", "scale": 0.3, "offset": [0, 0.4, 0], "sample_radius": 0.06})",
                R"(, "fluid_blocks": [{"origin": [-0.2, 0, -0.2], "dims": [4, 3, 4]}])");
    World w(s.cfg);
    w.advance_frame();
    const auto dump = w.snapshot();
    dump_frame(s.dir.file("f.spdf"), dump);
    const World fresh(s.cfg);
    const auto a = render_frame(s.cfg, make_render_assets(w), dump, s.cfg.cameras[0]);
    const auto b = render_frame(s.cfg, make_render_assets(fresh), load_frame(s.dir.file("f.spdf")), s.cfg.cameras[0]);
    EXPECT_EQ(a.color.pixels, b.color.pixels);
}

TEST(RenderFrame, RejectsMismatchedDump) {
    const auto cfg = box_scene("");
    const World w(cfg);
    auto dump = w.snapshot();
    dump.kernels.resize(3);
    EXPECT_THROW(render_frame(cfg, make_render_assets(w), dump, cfg.cameras[0]), std::runtime_error);
}
