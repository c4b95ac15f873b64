// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#include <splatdyn/render/camera.hpp>
#include <splatdyn/render/composite.hpp>
#include <splatdyn/render/envmap.hpp>
#include <splatdyn/render/fluid_render.hpp>
#include <splatdyn/render/foam.hpp>
#include <splatdyn/render/image.hpp>
#include <splatdyn/render/kernel.hpp>
#include <splatdyn/render/shadow.hpp>
#include <splatdyn/render/splat.hpp>

#include <support/oracles.hpp>

#include <gtest/gtest.h>

#include <numbers>
#include <random>
#include <sstream>

using namespace splatdyn;
using namespace splatdyn::render;

namespace {

double max_abs_diff(const Mat3 &a, const Mat3 &b) {
    double d = 0.0;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) d = std::max(d, std::abs(a(r, c) - b(r, c)));
    return d;
}

Mat3 random_rotation(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> ang(0.0, 2.0 * std::numbers::pi);
    return rotation_about(splatdyn::testing::random_unit(rng), ang(rng));
}

GaussianKernel random_kernel(std::mt19937_64 &rng) {
    std::uniform_real_distribution<double> s(0.01, 0.3);
    double a = s(rng), b = s(rng), c = s(rng);
    if (a < b) std::swap(a, b);
    if (b < c) std::swap(b, c);
    if (a < b) std::swap(a, b);
    GaussianKernel k;
    k.center = splatdyn::testing::random_in_box(rng, -1, 1);
    k.scaling = {a, b, c};
    k.rotation = Quat::from_matrix(random_rotation(rng));
    k.normal = splatdyn::testing::random_unit(rng);
    return k;
}

// Camera on the +z axis looking toward the origin: camera x = world -x, camera y = world -y.
Camera front_camera(int w = 64, int h = 64) { return look_at({0, 0, 5}, {0, 0, 0}, {0, 1, 0}, 40.0, w, h); }

// Orthographic camera looking down world -z with camera axes aligned to world (x right, y down).
Camera aligned_ortho(int w, int h, double half_height) {
    Camera c = orthographic_look_at({0, 0, -10}, {0, 0, 0}, {0, -1, 0}, half_height, w, h);
    return c;
}

}  // namespace

// ---------------------------------------------------------------- images

TEST(Image, PpmRoundTripIsExact) {
    RgbImage img(5, 3);
    for (int y = 0; y < 3; ++y)
        for (int x = 0; x < 5; ++x) img(x, y) = Rgb{x / 4.0, y / 2.0, (x + y) % 2 * 1.0};
    std::stringstream io;
    write_ppm(io, img);
    const std::string bytes = io.str();
    EXPECT_EQ(bytes.substr(0, 11), "P6\n5 3\n255\n");
    EXPECT_EQ(bytes.size(), 11u + 5 * 3 * 3);
    const auto back = read_ppm(io);
    std::stringstream again;
    write_ppm(again, back);
    EXPECT_EQ(again.str(), bytes);
    EXPECT_EQ(to_byte(-1.0), 0);
    EXPECT_EQ(to_byte(2.0), 255);
    EXPECT_EQ(to_byte(std::nan("")), 0);
}

TEST(Image, PfmRoundTrip) {
    RgbImage img(4, 2);
    for (std::size_t i = 0; i < img.pixels.size(); ++i) img.pixels[i] = Rgb{0.25 * i, 3.5, 1e3};
    std::stringstream io;
    write_pfm(io, img);
    const auto back = read_pfm(io);
    ASSERT_TRUE(back.same_size(img));
    for (std::size_t i = 0; i < img.pixels.size(); ++i) EXPECT_EQ(back.pixels[i], img.pixels[i]);
}

TEST(Image, ReadersRejectBadInput) {
    std::istringstream truncated("P6\n4 4\n255\nabc");
    EXPECT_THROW(read_ppm(truncated), std::runtime_error);
    std::istringstream wrong("P3\n1 1\n255\n0 0 0");
    EXPECT_THROW(read_ppm(wrong), std::runtime_error);
    std::istringstream pfm("PF\n2 2\n-1.0\n1234");
    EXPECT_THROW(read_pfm(pfm), std::runtime_error);
    EXPECT_THROW(load_image("/nonexistent.pfm"), std::runtime_error);
}

TEST(Image, BilinearAtCentresAndBetween) {
    ScalarImage img(2, 1);
    img(0, 0) = 1.0;
    img(1, 0) = 3.0;
    EXPECT_DOUBLE_EQ(img.bilinear(0.5, 0.5), 1.0);
    EXPECT_DOUBLE_EQ(img.bilinear(1.0, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(img.bilinear(-5.0, 0.5), 1.0);  // clamped
    EXPECT_DOUBLE_EQ(img.bilinear(9.0, 9.0), 3.0);
}

// ---------------------------------------------------------------- kernels

TEST(Kernel, CovarianceFactorRoundTrip) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const auto k = random_kernel(rng);
        Quat q;
        Vec3 s;
        factor_covariance(k.covariance(), q, s);
        EXPECT_GE(s.x, s.y);
        EXPECT_GE(s.y, s.z);
        GaussianKernel back = k;
        back.rotation = q;
        back.scaling = s;
        EXPECT_LT(max_abs_diff(back.covariance(), k.covariance()), 1e-12);
    }
}

TEST(Kernel, ValidateNamesViolation) {
    GaussianKernel k;
    EXPECT_NO_THROW(k.validate());
    k.scaling = {1, 2, 1};
    EXPECT_THROW(k.validate(), std::invalid_argument);
    k = {};
    k.opacity = 1.5;
    EXPECT_THROW(k.validate(), std::invalid_argument);
    k = {};
    k.normal = {0, 0, 2};
    EXPECT_THROW(k.validate(), std::invalid_argument);
    k = {};
    k.roughness = 0.0;
    EXPECT_THROW(k.validate(), std::invalid_argument);
}

TEST(DeformKernel, IdentityLeavesKernel) {
    std::mt19937_64 rng(2);
    const auto k = random_kernel(rng);
    const auto d = deform_kernel(k, Mat3::identity());
    EXPECT_LT(max_abs_diff(d.covariance(), k.covariance()), 1e-14);
    EXPECT_LT((d.normal - k.normal).norm(), 1e-14);
    EXPECT_EQ(d.center, k.center);
}

TEST(DeformKernel, RotationRotatesCovarianceAndNormal) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 50; ++t) {
        const auto k = random_kernel(rng);
        const Mat3 R = random_rotation(rng);
        const auto d = deform_kernel(k, R);
        EXPECT_LT(max_abs_diff(d.covariance(), R * k.covariance() * R.transposed()), 1e-12);
        EXPECT_LT((d.normal - R * k.normal).norm(), 1e-12);
    }
}

TEST(DeformKernel, AxisStretchKeepsAxisNormal) {
    GaussianKernel k;
    k.scaling = {0.1, 0.1, 0.1};
    k.normal = {1, 0, 0};
    const auto d = deform_kernel(k, Mat3::diagonal({2, 1, 1}));
    EXPECT_LT((d.normal - Vec3{1, 0, 0}).norm(), 1e-15);
    EXPECT_NEAR(d.scaling.x, 0.2, 1e-12);
    EXPECT_NEAR(d.scaling.z, 0.1, 1e-12);
}

TEST(DeformKernel, RotationEquivariant) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.4, 0.4);
    for (int t = 0; t < 100; ++t) {
        const auto k = random_kernel(rng);
        Mat3 F = Mat3::identity();
        for (std::size_t r = 0; r < 3; ++r)
            for (std::size_t c = 0; c < 3; ++c) F(r, c) += u(rng);
        if (F.determinant() < 0.1) continue;
        const Mat3 R = random_rotation(rng);
        const auto a = deform_kernel(k, R * F);
        const auto b = deform_kernel(k, F);
        EXPECT_LT(max_abs_diff(a.covariance(), R * b.covariance() * R.transposed()), 1e-8);
        EXPECT_LT((a.normal - R * b.normal).norm(), 1e-8);
    }
}

TEST(DeformKernel, SingularThrows) {
    GaussianKernel k;
    EXPECT_THROW(deform_kernel(k, Mat3::diagonal({1, 1, 0})), std::invalid_argument);
    EXPECT_THROW(deform_kernel(k, Mat3::diagonal({1, 1, -1})), std::invalid_argument);
}

// ---------------------------------------------------------------- camera

TEST(Camera, ProjectUnprojectRoundTrip) {
    const auto cam = front_camera(80, 60);
    std::mt19937_64 rng(5);
    for (int t = 0; t < 100; ++t) {
        const Vec3 p = splatdyn::testing::random_in_box(rng, -1, 1);
        const auto px = cam.project(p);
        ASSERT_TRUE(px);
        const Vec3 back = cam.unproject(px->x, px->y, cam.to_camera(p).z);
        EXPECT_LT((back - p).norm(), 1e-12);
    }
    const auto c = cam.project({0, 0, 0});
    EXPECT_NEAR(c->x, 40.0, 1e-12);
    EXPECT_NEAR(c->y, 30.0, 1e-12);
    EXPECT_FALSE(cam.project({0, 0, 6}));
    // World +y appears toward the top of the image.
    EXPECT_LT(cam.project({0, 0.5, 0})->y, 30.0);
    EXPECT_THROW(look_at({0, 0, 0}, {0, 1, 0}, {0, 1, 0}, 40, 10, 10), std::invalid_argument);
}

TEST(Camera, ScaledKeepsFieldOfView) {
    const auto cam = front_camera(40, 30);
    const auto big = cam.scaled(3.0);
    EXPECT_EQ(big.width, 120);
    EXPECT_EQ(big.height, 90);
    const Vec3 p{0.3, -0.2, 0.1};
    EXPECT_NEAR(big.project(p)->x, 3.0 * cam.project(p)->x, 1e-9);
}

// ---------------------------------------------------------------- environment and shading

TEST(EnvironmentMap, MipChainAverages) {
    RgbImage img(8, 4);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0.0, 2.0);
    Rgb total{};
    for (auto &p : img.pixels) {
        p = {u(rng), u(rng), u(rng)};
        total += p;
    }
    const EnvironmentMap env(img);
    ASSERT_EQ(env.level_count(), 4u);  // 8x4, 4x2, 2x1, 1x1
    EXPECT_EQ(env.level(3).width, 1);
    EXPECT_LT((env.level(3)(0, 0) - total / 32.0).norm(), 1e-12);
    EXPECT_LT((env.sample({0.3, 0.5, 0.1}, 1.0) - total / 32.0).norm(), 1e-12);
    RgbImage bad(2, 2, Rgb{-1, 0, 0});
    EXPECT_THROW(EnvironmentMap{bad}, std::invalid_argument);
}

TEST(EnvironmentMap, DirectionMapping) {
    RgbImage img(4, 2);
    img(0, 0) = img(1, 0) = img(2, 0) = img(3, 0) = {1, 0, 0};  // upper half
    img(0, 1) = img(1, 1) = img(2, 1) = img(3, 1) = {0, 0, 1};
    const EnvironmentMap env(img);
    EXPECT_EQ(env.sample({0, 1, 0}, 0.0), Rgb(1, 0, 0));
    EXPECT_EQ(env.sample({0, -1, 0}, 0.0), Rgb(0, 0, 1));
}

TEST(ShadeKernel, NoSpecularGivesDiffuse) {
    GaussianKernel k;
    k.diffuse = {0.2, 0.4, 0.6};
    const EnvironmentMap env(Rgb{5, 5, 5});
    EXPECT_EQ(shade_kernel(k, {0, 0, -1}, env), k.diffuse);
}

TEST(ShadeKernel, ConstantEnvironmentAddsAndClamps) {
    GaussianKernel k;
    k.diffuse = {0.2, 0.4, 0.6};
    k.specular = {1, 1, 1};
    const EnvironmentMap env(Rgb{0.3, 0.3, 0.3});
    const Rgb c = shade_kernel(k, {0, 0, -1}, env);
    EXPECT_NEAR(c.x, 0.5, 1e-15);
    EXPECT_NEAR(c.y, 0.7, 1e-15);
    EXPECT_NEAR(c.z, 0.9, 1e-15);
    const EnvironmentMap bright(Rgb{0.7, 0.7, 0.7});
    EXPECT_EQ(shade_kernel(k, {0, 0, -1}, bright).z, 1.0);
}

TEST(ShadeKernel, FluidMaterialUsesNearMirrorLevel) {
    // Sharp upper/lower split; a near-mirror lookup stays on the reflected side.
    RgbImage img(64, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 64; ++x) img(x, y) = y < 16 ? Rgb{1, 1, 1} : Rgb{0, 0, 0};
    const EnvironmentMap env(img);
    GaussianKernel k;
    k.diffuse = {0, 0, 0};
    k.specular = {1, 1, 1};
    k.roughness = 0.05;
    k.normal = {0, 1, 0};
    EXPECT_NO_THROW(k.validate());
    const Rgb up = shade_kernel(k, Vec3{0, -1, 1}.normalized(), env);    // reflects upward
    const Rgb down = shade_kernel(k, Vec3{0, 1, 1}.normalized(), env);  // reflects downward
    EXPECT_GT(up.x, 0.9);
    EXPECT_LT(down.x, 0.1);
    k.roughness = 1.0;
    const Rgb blurred = shade_kernel(k, Vec3{0, -1, 1}.normalized(), env);
    EXPECT_NEAR(blurred.x, 0.5, 1e-12);
}

// ---------------------------------------------------------------- projection

TEST(ProjectKernel, IsotropicOnAxis) {
    const auto cam = front_camera();
    const auto p = project_kernel(spherical_kernel({0, 0, 0}, 0.1), cam);
    ASSERT_TRUE(p);
    EXPECT_NEAR(p->cxx, p->cyy, 1e-12 * p->cxx);
    EXPECT_NEAR(p->cxy, 0.0, 1e-12 * p->cxx);
    EXPECT_NEAR(p->depth, 5.0, 1e-12);
}

TEST(ProjectKernel, DoublingDistanceHalvesFootprint) {
    const auto cam = look_at({0, 0, 0}, {0, 0, -1}, {0, 1, 0}, 40.0, 64, 64);
    const auto a = project_kernel(spherical_kernel({0, 0, -2}, 0.1), cam);
    const auto b = project_kernel(spherical_kernel({0, 0, -4}, 0.1), cam);
    ASSERT_TRUE(a && b);
    EXPECT_NEAR(std::sqrt(b->cxx) / std::sqrt(a->cxx), 0.5, 0.005);
}

TEST(ProjectKernel, BehindCameraIsCulled) {
    const auto cam = front_camera();
    EXPECT_FALSE(project_kernel(spherical_kernel({0, 0, 6}, 0.1), cam));
    EXPECT_FALSE(project_kernel(spherical_kernel({0, 0, 5.0}, 0.1), cam));
}

TEST(ProjectKernel, MatchesFiniteDifferenceJacobian) {
    // The 2D covariance is the first-order push-forward of the 3D one.
    const auto cam = look_at({0.3, 0.5, 4}, {0, 0, 0}, {0, 1, 0}, 50.0, 100, 80);
    std::mt19937_64 rng(9);
    for (int t = 0; t < 20; ++t) {
        auto k = random_kernel(rng);
        const auto p = project_kernel(k, cam);
        ASSERT_TRUE(p);
        const double h = 1e-6;
        Vec3 col[3][2];
        for (int a = 0; a < 3; ++a) {
            Vec3 e{};
            e[static_cast<std::size_t>(a)] = h;
            const auto hi = cam.project(k.center + e), lo = cam.project(k.center - e);
            col[a][0] = Vec3{(hi->x - lo->x) / (2 * h), 0, 0};
            col[a][1] = Vec3{(hi->y - lo->y) / (2 * h), 0, 0};
        }
        // Rows of the world-space Jacobian.
        const Vec3 jx{col[0][0].x, col[1][0].x, col[2][0].x}, jy{col[0][1].x, col[1][1].x, col[2][1].x};
        const Mat3 A = k.covariance();
        EXPECT_NEAR(p->cxx, jx.dot(A * jx), 1e-5 * p->cxx);
        EXPECT_NEAR(p->cyy, jy.dot(A * jy), 1e-5 * p->cyy);
        EXPECT_NEAR(p->cxy, jx.dot(A * jy), 1e-5 * std::sqrt(p->cxx * p->cyy));
    }
}

// ---------------------------------------------------------------- colour splatting

TEST(SplatColor, SingleOpaqueKernelAtPixelCentre) {
    const auto cam = aligned_ortho(16, 16, 1.0);  // 8 px per unit
    // Pixel (8, 8) has its centre at camera (0.5/8, 0.5/8).
    auto k = spherical_kernel({0.5 / 8, 0.5 / 8, 0}, 0.2);
    const std::vector<GaussianKernel> ks{k};
    const std::vector<Rgb> col{{0.1, 0.6, 0.3}};
    const auto out = splat_color(ks, cam, col);
    EXPECT_EQ(out.color(8, 8), col[0]);
    EXPECT_EQ(out.alpha(8, 8), 1.0);
    EXPECT_NEAR(out.depth(8, 8), 10.0, 1e-12);
    EXPECT_TRUE(std::isinf(out.depth(0, 0)));
}

TEST(SplatColor, OpaqueFrontHidesBack) {
    const auto cam = aligned_ortho(16, 16, 1.0);
    auto front = spherical_kernel({0.5 / 8, 0.5 / 8, -1}, 0.2);
    auto back = spherical_kernel({0.5 / 8, 0.5 / 8, 1}, 0.2);
    const std::vector<GaussianKernel> ks{back, front};
    const std::vector<Rgb> col{{0, 0, 1}, {1, 0, 0}};
    EXPECT_EQ(splat_color(ks, cam, col).color(8, 8), Rgb(1, 0, 0));
}

TEST(SplatColor, HalfHalfBlend) {
    const auto cam = aligned_ortho(16, 16, 1.0);
    auto a = spherical_kernel({0.5 / 8, 0.5 / 8, -1}, 0.2);
    auto b = spherical_kernel({0.5 / 8, 0.5 / 8, 1}, 0.2);
    a.opacity = b.opacity = 0.5;
    const std::vector<GaussianKernel> ks{a, b};
    const Rgb c1{0.8, 0.2, 0.4}, c2{0.4, 1.0, 0.6};
    const std::vector<Rgb> col{c1, c2};
    const auto out = splat_color(ks, cam, col);
    EXPECT_EQ(out.color(8, 8), c1 * 0.5 + c2 * 0.25);
    EXPECT_EQ(out.alpha(8, 8), 0.75);
}

TEST(SplatColor, FrontToBackMatchesLiteralProduct) {
    const double ppu = 20.0;
    const auto cam = aligned_ortho(40, 40, 1.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> op(0.0, 0.7), off(-0.1, 0.1), c(0.0, 1.0), z(-5.0, 5.0);
    double worst = 0.0;
    for (int t = 0; t < 200; ++t) {
        std::vector<GaussianKernel> ks;
        std::vector<Rgb> col;
        for (int k = 0; k < 5; ++k) {
            auto g = random_kernel(rng);
            g.center = {off(rng), off(rng), z(rng)};
            g.opacity = op(rng);
            ks.push_back(g);
            col.push_back({c(rng), c(rng), c(rng)});
        }
        const auto out = splat_color(ks, cam, col);
        const int px = 20, py = 20;
        const double wx = (px + 0.5 - 20.0) / ppu, wy = (py + 0.5 - 20.0) / ppu;
        // Literal formula with kernels ordered back to front by hand.
        std::vector<std::size_t> order{0, 1, 2, 3, 4};
        std::sort(order.begin(), order.end(), [&](auto a, auto b) { return ks[a].center.z < ks[b].center.z; });
        Rgb lit{};
        for (std::size_t k = 0; k < 5; ++k) {
            auto alpha = [&](std::size_t idx) {
                const Mat3 A = ks[idx].covariance();
                const double sxx = A(0, 0), sxy = A(0, 1), syy = A(1, 1);
                const double det = sxx * syy - sxy * sxy;
                const double dx = wx - ks[idx].center.x, dy = wy - ks[idx].center.y;
                const double m = (syy * dx * dx - 2 * sxy * dx * dy + sxx * dy * dy) / det;
                return m > 9.0 ? 0.0 : std::exp(-0.5 * m) * ks[idx].opacity;
            };
            double prod = 1.0;
            for (std::size_t j = 0; j < k; ++j) prod *= 1.0 - alpha(order[j]);
            lit += col[order[k]] * (alpha(order[k]) * prod);
        }
        worst = std::max(worst, (out.color(px, py) - lit).norm());
    }
    EXPECT_LE(worst, 1e-12);
}

TEST(SplatColor, EqualDepthTiesBrokenByIndex) {
    const auto cam = aligned_ortho(16, 16, 1.0);
    auto a = spherical_kernel({0.5 / 8, 0.5 / 8, 0}, 0.2);
    auto b = a;
    const std::vector<GaussianKernel> ks{a, b};
    const std::vector<Rgb> col{{1, 0, 0}, {0, 1, 0}};
    EXPECT_EQ(splat_color(ks, cam, col).color(8, 8), Rgb(1, 0, 0));
}

TEST(SplatColor, DeterministicAcrossRuns) {
    std::mt19937_64 rng(13);
    std::vector<GaussianKernel> ks;
    std::vector<Rgb> col;
    for (int i = 0; i < 3000; ++i) {
        ks.push_back(random_kernel(rng));
        ks.back().opacity = 0.6;
        col.push_back({0.2, 0.5, 0.9});
    }
    const auto cam = front_camera(96, 80);
    const auto a = splat_color(ks, cam, col), b = splat_color(ks, cam, col);
    EXPECT_EQ(a.color.pixels, b.color.pixels);
    EXPECT_EQ(a.alpha.pixels, b.alpha.pixels);
}

// ---------------------------------------------------------------- thickness

TEST(SplatThickness, EmptyIsZero) {
    const auto t = splat_thickness({}, front_camera(), 0.025);
    for (double v : t.pixels) EXPECT_EQ(v, 0.0);
}

TEST(SplatThickness, PermutationInvariantAndLinear) {
    std::mt19937_64 rng(14);
    std::vector<GaussianKernel> ks;
    for (int i = 0; i < 500; ++i) ks.push_back(spherical_kernel(splatdyn::testing::random_in_box(rng, -0.5, 0.5), 0.05));
    const auto cam = front_camera(64, 64);
    const auto base = splat_thickness(ks, cam, 0.025);
    auto shuffled = ks;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    EXPECT_EQ(splat_thickness(shuffled, cam, 0.025).pixels, base.pixels);

    const std::vector<GaussianKernel> one{ks[0]}, two{ks[0], ks[0]};
    const auto t1 = splat_thickness(one, cam, 0.025), t2 = splat_thickness(two, cam, 0.025);
    for (std::size_t i = 0; i < t1.pixels.size(); ++i) EXPECT_EQ(t2.pixels[i], 2.0 * t1.pixels[i]);
    // Peak of a single kernel is its diameter.
    const auto px = cam.project(ks[0].center);
    double peak = 0.0;
    for (double v : t1.pixels) peak = std::max(peak, v);
    EXPECT_LE(peak, 0.05);
    EXPECT_GT(peak, 0.04);
    (void)px;
}

// ---------------------------------------------------------------- fluid colour

TEST(FluidRefraction, BeerLambertCases) {
    const auto cam = front_camera(32, 32);
    const RgbImage bg(32, 32, Rgb{0.8, 0.6, 0.4});
    const ScalarImage zero(32, 32, 0.0), unit(32, 32, 1.0);
    const Vec3 n{0, 0, 1};
    EXPECT_EQ(fluid_refraction_color({0, 0, 0}, n, cam, zero, bg, 8.0, {0.3, 0.12, 0.06}), bg(0, 0));
    const double l2 = std::log(2.0);
    const Rgb half = fluid_refraction_color({0, 0, 0}, n, cam, unit, bg, 8.0, {l2, l2, l2});
    EXPECT_NEAR(half.x, 0.4, 1e-15);
    EXPECT_NEAR(half.y, 0.3, 1e-15);
    EXPECT_NEAR(half.z, 0.2, 1e-15);
    const Rgb black = fluid_refraction_color({0, 0, 0}, n, cam, unit, bg, 8.0, {1e3, 1e3, 1e3});
    EXPECT_LT(black.norm(), 1e-300);
}

TEST(FluidRefraction, DistortionShiftsAndClamps) {
    const auto cam = aligned_ortho(32, 32, 1.0);
    RgbImage bg(32, 32);
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) bg(x, y) = Rgb{x / 31.0, 0, 0};
    const ScalarImage zero(32, 32, 0.0);
    const Rgb straight = fluid_refraction_color({0, 0, 0}, {0, 0, -1}, cam, zero, bg, 8.0, {});
    const Rgb right = fluid_refraction_color({0, 0, 0}, {1, 0, 0}, cam, zero, bg, 8.0, {});
    const Rgb far = fluid_refraction_color({0, 0, 0}, {1, 0, 0}, cam, zero, bg, 1e4, {});
    EXPECT_GT(right.x, straight.x);
    EXPECT_EQ(far.x, 1.0);
}

TEST(RenderFluid, NoParticlesIsTransparent) {
    const auto cam = front_camera(32, 32);
    const RgbImage bg(32, 32, Rgb{1, 1, 1});
    const auto out = render_fluid({}, {}, {}, cam, EnvironmentMap{}, bg, {});
    for (double a : out.alpha.pixels) EXPECT_EQ(a, 0.0);
}

TEST(RenderFluid, KernelsAreOpaque) {
    const auto cam = aligned_ortho(16, 16, 1.0);
    const std::vector<Vec3> x{{0.5 / 8, 0.5 / 8, 0}};
    const std::vector<std::uint8_t> s{1};
    const std::vector<Vec3> n{{0, 0, -1}};
    const auto out = render_fluid(x, s, n, cam, EnvironmentMap{}, RgbImage(16, 16, Rgb{1, 1, 1}), {});
    EXPECT_EQ(out.alpha(8, 8), 1.0);
}

TEST(RenderFluid, DeeperPoolIsDarker) {
    // Wedge-shaped pool: depth grows along +x; viewed from above.
    const double h = 0.05;
    std::vector<Vec3> x;
    std::vector<std::uint8_t> s;
    std::vector<Vec3> n;
    for (int i = 0; i < 20; ++i) {
        const int layers = 1 + i / 2;
        for (int k = 0; k < 8; ++k)
            for (int j = 0; j < layers; ++j) {
                x.push_back({(i - 9.5) * h, -j * h, (k - 3.5) * h});
                s.push_back(j == 0);
                n.push_back({0, 1, 0});
            }
    }
    const auto cam = orthographic_look_at({0, 3, 0}, {0, 0, 0}, {0, 0, -1}, 0.3, 120, 72);
    const RgbImage bg(120, 72, Rgb{1, 1, 1});
    FluidRenderParams p;
    p.particle_radius = 0.025;
    p.absorption = {3.0, 1.0, 0.5};
    p.distortion = 0.0;
    const auto out = render_fluid(x, s, n, cam, EnvironmentMap{}, bg, p);
    // Mean red channel per pixel column over the central rows; must not increase with depth.
    std::vector<double> column;
    for (int i = 0; i < 20; i += 2) {
        const auto px = cam.project({(i - 9.5) * h, 0, 0});
        double sum = 0.0;
        for (int yy = 30; yy < 42; ++yy) sum += out.color(static_cast<int>(px->x), yy).x;
        column.push_back(sum / 12.0);
    }
    for (std::size_t c = 1; c < column.size(); ++c) EXPECT_LE(column[c], column[c - 1] + 1e-12) << c;
    EXPECT_LT(column.back(), 0.8 * column.front());
}

TEST(RenderFluid, WarnsWithoutSurfaceParticles) {
    std::vector<std::string> seen;
    auto prev = set_warning_sink([&](const std::string &m) { seen.push_back(m); });
    const auto cam = front_camera(16, 16);
    const std::vector<Vec3> x{{0, 0, 0}};
    const std::vector<std::uint8_t> s{0};
    const std::vector<Vec3> n{{0, 0, 0}};
    render_fluid(x, s, n, cam, EnvironmentMap{}, RgbImage(16, 16), {});
    set_warning_sink(prev);
    EXPECT_EQ(seen.size(), 1u);
}

// ---------------------------------------------------------------- shadows

namespace {
std::vector<GaussianKernel> ground(double y, double half, double spacing) {
    std::vector<GaussianKernel> out;
    for (double x = -half; x <= half + 1e-9; x += spacing)
        for (double z = -half; z <= half + 1e-9; z += spacing) {
            GaussianKernel k;
            k.center = {x, y, z};
            k.scaling = {spacing, spacing, 0.2 * spacing};
            k.rotation = Quat::from_axis_angle({1, 0, 0}, std::numbers::pi / 2);  // flat in xz
            k.normal = {0, 1, 0};
            k.opacity = 1.0;
            out.push_back(k);
        }
    return out;
}
}  // namespace

TEST(Shadow, NoOccludersMeansLit) {
    const auto main = look_at({0, 2, 3}, {0, 0, 0}, {0, 1, 0}, 50, 48, 32);
    const auto light = orthographic_look_at({0, 5, 0.01}, {0, 0, 0}, {0, 0, -1}, 2.0, 48, 32);
    const auto floor = ground(0.0, 1.0, 0.1);
    const std::vector<Rgb> col(floor.size(), Rgb{0.5, 0.5, 0.5});
    const auto view = splat_color(floor, main, col);
    // Only the floor itself: it must not shadow itself.
    const auto f = shadow_pass(floor, light, main, view.depth);
    for (double v : f.pixels) EXPECT_GT(v, 0.99);
    const auto none = shadow_pass({}, light, main, view.depth);
    for (double v : none.pixels) EXPECT_EQ(v, 1.0);
}

TEST(Shadow, SlabCastsUmbra) {
    const auto main = look_at({0, 3, 2}, {0, 0, 0}, {0, 1, 0}, 50, 64, 48);
    const auto light = orthographic_look_at({0, 5, 0.01}, {0, 0, 0}, {0, 0, -1}, 2.0, 64, 48);
    auto scene = ground(0.0, 1.5, 0.1);
    const auto slab = ground(1.0, 0.4, 0.05);
    scene.insert(scene.end(), slab.begin(), slab.end());
    const auto floor = ground(0.0, 1.5, 0.1);
    const std::vector<Rgb> col(floor.size(), Rgb{0.5, 0.5, 0.5});
    const auto view = splat_color(floor, main, col);  // receivers: floor only
    const auto f = shadow_pass(scene, light, main, view.depth);
    double umbra = 0.0, lit = 0.0;
    int nu = 0, nl = 0;
    for (int y = 0; y < main.height; ++y)
        for (int x = 0; x < main.width; ++x) {
            const double z = view.depth(x, y);
            if (!std::isfinite(z)) continue;
            const Vec3 p = main.unproject(x + 0.5, y + 0.5, z);
            if (std::abs(p.x) < 0.25 && std::abs(p.z) < 0.25) {
                umbra += f(x, y);
                ++nu;
            } else if (std::abs(p.x) > 0.8 || std::abs(p.z) > 0.8) {
                lit += f(x, y);
                ++nl;
            }
        }
    ASSERT_GT(nu, 10);
    ASSERT_GT(nl, 10);
    EXPECT_LT(umbra / nu, 0.1);
    EXPECT_GT(lit / nl, 0.9);
    for (double v : f.pixels) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
}

// ---------------------------------------------------------------- foam

TEST(FoamSplat, EmptyIsZero) {
    const auto img = foam_splat({}, front_camera());
    for (double v : img.pixels) EXPECT_EQ(v, 0.0);
}

TEST(FoamSplat, BubbleIsRing) {
    const auto cam = aligned_ortho(16, 16, 1.0);
    FoamParticle b;
    b.position = {0.5 / 8, 0.5 / 8, 0};
    b.type = FoamType::Bubble;
    const std::vector<FoamParticle> foam{b};
    const auto img = foam_splat(foam, cam);
    EXPECT_LT(img(8, 8), img(10, 8));
    EXPECT_GT(img(10, 8), 0.0);
    b.type = FoamType::Foam;
    const std::vector<FoamParticle> disc{b};
    EXPECT_GT(foam_splat(disc, cam)(8, 8), 0.0);
}

TEST(FoamSplat, CurveStaysInUnitInterval) {
    const auto cam = aligned_ortho(16, 16, 1.0);
    std::vector<FoamParticle> foam(5000);
    for (auto &f : foam) f.position = {0, 0, 0};
    const auto img = foam_splat(foam, cam);
    for (double v : img.pixels) {
        EXPECT_GE(v, 0.0);
        EXPECT_LE(v, 1.0);
    }
    EXPECT_EQ(img(8, 8), 1.0);
}

TEST(GenerateFoam, StillFluidMakesNone) {
    const auto x = splatdyn::testing::lattice(6, 6, 6, 0.05);
    const std::vector<Vec3> v(x.size());
    const std::vector<std::uint8_t> s(x.size(), 1);
    const auto nb = fluid::find_neighbors(x, 0.1);
    std::vector<FoamParticle> foam;
    generate_foam(foam, x, v, s, nb, 0.005, 0, {});
    EXPECT_TRUE(foam.empty());
}

TEST(GenerateFoam, ConvergingFastSurfaceSeeds) {
    // Two sheets moving into each other.
    auto x = splatdyn::testing::lattice(6, 2, 6, 0.05);
    std::vector<Vec3> v(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) v[i] = {0, x[i].y < 0.025 ? 3.0 : -3.0, 0};
    const std::vector<std::uint8_t> s(x.size(), 1);
    const auto nb = fluid::find_neighbors(x, 0.1);
    std::vector<FoamParticle> foam;
    generate_foam(foam, x, v, s, nb, 0.005, 0, {});
    EXPECT_GT(foam.size(), 0u);
    // Uniform fast translation has no convergence.
    std::vector<Vec3> u(x.size(), Vec3{3, 0, 0});
    std::vector<FoamParticle> none;
    generate_foam(none, x, u, s, nb, 0.005, 0, {});
    EXPECT_TRUE(none.empty());
}

TEST(GenerateFoam, ExpiredParticlesAreRemovedAndSprayFalls) {
    std::vector<FoamParticle> foam(2);
    foam[0].lifetime = 0.004;
    foam[1].lifetime = 1.0;
    foam[1].position = {10, 10, 10};
    const std::vector<Vec3> x{{0, 0, 0}}, v{{0, 0, 0}};
    const std::vector<std::uint8_t> s{0};
    const auto nb = fluid::find_neighbors(x, 0.1);
    generate_foam(foam, x, v, s, nb, 0.005, 3, {});
    ASSERT_EQ(foam.size(), 1u);
    EXPECT_EQ(foam[0].type, FoamType::Spray);
    EXPECT_LT(foam[0].velocity.y, 0.0);
    EXPECT_NEAR(foam[0].lifetime, 0.995, 1e-12);
}

// ---------------------------------------------------------------- compositing

TEST(Composite, EmptyLayersGiveSolidsOverBackground) {
    const int w = 8, h = 4;
    const RgbImage bg(w, h, Rgb{0.2, 0.4, 0.6});
    auto solids = empty_layer(w, h);
    solids.color(1, 1) = {0.5, 0, 0};
    solids.alpha(1, 1) = 0.5;
    const auto out = composite(bg, solids, empty_layer(w, h), ScalarImage(w, h), ScalarImage(w, h, 1.0));
    EXPECT_EQ(out(0, 0), bg(0, 0));
    EXPECT_LT((out(1, 1) - Rgb{0.6, 0.2, 0.3}).norm(), 1e-15);
    EXPECT_EQ(out(1, 1), over(solids, bg)(1, 1));
}

TEST(Composite, FoamWhiteAndShadowBlack) {
    const int w = 4, h = 4;
    const RgbImage bg(w, h, Rgb{0.2, 0.4, 0.6});
    ScalarImage foam(w, h), shadow(w, h, 1.0);
    foam(0, 0) = 1.0;
    shadow(1, 0) = 0.0;
    shadow(0, 0) = 0.0;
    const auto out = composite(bg, empty_layer(w, h), empty_layer(w, h), foam, shadow);
    EXPECT_EQ(out(0, 0), Rgb(1, 1, 1));
    EXPECT_EQ(out(1, 0), Rgb(0, 0, 0));
    EXPECT_THROW(composite(bg, empty_layer(w, h), empty_layer(w, h + 1), foam, shadow), std::invalid_argument);
}

TEST(Composite, ChannelsStayInUnitInterval) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-0.5, 2.0), a(0.0, 1.0);
    const int w = 16, h = 16;
    RgbImage bg(w, h);
    auto s = empty_layer(w, h), f = empty_layer(w, h);
    ScalarImage foam(w, h), shadow(w, h);
    for (std::size_t i = 0; i < bg.pixels.size(); ++i) {
        bg.pixels[i] = {u(rng), u(rng), u(rng)};
        s.color.pixels[i] = {u(rng), u(rng), u(rng)};
        f.color.pixels[i] = {u(rng), u(rng), u(rng)};
        s.alpha.pixels[i] = a(rng);
        f.alpha.pixels[i] = a(rng);
        foam.pixels[i] = u(rng);
        shadow.pixels[i] = u(rng);
    }
    for (const auto &p : composite(bg, s, f, foam, shadow).pixels) {
        for (double c : {p.x, p.y, p.z}) {
            EXPECT_GE(c, 0.0);
            EXPECT_LE(c, 1.0);
        }
    }
}
