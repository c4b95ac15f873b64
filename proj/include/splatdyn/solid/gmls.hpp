// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Moving least squares transfer from simulation particles to render kernels.
// Weights come from an affine basis fitted once on the rest configuration.

#pragma once

#include <splatdyn/fluid/neighbors.hpp>
#include <splatdyn/log.hpp>
#include <splatdyn/math/linalg.hpp>
#include <splatdyn/math/sph_kernel.hpp>

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace splatdyn::solid {

struct GmlsStencil {
    std::vector<std::uint32_t> neighbors;  // sim particle indices
    std::vector<double> weights;           // phi_j, sum to 1
    bool fallback = false;                 // inverse-distance weights were used
};

struct GmlsBinding {
    std::vector<GmlsStencil> stencils;  // one per render kernel
    std::vector<Vec3> rest_points;      // kernel positions at bind time
    std::vector<Vec3> rest_particles;   // sim positions at bind time

    std::size_t size() const { return stencils.size(); }
    std::size_t fallback_count() const {
        std::size_t c = 0;
        for (const auto &s : stencils) c += s.fallback ? 1 : 0;
        return c;
    }
};

namespace detail {

inline std::vector<double> inverse_distance_weights(std::span<const Vec3> pts, std::span<const std::uint32_t> nb,
                                                    const Vec3 &y) {
    std::vector<double> w(nb.size(), 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < nb.size(); ++k) {
        const double d = (pts[nb[k]] - y).norm();
        if (d == 0.0) {
            std::fill(w.begin(), w.end(), 0.0);
            w[k] = 1.0;
            return w;
        }
        w[k] = 1.0 / d;
        total += w[k];
    }
    for (auto &v : w) v /= total;
    return w;
}

/// phi_j = theta_j e1^T M^-1 p_j with p_j = (1, (x_j - y) / h) and M = sum theta p p^T.
/// Empty result when M is too ill-conditioned to invert.
inline std::vector<double> mls_weights(std::span<const Vec3> pts, std::span<const std::uint32_t> nb, const Vec3 &y,
                                       double h) {
    SquareMatrix<4> m{};
    std::vector<double> theta(nb.size());
    std::vector<std::array<double, 4>> basis(nb.size());
    for (std::size_t k = 0; k < nb.size(); ++k) {
        const Vec3 d = (pts[nb[k]] - y) / h;
        basis[k] = {1.0, d.x, d.y, d.z};
        theta[k] = splatdyn::detail::cubic_kernel(d.norm(), 1.0);
        for (std::size_t a = 0; a < 4; ++a)
            for (std::size_t b = 0; b < 4; ++b) m[a][b] += theta[k] * basis[k][a] * basis[k][b];
    }
    // M is symmetric, so e1^T M^-1 = (M^-1 e1)^T.
    std::array<double, 4> c{};
    if (!solve_symmetric<4>(m, {1.0, 0.0, 0.0, 0.0}, c, 1e10)) return {};
    std::vector<double> w(nb.size());
    for (std::size_t k = 0; k < nb.size(); ++k) {
        double s = 0.0;
        for (std::size_t a = 0; a < 4; ++a) s += c[a] * basis[k][a];
        w[k] = theta[k] * s;
    }
    return w;
}

}  // namespace detail

/// Binds each kernel position to its k nearest sim particles at rest.
inline GmlsBinding bind_gmls(std::span<const Vec3> kernel_rest, std::span<const Vec3> particle_rest,
                             std::size_t k = 8) {
    if (k < 4) throw std::invalid_argument("bind_gmls: k must be at least 4");
    if (particle_rest.empty()) throw std::invalid_argument("bind_gmls: no simulation particles");
    GmlsBinding out;
    out.rest_points.assign(kernel_rest.begin(), kernel_rest.end());
    out.rest_particles.assign(particle_rest.begin(), particle_rest.end());
    out.stencils.resize(kernel_rest.size());
    for (std::size_t i = 0; i < kernel_rest.size(); ++i) {
        auto &s = out.stencils[i];
        const Vec3 y = kernel_rest[i];
        s.neighbors = fluid::k_nearest(particle_rest, y, k);
        const double kth = (particle_rest[s.neighbors.back()] - y).norm();
        if (s.neighbors.size() >= 4 && kth > 0.0) s.weights = detail::mls_weights(particle_rest, s.neighbors, y, 1.5 * kth);
        if (s.weights.empty()) {
            s.weights = detail::inverse_distance_weights(particle_rest, s.neighbors, y);
            s.fallback = true;
        }
    }
    if (const auto f = out.fallback_count(); f > 0)
        warn(std::to_string(f) + " render kernels bound with inverse-distance weights");
    return out;
}

/// Kernel positions for the current sim positions (rest position plus interpolated displacement).
inline std::vector<Vec3> gmls_interpolate_positions(const GmlsBinding &b, std::span<const Vec3> particles) {
    if (particles.size() != b.rest_particles.size())
        throw std::invalid_argument("gmls_interpolate_positions: particle count differs from binding");
    std::vector<Vec3> out(b.size());
    const long n = static_cast<long>(b.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (long il = 0; il < n; ++il) {
        const auto i = static_cast<std::size_t>(il);
        const auto &s = b.stencils[i];
        Vec3 disp{};
        for (std::size_t k = 0; k < s.neighbors.size(); ++k) {
            const auto j = s.neighbors[k];
            disp += (particles[j] - b.rest_particles[j]) * s.weights[k];
        }
        out[i] = b.rest_points[i] + disp;
    }
    return out;
}

inline std::vector<Mat3> gmls_interpolate_gradients(const GmlsBinding &b, std::span<const Mat3> F) {
    if (F.size() != b.rest_particles.size())
        throw std::invalid_argument("gmls_interpolate_gradients: particle count differs from binding");
    std::vector<Mat3> out(b.size(), Mat3::zero());
    const long n = static_cast<long>(b.size());
#pragma omp parallel for schedule(static) if (n > 4096)
    for (long il = 0; il < n; ++il) {
        const auto i = static_cast<std::size_t>(il);
        const auto &s = b.stencils[i];
        for (std::size_t k = 0; k < s.neighbors.size(); ++k) out[i] += F[s.neighbors[k]] * s.weights[k];
    }
    return out;
}

}  // namespace splatdyn::solid
