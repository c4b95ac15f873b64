// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/math/vec.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numeric>

namespace splatdyn {

/// Dense square matrix used by the small symmetric solvers.
template <std::size_t N>
using SquareMatrix = std::array<std::array<double, N>, N>;

template <std::size_t N>
struct SymmetricEigen {
    std::array<double, N> values{};  // descending
    SquareMatrix<N> vectors{};       // vectors[r][c]: column c is the eigenvector for values[c]
};

/// Cyclic Jacobi eigensolver for a symmetric N x N matrix.
template <std::size_t N>
SymmetricEigen<N> symmetric_eigen(SquareMatrix<N> a, int max_sweeps = 64) {
    SquareMatrix<N> v{};
    for (std::size_t i = 0; i < N; ++i) v[i][i] = 1.0;

    double scale = 0.0;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = 0; j < N; ++j) scale = std::max(scale, std::abs(a[i][j]));

    for (int sweep = 0; sweep < max_sweeps && scale > 0.0; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < N; ++p)
            for (std::size_t q = p + 1; q < N; ++q) off += a[p][q] * a[p][q];
        if (off <= 1e-36 * scale * scale) break;

        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const double apq = a[p][q];
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    const double akp = a[k][p];
                    const double akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double apk = a[p][k];
                    const double aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double vkp = v[k][p];
                    const double vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }

    std::array<std::size_t, N> order{};
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t i, std::size_t j) { return a[i][i] > a[j][j]; });
    SymmetricEigen<N> out;
    for (std::size_t c = 0; c < N; ++c) {
        out.values[c] = a[order[c]][order[c]];
        for (std::size_t r = 0; r < N; ++r) out.vectors[r][c] = v[r][order[c]];
    }
    return out;
}

inline SquareMatrix<3> to_square(const Mat3 &m) {
    SquareMatrix<3> s{};
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) s[r][c] = m(r, c);
    return s;
}

inline Mat3 from_square(const SquareMatrix<3> &s) {
    Mat3 m;
    for (std::size_t r = 0; r < 3; ++r)
        for (std::size_t c = 0; c < 3; ++c) m(r, c) = s[r][c];
    return m;
}

/// Any unit vector orthogonal to a unit vector n.
inline Vec3 any_orthogonal(const Vec3 &n) {
    const Vec3 axis = std::abs(n.x) < 0.57 ? Vec3{1, 0, 0}
                      : std::abs(n.y) < 0.57 ? Vec3{0, 1, 0}
                                             : Vec3{0, 0, 1};
    return n.cross(axis).normalized();
}

/// A = U * diag(sigma) * V^T with U and V proper rotations. sigma is
/// descending in magnitude; only sigma[2] may be negative (reflections).
struct SignedSvd3 {
    Mat3 u;
    Vec3 sigma;
    Mat3 v;
};

inline SignedSvd3 signed_svd(const Mat3 &a) {
    const auto eig = symmetric_eigen<3>(to_square(a.transposed() * a));
    Mat3 v = from_square(eig.vectors);
    if (v.determinant() < 0.0) {
        for (std::size_t r = 0; r < 3; ++r) v(r, 2) = -v(r, 2);
    }
    const Vec3 v0 = v.column(0), v1 = v.column(1), v2 = v.column(2);
    const Vec3 b0 = a * v0, b1 = a * v1, b2 = a * v2;

    const double tiny = 1e-300;
    const double s0 = b0.norm();
    const Vec3 u0 = s0 > tiny ? b0 / s0 : Vec3{1, 0, 0};
    Vec3 u1 = b1 - u0 * b1.dot(u0);
    const double s1 = u1.norm();
    const double rel = std::max(s0, 1.0) * 1e-14;
    u1 = s1 > rel ? u1 / s1 : any_orthogonal(u0);
    const Vec3 u2 = u0.cross(u1);

    SignedSvd3 out;
    out.u = Mat3::from_columns(u0, u1, u2);
    out.sigma = {s0, u1.dot(b1), u2.dot(b2)};
    out.v = v;
    return out;
}

/// Rotational part of the polar decomposition of A, restricted to proper
/// rotations: the R with det(R) = +1 closest to A in the Frobenius norm.
inline Mat3 polar_rotation(const Mat3 &a) {
    const auto svd = signed_svd(a);
    return svd.u * svd.v.transposed();
}

/// Unit quaternion (w, x, y, z).
struct Quat {
    double w = 1, x = 0, y = 0, z = 0;

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const {
        const double n = norm();
        return n > 0.0 ? Quat{w / n, x / n, y / n, z / n} : Quat{};
    }

    Mat3 to_matrix() const {
        const Quat q = normalized();
        const double xx = q.x * q.x, yy = q.y * q.y, zz = q.z * q.z;
        const double xy = q.x * q.y, xz = q.x * q.z, yz = q.y * q.z;
        const double wx = q.w * q.x, wy = q.w * q.y, wz = q.w * q.z;
        return {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
                2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
                2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
    }

    // Shepperd's method; r must be a proper rotation.
    static Quat from_matrix(const Mat3 &r) {
        const double tr = r.trace();
        Quat q;
        if (tr > 0.0) {
            const double s = std::sqrt(tr + 1.0) * 2.0;
            q = {0.25 * s, (r(2, 1) - r(1, 2)) / s, (r(0, 2) - r(2, 0)) / s, (r(1, 0) - r(0, 1)) / s};
        } else if (r(0, 0) > r(1, 1) && r(0, 0) > r(2, 2)) {
            const double s = std::sqrt(1.0 + r(0, 0) - r(1, 1) - r(2, 2)) * 2.0;
            q = {(r(2, 1) - r(1, 2)) / s, 0.25 * s, (r(0, 1) + r(1, 0)) / s, (r(0, 2) + r(2, 0)) / s};
        } else if (r(1, 1) > r(2, 2)) {
            const double s = std::sqrt(1.0 + r(1, 1) - r(0, 0) - r(2, 2)) * 2.0;
            q = {(r(0, 2) - r(2, 0)) / s, (r(0, 1) + r(1, 0)) / s, 0.25 * s, (r(1, 2) + r(2, 1)) / s};
        } else {
            const double s = std::sqrt(1.0 + r(2, 2) - r(0, 0) - r(1, 1)) * 2.0;
            q = {(r(1, 0) - r(0, 1)) / s, (r(0, 2) + r(2, 0)) / s, (r(1, 2) + r(2, 1)) / s, 0.25 * s};
        }
        if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
        return q.normalized();
    }

    static Quat from_axis_angle(const Vec3 &axis, double angle) {
        const Vec3 a = axis.normalized();
        const double s = std::sin(0.5 * angle);
        return {std::cos(0.5 * angle), a.x * s, a.y * s, a.z * s};
    }
};

inline Mat3 rotation_about(const Vec3 &axis, double angle) {
    return Quat::from_axis_angle(axis, angle).to_matrix();
}

/// Solve the symmetric positive (semi)definite system M x = b via the
/// eigendecomposition; returns false if M is ill-conditioned beyond max_condition.
template <std::size_t N>
bool solve_symmetric(const SquareMatrix<N> &m, const std::array<double, N> &b,
                     std::array<double, N> &x, double max_condition = 1e12) {
    const auto eig = symmetric_eigen<N>(m);
    const double top = std::abs(eig.values[0]);
    if (!(top > 0.0) || !std::isfinite(top)) return false;
    for (std::size_t c = 0; c < N; ++c) {
        if (!(eig.values[c] > top / max_condition)) return false;
    }
    x.fill(0.0);
    for (std::size_t c = 0; c < N; ++c) {
        double proj = 0.0;
        for (std::size_t r = 0; r < N; ++r) proj += eig.vectors[r][c] * b[r];
        proj /= eig.values[c];
        for (std::size_t r = 0; r < N; ++r) x[r] += proj * eig.vectors[r][c];
    }
    return true;
}

}  // namespace splatdyn
