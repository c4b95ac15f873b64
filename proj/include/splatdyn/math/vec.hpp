// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Fixed-size vectors and matrices. Mat3 is stored row-major and acts on
// column vectors: y = M * x, with M(r, c) the element in row r, column c.

#pragma once

#include <array>
#include <cmath>
#include <cstddef>

namespace splatdyn {

template <typename T>
struct Vec2T {
    T x{}, y{};

    constexpr Vec2T() = default;
    constexpr Vec2T(T x_, T y_) : x(x_), y(y_) {}

    constexpr Vec2T operator+(const Vec2T &o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2T operator-(const Vec2T &o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2T operator*(T s) const { return {x * s, y * s}; }
    constexpr bool operator==(const Vec2T &) const = default;
};

template <typename T>
struct Vec3T {
    T x{}, y{}, z{};

    constexpr Vec3T() = default;
    constexpr Vec3T(T x_, T y_, T z_) : x(x_), y(y_), z(z_) {}

    template <typename U>
    constexpr explicit Vec3T(const Vec3T<U> &o)
        : x(static_cast<T>(o.x)), y(static_cast<T>(o.y)), z(static_cast<T>(o.z)) {}

    static constexpr Vec3T zero() { return {}; }
    static constexpr Vec3T splat(T s) { return {s, s, s}; }

    constexpr T &operator[](std::size_t i) { return i == 0 ? x : (i == 1 ? y : z); }
    constexpr const T &operator[](std::size_t i) const { return i == 0 ? x : (i == 1 ? y : z); }

    constexpr Vec3T operator-() const { return {-x, -y, -z}; }
    constexpr Vec3T operator+(const Vec3T &o) const { return {x + o.x, y + o.y, z + o.z}; }
    constexpr Vec3T operator-(const Vec3T &o) const { return {x - o.x, y - o.y, z - o.z}; }
    constexpr Vec3T operator*(T s) const { return {x * s, y * s, z * s}; }
    constexpr Vec3T operator/(T s) const { return {x / s, y / s, z / s}; }
    constexpr Vec3T &operator+=(const Vec3T &o) { x += o.x; y += o.y; z += o.z; return *this; }
    constexpr Vec3T &operator-=(const Vec3T &o) { x -= o.x; y -= o.y; z -= o.z; return *this; }
    constexpr Vec3T &operator*=(T s) { x *= s; y *= s; z *= s; return *this; }
    constexpr bool operator==(const Vec3T &) const = default;

    constexpr T dot(const Vec3T &o) const { return x * o.x + y * o.y + z * o.z; }
    constexpr Vec3T cross(const Vec3T &o) const {
        return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
    }
    constexpr T squared_norm() const { return dot(*this); }
    T norm() const { return std::sqrt(squared_norm()); }
    Vec3T normalized() const {
        const T n = norm();
        return n > T(0) ? *this / n : Vec3T{};
    }
    // Component-wise product.
    constexpr Vec3T cwise(const Vec3T &o) const { return {x * o.x, y * o.y, z * o.z}; }

    bool finite() const { return std::isfinite(x) && std::isfinite(y) && std::isfinite(z); }
};

template <typename T>
constexpr Vec3T<T> operator*(T s, const Vec3T<T> &v) { return v * s; }

template <typename T>
struct Mat3T {
    std::array<T, 9> m{};  // row-major

    constexpr Mat3T() = default;
    constexpr Mat3T(T a00, T a01, T a02, T a10, T a11, T a12, T a20, T a21, T a22)
        : m{a00, a01, a02, a10, a11, a12, a20, a21, a22} {}

    static constexpr Mat3T identity() { return {1, 0, 0, 0, 1, 0, 0, 0, 1}; }
    static constexpr Mat3T zero() { return {}; }
    static constexpr Mat3T diagonal(const Vec3T<T> &d) { return {d.x, 0, 0, 0, d.y, 0, 0, 0, d.z}; }
    static constexpr Mat3T from_columns(const Vec3T<T> &c0, const Vec3T<T> &c1, const Vec3T<T> &c2) {
        return {c0.x, c1.x, c2.x, c0.y, c1.y, c2.y, c0.z, c1.z, c2.z};
    }
    // a * b^T
    static constexpr Mat3T outer(const Vec3T<T> &a, const Vec3T<T> &b) {
        return {a.x * b.x, a.x * b.y, a.x * b.z, a.y * b.x, a.y * b.y,
                a.y * b.z, a.z * b.x, a.z * b.y, a.z * b.z};
    }

    constexpr T &operator()(std::size_t r, std::size_t c) { return m[r * 3 + c]; }
    constexpr const T &operator()(std::size_t r, std::size_t c) const { return m[r * 3 + c]; }

    constexpr Vec3T<T> column(std::size_t c) const { return {m[c], m[3 + c], m[6 + c]}; }
    constexpr Vec3T<T> row(std::size_t r) const { return {m[3 * r], m[3 * r + 1], m[3 * r + 2]}; }

    constexpr Mat3T operator+(const Mat3T &o) const {
        Mat3T r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] + o.m[i];
        return r;
    }
    constexpr Mat3T operator-(const Mat3T &o) const {
        Mat3T r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] - o.m[i];
        return r;
    }
    constexpr Mat3T operator*(T s) const {
        Mat3T r;
        for (std::size_t i = 0; i < 9; ++i) r.m[i] = m[i] * s;
        return r;
    }
    constexpr Mat3T &operator+=(const Mat3T &o) {
        for (std::size_t i = 0; i < 9; ++i) m[i] += o.m[i];
        return *this;
    }
    constexpr Vec3T<T> operator*(const Vec3T<T> &v) const {
        return {m[0] * v.x + m[1] * v.y + m[2] * v.z, m[3] * v.x + m[4] * v.y + m[5] * v.z,
                m[6] * v.x + m[7] * v.y + m[8] * v.z};
    }
    constexpr Mat3T operator*(const Mat3T &o) const {
        Mat3T r;
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 3; ++j)
                r(i, j) = (*this)(i, 0) * o(0, j) + (*this)(i, 1) * o(1, j) + (*this)(i, 2) * o(2, j);
        return r;
    }
    constexpr bool operator==(const Mat3T &) const = default;

    constexpr Mat3T transposed() const {
        return {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
    }
    constexpr T trace() const { return m[0] + m[4] + m[8]; }
    constexpr T determinant() const {
        return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) +
               m[2] * (m[3] * m[7] - m[4] * m[6]);
    }
    // Adjugate-based inverse; caller checks the determinant.
    constexpr Mat3T inverse() const {
        const T det = determinant();
        const T inv = T(1) / det;
        return Mat3T{(m[4] * m[8] - m[5] * m[7]) * inv, (m[2] * m[7] - m[1] * m[8]) * inv,
                     (m[1] * m[5] - m[2] * m[4]) * inv, (m[5] * m[6] - m[3] * m[8]) * inv,
                     (m[0] * m[8] - m[2] * m[6]) * inv, (m[2] * m[3] - m[0] * m[5]) * inv,
                     (m[3] * m[7] - m[4] * m[6]) * inv, (m[1] * m[6] - m[0] * m[7]) * inv,
                     (m[0] * m[4] - m[1] * m[3]) * inv};
    }
    T frobenius_norm() const {
        T s = 0;
        for (T v : m) s += v * v;
        return std::sqrt(s);
    }
    bool finite() const {
        for (T v : m)
            if (!std::isfinite(v)) return false;
        return true;
    }
};

template <typename T>
constexpr Mat3T<T> operator*(T s, const Mat3T<T> &a) { return a * s; }

using Vec2 = Vec2T<double>;
using Vec3 = Vec3T<double>;
using Vec3f = Vec3T<float>;
using Mat3 = Mat3T<double>;

}  // namespace splatdyn
