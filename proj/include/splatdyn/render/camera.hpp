// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Pinhole and orthographic cameras. Camera space has +x right, +y down and
// +z forward; pixel (x, y) covers [x, x + 1) x [y, y + 1) with row 0 at the top.

#pragma once

#include <splatdyn/math/vec.hpp>

#include <cmath>
#include <numbers>
#include <optional>
#include <stdexcept>

namespace splatdyn::render {

using Vec2 = Vec2T<double>;

struct Camera {
    Mat3 rotation = Mat3::identity();  // world to camera
    Vec3 position;                     // centre of projection, world space
    double fx = 1.0, fy = 1.0;         // pixels per unit (orthographic) or focal length in pixels
    double cx = 0.0, cy = 0.0;         // principal point, pixels
    int width = 1, height = 1;
    double near = 0.01;
    bool orthographic = false;

    void validate() const {
        if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("Camera: focal lengths must be positive");
        if (!(near > 0.0)) throw std::invalid_argument("Camera: near plane must be positive");
        if (width < 1 || height < 1) throw std::invalid_argument("Camera: image size must be positive");
        if (std::abs(rotation.determinant() - 1.0) > 1e-6)
            throw std::invalid_argument("Camera: rotation must be a proper rotation");
    }

    Vec3 to_camera(const Vec3 &p) const { return rotation * (p - position); }
    Vec3 to_world(const Vec3 &c) const { return rotation.transposed() * c + position; }
    Vec3 forward() const { return rotation.row(2); }

    /// Pixel coordinates of a camera-space point; nullopt in front of the near plane.
    std::optional<Vec2> project_camera(const Vec3 &c) const {
        if (c.z < near) return std::nullopt;
        if (orthographic) return Vec2{fx * c.x + cx, fy * c.y + cy};
        return Vec2{fx * c.x / c.z + cx, fy * c.y / c.z + cy};
    }
    std::optional<Vec2> project(const Vec3 &p) const { return project_camera(to_camera(p)); }

    /// World point at camera depth z under pixel coordinate (px, py).
    Vec3 unproject(double px, double py, double z) const {
        const double x = (px - cx) / fx, y = (py - cy) / fy;
        return orthographic ? to_world({x, y, z}) : to_world({x * z, y * z, z});
    }

    /// Unit world-space direction of the viewing ray through (px, py).
    Vec3 ray_direction(double px, double py) const {
        if (orthographic) return forward();
        return (rotation.transposed() * Vec3{(px - cx) / fx, (py - cy) / fy, 1.0}).normalized();
    }

    /// Unit direction from the camera towards p.
    Vec3 view_direction(const Vec3 &p) const { return orthographic ? forward() : (p - position).normalized(); }

    /// Same view at s times the resolution.
    Camera scaled(double s) const {
        Camera c = *this;
        c.width = std::max(1, static_cast<int>(std::lround(width * s)));
        c.height = std::max(1, static_cast<int>(std::lround(height * s)));
        c.fx *= s;
        c.fy *= s;
        c.cx *= s;
        c.cy *= s;
        return c;
    }
};

namespace detail {
inline Mat3 look_rotation(const Vec3 &eye, const Vec3 &target, const Vec3 &up) {
    const Vec3 f = (target - eye).normalized();
    const Vec3 r = f.cross(up);
    if (!(r.norm() > 1e-9) || !f.finite()) throw std::invalid_argument("look_at: degenerate eye, target or up vector");
    const Vec3 right = r.normalized();
    const Vec3 down = f.cross(right);
    return {right.x, right.y, right.z, down.x, down.y, down.z, f.x, f.y, f.z};
}
}  // namespace detail

/// Perspective camera at eye looking at target with vertical field of view in degrees.
inline Camera look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up, double fov_y_deg, int width,
                      int height, double near = 0.01) {
    if (!(fov_y_deg > 0.0 && fov_y_deg < 180.0)) throw std::invalid_argument("look_at: field of view out of range");
    Camera c;
    c.rotation = detail::look_rotation(eye, target, up);
    c.position = eye;
    c.width = width;
    c.height = height;
    c.fy = 0.5 * height / std::tan(0.5 * fov_y_deg * std::numbers::pi / 180.0);
    c.fx = c.fy;
    c.cx = 0.5 * width;
    c.cy = 0.5 * height;
    c.near = near;
    c.validate();
    return c;
}

/// Orthographic camera whose image spans half_height world units above and below the axis.
inline Camera orthographic_look_at(const Vec3 &eye, const Vec3 &target, const Vec3 &up, double half_height,
                                   int width, int height, double near = 0.01) {
    if (!(half_height > 0.0)) throw std::invalid_argument("orthographic_look_at: half_height must be positive");
    Camera c;
    c.rotation = detail::look_rotation(eye, target, up);
    c.position = eye;
    c.width = width;
    c.height = height;
    c.fy = 0.5 * height / half_height;
    c.fx = c.fy;
    c.cx = 0.5 * width;
    c.cy = 0.5 * height;
    c.near = near;
    c.orthographic = true;
    c.validate();
    return c;
}

}  // namespace splatdyn::render
