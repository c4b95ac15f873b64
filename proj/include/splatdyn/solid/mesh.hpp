// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Triangle meshes: OBJ subset loading, watertightness, and point containment
// by ray-crossing parity.

#pragma once

#include <splatdyn/math/vec.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace splatdyn::solid {

struct TriangleMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<std::uint32_t, 3>> triangles;

    std::pair<Vec3, Vec3> bounds() const {
        Vec3 lo = Vec3::splat(std::numeric_limits<double>::infinity());
        Vec3 hi = -lo;
        for (const auto &v : vertices) {
            lo = {std::min(lo.x, v.x), std::min(lo.y, v.y), std::min(lo.z, v.z)};
            hi = {std::max(hi.x, v.x), std::max(hi.y, v.y), std::max(hi.z, v.z)};
        }
        return {lo, hi};
    }

    /// Translates and scales every vertex: v <- v * scale + offset.
    void transform(double scale, const Vec3 &offset) {
        for (auto &v : vertices) v = v * scale + offset;
    }
};

/// Parses "v x y z" and "f a b c ..." lines (1-based or negative indices,
/// optional /vt/vn suffixes). Polygons are fan-triangulated; other lines are ignored.
inline TriangleMesh parse_obj(std::istream &in, const std::string &origin = "<obj>") {
    TriangleMesh mesh;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string &why) {
        throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
    };
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            Vec3 v;
            if (!(ls >> v.x >> v.y >> v.z)) fail("malformed vertex");
            if (!v.finite()) fail("non-finite vertex");
            mesh.vertices.push_back(v);
        } else if (tag == "f") {
            std::vector<std::uint32_t> idx;
            std::string tok;
            while (ls >> tok) {
                long long k = 0;
                try {
                    k = std::stoll(tok.substr(0, tok.find('/')));
                } catch (const std::exception &) {
                    fail("malformed face index '" + tok + "'");
                }
                const auto n = static_cast<long long>(mesh.vertices.size());
                if (k < 0) k += n + 1;
                if (k < 1 || k > n) fail("face index out of range");
                idx.push_back(static_cast<std::uint32_t>(k - 1));
            }
            if (idx.size() < 3) fail("face with fewer than 3 vertices");
            for (std::size_t t = 1; t + 1 < idx.size(); ++t) mesh.triangles.push_back({idx[0], idx[t], idx[t + 1]});
        }
    }
    if (mesh.triangles.empty()) throw std::runtime_error(origin + ": no faces");
    return mesh;
}

inline TriangleMesh load_obj(const std::string &path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open mesh '" + path + "'");
    return parse_obj(f, path);
}

inline void write_obj(std::ostream &out, const TriangleMesh &mesh) {
    out.precision(17);
    for (const auto &v : mesh.vertices) out << "v " << v.x << ' ' << v.y << ' ' << v.z << '\n';
    for (const auto &t : mesh.triangles) out << "f " << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
}

/// Every edge is used exactly twice, once in each direction.
inline bool is_watertight(const TriangleMesh &mesh) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> directed;
    for (const auto &t : mesh.triangles) {
        for (int e = 0; e < 3; ++e) {
            const auto a = t[e], b = t[(e + 1) % 3];
            if (a == b) return false;
            if (++directed[{a, b}] > 1) return false;
        }
    }
    for (const auto &[edge, count] : directed)
        if (!directed.contains({edge.second, edge.first})) return false;
    return true;
}

/// Enclosed volume (divergence theorem); positive for outward-facing triangles.
inline double mesh_volume(const TriangleMesh &mesh) {
    double v = 0.0;
    for (const auto &t : mesh.triangles)
        v += mesh.vertices[t[0]].dot(mesh.vertices[t[1]].cross(mesh.vertices[t[2]]));
    return v / 6.0;
}

/// Axis-aligned box with outward-facing triangles.
inline TriangleMesh make_box_mesh(const Vec3 &lo, const Vec3 &hi) {
    TriangleMesh m;
    for (int i = 0; i < 8; ++i)
        m.vertices.push_back({(i & 1) ? hi.x : lo.x, (i & 2) ? hi.y : lo.y, (i & 4) ? hi.z : lo.z});
    const std::uint32_t quads[6][4] = {{0, 4, 6, 2}, {1, 3, 7, 5}, {0, 1, 5, 4},
                                       {2, 6, 7, 3}, {0, 2, 3, 1}, {4, 5, 7, 6}};
    for (const auto &q : quads) {
        m.triangles.push_back({q[0], q[1], q[2]});
        m.triangles.push_back({q[0], q[2], q[3]});
    }
    return m;
}

namespace detail {

/// Moller-Trumbore; true when the ray o + t d (t > 0) crosses the triangle.
inline bool ray_hits(const Vec3 &o, const Vec3 &d, const Vec3 &a, const Vec3 &b, const Vec3 &c) {
    const Vec3 e1 = b - a, e2 = c - a;
    const Vec3 p = d.cross(e2);
    const double det = e1.dot(p);
    if (std::abs(det) < 1e-300) return false;
    const double inv = 1.0 / det;
    const Vec3 s = o - a;
    const double u = s.dot(p) * inv;
    if (u < 0.0 || u > 1.0) return false;
    const Vec3 q = s.cross(e1);
    const double v = d.dot(q) * inv;
    if (v < 0.0 || u + v > 1.0) return false;
    return e2.dot(q) * inv > 0.0;
}

}  // namespace detail

/// Majority vote of crossing parity along three fixed, irrational-ish ray directions.
inline bool contains(const TriangleMesh &mesh, const Vec3 &p) {
    static const std::array<Vec3, 3> dirs{Vec3{0.5773, 0.5911, 0.5634}.normalized(),
                                          Vec3{-0.6417, 0.3102, 0.7013}.normalized(),
                                          Vec3{0.2209, -0.8731, 0.4346}.normalized()};
    int votes = 0;
    for (const auto &d : dirs) {
        int crossings = 0;
        for (const auto &t : mesh.triangles)
            if (detail::ray_hits(p, d, mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]))
                ++crossings;
        votes += crossings & 1;
    }
    return votes >= 2;
}

}  // namespace splatdyn::solid
