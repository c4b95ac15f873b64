// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Binary frame dumps. All fields little-endian, doubles as IEEE-754 binary64.
//
//   header   40 B  "SPDF", u32 version, u64 frame, u64 particles, u64 foam, u64 kernels
//   particle 80 B  position, velocity, normal (9 x f64), i32 phase, u32 flags (bit 0: surface)
//   foam     64 B  position, velocity (6 x f64), f64 lifetime, u32 type, u32 zero
//   kernel  104 B  center (3), rotation w x y z (4), scaling (3), normal (3), all f64
//
// The file is exactly header + records; anything shorter or longer is rejected.

#pragma once

#include <splatdyn/render/foam.hpp>
#include <splatdyn/render/kernel.hpp>
#include <splatdyn/xpbd/particle.hpp>

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <limits>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace splatdyn::scene {

inline constexpr std::uint32_t kFrameVersion = 1;
inline constexpr std::size_t kFrameHeaderBytes = 40;
inline constexpr std::size_t kParticleRecordBytes = 80;
inline constexpr std::size_t kFoamRecordBytes = 64;
inline constexpr std::size_t kKernelRecordBytes = 104;

struct ParticleRecord {
    Vec3 position;
    Vec3 velocity;
    Vec3 normal;
    xpbd::Phase phase;
    bool surface = false;
    bool operator==(const ParticleRecord &) const = default;
};

/// Deformed transform of one render kernel; materials stay in the asset.
struct KernelPose {
    Vec3 center;
    Quat rotation;
    Vec3 scaling{1, 1, 1};
    Vec3 normal{0, 0, 1};
    bool operator==(const KernelPose &o) const {
        return center == o.center && rotation.w == o.rotation.w && rotation.x == o.rotation.x &&
               rotation.y == o.rotation.y && rotation.z == o.rotation.z && scaling == o.scaling && normal == o.normal;
    }
};

struct FrameDump {
    std::uint64_t frame = 0;
    std::vector<ParticleRecord> particles;
    std::vector<render::FoamParticle> foam;
    std::vector<KernelPose> kernels;
    bool operator==(const FrameDump &) const = default;
};

inline std::size_t frame_file_size(std::size_t particles, std::size_t foam, std::size_t kernels) {
    return kFrameHeaderBytes + particles * kParticleRecordBytes + foam * kFoamRecordBytes +
           kernels * kKernelRecordBytes;
}

namespace detail {

class ByteWriter {
public:
    template <typename U>
    void put(U v) {
        static_assert(std::is_unsigned_v<U>);
        for (std::size_t b = 0; b < sizeof(U); ++b) bytes.push_back(static_cast<char>((v >> (8 * b)) & 0xff));
    }
    void f64(double v) { put(std::bit_cast<std::uint64_t>(v)); }
    void vec(const Vec3 &v) {
        f64(v.x);
        f64(v.y);
        f64(v.z);
    }
    std::vector<char> bytes;
};

class ByteReader {
public:
    ByteReader(const std::vector<char> &b, const std::string &origin) : bytes_(b), origin_(origin) {}
    template <typename U>
    U get() {
        if (pos_ + sizeof(U) > bytes_.size()) throw std::runtime_error(origin_ + ": truncated frame dump");
        U v = 0;
        for (std::size_t b = 0; b < sizeof(U); ++b)
            v |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + b])) << (8 * b);
        pos_ += sizeof(U);
        return v;
    }
    double f64() { return std::bit_cast<double>(get<std::uint64_t>()); }
    Vec3 vec() {
        const double x = f64(), y = f64();
        return {x, y, f64()};
    }

private:
    const std::vector<char> &bytes_;
    std::string origin_;
    std::size_t pos_ = 0;
};

}  // namespace detail

inline std::vector<char> encode_frame(const FrameDump &f) {
    detail::ByteWriter w;
    w.bytes.reserve(frame_file_size(f.particles.size(), f.foam.size(), f.kernels.size()));
    for (char c : {'S', 'P', 'D', 'F'}) w.bytes.push_back(c);
    w.put(kFrameVersion);
    w.put(std::uint64_t(f.frame));
    w.put(std::uint64_t(f.particles.size()));
    w.put(std::uint64_t(f.foam.size()));
    w.put(std::uint64_t(f.kernels.size()));
    for (const auto &p : f.particles) {
        w.vec(p.position);
        w.vec(p.velocity);
        w.vec(p.normal);
        w.put(static_cast<std::uint32_t>(p.phase.body));
        w.put(std::uint32_t(p.surface ? 1u : 0u));
    }
    for (const auto &p : f.foam) {
        w.vec(p.position);
        w.vec(p.velocity);
        w.f64(p.lifetime);
        w.put(static_cast<std::uint32_t>(p.type));
        w.put(std::uint32_t(0));
    }
    for (const auto &k : f.kernels) {
        w.vec(k.center);
        w.f64(k.rotation.w);
        w.f64(k.rotation.x);
        w.f64(k.rotation.y);
        w.f64(k.rotation.z);
        w.vec(k.scaling);
        w.vec(k.normal);
    }
    return std::move(w.bytes);
}

inline FrameDump decode_frame(const std::vector<char> &bytes, const std::string &origin = "<frame>") {
    if (bytes.size() < kFrameHeaderBytes) throw std::runtime_error(origin + ": truncated frame dump");
    if (std::memcmp(bytes.data(), "SPDF", 4) != 0) throw std::runtime_error(origin + ": not a frame dump");
    detail::ByteReader r(bytes, origin);
    (void)r.get<std::uint32_t>();
    const auto version = r.get<std::uint32_t>();
    if (version != kFrameVersion)
        throw std::runtime_error(origin + ": frame dump version " + std::to_string(version) + ", expected " +
                                 std::to_string(kFrameVersion));
    FrameDump f;
    f.frame = r.get<std::uint64_t>();
    const auto np = r.get<std::uint64_t>(), nf = r.get<std::uint64_t>(), nk = r.get<std::uint64_t>();
    // Guard the size arithmetic before trusting the counts.
    const std::uint64_t limit = bytes.size();
    if (np > limit / kParticleRecordBytes || nf > limit / kFoamRecordBytes || nk > limit / kKernelRecordBytes)
        throw std::runtime_error(origin + ": truncated frame dump");
    const std::size_t expect = frame_file_size(np, nf, nk);
    if (bytes.size() < expect) throw std::runtime_error(origin + ": truncated frame dump");
    if (bytes.size() > expect) throw std::runtime_error(origin + ": trailing bytes after frame dump");
    f.particles.resize(np);
    for (auto &p : f.particles) {
        p.position = r.vec();
        p.velocity = r.vec();
        p.normal = r.vec();
        p.phase.body = static_cast<std::int32_t>(r.get<std::uint32_t>());
        p.surface = (r.get<std::uint32_t>() & 1u) != 0;
    }
    f.foam.resize(nf);
    for (auto &p : f.foam) {
        p.position = r.vec();
        p.velocity = r.vec();
        p.lifetime = r.f64();
        const auto type = r.get<std::uint32_t>();
        if (type > 2) throw std::runtime_error(origin + ": unknown foam type " + std::to_string(type));
        p.type = static_cast<render::FoamType>(type);
        (void)r.get<std::uint32_t>();
    }
    f.kernels.resize(nk);
    for (auto &k : f.kernels) {
        k.center = r.vec();
        k.rotation.w = r.f64();
        k.rotation.x = r.f64();
        k.rotation.y = r.f64();
        k.rotation.z = r.f64();
        k.scaling = r.vec();
        k.normal = r.vec();
    }
    return f;
}

inline void dump_frame(const std::string &path, const FrameDump &f) {
    const auto bytes = encode_frame(f);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write frame dump " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("short write to " + path);
}

inline FrameDump load_frame(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open frame dump " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return decode_frame(bytes, path);
}

/// "x y z phase surface" per particle, for external point-cloud viewers.
inline void export_point_cloud(std::ostream &out, const FrameDump &f) {
    out << "# x y z phase surface\n" << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto &p : f.particles)
        out << p.position.x << ' ' << p.position.y << ' ' << p.position.z << ' ' << p.phase.body << ' '
            << (p.surface ? 1 : 0) << '\n';
}

/// frame_00012.spdf
inline std::string frame_file_name(std::uint64_t frame) {
    std::string digits = std::to_string(frame);
    if (digits.size() < 5) digits.insert(0, 5 - digits.size(), '0');
    return "frame_" + digits + ".spdf";
}

}  // namespace splatdyn::scene
