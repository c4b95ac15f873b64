// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// Row-major images (top row first) and PPM / PFM file I/O.

#pragma once

#include <splatdyn/math/vec.hpp>

#include <algorithm>
#include <bit>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace splatdyn::render {

using Rgb = Vec3;

template <typename T>
struct Image {
    int width = 0;
    int height = 0;
    std::vector<T> pixels;

    Image() = default;
    Image(int w, int h, const T &fill = T{}) : width(w), height(h), pixels(std::size_t(w) * std::size_t(h), fill) {
        if (w < 0 || h < 0) throw std::invalid_argument("Image: negative dimensions");
    }

    bool empty() const { return pixels.empty(); }
    bool same_size(int w, int h) const { return width == w && height == h; }
    template <typename U>
    bool same_size(const Image<U> &o) const { return width == o.width && height == o.height; }

    T &operator()(int x, int y) { return pixels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }
    const T &operator()(int x, int y) const { return pixels[std::size_t(y) * std::size_t(width) + std::size_t(x)]; }

    const T &clamped(int x, int y) const {
        return (*this)(std::clamp(x, 0, width - 1), std::clamp(y, 0, height - 1));
    }

    /// Bilinear lookup at continuous pixel coordinates (pixel centres at +0.5),
    /// clamping to the border.
    T bilinear(double px, double py) const {
        const double fx = px - 0.5, fy = py - 0.5;
        const double x0 = std::floor(fx), y0 = std::floor(fy);
        const double tx = fx - x0, ty = fy - y0;
        const int ix = static_cast<int>(x0), iy = static_cast<int>(y0);
        const T a = clamped(ix, iy), b = clamped(ix + 1, iy), c = clamped(ix, iy + 1), d = clamped(ix + 1, iy + 1);
        return (a * (1.0 - tx) + b * tx) * (1.0 - ty) + (c * (1.0 - tx) + d * tx) * ty;
    }
};

using RgbImage = Image<Rgb>;
using ScalarImage = Image<double>;

inline std::uint8_t to_byte(double v) {
    if (!(v > 0.0)) return 0;  // also maps NaN to 0
    if (v >= 1.0) return 255;
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
}

/// Binary P6 with maxval 255; channels are clamped to [0, 1] and rounded.
inline void write_ppm(std::ostream &out, const RgbImage &img) {
    out << "P6\n" << img.width << ' ' << img.height << "\n255\n";
    std::vector<std::uint8_t> row(std::size_t(img.width) * 3);
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            const Rgb &c = img(x, y);
            row[3 * std::size_t(x)] = to_byte(c.x);
            row[3 * std::size_t(x) + 1] = to_byte(c.y);
            row[3 * std::size_t(x) + 2] = to_byte(c.z);
        }
        out.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size()));
    }
    if (!out) throw std::runtime_error("write_ppm: write failed");
}

inline void write_ppm(const std::string &path, const RgbImage &img) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_ppm(f, img);
}

namespace detail {

// Reads the next whitespace-separated header token, skipping '#' comments.
inline std::string header_token(std::istream &in) {
    std::string tok;
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n') c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    while (c != EOF && !std::isspace(c)) {
        tok.push_back(static_cast<char>(c));
        c = in.get();
    }
    return tok;
}

inline int header_int(std::istream &in, const char *what) {
    const std::string tok = header_token(in);
    try {
        std::size_t used = 0;
        const int v = std::stoi(tok, &used);
        if (used == tok.size() && v > 0) return v;
    } catch (const std::exception &) {
    }
    throw std::runtime_error(std::string("image header: bad ") + what + " '" + tok + "'");
}

inline std::uint32_t swap_bytes(std::uint32_t v) {
    return (v >> 24) | ((v >> 8) & 0xff00u) | ((v << 8) & 0xff0000u) | (v << 24);
}

}  // namespace detail

/// Binary P6 (maxval up to 255); values are mapped to [0, 1].
inline RgbImage read_ppm(std::istream &in) {
    if (detail::header_token(in) != "P6") throw std::runtime_error("read_ppm: not a binary P6 file");
    const int w = detail::header_int(in, "width"), h = detail::header_int(in, "height");
    const int maxval = detail::header_int(in, "maxval");
    if (maxval > 255) throw std::runtime_error("read_ppm: only 8-bit pixmaps are supported");
    std::vector<std::uint8_t> raw(std::size_t(w) * std::size_t(h) * 3);
    in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (in.gcount() != static_cast<std::streamsize>(raw.size())) throw std::runtime_error("read_ppm: truncated pixel data");
    RgbImage img(w, h);
    for (std::size_t i = 0; i < img.pixels.size(); ++i)
        img.pixels[i] = Rgb{double(raw[3 * i]), double(raw[3 * i + 1]), double(raw[3 * i + 2])} / double(maxval);
    return img;
}

/// Colour PFM ("PF"). The file stores rows bottom to top; the scale sign
/// gives the byte order (negative: little-endian).
inline RgbImage read_pfm(std::istream &in) {
    if (detail::header_token(in) != "PF") throw std::runtime_error("read_pfm: not a colour PFM file");
    const int w = detail::header_int(in, "width"), h = detail::header_int(in, "height");
    const std::string scale_tok = detail::header_token(in);
    double scale = 0.0;
    try {
        scale = std::stod(scale_tok);
    } catch (const std::exception &) {
        throw std::runtime_error("read_pfm: bad scale '" + scale_tok + "'");
    }
    if (scale == 0.0 || !std::isfinite(scale)) throw std::runtime_error("read_pfm: bad scale '" + scale_tok + "'");
    const bool file_le = scale < 0.0;
    const bool host_le = std::endian::native == std::endian::little;
    std::vector<std::uint32_t> raw(std::size_t(w) * std::size_t(h) * 3);
    in.read(reinterpret_cast<char *>(raw.data()), static_cast<std::streamsize>(raw.size() * 4));
    if (in.gcount() != static_cast<std::streamsize>(raw.size() * 4)) throw std::runtime_error("read_pfm: truncated pixel data");
    RgbImage img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double c[3];
            for (int ch = 0; ch < 3; ++ch) {
                std::uint32_t bits = raw[(std::size_t(h - 1 - y) * std::size_t(w) + std::size_t(x)) * 3 + std::size_t(ch)];
                if (file_le != host_le) bits = detail::swap_bytes(bits);
                c[ch] = static_cast<double>(std::bit_cast<float>(bits));
            }
            img(x, y) = {c[0], c[1], c[2]};
        }
    return img;
}

inline void write_pfm(std::ostream &out, const RgbImage &img) {
    const bool host_le = std::endian::native == std::endian::little;
    out << "PF\n" << img.width << ' ' << img.height << '\n' << (host_le ? "-1.0" : "1.0") << '\n';
    std::vector<float> row(std::size_t(img.width) * 3);
    for (int y = img.height - 1; y >= 0; --y) {
        for (int x = 0; x < img.width; ++x) {
            row[3 * std::size_t(x)] = static_cast<float>(img(x, y).x);
            row[3 * std::size_t(x) + 1] = static_cast<float>(img(x, y).y);
            row[3 * std::size_t(x) + 2] = static_cast<float>(img(x, y).z);
        }
        out.write(reinterpret_cast<const char *>(row.data()), static_cast<std::streamsize>(row.size() * 4));
    }
    if (!out) throw std::runtime_error("write_pfm: write failed");
}

/// Loads a PFM or P6 file, chosen by its magic number.
inline RgbImage load_image(const std::string &path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open image '" + path + "'");
    char magic[2] = {0, 0};
    f.read(magic, 2);
    f.seekg(0);
    try {
        if (magic[0] == 'P' && magic[1] == 'F') return read_pfm(f);
        if (magic[0] == 'P' && magic[1] == '6') return read_ppm(f);
    } catch (const std::runtime_error &e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    throw std::runtime_error(path + ": unsupported image format (expected PFM or binary PPM)");
}

}  // namespace splatdyn::render
