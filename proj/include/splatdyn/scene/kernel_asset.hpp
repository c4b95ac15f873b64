// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0
//
// ASCII kernel assets. One kernel per line, 21 numbers separated by blanks:
//
//   cx cy cz  sx sy sz  qw qx qy qz  opacity  dr dg db  sr sg sb  roughness  nx ny nz
//
// Blank lines and lines starting with '#' are ignored. Scalings are standard
// deviations in descending order; q is a unit quaternion (w first).

#pragma once

#include <splatdyn/render/kernel.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace splatdyn::scene {

inline constexpr int kKernelRecordFields = 21;

inline std::vector<render::GaussianKernel> parse_kernel_asset(std::istream &in,
                                                              const std::string &origin = "<kernels>") {
    std::vector<render::GaussianKernel> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        std::istringstream ls(line);
        double v[kKernelRecordFields];
        int count = 0;
        std::string tok;
        auto fail = [&](const std::string &why) {
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": " + why);
        };
        while (ls >> tok) {
            if (count == kKernelRecordFields) fail("more than 21 values");
            try {
                std::size_t used = 0;
                v[count] = std::stod(tok, &used);
                if (used != tok.size()) fail("malformed number '" + tok + "'");
            } catch (const std::logic_error &) {
                fail("malformed number '" + tok + "'");
            }
            ++count;
        }
        if (count != kKernelRecordFields) fail("expected 21 values, found " + std::to_string(count));
        render::GaussianKernel k;
        k.center = {v[0], v[1], v[2]};
        k.scaling = {v[3], v[4], v[5]};
        k.rotation = {v[6], v[7], v[8], v[9]};
        k.opacity = v[10];
        k.diffuse = {v[11], v[12], v[13]};
        k.specular = {v[14], v[15], v[16]};
        k.roughness = v[17];
        k.normal = {v[18], v[19], v[20]};
        try {
            k.validate();
        } catch (const std::invalid_argument &e) {
            fail(e.what());
        }
        out.push_back(k);
    }
    return out;
}

inline std::vector<render::GaussianKernel> load_kernel_asset(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open kernel asset " + path);
    return parse_kernel_asset(in, path);
}

inline void write_kernel_asset(std::ostream &out, std::span<const render::GaussianKernel> kernels) {
    out << "# cx cy cz sx sy sz qw qx qy qz opacity dr dg db sr sg sb roughness nx ny nz\n";
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    for (const auto &k : kernels) {
        const double v[kKernelRecordFields] = {k.center.x,   k.center.y,   k.center.z,   k.scaling.x, k.scaling.y,
                                               k.scaling.z,  k.rotation.w, k.rotation.x, k.rotation.y, k.rotation.z,
                                               k.opacity,    k.diffuse.x,  k.diffuse.y,  k.diffuse.z, k.specular.x,
                                               k.specular.y, k.specular.z, k.roughness,  k.normal.x,  k.normal.y,
                                               k.normal.z};
        for (int i = 0; i < kKernelRecordFields; ++i) out << v[i] << (i + 1 < kKernelRecordFields ? ' ' : '\n');
    }
}

inline void save_kernel_asset(const std::string &path, std::span<const render::GaussianKernel> kernels) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write kernel asset " + path);
    write_kernel_asset(out, kernels);
}

/// Mean excess of the largest-to-middle axis ratio over a; the smallest axis
/// is left free.
inline double anisotropy_metric(std::span<const render::GaussianKernel> kernels, double a = 1.1) {
    if (kernels.empty()) throw std::invalid_argument("anisotropy_metric: kernel set is empty");
    double sum = 0.0;
    for (const auto &k : kernels) sum += std::max(k.scaling.x / k.scaling.y - a, 0.0);
    return sum / static_cast<double>(kernels.size());
}

}  // namespace splatdyn::scene
