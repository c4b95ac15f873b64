// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/math/vec.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace splatdyn::fluid {

/// Compressed per-particle neighbour lists (ascending indices).
struct NeighborLists {
    std::vector<std::uint32_t> offsets{0};
    std::vector<std::uint32_t> indices;

    std::size_t size() const { return offsets.size() - 1; }
    std::span<const std::uint32_t> operator[](std::size_t i) const {
        return {indices.data() + offsets[i], indices.data() + offsets[i + 1]};
    }
};

/// Uniform hash grid; points are binned by floor(x / cell) and sorted by cell.
class HashGrid {
public:
    HashGrid() = default;
    HashGrid(std::span<const Vec3> points, double cell) { build(points, cell); }

    void build(std::span<const Vec3> points, double cell) {
        if (!(cell > 0.0)) throw std::invalid_argument("HashGrid: cell size must be positive");
        cell_ = cell;
        points_ = points;
        order_.resize(points.size());
        std::vector<std::uint64_t> keys(points.size());
        for (std::size_t i = 0; i < points.size(); ++i) {
            keys[i] = key_of(cell_of(points[i]));
            order_[i] = static_cast<std::uint32_t>(i);
        }
        std::sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) {
            return keys[a] != keys[b] ? keys[a] < keys[b] : a < b;
        });
        cells_.clear();
        cells_.reserve(points.size());
        for (std::size_t s = 0; s < order_.size();) {
            std::size_t e = s + 1;
            while (e < order_.size() && keys[order_[e]] == keys[order_[s]]) ++e;
            cells_.emplace(keys[order_[s]], Range{static_cast<std::uint32_t>(s), static_cast<std::uint32_t>(e)});
            s = e;
        }
    }

    double cell_size() const { return cell_; }

    /// Calls fn(j, squared_distance) for every point within radius of q.
    template <typename Fn>
    void for_each_within(const Vec3 &q, double radius, Fn &&fn) const {
        const double r2 = radius * radius;
        const auto lo = cell_of(q - Vec3::splat(radius));
        const auto hi = cell_of(q + Vec3::splat(radius));
        for (long long cx = lo[0]; cx <= hi[0]; ++cx)
            for (long long cy = lo[1]; cy <= hi[1]; ++cy)
                for (long long cz = lo[2]; cz <= hi[2]; ++cz) {
                    const auto it = cells_.find(key_of({cx, cy, cz}));
                    if (it == cells_.end()) continue;
                    for (std::uint32_t s = it->second.begin; s < it->second.end; ++s) {
                        const std::uint32_t j = order_[s];
                        const double d2 = (points_[j] - q).squared_norm();
                        if (d2 <= r2) fn(j, d2);
                    }
                }
    }

private:
    struct Range {
        std::uint32_t begin, end;
    };

    std::array<long long, 3> cell_of(const Vec3 &p) const {
        return {static_cast<long long>(std::floor(p.x / cell_)),
                static_cast<long long>(std::floor(p.y / cell_)),
                static_cast<long long>(std::floor(p.z / cell_))};
    }
    static std::uint64_t key_of(const std::array<long long, 3> &c) {
        // 21 bits per axis, offset to stay non-negative.
        constexpr long long bias = 1LL << 20;
        constexpr std::uint64_t mask = (1ULL << 21) - 1;
        return ((static_cast<std::uint64_t>(c[0] + bias) & mask) << 42) |
               ((static_cast<std::uint64_t>(c[1] + bias) & mask) << 21) |
               (static_cast<std::uint64_t>(c[2] + bias) & mask);
    }

    double cell_ = 1.0;
    std::span<const Vec3> points_;
    std::vector<std::uint32_t> order_;
    std::unordered_map<std::uint64_t, Range> cells_;
};

/// j in N(i) iff 0 < |p_i - p_j| <= r. Symmetric by construction.
inline NeighborLists find_neighbors(std::span<const Vec3> positions, double r) {
    if (!(r > 0.0)) throw std::invalid_argument("find_neighbors: radius must be positive");
    HashGrid grid(positions, r);
    std::vector<std::vector<std::uint32_t>> local(positions.size());
    const long n = static_cast<long>(positions.size());
#pragma omp parallel for schedule(static) if (n > 1024)
    for (long il = 0; il < n; ++il) {
        const auto i = static_cast<std::size_t>(il);
        auto &out = local[i];
        grid.for_each_within(positions[i], r, [&](std::uint32_t j, double d2) {
            if (j != i && d2 > 0.0) out.push_back(j);
        });
        std::sort(out.begin(), out.end());
    }
    NeighborLists lists;
    lists.offsets.resize(positions.size() + 1);
    std::size_t total = 0;
    for (std::size_t i = 0; i < local.size(); ++i) {
        lists.offsets[i] = static_cast<std::uint32_t>(total);
        total += local[i].size();
    }
    lists.offsets[local.size()] = static_cast<std::uint32_t>(total);
    lists.indices.reserve(total);
    for (const auto &l : local) lists.indices.insert(lists.indices.end(), l.begin(), l.end());
    return lists;
}

/// Keeps only neighbours accepted by the predicate keep(i, j).
template <typename Pred>
NeighborLists filter_neighbors(const NeighborLists &in, Pred &&keep) {
    NeighborLists out;
    out.offsets.resize(in.size() + 1);
    out.indices.reserve(in.indices.size());
    for (std::size_t i = 0; i < in.size(); ++i) {
        out.offsets[i] = static_cast<std::uint32_t>(out.indices.size());
        for (auto j : in[i])
            if (keep(i, j)) out.indices.push_back(j);
    }
    out.offsets[in.size()] = static_cast<std::uint32_t>(out.indices.size());
    return out;
}

/// Indices of the k nearest points to q (ascending distance, ties by index).
inline std::vector<std::uint32_t> k_nearest(std::span<const Vec3> points, const Vec3 &q,
                                            std::size_t k) {
    std::vector<std::pair<double, std::uint32_t>> d(points.size());
    for (std::size_t j = 0; j < points.size(); ++j)
        d[j] = {(points[j] - q).squared_norm(), static_cast<std::uint32_t>(j)};
    const std::size_t m = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<long>(m), d.end());
    std::vector<std::uint32_t> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = d[j].second;
    return out;
}

}  // namespace splatdyn::fluid
