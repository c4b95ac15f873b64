// Copyright Contributors to the splatdyn Project
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <splatdyn/xpbd/constraint.hpp>

#include <bit>
#include <cstdint>
#include <span>
#include <vector>

namespace splatdyn::xpbd {

/// Greedy first-fit coloring. Each returned group lists constraint indices in
/// ascending order; no two constraints in a group share a participant.
inline std::vector<std::vector<std::uint32_t>> color_constraints(
    std::span<const Constraint> constraints) {
    std::uint32_t max_particle = 0;
    for (const auto &c : constraints)
        for (auto p : c.participants) max_particle = std::max(max_particle, p + 1);

    // used[p * words + w]: bit b set when color 64 w + b already touches particle p
    std::size_t words = 1;
    std::vector<std::uint64_t> used(static_cast<std::size_t>(max_particle) * words, 0);
    std::vector<std::vector<std::uint32_t>> groups;
    std::vector<std::uint64_t> blocked;

    for (std::uint32_t ci = 0; ci < constraints.size(); ++ci) {
        const auto &c = constraints[ci];
        blocked.assign(words, 0);
        for (auto p : c.participants)
            for (std::size_t w = 0; w < words; ++w) blocked[w] |= used[p * words + w];

        std::size_t color = words * 64;
        for (std::size_t w = 0; w < words; ++w) {
            if (~blocked[w] != 0) {
                color = w * 64 + static_cast<std::size_t>(std::countr_one(blocked[w]));
                break;
            }
        }
        if (color >= words * 64) {
            const std::size_t grown = words * 2;
            std::vector<std::uint64_t> next(static_cast<std::size_t>(max_particle) * grown, 0);
            for (std::size_t p = 0; p < max_particle; ++p)
                for (std::size_t w = 0; w < words; ++w) next[p * grown + w] = used[p * words + w];
            used.swap(next);
            words = grown;
        }
        for (auto p : c.participants) used[p * words + color / 64] |= std::uint64_t{1} << (color % 64);
        if (groups.size() <= color) groups.resize(color + 1);
        groups[color].push_back(ci);
    }
    return groups;
}

}  // namespace splatdyn::xpbd
