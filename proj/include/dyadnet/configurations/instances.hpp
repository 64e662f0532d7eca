#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <set>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/rng.hpp"

namespace dyadnet {

// A pattern is a configuration whose node labels are abstract slots 0..k-1. Instantiating it
// maps the slots injectively to data nodes. Bound families average over instances, which is
// how a population moment such as E[Y+ 1{dW <= c} | z] is estimated from one network.

struct InstancePolicy {
    std::size_t cap = 200000;
    std::uint64_t seed = 0;
};

struct PatternInstances {
    WeightedConfiguration pattern;                ///< relabelled so that slots are 0..slots-1
    int slots = 0;
    std::vector<std::vector<int>> tuples;         ///< node assigned to each slot
    std::vector<WeightedConfiguration> configs;   ///< concrete configuration per tuple
    bool exhaustive = false;                      ///< every distinct instance is present
};

/// Relabels the nodes of cfg to 0..k-1 in increasing order.
inline WeightedConfiguration to_slots(const WeightedConfiguration& cfg, int* slot_count = nullptr) {
    const auto nodes = config_nodes(cfg);
    auto slot = [&](int v) { return static_cast<int>(std::lower_bound(nodes.begin(), nodes.end(), v) - nodes.begin()); };
    WeightedConfiguration out;
    for (const auto& c : cfg.cells) out.cells.push_back({EdgeTimeCell(slot(c.cell.i), slot(c.cell.j), c.cell.t), c.weight});
    if (slot_count) *slot_count = static_cast<int>(nodes.size());
    return out;
}

inline WeightedConfiguration apply_tuple(const WeightedConfiguration& pattern, const std::vector<int>& tuple) {
    WeightedConfiguration out;
    out.cells.reserve(pattern.cells.size());
    for (const auto& c : pattern.cells)
        out.cells.push_back({EdgeTimeCell(tuple[static_cast<std::size_t>(c.cell.i)],
                                          tuple[static_cast<std::size_t>(c.cell.j)], c.cell.t),
                             c.weight});
    return out;
}

namespace detail {

inline std::vector<std::int64_t> canonical_key(const WeightedConfiguration& cfg) {
    std::vector<std::array<std::int64_t, 4>> cells;
    for (const auto& c : cfg.cells)
        cells.push_back({c.cell.i, c.cell.j, c.cell.t, static_cast<std::int64_t>(std::llround(c.weight * 1e6))});
    std::sort(cells.begin(), cells.end());
    std::vector<std::int64_t> key;
    for (const auto& a : cells) key.insert(key.end(), a.begin(), a.end());
    return key;
}

inline long double falling(int n, int k) {
    long double r = 1;
    for (int i = 0; i < k; ++i) r *= static_cast<long double>(n - i);
    return r;
}

}  // namespace detail

/// Instances of a pattern on an n-node network, deduplicated up to pattern automorphisms. When
/// all injective maps number at most 4 * cap they are scanned in lexicographic order and the
/// first representative of each distinct configuration is kept (so two-slot dyad patterns get
/// i < j); if more than `cap` distinct instances result, or the map space is larger, a seeded
/// uniform sample of `cap` distinct instances is drawn instead.
inline PatternInstances instantiate(const WeightedConfiguration& cfg, int n, const InstancePolicy& policy) {
    if (policy.cap == 0) throw DomainError("instance cap must be positive");
    PatternInstances out;
    out.pattern = to_slots(cfg, &out.slots);
    const int k = out.slots;
    if (k > n) throw DomainError("pattern needs " + std::to_string(k) + " nodes but the network has " + std::to_string(n));
    std::set<std::vector<std::int64_t>> seen;
    auto offer = [&](const std::vector<int>& tuple) {
        auto concrete = apply_tuple(out.pattern, tuple);
        if (!seen.insert(detail::canonical_key(concrete)).second) return;
        out.tuples.push_back(tuple);
        out.configs.push_back(std::move(concrete));
    };

    if (detail::falling(n, k) <= 4.0L * static_cast<long double>(policy.cap)) {
        std::vector<int> tuple(static_cast<std::size_t>(k));
        std::vector<char> used(static_cast<std::size_t>(n), 0);
        auto rec = [&](auto&& self, int s) -> void {
            if (s == k) {
                offer(tuple);
                return;
            }
            for (int v = 0; v < n; ++v) {
                if (used[static_cast<std::size_t>(v)]) continue;
                used[static_cast<std::size_t>(v)] = 1;
                tuple[static_cast<std::size_t>(s)] = v;
                self(self, s + 1);
                used[static_cast<std::size_t>(v)] = 0;
            }
        };
        rec(rec, 0);
        if (out.tuples.size() <= policy.cap) {
            out.exhaustive = true;
            return out;
        }
        out.tuples.clear();
        out.configs.clear();
        seen.clear();
    }

    auto rng = substream(policy.seed, Stream::sampling, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(n));
    std::vector<int> tuple(static_cast<std::size_t>(k));
    const std::size_t max_attempts = 20 * policy.cap + 1000;
    for (std::size_t attempt = 0; attempt < max_attempts && out.tuples.size() < policy.cap; ++attempt) {
        for (int s = 0; s < k; ++s) {
            int v;
            do {
                v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
            } while (std::find(tuple.begin(), tuple.begin() + s, v) != tuple.begin() + s);
            tuple[static_cast<std::size_t>(s)] = v;
        }
        offer(tuple);
    }
    return out;
}

inline PatternInstances instantiate(const SignedConfiguration& cfg, int n, const InstancePolicy& policy) {
    return instantiate(WeightedConfiguration::from_signed(cfg), n, policy);
}

}  // namespace dyadnet
