#pragma once

#include <bit>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/model/network.hpp"

namespace dyadnet {

/// A lagged local statistic: a function of the date t-1 network and the dyad (i < j).
using StatisticFn = std::function<double(const Snapshot&, int, int)>;

enum class BuiltinStatistic { lagged_link, common_friends, friends_of_friends };

namespace stats {

inline double lagged_link(const Snapshot& g, int i, int j) { return g.adjacent(i, j) ? 1.0 : 0.0; }

inline double common_friends(const Snapshot& g, int i, int j) { return g.common_neighbors(i, j); }

/// #{k != i, j : k not adjacent to i, and k reachable from i through some m != i, j, k}.
/// Evaluated with i the smaller index of the dyad.
inline double friends_of_friends(const Snapshot& g, int i, int j) {
    const auto ri = g.row(i);
    std::vector<std::uint64_t> reach(ri.size(), 0);
    for (std::size_t w = 0; w < ri.size(); ++w) {
        std::uint64_t bits = ri[w];
        while (bits) {
            const int m = static_cast<int>(w * 64) + std::countr_zero(bits);
            bits &= bits - 1;
            if (m == j) continue;
            const auto rm = g.row(m);
            for (std::size_t v = 0; v < ri.size(); ++v) reach[v] |= rm[v];
        }
    }
    for (std::size_t w = 0; w < ri.size(); ++w) reach[w] &= ~ri[w];
    auto clear = [&](int k) { reach[static_cast<std::size_t>(k) / 64] &= ~(1ULL << (k % 64)); };
    clear(i);
    clear(j);
    int count = 0;
    for (auto w : reach) count += std::popcount(w);
    return count;
}

}  // namespace stats

/// Ordered list of lagged network statistics forming X_{ij,t-1}.
class StatisticRegistry {
public:
    StatisticRegistry() = default;

    /// (lagged link, common friends).
    static StatisticRegistry standard() {
        StatisticRegistry r;
        r.add(BuiltinStatistic::lagged_link);
        r.add(BuiltinStatistic::common_friends);
        return r;
    }

    StatisticRegistry& add(BuiltinStatistic b) {
        switch (b) {
            case BuiltinStatistic::lagged_link: return add("lagged_link", stats::lagged_link);
            case BuiltinStatistic::common_friends: return add("common_friends", stats::common_friends);
            case BuiltinStatistic::friends_of_friends: return add("friends_of_friends", stats::friends_of_friends);
        }
        throw DomainError("unknown builtin statistic");
    }

    StatisticRegistry& add(std::string name, StatisticFn fn) {
        if (!fn) throw DomainError("statistic '" + name + "' has no function");
        entries_.push_back({std::move(name), std::move(fn)});
        return *this;
    }

    static BuiltinStatistic builtin_from_name(const std::string& name) {
        if (name == "lagged_link") return BuiltinStatistic::lagged_link;
        if (name == "common_friends") return BuiltinStatistic::common_friends;
        if (name == "friends_of_friends") return BuiltinStatistic::friends_of_friends;
        throw DomainError("unknown statistic '" + name + "'");
    }

    std::size_t size() const noexcept { return entries_.size(); }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& e : entries_) out.push_back(e.first);
        return out;
    }

    /// Writes the statistics for dyad (i, j) on the given (lagged) snapshot into out.
    void evaluate(const Snapshot& lagged, int i, int j, std::span<double> out) const {
        const Dyad d = make_dyad(i, j);
        for (std::size_t k = 0; k < entries_.size(); ++k) out[k] = entries_[k].second(lagged, d.i, d.j);
    }

private:
    std::vector<std::pair<std::string, StatisticFn>> entries_;
};

/// X_{ij,t-1}: registry statistics of dyad (i, j) on the date t-1 network; requires t >= 1.
inline std::vector<double> lagged_stats(const NetworkPanel& panel, const StatisticRegistry& registry, int i, int j,
                                        int t) {
    if (t < 1 || t > panel.periods())
        throw DomainError("lagged statistics need 1 <= t <= T, got t=" + std::to_string(t));
    if (i == j) throw DomainError("lagged statistics need i != j");
    if (i < 0 || j < 0 || i >= panel.nodes() || j >= panel.nodes()) throw DomainError("node index out of range");
    const Snapshot g(panel, t - 1);
    std::vector<double> out(registry.size());
    registry.evaluate(g, i, j, out);
    return out;
}

}  // namespace dyadnet
