#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"

namespace dyadnet {

/// Unordered node pair stored canonically with i < j.
struct Dyad {
    int i = 0;
    int j = 0;

    friend auto operator<=>(const Dyad&, const Dyad&) = default;
};

inline Dyad make_dyad(int a, int b) {
    if (a == b) throw DomainError("a dyad needs two distinct nodes, got " + std::to_string(a) + " twice");
    return a < b ? Dyad{a, b} : Dyad{b, a};
}

inline std::size_t dyad_count(int n) { return static_cast<std::size_t>(n) * static_cast<std::size_t>(n - 1) / 2; }

/// Position of dyad (i, j), i < j, in row-major upper-triangular order.
inline std::size_t dyad_index(int n, int i, int j) {
    const auto ii = static_cast<std::size_t>(i);
    return ii * (2 * static_cast<std::size_t>(n) - ii - 1) / 2 + static_cast<std::size_t>(j - i - 1);
}

/// Undirected binary network observed at dates 0..T (date 0 is the given initial network).
class NetworkPanel {
public:
    NetworkPanel() = default;

    NetworkPanel(int n, int T) : n_(n), T_(T) {
        if (n < 2) throw DomainError("a network needs at least two nodes");
        if (T < 0) throw DomainError("number of dates must be non-negative");
        links_.assign(dyad_count(n) * static_cast<std::size_t>(T + 1), 0);
    }

    int nodes() const noexcept { return n_; }
    int periods() const noexcept { return T_; }
    std::size_t dyads() const noexcept { return dyad_count(n_); }

    bool link(int i, int j, int t) const { return links_[offset(i, j, t)] != 0; }

    void set_link(int i, int j, int t, bool value) { links_[offset(i, j, t)] = value ? 1 : 0; }

    /// Link indicators of every dyad at date t, in dyad_index order.
    std::span<const std::uint8_t> date_slice(int t) const {
        check_date(t);
        return {links_.data() + static_cast<std::size_t>(t) * dyads(), dyads()};
    }

    std::span<std::uint8_t> date_slice(int t) {
        check_date(t);
        return {links_.data() + static_cast<std::size_t>(t) * dyads(), dyads()};
    }

    double density(int t) const {
        std::size_t on = 0;
        for (auto v : date_slice(t)) on += v;
        return static_cast<double>(on) / static_cast<double>(dyads());
    }

    friend bool operator==(const NetworkPanel&, const NetworkPanel&) = default;

private:
    void check_date(int t) const {
        if (t < 0 || t > T_) throw DomainError("date " + std::to_string(t) + " outside 0.." + std::to_string(T_));
    }

    std::size_t offset(int i, int j, int t) const {
        if (i < 0 || j < 0 || i >= n_ || j >= n_) throw DomainError("node index out of range");
        check_date(t);
        const Dyad d = make_dyad(i, j);
        return static_cast<std::size_t>(t) * dyads() + dyad_index(n_, d.i, d.j);
    }

    int n_ = 0;
    int T_ = 0;
    std::vector<std::uint8_t> links_;
};

/// Bitset adjacency of one date, for fast neighbourhood statistics.
class Snapshot {
public:
    Snapshot(const NetworkPanel& panel, int t) : n_(panel.nodes()), words_((panel.nodes() + 63) / 64) {
        rows_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(words_), 0);
        const auto slice = panel.date_slice(t);
        std::size_t k = 0;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j, ++k)
                if (slice[k]) {
                    set_bit(i, j);
                    set_bit(j, i);
                }
    }

    int nodes() const noexcept { return n_; }
    int words() const noexcept { return words_; }

    std::span<const std::uint64_t> row(int i) const {
        return {rows_.data() + static_cast<std::size_t>(i) * static_cast<std::size_t>(words_),
                static_cast<std::size_t>(words_)};
    }

    bool adjacent(int i, int j) const {
        return (row(i)[static_cast<std::size_t>(j) / 64] >> (j % 64)) & 1ULL;
    }

    int degree(int i) const {
        int d = 0;
        for (auto w : row(i)) d += std::popcount(w);
        return d;
    }

    int common_neighbors(int i, int j) const {
        const auto a = row(i);
        const auto b = row(j);
        int c = 0;
        for (std::size_t w = 0; w < a.size(); ++w) c += std::popcount(a[w] & b[w]);
        return c;
    }

private:
    void set_bit(int i, int j) {
        rows_[static_cast<std::size_t>(i) * static_cast<std::size_t>(words_) + static_cast<std::size_t>(j) / 64] |=
            1ULL << (j % 64);
    }

    int n_;
    int words_;
    std::vector<std::uint64_t> rows_;
};

}  // namespace dyadnet
