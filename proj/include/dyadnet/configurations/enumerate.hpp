#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/rng.hpp"

namespace dyadnet {

using Count = unsigned __int128;

enum class Family {
    dyad_transitions,
    within_date_tetrads,
    intertemporal_tetrads,
    triadic_cycles,
    balanced_signed_subgraphs,
    node_balanced_weighted,
};

inline Family family_from_name(const std::string& s) {
    if (s == "dyad_transitions") return Family::dyad_transitions;
    if (s == "within_date_tetrads") return Family::within_date_tetrads;
    if (s == "intertemporal_tetrads") return Family::intertemporal_tetrads;
    if (s == "triadic_cycles") return Family::triadic_cycles;
    if (s == "balanced_signed_subgraphs") return Family::balanced_signed_subgraphs;
    if (s == "node_balanced_weighted") return Family::node_balanced_weighted;
    throw DomainError("unknown configuration family '" + s + "'");
}

inline std::string to_string(Family f) {
    switch (f) {
        case Family::dyad_transitions: return "dyad_transitions";
        case Family::within_date_tetrads: return "within_date_tetrads";
        case Family::intertemporal_tetrads: return "intertemporal_tetrads";
        case Family::triadic_cycles: return "triadic_cycles";
        case Family::balanced_signed_subgraphs: return "balanced_signed_subgraphs";
        case Family::node_balanced_weighted: return "node_balanced_weighted";
    }
    return "?";
}

/// Family plus its size parameters. For balanced signed subgraphs `size_cap` bounds the number
/// of dyads; for node-balanced weighted configurations it bounds the number of cells.
struct FamilySpec {
    Family family = Family::within_date_tetrads;
    int size_cap = 2;
    std::vector<double> weights{-2.0, -1.0, 1.0, 2.0};
};

namespace detail {

inline Count binomial(long long n, long long k) {
    if (k < 0 || n < 0 || k > n) return 0;
    k = std::min(k, n - k);
    Count r = 1;
    for (long long i = 1; i <= k; ++i) r = r * static_cast<Count>(n - k + i) / static_cast<Count>(i);
    return r;
}

inline Count ipow(Count b, int e) {
    Count r = 1;
    for (int k = 0; k < e; ++k) r *= b;
    return r;
}

/// Lexicographic k-subset of {0..n-1} with the given rank.
inline std::vector<int> unrank_combination(int n, int k, Count rank) {
    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(k));
    int next = 0;
    for (int slot = 0; slot < k; ++slot) {
        for (int v = next;; ++v) {
            const Count block = binomial(n - v - 1, k - slot - 1);
            if (rank < block) {
                out.push_back(v);
                next = v + 1;
                break;
            }
            rank -= block;
        }
    }
    return out;
}

inline Dyad unrank_dyad(int n, Count rank) {
    const auto c = unrank_combination(n, 2, rank);
    return {c[0], c[1]};
}

/// The three perfect matchings of {a<b<c<d} in the order {ab,cd}, {ac,bd}, {ad,bc}.
inline std::array<std::array<Dyad, 2>, 3> matchings(const std::vector<int>& q) {
    return {{{{Dyad{q[0], q[1]}, Dyad{q[2], q[3]}}},
             {{Dyad{q[0], q[2]}, Dyad{q[1], q[3]}}},
             {{Dyad{q[0], q[3]}, Dyad{q[1], q[2]}}}}};
}

inline constexpr std::array<std::array<int, 2>, 3> kPairings{{{0, 1}, {0, 2}, {1, 2}}};

/// Uniform random integer in [0, bound) from a 128-bit rejection sampler.
inline Count uniform_below(CounterRng& rng, Count bound) {
    if (bound <= 1) return 0;
    const Count max = ~static_cast<Count>(0);
    const Count limit = max - max % bound;
    Count x;
    do {
        x = (static_cast<Count>(rng()) << 64) | static_cast<Count>(rng());
    } while (x >= limit);
    return x % bound;
}

/// cap distinct indices drawn uniformly from [0, total) (Floyd's algorithm), sorted.
inline std::vector<Count> sample_indices(Count total, std::size_t cap, std::uint64_t seed) {
    std::set<Count> chosen;
    auto rng = substream(seed, Stream::enumeration, 1);
    const Count k = static_cast<Count>(cap);
    for (Count j = total - k; j < total; ++j) {
        const Count t = uniform_below(rng, j + 1);
        if (!chosen.insert(t).second) chosen.insert(j);
    }
    return {chosen.begin(), chosen.end()};
}

struct DyadPattern {
    std::vector<int> plus_dates;
    std::vector<int> minus_dates;
};

/// Every (P, M) pair of disjoint, equal-size, nonempty date sets, in a fixed order.
inline std::vector<DyadPattern> dyad_patterns(int T) {
    std::vector<DyadPattern> out;
    const int full = 1 << T;
    for (int size = 1; 2 * size <= T; ++size)
        for (int p = 1; p < full; ++p) {
            if (std::popcount(static_cast<unsigned>(p)) != size) continue;
            for (int m = 1; m < full; ++m) {
                if ((m & p) != 0 || std::popcount(static_cast<unsigned>(m)) != size) continue;
                DyadPattern pat;
                for (int t = 0; t < T; ++t) {
                    if (p & (1 << t)) pat.plus_dates.push_back(t + 1);
                    if (m & (1 << t)) pat.minus_dates.push_back(t + 1);
                }
                out.push_back(std::move(pat));
            }
        }
    return out;
}

}  // namespace detail

/// Random-access view of a configuration family in its canonical order. Indexable families
/// support at(k); node-balanced weighted configurations are materialized by depth-first search.
class ConfigEnumerator {
public:
    ConfigEnumerator(FamilySpec spec, int n, int T) : spec_(std::move(spec)), n_(n), T_(T) {
        if (n < 2) throw DomainError("enumeration needs at least two nodes");
        if (T < 1) throw DomainError("enumeration needs at least one date");
        switch (spec_.family) {
            case Family::dyad_transitions:
                total_ = detail::binomial(n, 2) * static_cast<Count>(T * (T - 1) / 2);
                break;
            case Family::within_date_tetrads: total_ = detail::binomial(n, 4) * static_cast<Count>(3 * T); break;
            case Family::intertemporal_tetrads:
                total_ = detail::binomial(n, 4) * 3 * (detail::ipow(static_cast<Count>(T), 4) - static_cast<Count>(T));
                break;
            case Family::triadic_cycles:
                total_ = detail::binomial(n, 3) * static_cast<Count>(T * (T - 1) / 2) *
                         detail::ipow(static_cast<Count>(T * (T - 1)), 2);
                break;
            case Family::balanced_signed_subgraphs: {
                if (spec_.size_cap < 1) throw DomainError("signed-subgraph size cap must be at least one dyad");
                patterns_ = detail::dyad_patterns(T);
                const auto D = static_cast<long long>(detail::binomial(n, 2));
                for (int m = 1; m <= spec_.size_cap; ++m) {
                    const Count c = detail::binomial(D, m) * detail::ipow(static_cast<Count>(patterns_.size()), m);
                    block_.push_back(c);
                    total_ += c;
                }
                break;
            }
            case Family::node_balanced_weighted:
                if (spec_.size_cap < 2) throw DomainError("weighted size cap must be at least two cells");
                if (spec_.weights.empty()) throw DomainError("weight set must be nonempty");
                for (double w : spec_.weights)
                    if (w == 0.0) throw DomainError("weight set must not contain zero");
                materialize_weighted();
                total_ = static_cast<Count>(weighted_.size());
                break;
        }
    }

    Count count() const noexcept { return total_; }

    WeightedConfiguration at(Count k) const {
        if (k >= total_) throw DomainError("configuration index out of range");
        switch (spec_.family) {
            case Family::dyad_transitions: return dyad_transition(k);
            case Family::within_date_tetrads: return within_tetrad(k);
            case Family::intertemporal_tetrads: return intertemporal_tetrad(k);
            case Family::triadic_cycles: return triadic_cycle(k);
            case Family::balanced_signed_subgraphs: return balanced_subgraph(k);
            case Family::node_balanced_weighted: return weighted_[static_cast<std::size_t>(k)];
        }
        throw DomainError("unknown configuration family");
    }

private:
    static WeightedConfiguration signed_cfg(std::vector<EdgeTimeCell> plus, std::vector<EdgeTimeCell> minus) {
        return WeightedConfiguration::from_signed(SignedConfiguration{std::move(plus), std::move(minus)});
    }

    WeightedConfiguration dyad_transition(Count k) const {
        const Count per = static_cast<Count>(T_ * (T_ - 1) / 2);
        const Dyad d = detail::unrank_dyad(n_, k / per);
        int r = static_cast<int>(k % per);
        for (int t = 2; t <= T_; ++t)
            for (int s = 1; s < t; ++s)
                if (r-- == 0) return signed_cfg({{d.i, d.j, t}}, {{d.i, d.j, s}});
        throw DomainError("dyad transition rank out of range");
    }

    WeightedConfiguration within_tetrad(Count k) const {
        const Count per = static_cast<Count>(3 * T_);
        const auto q = detail::unrank_combination(n_, 4, k / per);
        const int r = static_cast<int>(k % per);
        const int t = r / 3 + 1;
        const auto m = detail::matchings(q);
        const auto [a, b] = detail::kPairings[static_cast<std::size_t>(r % 3)];
        const auto& P = m[static_cast<std::size_t>(a)];
        const auto& M = m[static_cast<std::size_t>(b)];
        return signed_cfg({{P[0].i, P[0].j, t}, {P[1].i, P[1].j, t}}, {{M[0].i, M[0].j, t}, {M[1].i, M[1].j, t}});
    }

    WeightedConfiguration intertemporal_tetrad(Count k) const {
        const Count T = static_cast<Count>(T_);
        const Count tuples = detail::ipow(T, 4) - T;
        const Count per = 3 * tuples;
        const auto q = detail::unrank_combination(n_, 4, k / per);
        Count r = k % per;
        const auto pairing = static_cast<std::size_t>(r / tuples);
        Count u = r % tuples;
        // Skip the all-equal date tuples, which sit at multiples of 1 + T + T^2 + T^3.
        const Count diag_step = 1 + T + T * T + T * T * T;
        for (Count d = 0; d < T; ++d)
            if (d * diag_step <= u) ++u;
        std::array<int, 4> dates{};
        for (int p = 3; p >= 0; --p) {
            dates[static_cast<std::size_t>(p)] = static_cast<int>(u % T) + 1;
            u /= T;
        }
        const auto m = detail::matchings(q);
        const auto& P = m[static_cast<std::size_t>(detail::kPairings[pairing][0])];
        const auto& M = m[static_cast<std::size_t>(detail::kPairings[pairing][1])];
        return signed_cfg({{P[0].i, P[0].j, dates[0]}, {P[1].i, P[1].j, dates[1]}},
                          {{M[0].i, M[0].j, dates[2]}, {M[1].i, M[1].j, dates[3]}});
    }

    WeightedConfiguration triadic_cycle(Count k) const {
        const Count ordered = static_cast<Count>(T_ * (T_ - 1));
        const Count per = static_cast<Count>(T_ * (T_ - 1) / 2) * ordered * ordered;
        const auto q = detail::unrank_combination(n_, 3, k / per);
        Count r = k % per;
        auto ordered_pair = [&](Count idx) {
            int c = 0;
            for (int a = 1; a <= T_; ++a)
                for (int b = 1; b <= T_; ++b)
                    if (a != b && static_cast<Count>(c++) == idx) return std::array<int, 2>{a, b};
            throw DomainError("date pair rank out of range");
        };
        const auto p3 = ordered_pair(r % ordered);
        r /= ordered;
        const auto p2 = ordered_pair(r % ordered);
        r /= ordered;
        std::array<int, 2> p1{};
        int c = 0;
        for (int a = 2; a <= T_; ++a)
            for (int b = 1; b < a; ++b)
                if (static_cast<Count>(c++) == r) p1 = {a, b};
        const int i = q[0], j = q[1], h = q[2];
        return signed_cfg({{i, j, p1[0]}, {j, h, p2[0]}, {i, h, p3[0]}}, {{i, j, p1[1]}, {j, h, p2[1]}, {i, h, p3[1]}});
    }

    WeightedConfiguration balanced_subgraph(Count k) const {
        int m = 1;
        for (; m <= spec_.size_cap; ++m) {
            const Count b = block_[static_cast<std::size_t>(m - 1)];
            if (k < b) break;
            k -= b;
        }
        const Count P = static_cast<Count>(patterns_.size());
        const Count tuples = detail::ipow(P, m);
        const auto dyad_ranks = detail::unrank_combination(static_cast<int>(detail::binomial(n_, 2)), m, k / tuples);
        Count r = k % tuples;
        std::vector<std::size_t> pick(static_cast<std::size_t>(m));
        for (int s = m - 1; s >= 0; --s) {
            pick[static_cast<std::size_t>(s)] = static_cast<std::size_t>(r % P);
            r /= P;
        }
        SignedConfiguration cfg;
        for (int s = 0; s < m; ++s) {
            const Dyad d = detail::unrank_dyad(n_, static_cast<Count>(dyad_ranks[static_cast<std::size_t>(s)]));
            const auto& pat = patterns_[pick[static_cast<std::size_t>(s)]];
            for (int t : pat.plus_dates) cfg.plus.push_back({d.i, d.j, t});
            for (int t : pat.minus_dates) cfg.minus.push_back({d.i, d.j, t});
        }
        return WeightedConfiguration::from_signed(cfg);
    }

    // Cells are visited in (i, j, t) order and each chosen with a weight; a branch is cut as
    // soon as some node can no longer receive cells and still has nonzero incidence.
    void materialize_weighted() {
        std::vector<EdgeTimeCell> all;
        for (int i = 0; i < n_; ++i)
            for (int j = i + 1; j < n_; ++j)
                for (int t = 1; t <= T_; ++t) all.push_back({i, j, t});
        std::vector<std::size_t> last(static_cast<std::size_t>(n_), 0);
        for (std::size_t p = 0; p < all.size(); ++p) {
            last[static_cast<std::size_t>(all[p].i)] = p;
            last[static_cast<std::size_t>(all[p].j)] = p;
        }
        std::vector<double> sigma(static_cast<std::size_t>(n_), 0.0);
        std::vector<WeightedCell> current;
        const std::size_t cap = static_cast<std::size_t>(spec_.size_cap);
        std::function<void(std::size_t)> dfs = [&](std::size_t from) {
            if (!current.empty()) {
                bool balanced = true;
                for (double s : sigma)
                    if (s != 0.0) {
                        balanced = false;
                        break;
                    }
                if (balanced) weighted_.push_back({current});
            }
            if (current.size() == cap) return;
            for (std::size_t p = from; p < all.size(); ++p) {
                bool dead = false;
                for (int v = 0; v < n_ && !dead; ++v)
                    if (sigma[static_cast<std::size_t>(v)] != 0.0 && last[static_cast<std::size_t>(v)] < p) dead = true;
                if (dead) return;
                const auto& e = all[p];
                for (double w : spec_.weights) {
                    sigma[static_cast<std::size_t>(e.i)] += w;
                    sigma[static_cast<std::size_t>(e.j)] += w;
                    current.push_back({e, w});
                    dfs(p + 1);
                    current.pop_back();
                    sigma[static_cast<std::size_t>(e.i)] -= w;
                    sigma[static_cast<std::size_t>(e.j)] -= w;
                }
            }
        };
        dfs(0);
    }

    FamilySpec spec_;
    int n_;
    int T_;
    Count total_ = 0;
    std::vector<detail::DyadPattern> patterns_;
    std::vector<Count> block_;
    std::vector<WeightedConfiguration> weighted_;
};

/// Configurations of a family in canonical order. Beyond `cap`, a seeded uniform sample without
/// replacement is returned, still in canonical order.
inline std::vector<WeightedConfiguration> enumerate(const FamilySpec& spec, int n, int T, std::size_t cap,
                                                    std::uint64_t seed = 0) {
    if (cap == 0) throw DomainError("enumeration cap must be positive");
    const ConfigEnumerator e(spec, n, T);
    std::vector<WeightedConfiguration> out;
    if (e.count() <= static_cast<Count>(cap)) {
        for (Count k = 0; k < e.count(); ++k) out.push_back(e.at(k));
        return out;
    }
    for (Count k : detail::sample_indices(e.count(), cap, seed)) out.push_back(e.at(k));
    return out;
}

/// Converts a +-1 weighted configuration back to signed form.
inline SignedConfiguration to_signed(const WeightedConfiguration& w) {
    SignedConfiguration s;
    for (const auto& c : w.cells) {
        if (c.weight == 1.0)
            s.plus.push_back(c.cell);
        else if (c.weight == -1.0)
            s.minus.push_back(c.cell);
        else
            throw DomainError("configuration has non-unit weights and is not a signed configuration");
    }
    return s;
}

}  // namespace dyadnet
