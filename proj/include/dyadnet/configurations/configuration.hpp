#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/model/network.hpp"

namespace dyadnet {

/// Edge-time cell (i, j, t) with i < j and t >= 1.
struct EdgeTimeCell {
    int i = 0;
    int j = 0;
    int t = 1;

    EdgeTimeCell() = default;
    EdgeTimeCell(int a, int b, int date) : t(date) {
        const Dyad d = make_dyad(a, b);
        i = d.i;
        j = d.j;
        if (date < 1) throw DomainError("edge-time cells need a date >= 1, got " + std::to_string(date));
    }

    Dyad dyad() const { return {i, j}; }
    bool touches(int m) const noexcept { return m == i || m == j; }

    friend auto operator<=>(const EdgeTimeCell&, const EdgeTimeCell&) = default;
};

/// A cell with its signed weight: +1/-1 for signed configurations, omega_e otherwise.
struct WeightedCell {
    EdgeTimeCell cell;
    double weight = 1.0;

    friend bool operator==(const WeightedCell&, const WeightedCell&) = default;
};

struct SignedConfiguration {
    std::vector<EdgeTimeCell> plus;
    std::vector<EdgeTimeCell> minus;

    std::size_t size() const noexcept { return plus.size() + minus.size(); }

    /// Cells sorted lexicographically within each side.
    SignedConfiguration canonical() const {
        SignedConfiguration c = *this;
        std::sort(c.plus.begin(), c.plus.end());
        std::sort(c.minus.begin(), c.minus.end());
        return c;
    }

    /// Plus cells first (weight +1), then minus cells (weight -1), each side in stored order.
    std::vector<WeightedCell> weighted_cells() const {
        std::vector<WeightedCell> out;
        out.reserve(size());
        for (const auto& e : plus) out.push_back({e, 1.0});
        for (const auto& e : minus) out.push_back({e, -1.0});
        return out;
    }

    /// The mirrored configuration (C-, C+).
    SignedConfiguration flipped() const { return {minus, plus}; }

    /// Throws if one cell sits on both sides, which would make Y+ and Y- identically zero.
    void validate() const {
        for (const auto& e : plus)
            if (std::find(minus.begin(), minus.end(), e) != minus.end())
                throw DomainError("cell (" + std::to_string(e.i) + "," + std::to_string(e.j) + "," +
                                  std::to_string(e.t) + ") appears in both C+ and C-");
    }

    friend bool operator==(const SignedConfiguration&, const SignedConfiguration&) = default;
};

struct WeightedConfiguration {
    std::vector<WeightedCell> cells;

    static WeightedConfiguration from_signed(const SignedConfiguration& s) { return {s.weighted_cells()}; }

    std::vector<EdgeTimeCell> positive() const {
        std::vector<EdgeTimeCell> out;
        for (const auto& c : cells)
            if (c.weight > 0) out.push_back(c.cell);
        return out;
    }

    std::vector<EdgeTimeCell> negative() const {
        std::vector<EdgeTimeCell> out;
        for (const auto& c : cells)
            if (c.weight < 0) out.push_back(c.cell);
        return out;
    }

    void validate() const {
        for (const auto& c : cells)
            if (c.weight == 0.0 || !std::isfinite(c.weight)) throw DomainError("weights must be finite and nonzero");
    }

    bool has_both_signs() const { return !positive().empty() && !negative().empty(); }

    friend bool operator==(const WeightedConfiguration&, const WeightedConfiguration&) = default;
};

/// rho(i,j) = #{t : (i,j,t) in C+} - #{t : (i,j,t) in C-}; only dyads present in cfg appear.
inline std::map<Dyad, int> residual_load(const SignedConfiguration& cfg) {
    std::map<Dyad, int> rho;
    for (const auto& e : cfg.plus) ++rho[e.dyad()];
    for (const auto& e : cfg.minus) --rho[e.dyad()];
    return rho;
}

inline bool is_dyad_balanced(const SignedConfiguration& cfg) {
    for (const auto& [d, r] : residual_load(cfg))
        if (r != 0) return false;
    return true;
}

/// Dyads with nonzero residual load.
inline std::vector<Dyad> residual_dyads(const SignedConfiguration& cfg) {
    std::vector<Dyad> out;
    for (const auto& [d, r] : residual_load(cfg))
        if (r != 0) out.push_back(d);
    return out;
}

/// sigma_m = sum of omega_e over cells touching m, for every node in cfg.
inline std::map<int, double> node_incidence(const WeightedConfiguration& cfg) {
    std::map<int, double> sigma;
    for (const auto& c : cfg.cells) {
        sigma[c.cell.i] += c.weight;
        sigma[c.cell.j] += c.weight;
    }
    return sigma;
}

inline std::map<int, double> node_incidence(const SignedConfiguration& cfg) {
    return node_incidence(WeightedConfiguration::from_signed(cfg));
}

inline bool is_node_balanced(const WeightedConfiguration& cfg) {
    for (const auto& [m, s] : node_incidence(cfg))
        if (s != 0.0) return false;
    return true;
}

inline bool is_node_balanced(const SignedConfiguration& cfg) {
    return is_node_balanced(WeightedConfiguration::from_signed(cfg));
}

/// Nodes of cfg in increasing order.
inline std::vector<int> config_nodes(const WeightedConfiguration& cfg) {
    std::set<int> s;
    for (const auto& c : cfg.cells) {
        s.insert(c.cell.i);
        s.insert(c.cell.j);
    }
    return {s.begin(), s.end()};
}

inline std::vector<int> config_nodes(const SignedConfiguration& cfg) {
    return config_nodes(WeightedConfiguration::from_signed(cfg));
}

}  // namespace dyadnet
