#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <vector>

#include "dyadnet/core/error.hpp"

namespace dyadnet {

inline constexpr std::array<double, 13> kGridLevels{0.01, 0.05, 0.10, 0.20, 0.30, 0.40, 0.50,
                                                    0.60, 0.70, 0.80, 0.90, 0.95, 0.99};

/// Order-statistic quantiles of `values` at kGridLevels, plus c = 0, sorted and deduplicated.
/// Order statistics (no interpolation) keep the grid exactly equivariant under rescaling by
/// powers of two.
inline std::vector<double> quantile_grid(std::span<const double> values) {
    std::vector<double> grid{0.0};
    if (!values.empty()) {
        std::vector<double> v(values.begin(), values.end());
        std::sort(v.begin(), v.end());
        for (double q : kGridLevels) {
            const auto k = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
            grid.push_back(v[k]);
        }
    }
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

inline std::vector<double> scaled_grid(std::span<const double> grid, double k) {
    if (!(k > 0.0)) throw DomainError("grid rescaling factor must be positive");
    std::vector<double> out(grid.begin(), grid.end());
    for (auto& c : out) c *= k;
    return out;
}

}  // namespace dyadnet
