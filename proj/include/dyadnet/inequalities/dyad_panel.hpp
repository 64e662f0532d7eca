#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/core/parallel.hpp"
#include "dyadnet/inequalities/c_grid.hpp"
#include "dyadnet/inequalities/types.hpp"
#include "dyadnet/model/dataset.hpp"

namespace dyadnet {

/// All W_ijt(theta), dyad-major then date, in dyad_index order.
inline std::vector<double> panel_indices(const Dataset& data, const Theta& theta, int threads = 1) {
    const int n = data.nodes();
    const int T = data.periods();
    std::vector<double> w(dyad_count(n) * static_cast<std::size_t>(T));
    parallel_for(static_cast<std::size_t>(n), threads, [&](std::size_t row) {
        const int i = static_cast<int>(row);
        for (int j = i + 1; j < n; ++j)
            for (int t = 1; t <= T; ++t)
                w[dyad_index(n, i, j) * static_cast<std::size_t>(T) + static_cast<std::size_t>(t - 1)] = data.W(theta, i, j, t);
    });
    return w;
}

/// Dyad-panel envelope: per dyad history h and threshold c, max_t L_t(c|h) against min_s U_s(c|h),
/// with L_t = mean D_t 1{W_t <= c} and U_s = 1 - mean (1 - D_s) 1{W_s >= c}.
inline BoundResult dyad_panel_bounds(const Dataset& data, const Theta& theta, std::span<const double> c_grid = {},
                                     const BoundOptions& opt = {}) {
    const int n = data.nodes();
    const int T = data.periods();
    if (T < 2) throw DomainError("dyad-panel bounds need at least two dates (T >= 2), got T=" + std::to_string(T));
    const auto w = panel_indices(data, theta, opt.threads);
    const std::vector<double> grid = c_grid.empty() ? quantile_grid(w) : std::vector<double>(c_grid.begin(), c_grid.end());

    const std::size_t H = data.dyad_code_count();
    std::vector<std::size_t> count(H, 0);
    // linked[h][t]: W of linked dyads; unlinked[h][t]: W of unlinked dyads.
    std::vector<std::vector<std::vector<double>>> linked(H, std::vector<std::vector<double>>(static_cast<std::size_t>(T)));
    auto unlinked = linked;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) {
            const auto h = static_cast<std::size_t>(data.dyad_code(i, j));
            ++count[h];
            for (int t = 1; t <= T; ++t) {
                const double v = w[dyad_index(n, i, j) * static_cast<std::size_t>(T) + static_cast<std::size_t>(t - 1)];
                (data.link(i, j, t) ? linked : unlinked)[h][static_cast<std::size_t>(t - 1)].push_back(v);
            }
        }

    BoundResult out;
    out.family = "dyad_panel";
    for (std::size_t h = 0; h < H; ++h) {
        const std::string label = data.dyad_label(static_cast<int>(h));
        if (count[h] < opt.cell_floor) {
            out.warnings.push_back("dyad history " + label + " has " + std::to_string(count[h]) +
                                   " dyads, below the floor of " + std::to_string(opt.cell_floor) + "; skipped");
            continue;
        }
        for (auto& v : linked[h]) std::sort(v.begin(), v.end());
        for (auto& v : unlinked[h]) std::sort(v.begin(), v.end());
        for (double c : grid) {
            BoundEvaluation e;
            e.c = c;
            e.cell = label;
            e.cell_count = count[h];
            bool first = true;
            for (int t = 1; t <= T; ++t) {
                const auto& lk = linked[h][static_cast<std::size_t>(t - 1)];
                const auto& ul = unlinked[h][static_cast<std::size_t>(t - 1)];
                const auto hits_l = static_cast<std::size_t>(std::upper_bound(lk.begin(), lk.end(), c) - lk.begin());
                const auto hits_u = static_cast<std::size_t>(ul.end() - std::lower_bound(ul.begin(), ul.end(), c));
                const auto L = detail::moment_from_counts(hits_l, count[h]);
                const auto Q = detail::moment_from_counts(hits_u, count[h]);
                const double U = 1.0 - Q.value;
                const std::string arg = "t=" + std::to_string(t);
                if (first || L.value > e.lower) {
                    e.lower = L.value;
                    e.se_lower = L.se;
                    e.lower_arg = arg;
                }
                if (first || U < e.upper) {
                    e.upper = U;
                    e.se_upper = Q.se;
                    e.upper_arg = arg;
                }
                first = false;
            }
            detail::sandwich_verdict(e, opt.slack);
            out.evaluations.push_back(std::move(e));
        }
    }
    return out;
}

}  // namespace dyadnet
