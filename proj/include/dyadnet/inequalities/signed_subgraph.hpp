#pragma once

#include <algorithm>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/configurations/contrast.hpp"
#include "dyadnet/configurations/enumerate.hpp"
#include "dyadnet/configurations/instances.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/parallel.hpp"
#include "dyadnet/inequalities/c_grid.hpp"
#include "dyadnet/inequalities/types.hpp"
#include "dyadnet/model/dataset.hpp"

namespace dyadnet {

/// Throws unless cfg is a signed configuration with both sides nonempty and rho == 0 on every dyad.
inline void require_dyad_balanced(const WeightedConfiguration& pattern) {
    const SignedConfiguration s = to_signed(pattern);
    if (s.plus.empty() || s.minus.empty()) throw DomainError("signed-subgraph bounds need nonempty C+ and C-");
    s.validate();
    for (const auto& [d, r] : residual_load(s))
        if (r != 0)
            throw DomainError("configuration is not dyad-balanced: dyad (" + std::to_string(d.i) + "," +
                              std::to_string(d.j) + ") has residual load " + std::to_string(r));
}

/// Contrasts Delta_C W(theta) for every instance.
inline std::vector<double> instance_contrasts(const PatternInstances& inst, const Theta& theta, const Dataset& data,
                                              int threads = 1) {
    std::vector<double> dw(inst.configs.size());
    parallel_for(dw.size(), threads, [&](std::size_t k) { dw[k] = delta_W(inst.configs[k], theta, data); });
    return dw;
}

/// Signed-subgraph sandwich: sup over joint node histories z of E[Y+ 1{dW <= c} | z] against
/// inf over z of 1 - E[Y- 1{dW >= c} | z]. Conditioning cells are the node histories of the
/// pattern's slots, in slot order.
inline BoundResult signed_subgraph_bounds(const Dataset& data, const Theta& theta, const PatternInstances& inst,
                                          std::span<const double> c_grid = {}, const BoundOptions& opt = {}) {
    require_dyad_balanced(inst.pattern);
    const auto dw = instance_contrasts(inst, theta, data, opt.threads);
    const std::vector<double> grid = c_grid.empty() ? quantile_grid(dw) : std::vector<double>(c_grid.begin(), c_grid.end());

    std::map<std::vector<int>, int> ids;
    std::vector<std::string> labels;
    std::vector<std::size_t> count;
    std::vector<std::vector<double>> plus_dw, minus_dw;
    std::vector<int> key(static_cast<std::size_t>(inst.slots));
    for (std::size_t k = 0; k < inst.configs.size(); ++k) {
        std::vector<std::string> parts;
        for (int s = 0; s < inst.slots; ++s) key[static_cast<std::size_t>(s)] = data.node_code(inst.tuples[k][static_cast<std::size_t>(s)]);
        auto [it, fresh] = ids.try_emplace(key, static_cast<int>(labels.size()));
        if (fresh) {
            for (int code : key) parts.push_back(data.node_label(code));
            labels.push_back(detail::join_labels(parts));
            count.push_back(0);
            plus_dw.emplace_back();
            minus_dw.emplace_back();
        }
        const auto z = static_cast<std::size_t>(it->second);
        ++count[z];
        const auto y = outcome_indicators(inst.configs[k], data);
        if (y.plus) plus_dw[z].push_back(dw[k]);
        if (y.minus) minus_dw[z].push_back(dw[k]);
    }

    BoundResult out;
    out.family = "signed_subgraph";
    std::vector<std::size_t> kept;
    std::size_t total = 0;
    for (std::size_t z = 0; z < labels.size(); ++z) {
        if (count[z] < opt.cell_floor) {
            out.warnings.push_back("node-history cell " + labels[z] + " has " + std::to_string(count[z]) +
                                   " instances, below the floor; skipped");
            continue;
        }
        std::sort(plus_dw[z].begin(), plus_dw[z].end());
        std::sort(minus_dw[z].begin(), minus_dw[z].end());
        kept.push_back(z);
        total += count[z];
    }
    if (kept.empty()) {
        out.warnings.push_back("no conditioning cell reaches the floor; nothing evaluated");
        return out;
    }
    for (double c : grid) {
        BoundEvaluation e;
        e.c = c;
        e.cell = "all";
        e.cell_count = total;
        bool first = true;
        for (std::size_t z : kept) {
            const auto& p = plus_dw[z];
            const auto& m = minus_dw[z];
            const auto L = detail::moment_from_counts(
                static_cast<std::size_t>(std::upper_bound(p.begin(), p.end(), c) - p.begin()), count[z]);
            const auto Q = detail::moment_from_counts(
                static_cast<std::size_t>(m.end() - std::lower_bound(m.begin(), m.end(), c)), count[z]);
            const double U = 1.0 - Q.value;
            if (first || L.value > e.lower) {
                e.lower = L.value;
                e.se_lower = L.se;
                e.lower_arg = labels[z];
            }
            if (first || U < e.upper) {
                e.upper = U;
                e.se_upper = Q.se;
                e.upper_arg = labels[z];
            }
            first = false;
        }
        detail::sandwich_verdict(e, opt.slack);
        out.evaluations.push_back(std::move(e));
    }
    return out;
}

inline BoundResult signed_subgraph_bounds(const Dataset& data, const Theta& theta, const SignedConfiguration& cfg,
                                          std::span<const double> c_grid = {}, const BoundOptions& opt = {},
                                          const InstancePolicy& policy = {}) {
    require_dyad_balanced(WeightedConfiguration::from_signed(cfg));
    return signed_subgraph_bounds(data, theta, instantiate(cfg, data.nodes(), policy), c_grid, opt);
}

}  // namespace dyadnet
