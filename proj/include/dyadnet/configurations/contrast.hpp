#pragma once

#include <utility>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/model/covariates.hpp"
#include "dyadnet/model/dataset.hpp"
#include "dyadnet/model/network.hpp"
#include "dyadnet/model/statistics.hpp"
#include "dyadnet/model/theta.hpp"

namespace dyadnet {

// Every contrast in the library is accumulated the same way: start from 0.0 and add
// omega_e * W_e(theta) cell by cell (plus cells, then minus cells, for signed input). Bound
// families that must agree bit-for-bit rely on this single routine.

inline double delta_W(const WeightedConfiguration& cfg, const Theta& theta, const Dataset& data) {
    double acc = 0.0;
    for (const auto& c : cfg.cells) acc += c.weight * data.W(theta, c.cell.i, c.cell.j, c.cell.t);
    return acc;
}

inline double delta_W(const SignedConfiguration& cfg, const Theta& theta, const Dataset& data) {
    double acc = 0.0;
    for (const auto& e : cfg.plus) acc += 1.0 * data.W(theta, e.i, e.j, e.t);
    for (const auto& e : cfg.minus) acc += -1.0 * data.W(theta, e.i, e.j, e.t);
    return acc;
}

/// Same contrast computed from raw inputs, without a precomputed design.
inline double delta_W(const WeightedConfiguration& cfg, const Theta& theta, const NetworkPanel& panel,
                      const NodeCovariatePanel& z, const StatisticRegistry& registry) {
    double acc = 0.0;
    for (const auto& c : cfg.cells) {
        const auto& e = c.cell;
        if (e.t > panel.periods() || e.t > z.periods())
            throw DomainError("no data for cell date " + std::to_string(e.t));
        acc += c.weight * index_W(theta, dyadic_covariates(z, e.i, e.j, e.t), lagged_stats(panel, registry, e.i, e.j, e.t));
    }
    return acc;
}

inline double delta_W(const SignedConfiguration& cfg, const Theta& theta, const NetworkPanel& panel,
                      const NodeCovariatePanel& z, const StatisticRegistry& registry) {
    return delta_W(WeightedConfiguration::from_signed(cfg), theta, panel, z, registry);
}

/// Stacked contrast (sum omega_e Z_e, sum omega_e X_e), length d_h + d_x.
inline std::vector<double> delta_regressors(const WeightedConfiguration& cfg, const Dataset& data) {
    std::vector<double> out(data.dh() + data.dx(), 0.0);
    for (const auto& c : cfg.cells) {
        const auto z = data.zdyad(c.cell.i, c.cell.j, c.cell.t);
        const auto x = data.xlag(c.cell.i, c.cell.j, c.cell.t);
        for (std::size_t k = 0; k < z.size(); ++k) out[k] += c.weight * z[k];
        for (std::size_t k = 0; k < x.size(); ++k) out[z.size() + k] += c.weight * x[k];
    }
    return out;
}

inline std::vector<double> delta_regressors(const SignedConfiguration& cfg, const Dataset& data) {
    return delta_regressors(WeightedConfiguration::from_signed(cfg), data);
}

struct Outcomes {
    bool plus = false;
    bool minus = false;
};

/// Y+ = all positive cells linked and all negative cells unlinked; Y- is the flip.
template <class LinkSource>
Outcomes outcome_indicators(const WeightedConfiguration& cfg, const LinkSource& links) {
    bool yp = true;
    bool ym = true;
    for (const auto& c : cfg.cells) {
        const bool d = links.link(c.cell.i, c.cell.j, c.cell.t);
        const bool positive = c.weight > 0;
        yp = yp && (d == positive);
        ym = ym && (d != positive);
        if (!yp && !ym) break;
    }
    return {yp, ym};
}

template <class LinkSource>
Outcomes outcome_indicators(const SignedConfiguration& cfg, const LinkSource& links) {
    return outcome_indicators(WeightedConfiguration::from_signed(cfg), links);
}

}  // namespace dyadnet
