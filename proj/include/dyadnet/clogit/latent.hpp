#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "dyadnet/clogit/exact.hpp"
#include "dyadnet/clogit/fit.hpp"
#include "dyadnet/clogit/sample.hpp"
#include "dyadnet/configurations/contrast.hpp"
#include "dyadnet/core/error.hpp"

namespace dyadnet {

/// sum over C+ of -|xi_i - xi_j| minus the same sum over C-: the part of the log-odds that
/// latent-distance effects leave behind in a node-balanced configuration.
inline double latent_residual(const SignedConfiguration& cfg, const std::vector<double>& xi) {
    auto d = [&](const EdgeTimeCell& e) {
        return -std::fabs(xi.at(static_cast<std::size_t>(e.i)) - xi.at(static_cast<std::size_t>(e.j)));
    };
    double r = 0.0;
    for (const auto& e : cfg.plus) r += d(e);
    for (const auto& e : cfg.minus) r -= d(e);
    return r;
}

struct LatentDiagnostic {
    std::size_t configurations = 0;
    std::vector<double> residuals;        ///< analytic latent residual per configuration
    double max_identity_error = 0.0;      ///< max |log-odds - dW(theta0) - residual|
    std::size_t nonzero_residuals = 0;    ///< |residual| > 1e-12
    double residual_mean = 0.0;
    double residual_sd = 0.0;
    double residual_min = 0.0;
    double residual_max = 0.0;
    std::optional<FitResult> naive_fit;   ///< clogit fit ignoring the residual, when estimable
    std::vector<double> naive_bias;       ///< naive theta-hat minus theta0
};

/// Partition check on a latent-distance simulation: the log-odds of every
/// node-balanced configuration equal Delta W(theta0) plus the analytic latent residual.
inline LatentDiagnostic latent_distance_diagnostic(const Simulation& sim, const Dataset& data, const Theta& theta0,
                                                   const std::vector<WeightedConfiguration>& configs,
                                                   bool fit_naive = true, const FitOptions& fopt = {}) {
    const auto& het = sim.record.heterogeneity;
    if (!het.has_latent_positions()) throw DomainError("latent-distance diagnostic needs latent positions in the record");
    const EtaRecord eta(sim, theta0);
    LatentDiagnostic out;
    out.configurations = configs.size();
    for (const auto& w : configs) {
        const auto cfg = to_signed(w);
        const double res = latent_residual(cfg, het.xi);
        const double lo = exact_log_odds(cfg, eta);
        out.max_identity_error = std::max(out.max_identity_error, std::fabs(lo - delta_W(cfg, theta0, data) - res));
        out.residuals.push_back(res);
        if (std::fabs(res) > 1e-12) ++out.nonzero_residuals;
    }
    if (!out.residuals.empty()) {
        double s = 0.0, ss = 0.0;
        for (double r : out.residuals) s += r;
        out.residual_mean = s / static_cast<double>(out.residuals.size());
        for (double r : out.residuals) ss += (r - out.residual_mean) * (r - out.residual_mean);
        out.residual_sd = out.residuals.size() > 1 ? std::sqrt(ss / static_cast<double>(out.residuals.size() - 1)) : 0.0;
        const auto [mn, mx] = std::minmax_element(out.residuals.begin(), out.residuals.end());
        out.residual_min = *mn;
        out.residual_max = *mx;
    }
    if (fit_naive) {
        const auto sample = build_sample(data, configs, "naive");
        try {
            out.naive_fit = fit(sample, theta0, fopt);
            const auto a = out.naive_fit->theta.stacked();
            const auto b = theta0.stacked();
            for (std::size_t k = 0; k < a.size(); ++k) out.naive_bias.push_back(a[k] - b[k]);
        } catch (const std::exception&) {
            out.naive_fit.reset();
        }
    }
    return out;
}

}  // namespace dyadnet
