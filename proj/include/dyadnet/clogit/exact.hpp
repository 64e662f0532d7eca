#pragma once

#include <cmath>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/configurations/enumerate.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/model/covariates.hpp"
#include "dyadnet/model/simulate.hpp"
#include "dyadnet/model/theta.hpp"

namespace dyadnet {

/// Oracle-only record of the true logit indices eta_e = W_e(theta0) + A_ij, built from the
/// simulation's debug record (the X actually used and the realised fixed effects).
class EtaRecord {
public:
    EtaRecord(const Simulation& sim, Theta theta0) : sim_(&sim), theta0_(std::move(theta0)) {}

    double W(int i, int j, int t) const {
        const auto z = dyadic_covariates(sim_->covariates, i, j, t);
        return index_W(theta0_, z, sim_->record.x_used(i, j, t));
    }
    double eta(int i, int j, int t) const { return W(i, j, t) + sim_->record.heterogeneity.dyad_effect(i, j); }
    double p(int i, int j, int t) const { return logistic_cdf(eta(i, j, t)); }

    const Simulation& simulation() const noexcept { return *sim_; }
    const Theta& theta0() const noexcept { return theta0_; }

private:
    const Simulation* sim_;
    Theta theta0_;
};

namespace detail {

/// log Lambda(x), stable in both tails.
inline double log_logistic(double x) { return x >= 0 ? -std::log1p(std::exp(-x)) : x - std::log1p(std::exp(x)); }

}  // namespace detail

/// log P(Y+ = 1 | eta) - log P(Y- = 1 | eta) from the product of independent Bernoulli cell
/// probabilities, without any balance requirement.
inline double bernoulli_log_odds(const SignedConfiguration& cfg, const EtaRecord& eta) {
    double log_plus = 0.0;
    double log_minus = 0.0;
    for (const auto& e : cfg.plus) {
        const double h = eta.eta(e.i, e.j, e.t);
        log_plus += detail::log_logistic(h);    // D_e = 1
        log_minus += detail::log_logistic(-h);  // D_e = 0
    }
    for (const auto& e : cfg.minus) {
        const double h = eta.eta(e.i, e.j, e.t);
        log_plus += detail::log_logistic(-h);
        log_minus += detail::log_logistic(h);
    }
    return log_plus - log_minus;
}

inline double bernoulli_log_odds(const WeightedConfiguration& cfg, const EtaRecord& eta) {
    return bernoulli_log_odds(to_signed(cfg), eta);
}

/// Exact conditional log-odds of a completely node-balanced configuration.
inline double exact_log_odds(const SignedConfiguration& cfg, const EtaRecord& eta) {
    if (!is_node_balanced(cfg)) throw DomainError("exact log-odds needs a completely node-balanced configuration");
    return bernoulli_log_odds(cfg, eta);
}

inline double exact_log_odds(const WeightedConfiguration& cfg, const EtaRecord& eta) {
    return exact_log_odds(to_signed(cfg), eta);
}

/// sum_m sigma_m nu_m: the node-effect term left in the log-odds of an unbalanced configuration.
inline double node_effect_residual(const SignedConfiguration& cfg, const std::vector<double>& nu) {
    double r = 0.0;
    for (const auto& [m, s] : node_incidence(cfg)) r += s * nu.at(static_cast<std::size_t>(m));
    return r;
}

}  // namespace dyadnet
