#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <tuple>
#include <vector>

#include "dyadnet/configurations/configuration.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/model/shocks.hpp"

namespace dyadnet {

/// CDF of sum_e w_e U_e for independent U_e with a common known marginal. The first summand's
/// CDF is kept analytic; the density of the remaining summands is built by trapezoid
/// convolution on a uniform grid of `points` nodes spanning +-12 total standard deviations.
class CompositeCdf {
public:
    CompositeCdf(Marginal marginal, std::vector<double> weights, std::size_t points = (1u << 14) + 1)
        : marginal_(marginal), weights_(std::move(weights)) {
        if (weights_.empty()) throw DomainError("composite CDF needs at least one summand");
        for (double w : weights_)
            if (w == 0.0 || !std::isfinite(w)) throw DomainError("composite CDF weights must be finite and nonzero");
        if (points < 3) throw DomainError("quadrature grid needs at least three points");
        if (weights_.size() == 1) return;

        const double sd = marginal_.family() == Marginal::Family::logistic
                              ? marginal_.scale() * std::numbers::pi / std::sqrt(3.0)
                              : marginal_.scale();
        double total = 0.0;
        for (double w : weights_) total += std::fabs(w);
        half_ = 12.0 * total * sd;
        n_ = points;
        h_ = 2.0 * half_ / static_cast<double>(n_ - 1);

        density_.resize(n_);
        for (std::size_t k = 0; k < n_; ++k) density_[k] = summand_pdf(weights_[1], x(k));
        std::vector<double> kernel(2 * n_ - 1), next(n_);
        for (std::size_t s = 2; s < weights_.size(); ++s) {
            // kernel[d + n - 1] = pdf of summand s at offset d * h
            for (std::size_t d = 0; d < kernel.size(); ++d)
                kernel[d] = summand_pdf(weights_[s], (static_cast<double>(d) - static_cast<double>(n_ - 1)) * h_);
            for (std::size_t i = 0; i < n_; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < n_; ++j) acc += trap(j) * density_[j] * kernel[i + n_ - 1 - j];
                next[i] = acc * h_;
            }
            density_.swap(next);
        }
        mass_ = 0.0;
        for (std::size_t j = 0; j < n_; ++j) mass_ += trap(j) * density_[j];
        mass_ *= h_;
    }

    /// From a configuration: repeated cells share one shock, so their weights are merged first.
    static CompositeCdf of(const WeightedConfiguration& cfg, const ShockSpec& spec) {
        spec.validate();
        if (!spec.serially_independent())
            throw DomainError("composite CDF requires serially independent shocks; the copula with rho != 0 "
                              "only admits the latent-CDF sandwich");
        std::map<std::tuple<int, int, int>, double> merged;
        for (const auto& c : cfg.cells) merged[{c.cell.i, c.cell.j, c.cell.t}] += c.weight;
        std::vector<double> w;
        for (const auto& [cell, weight] : merged)
            if (weight != 0.0) w.push_back(weight);
        return CompositeCdf(spec.marginal_law(), std::move(w));
    }

    static CompositeCdf of(const SignedConfiguration& cfg, const ShockSpec& spec) {
        return of(WeightedConfiguration::from_signed(cfg), spec);
    }

    double operator()(double c) const {
        if (weights_.size() == 1) return summand_cdf(weights_[0], c);
        double acc = 0.0;
        for (std::size_t j = 0; j < n_; ++j) acc += trap(j) * density_[j] * summand_cdf(weights_[0], c - x(j));
        return std::clamp(acc * h_ / mass_, 0.0, 1.0);
    }

    const std::vector<double>& weights() const noexcept { return weights_; }
    /// Support half-width of the quadrature grid (0 for a single summand).
    double half_width() const noexcept { return half_; }
    /// Trapezoid mass of the convolved density before normalisation.
    double raw_mass() const noexcept { return weights_.size() == 1 ? 1.0 : mass_; }

private:
    double x(std::size_t k) const { return -half_ + static_cast<double>(k) * h_; }
    double trap(std::size_t k) const { return k == 0 || k + 1 == n_ ? 0.5 : 1.0; }

    double summand_pdf(double w, double v) const { return marginal_.pdf(v / std::fabs(w)) / std::fabs(w); }
    double summand_cdf(double w, double v) const {
        return w > 0 ? marginal_.cdf(v / w) : 1.0 - marginal_.cdf(v / w);
    }

    Marginal marginal_;
    std::vector<double> weights_;
    double half_ = 0.0;
    double h_ = 0.0;
    double mass_ = 1.0;
    std::size_t n_ = 0;
    std::vector<double> density_;
};

/// Largest difference between the CDF on either side of each point, probing continuity.
inline double max_jump(const CompositeCdf& F, const std::vector<double>& at, double delta = 1e-7) {
    double m = 0.0;
    for (double c : at) m = std::max(m, std::fabs(F(c + delta) - F(c - delta)));
    return m;
}

}  // namespace dyadnet
