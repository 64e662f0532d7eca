#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"
#include "dyadnet/core/rng.hpp"

namespace dyadnet {

/// Node-level covariates Z_{it} for nodes 0..n-1 and dates 1..T, each a vector of length dim.
class NodeCovariatePanel {
public:
    NodeCovariatePanel() = default;

    NodeCovariatePanel(int n, int T, int dim) : n_(n), T_(T), dim_(dim) {
        if (n < 1 || T < 0 || dim < 0) throw DomainError("invalid covariate panel shape");
        values_.assign(static_cast<std::size_t>(n) * static_cast<std::size_t>(T) * static_cast<std::size_t>(dim), 0.0);
    }

    int nodes() const noexcept { return n_; }
    int periods() const noexcept { return T_; }
    int dim() const noexcept { return dim_; }

    std::span<const double> at(int i, int t) const { return {values_.data() + offset(i, t), static_cast<std::size_t>(dim_)}; }
    std::span<double> at(int i, int t) { return {values_.data() + offset(i, t), static_cast<std::size_t>(dim_)}; }

    double operator()(int i, int t, int k) const { return at(i, t)[static_cast<std::size_t>(k)]; }

    /// Declared finite support (discrete mode); empty when covariates are continuous.
    const std::vector<double>& support() const noexcept { return support_; }
    void set_support(std::vector<double> s) {
        std::sort(s.begin(), s.end());
        s.erase(std::unique(s.begin(), s.end()), s.end());
        support_ = std::move(s);
    }
    bool discrete() const noexcept { return !support_.empty(); }

    void validate() const {
        for (double v : values_) {
            if (!std::isfinite(v)) throw DomainError("non-finite node covariate");
            if (discrete() && !std::binary_search(support_.begin(), support_.end(), v))
                throw DomainError("node covariate outside the declared support");
        }
    }

    friend bool operator==(const NodeCovariatePanel&, const NodeCovariatePanel&) = default;

private:
    std::size_t offset(int i, int t) const {
        if (i < 0 || i >= n_) throw DomainError("node " + std::to_string(i) + " out of range");
        if (t < 1 || t > T_) throw DomainError("covariate date " + std::to_string(t) + " outside 1.." + std::to_string(T_));
        return (static_cast<std::size_t>(i) * static_cast<std::size_t>(T_) + static_cast<std::size_t>(t - 1)) *
               static_cast<std::size_t>(dim_);
    }

    int n_ = 0;
    int T_ = 0;
    int dim_ = 0;
    std::vector<double> values_;
    std::vector<double> support_;
};

/// How node covariates are generated. Discrete mode draws uniformly from `support`;
/// continuous mode draws N(0, 1). With probability `persistence` a coordinate keeps its
/// previous-date value.
struct CovariateSpec {
    int dim = 1;
    bool discrete = true;
    std::vector<double> support{0.0, 1.0};
    double persistence = 0.0;
};

inline NodeCovariatePanel draw_covariates(const CovariateSpec& spec, int n, int T, std::uint64_t seed) {
    if (spec.dim < 1) throw DomainError("covariate dimension must be at least 1");
    if (spec.discrete && spec.support.empty()) throw DomainError("discrete covariates need a non-empty support");
    if (spec.persistence < 0.0 || spec.persistence > 1.0) throw DomainError("persistence must lie in [0, 1]");
    NodeCovariatePanel z(n, T, spec.dim);
    if (spec.discrete) z.set_support(spec.support);
    for (int i = 0; i < n; ++i) {
        for (int t = 1; t <= T; ++t) {
            auto rng = substream(seed, Stream::covariate, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(t));
            auto out = z.at(i, t);
            for (int k = 0; k < spec.dim; ++k) {
                const bool keep = t > 1 && rng.uniform() < spec.persistence;
                double fresh = spec.discrete ? spec.support[rng.below(spec.support.size())] : rng.normal();
                out[static_cast<std::size_t>(k)] = keep ? z(i, t - 1, k) : fresh;
            }
        }
    }
    return z;
}

/// Dyadic covariate Z_{ijt} = |Z_{it} - Z_{jt}| coordinate-wise.
inline std::vector<double> dyadic_covariates(const NodeCovariatePanel& z, int i, int j, int t) {
    if (i == j) throw DomainError("dyadic covariates need i != j");
    const auto a = z.at(i, t);
    const auto b = z.at(j, t);
    std::vector<double> out(a.size());
    for (std::size_t k = 0; k < a.size(); ++k) out[k] = std::fabs(a[k] - b[k]);
    return out;
}

}  // namespace dyadnet
