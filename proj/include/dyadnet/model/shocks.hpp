#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>

#include <boost/math/distributions/normal.hpp>

#include "dyadnet/core/error.hpp"
#include "dyadnet/core/rng.hpp"

namespace dyadnet {

/// Standard logistic CDF, evaluated without overflow.
inline double logistic_cdf(double x) {
    if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// A known, continuous, strictly increasing shock marginal (location 0).
class Marginal {
public:
    enum class Family { logistic, normal };

    static Marginal logistic(double scale = 1.0) { return Marginal(Family::logistic, scale); }
    static Marginal normal(double sd = 1.0) { return Marginal(Family::normal, sd); }

    static Marginal from_name(const std::string& name, double scale = 1.0) {
        if (name == "logistic") return logistic(scale);
        if (name == "normal") return normal(scale);
        throw DomainError("unknown marginal '" + name + "'");
    }

    Family family() const noexcept { return family_; }
    double scale() const noexcept { return scale_; }
    std::string name() const { return family_ == Family::logistic ? "logistic" : "normal"; }

    double cdf(double x) const {
        const double u = x / scale_;
        return family_ == Family::logistic ? logistic_cdf(u) : normal_cdf(u);
    }

    double pdf(double x) const {
        const double u = x / scale_;
        if (family_ == Family::logistic) {
            const double e = std::exp(-std::fabs(u));
            return e / ((1.0 + e) * (1.0 + e) * scale_);
        }
        return std::exp(-0.5 * u * u) / (std::sqrt(2.0 * std::numbers::pi) * scale_);
    }

    double quantile(double p) const {
        if (!(p > 0.0 && p < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
        if (family_ == Family::logistic) return scale_ * (std::log(p) - std::log1p(-p));
        return scale_ * boost::math::quantile(boost::math::normal_distribution<double>(), p);
    }

    /// Maps a standard normal draw to this marginal through the Gaussian copula.
    double from_gaussian(double g) const {
        if (family_ == Family::normal) return scale_ * g;
        // log Phi(g) - log Phi(-g), stable in both tails.
        const double lo = std::log(0.5 * std::erfc(-g / std::numbers::sqrt2));
        const double hi = std::log(0.5 * std::erfc(g / std::numbers::sqrt2));
        return scale_ * (lo - hi);
    }

    friend bool operator==(const Marginal&, const Marginal&) = default;

private:
    Marginal(Family f, double scale) : family_(f), scale_(scale) {
        if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("marginal scale must be positive");
    }

    Family family_;
    double scale_;
};

/// Law of the per-dyad shock sequence U_{ij1..ijT}; independent across dyads.
struct ShockSpec {
    enum class Kind { iid_logistic, iid_known_marginal, ar1_gaussian_copula };

    Kind kind = Kind::iid_logistic;
    Marginal marginal = Marginal::logistic();
    double rho = 0.0;

    static ShockSpec iid_logistic() { return {}; }
    static ShockSpec iid(Marginal m) { return {Kind::iid_known_marginal, m, 0.0}; }
    static ShockSpec ar1_copula(double rho, Marginal m = Marginal::logistic()) {
        return {Kind::ar1_gaussian_copula, m, rho};
    }

    /// Marginal used for U_{ijt} at every date.
    Marginal marginal_law() const { return kind == Kind::iid_logistic ? Marginal::logistic() : marginal; }

    bool serially_independent() const { return kind != Kind::ar1_gaussian_copula || rho == 0.0; }

    void validate() const {
        if (kind == Kind::ar1_gaussian_copula && !(rho > -1.0 && rho < 1.0))
            throw DomainError("copula serial correlation must lie in (-1, 1)");
    }

    static Kind kind_from_name(const std::string& s) {
        if (s == "iid_logistic") return Kind::iid_logistic;
        if (s == "iid_known_marginal") return Kind::iid_known_marginal;
        if (s == "ar1_gaussian_copula") return Kind::ar1_gaussian_copula;
        throw DomainError("unknown shock variant '" + s + "'");
    }
};

/// Draws U_{ij1..ijT} into out (size T). Date t always uses substream (dyad, t), so extending
/// T leaves earlier dates untouched.
inline void draw_dyad_shocks(const ShockSpec& spec, std::uint64_t seed, int i, int j, std::span<double> out) {
    const auto dyad_key = (static_cast<std::uint64_t>(i) << 32) | static_cast<std::uint64_t>(j);
    const Marginal m = spec.marginal_law();
    double g = 0.0;
    const double innovation_sd = std::sqrt(1.0 - spec.rho * spec.rho);
    for (std::size_t k = 0; k < out.size(); ++k) {
        auto rng = substream(seed, Stream::shock, dyad_key, k + 1);
        switch (spec.kind) {
            case ShockSpec::Kind::iid_logistic:
            case ShockSpec::Kind::iid_known_marginal: out[k] = m.quantile(rng.uniform()); break;
            case ShockSpec::Kind::ar1_gaussian_copula: {
                const double e = rng.normal();
                g = k == 0 ? e : spec.rho * g + innovation_sd * e;
                out[k] = m.from_gaussian(g);
                break;
            }
        }
    }
}

}  // namespace dyadnet
