#pragma once

#include <span>
#include <string>
#include <vector>

#include "dyadnet/core/error.hpp"

namespace dyadnet {

/// Index coefficients: alpha on the dyadic covariates, lambda on the lagged network statistics.
struct Theta {
    std::vector<double> alpha;
    std::vector<double> lambda;

    std::size_t dim() const noexcept { return alpha.size() + lambda.size(); }

    /// Coordinate k of the stacked vector (alpha', lambda')'.
    double operator[](std::size_t k) const { return k < alpha.size() ? alpha[k] : lambda[k - alpha.size()]; }

    std::vector<double> stacked() const {
        std::vector<double> v(alpha);
        v.insert(v.end(), lambda.begin(), lambda.end());
        return v;
    }

    static Theta from_stacked(std::span<const double> v, std::size_t dh) {
        if (dh > v.size()) throw DomainError("alpha dimension exceeds parameter length");
        return Theta{{v.begin(), v.begin() + static_cast<std::ptrdiff_t>(dh)},
                     {v.begin() + static_cast<std::ptrdiff_t>(dh), v.end()}};
    }

    Theta scaled(double k) const {
        Theta out = *this;
        for (auto& a : out.alpha) a *= k;
        for (auto& l : out.lambda) l *= k;
        return out;
    }

    friend bool operator==(const Theta&, const Theta&) = default;
};

/// W = Z'alpha + X'lambda.
inline double index_W(const Theta& theta, std::span<const double> zdyad, std::span<const double> xlag) {
    if (zdyad.size() != theta.alpha.size() || xlag.size() != theta.lambda.size())
        throw DomainError("index dimensions (" + std::to_string(zdyad.size()) + ", " + std::to_string(xlag.size()) +
                          ") do not match theta (" + std::to_string(theta.alpha.size()) + ", " +
                          std::to_string(theta.lambda.size()) + ")");
    double w = 0.0;
    for (std::size_t k = 0; k < zdyad.size(); ++k) w += zdyad[k] * theta.alpha[k];
    for (std::size_t k = 0; k < xlag.size(); ++k) w += xlag[k] * theta.lambda[k];
    return w;
}

}  // namespace dyadnet
