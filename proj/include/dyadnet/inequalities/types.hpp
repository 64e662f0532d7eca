#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

namespace dyadnet {

struct BoundOptions {
    double slack = 3.0;          ///< allowed violation, in combined standard errors
    std::size_t cell_floor = 30; ///< conditioning cells with fewer observations are dropped
    int threads = 1;
};

/// One (conditioning cell, c) comparison. `lower` is the sup-side moment, `upper` the
/// inf-side moment 1 - E[flip]; `middle` is the known composite CDF when one is used (NaN otherwise).
struct BoundEvaluation {
    double c = 0.0;
    std::string cell;
    std::size_t cell_count = 0;
    double lower = 0.0;
    double upper = 1.0;
    double se_lower = 0.0;
    double se_upper = 0.0;
    std::string lower_arg;
    std::string upper_arg;
    double middle = std::numeric_limits<double>::quiet_NaN();
    double margin = 0.0;  ///< violation size in standard-error units (positive = violated)
    bool pass = true;

    bool has_middle() const { return !std::isnan(middle); }
    friend bool operator==(const BoundEvaluation&, const BoundEvaluation&) = default;
};

struct BoundResult {
    std::string family;
    std::vector<BoundEvaluation> evaluations;
    std::vector<std::string> warnings;

    bool pass() const {
        return std::all_of(evaluations.begin(), evaluations.end(), [](const auto& e) { return e.pass; });
    }

    std::size_t violations() const {
        return static_cast<std::size_t>(
            std::count_if(evaluations.begin(), evaluations.end(), [](const auto& e) { return !e.pass; }));
    }

    double worst_margin() const {
        double m = -std::numeric_limits<double>::infinity();
        for (const auto& e : evaluations) m = std::max(m, e.margin);
        return m;
    }
};

namespace detail {

/// Joins labels with ';', or "all" for an empty conditioning key.
inline std::string join_labels(const std::vector<std::string>& parts) {
    if (parts.empty()) return "all";
    std::string s;
    for (std::size_t k = 0; k < parts.size(); ++k) s += (k ? ";" : "") + parts[k];
    return s;
}

/// Sample mean of a 0/1 variable from counts, and its binomial standard error.
struct Moment {
    double value = 0.0;
    double se = 0.0;
};

inline Moment moment_from_counts(std::size_t hits, std::size_t total) {
    const double p = static_cast<double>(hits) / static_cast<double>(total);
    return {p, std::sqrt(p * (1.0 - p) / static_cast<double>(total))};
}

/// (a - b) / se, with the degenerate se = 0 case mapped to -inf, 0 or +inf.
inline double se_margin(double a, double b, double se) {
    const double d = a - b;
    if (se > 0.0) return d / se;
    if (d > 0.0) return std::numeric_limits<double>::infinity();
    if (d < 0.0) return -std::numeric_limits<double>::infinity();
    return 0.0;
}

/// Sandwich verdict: lower <= upper + slack * sqrt(se_l^2 + se_u^2).
inline void sandwich_verdict(BoundEvaluation& e, double slack) {
    const double se = std::sqrt(e.se_lower * e.se_lower + e.se_upper * e.se_upper);
    e.margin = se_margin(e.lower, e.upper, se);
    e.pass = e.lower <= e.upper + slack * se;
}

/// Two one-sided checks against a known middle term.
inline void middle_verdict(BoundEvaluation& e, double slack) {
    const double m1 = se_margin(e.lower, e.middle, e.se_lower);
    const double m2 = se_margin(e.middle, e.upper, e.se_upper);
    e.margin = std::max(m1, m2);
    e.pass = e.lower <= e.middle + slack * e.se_lower && e.middle <= e.upper + slack * e.se_upper;
}

}  // namespace detail
}  // namespace dyadnet
