#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dyadnet/clogit/sample.hpp"
#include "dyadnet/core/error.hpp"
#include "dyadnet/core/parallel.hpp"
#include "dyadnet/model/shocks.hpp"
#include "dyadnet/model/theta.hpp"

namespace dyadnet {

/// The stacked contrast matrix does not have full column rank; `null_space` holds an
/// orthonormal basis (columns) of the unidentified directions.
class PointIdentificationFailure : public std::runtime_error {
public:
    PointIdentificationFailure(const std::string& what, Eigen::MatrixXd null_space)
        : std::runtime_error(what), null_space_(std::move(null_space)) {}
    const Eigen::MatrixXd& null_space() const noexcept { return null_space_; }

private:
    Eigen::MatrixXd null_space_;
};

/// The conditional likelihood has no finite maximiser.
class Separation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct FitOptions {
    double gradient_tolerance = 1e-8;
    int max_iterations = 200;
    int max_halvings = 30;
    double separation_norm = 1e3;
    double rank_tolerance = 1e-8;
    int threads = 1;
};

struct FitResult {
    Theta theta;
    double loglik = 0.0;
    double gradient_norm = 0.0;   ///< max-norm
    Eigen::MatrixXd information;  ///< observed information (-Hessian); not a valid covariance under overlap
    bool converged = false;
    int iterations = 0;
};

struct RankReport {
    int rank = 0;
    int dim = 0;
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd null_space;
    bool full_rank() const noexcept { return rank == dim; }
};

/// Numerical rank: singular values above tol * largest.
inline RankReport matrix_rank(const Eigen::MatrixXd& X, double tol = 1e-8) {
    RankReport r;
    r.dim = static_cast<int>(X.cols());
    if (X.rows() == 0 || X.cols() == 0) {
        r.singular_values = Eigen::VectorXd::Zero(X.cols());
        r.null_space = Eigen::MatrixXd::Identity(X.cols(), X.cols());
        return r;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd, Eigen::ColPivHouseholderQRPreconditioner> svd(X, Eigen::ComputeFullV);
    r.singular_values = svd.singularValues();
    const double top = r.singular_values.size() ? r.singular_values(0) : 0.0;
    for (Eigen::Index k = 0; k < r.singular_values.size(); ++k)
        if (top > 0.0 && r.singular_values(k) > tol * top) ++r.rank;
    r.null_space = svd.matrixV().rightCols(X.cols() - r.rank);
    return r;
}

namespace detail {

inline double softplus(double s) { return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s)); }

struct LogitTerms {
    double loglik = 0.0;
    Eigen::VectorXd gradient;
    Eigen::MatrixXd hessian;
};

inline constexpr Eigen::Index kChunkRows = 4096;

/// Sums over rows in fixed chunks combined in chunk order, so the result does not depend on
/// the number of workers.
inline LogitTerms logit_terms(const ClogitSample& s, const Eigen::VectorXd& theta, int threads) {
    const Eigen::Index n = static_cast<Eigen::Index>(s.rows());
    const Eigen::Index p = static_cast<Eigen::Index>(s.dim());
    const auto chunks = static_cast<std::size_t>((n + kChunkRows - 1) / kChunkRows);
    std::vector<LogitTerms> part(chunks);
    parallel_for(chunks, threads, [&](std::size_t c) {
        LogitTerms t{0.0, Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
        const Eigen::Index lo = static_cast<Eigen::Index>(c) * kChunkRows;
        const Eigen::Index hi = std::min(n, lo + kChunkRows);
        for (Eigen::Index r = lo; r < hi; ++r) {
            const auto x = s.regressors.row(r);
            const double eta = x.dot(theta);
            const double y = s.outcome[static_cast<std::size_t>(r)];
            const double pr = logistic_cdf(eta);
            t.loglik += y * eta - softplus(eta);
            t.gradient += (y - pr) * x.transpose();
            t.hessian.noalias() -= pr * (1.0 - pr) * x.transpose() * x;
        }
        part[c] = std::move(t);
    });
    LogitTerms total{0.0, Eigen::VectorXd::Zero(p), Eigen::MatrixXd::Zero(p, p)};
    for (const auto& t : part) {
        total.loglik += t.loglik;
        total.gradient += t.gradient;
        total.hessian += t.hessian;
    }
    return total;
}

}  // namespace detail

/// Conditional log-likelihood, gradient and Hessian at theta.
inline double clogit_loglik(const ClogitSample& s, const Theta& theta, Eigen::VectorXd* gradient = nullptr,
                            Eigen::MatrixXd* hessian = nullptr, int threads = 1) {
    if (theta.dim() != s.dim()) throw DomainError("theta dimension does not match the sample");
    const auto v = theta.stacked();
    const auto t = detail::logit_terms(s, Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())), threads);
    if (gradient) *gradient = t.gradient;
    if (hessian) *hessian = t.hessian;
    return t.loglik;
}

/// Damped Newton maximisation of sum y * dW(theta) - log(1 + exp(dW(theta))).
inline FitResult fit(const ClogitSample& s, const Theta& init, const FitOptions& opt = {}) {
    if (s.empty()) throw DomainError("conditional-logit sample has no informative rows");
    if (init.dim() != s.dim()) throw DomainError("initial theta dimension does not match the sample");
    const auto rank = matrix_rank(s.regressors, opt.rank_tolerance);
    if (!rank.full_rank())
        throw PointIdentificationFailure("contrast matrix has rank " + std::to_string(rank.rank) + " < " +
                                             std::to_string(rank.dim) + "; theta is not point identified",
                                         rank.null_space);

    const auto dh = s.dh;
    auto v0 = init.stacked();
    Eigen::VectorXd theta = Eigen::Map<const Eigen::VectorXd>(v0.data(), static_cast<Eigen::Index>(v0.size()));
    auto terms = detail::logit_terms(s, theta, opt.threads);
    FitResult out;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (terms.gradient.lpNorm<Eigen::Infinity>() < opt.gradient_tolerance) break;
        if (theta.norm() > opt.separation_norm)
            throw Separation("parameter norm exceeded " + std::to_string(opt.separation_norm) +
                             " before the gradient vanished; the likelihood has no finite maximiser");
        const Eigen::MatrixXd info = -terms.hessian;
        Eigen::VectorXd step = info.ldlt().solve(terms.gradient);
        if (!step.allFinite()) step = terms.gradient;
        bool improved = false;
        for (int h = 0; h <= opt.max_halvings; ++h) {
            const Eigen::VectorXd cand = theta + step;
            auto ct = detail::logit_terms(s, cand, opt.threads);
            // Near the optimum the gain falls below rounding in the log-likelihood sum.
            const double noise = 1e-12 * (1.0 + std::fabs(terms.loglik));
            if (std::isfinite(ct.loglik) && ct.loglik >= terms.loglik - noise) {
                theta = cand;
                terms = std::move(ct);
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    if (theta.norm() > opt.separation_norm && terms.gradient.lpNorm<Eigen::Infinity>() >= opt.gradient_tolerance)
        throw Separation("parameter norm exceeded " + std::to_string(opt.separation_norm) +
                         " before the gradient vanished; the likelihood has no finite maximiser");
    // A theta that classifies every row strictly correctly is a separation certificate: scaling
    // it up raises the likelihood without bound.
    const Eigen::VectorXd score = s.regressors * theta;
    bool separated = true;
    for (Eigen::Index r = 0; r < score.size() && separated; ++r)
        separated = (s.outcome[static_cast<std::size_t>(r)] ? score(r) : -score(r)) > 0.0;
    if (separated) throw Separation("the sample is completely separated; the likelihood has no finite maximiser");
    std::vector<double> v(theta.data(), theta.data() + theta.size());
    out.theta = Theta::from_stacked(v, dh);
    out.loglik = terms.loglik;
    out.gradient_norm = terms.gradient.lpNorm<Eigen::Infinity>();
    out.information = -terms.hessian;
    out.converged = out.gradient_norm < opt.gradient_tolerance;
    out.iterations = it;
    return out;
}

}  // namespace dyadnet
