#pragma once
// Logistic regression by Newton/IRLS with step-halving, coefficient
// covariance from the information matrix at the optimum, prediction and
// Brier scoring.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "equilog/dataset.hpp"
#include "equilog/errors.hpp"
#include "equilog/linalg.hpp"

namespace equilog {

inline double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

/// Maximum-likelihood logistic regression result: coefficients and their
/// covariance (XᵀWX)⁻¹ evaluated at the optimum.
struct FittedModel {
    Vector beta;               // log-odds units per unit covariate
    SpdMatrix cov;
    std::size_t n_train = 0;
    bool converged = false;
    double log_likelihood = 0.0;
    std::vector<std::string> feature_names;
};

struct PredictionSet {
    Vector theta;            // linear predictors (log-odds)
    Vector pi;               // predicted probabilities
    std::vector<int> y_hat;  // 1 iff theta > 0
};

/// Bernoulli log-likelihood sum_i [y_i log pi_i + (1-y_i) log(1-pi_i)],
/// evaluated in the overflow-safe log1p form. Always <= 0.
inline double log_likelihood(const Vector& beta, const Dataset& data) {
    if (beta.size() != data.p()) throw DimensionError("log_likelihood: dimension mismatch");
    double ll = 0.0;
    for (std::size_t i = 0; i < data.n(); ++i) {
        double theta = 0.0;
        for (std::size_t j = 0; j < data.p(); ++j) theta += data.X(i, j) * beta[j];
        const double y = data.y[i];
        if (theta >= 0.0)
            ll += (y - 1.0) * theta - std::log1p(std::exp(-theta));
        else
            ll += y * theta - std::log1p(std::exp(theta));
    }
    if (!std::isfinite(ll)) throw NumericError("log_likelihood: non-finite result");
    return ll;
}

namespace detail {

inline void linear_predictor(const Matrix& x, const Vector& beta, Vector& theta) {
    const std::size_t n = x.rows(), p = x.cols();
    theta.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += x(i, j) * beta[j];
        theta[i] = s;
    }
}

inline Matrix weighted_gram(const Matrix& x, const Vector& w) {
    const std::size_t n = x.rows(), p = x.cols();
    Matrix h(p, p);
    for (std::size_t i = 0; i < n; ++i) {
        const double wi = w[i];
        for (std::size_t j = 0; j < p; ++j) {
            const double xw = x(i, j) * wi;
            for (std::size_t k = j; k < p; ++k) h(j, k) += xw * x(i, k);
        }
    }
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = 0; k < j; ++k) h(j, k) = h(k, j);
    return h;
}

}  // namespace detail

/// Fits the logistic model by Newton/IRLS. Convergence is declared when
/// the score sup-norm |Xᵀ(y-π)|∞ drops below `tol`. Hitting the iteration
/// cap leaves converged=false unless the fit shows separation
/// (max |θ̂| > 30 with a non-converged score), which throws, since the
/// asymptotic tests downstream are invalid there.
inline FittedModel fit_logistic(const Dataset& data, double tol = 1e-8, int max_iter = 50) {
    validate_dataset(data);
    const std::size_t n = data.n(), p = data.p();
    {
        const int first = data.y[0];
        bool both = false;
        for (int v : data.y)
            if (v != first) {
                both = true;
                break;
            }
        if (!both) throw ValidationError("fit_logistic: response contains a single class");
    }

    Vector beta(p, 0.0);
    double ll = log_likelihood(beta, data);
    Vector theta(n), pi(n), w(n), score(p);
    bool converged = false;

    auto refresh = [&]() {
        detail::linear_predictor(data.X, beta, theta);
        for (std::size_t i = 0; i < n; ++i) pi[i] = sigmoid(theta[i]);
        std::fill(score.begin(), score.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double r = data.y[i] - pi[i];
            for (std::size_t j = 0; j < p; ++j) score[j] += data.X(i, j) * r;
        }
    };
    auto max_abs = [](const Vector& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };

    for (int iter = 0; iter < max_iter; ++iter) {
        refresh();
        if (max_abs(score) < tol) {
            converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) w[i] = pi[i] * (1.0 - pi[i]);
        Matrix l;
        try {
            l = detail::cholesky_lower(detail::weighted_gram(data.X, w));
        } catch (const NumericError&) {
            if (max_abs(theta) > 30.0)
                throw SeparationError(
                    "fit_logistic: complete or quasi-complete separation detected");
            throw;
        }
        const Vector step = detail::backward_substitute_transposed(
            l, detail::forward_substitute(l, score));

        // Step-halving guards against overshooting far from the optimum.
        // The acceptance tolerance scales with |ll| because the summed
        // likelihood carries rounding noise of that order near convergence.
        const double ll_tol = 1e-10 * std::max(1.0, std::abs(ll));
        double t = 1.0;
        Vector cand(p);
        bool accepted = false;
        while (t >= 1e-10) {
            for (std::size_t j = 0; j < p; ++j) cand[j] = beta[j] + t * step[j];
            const double llc = log_likelihood(cand, data);
            if (llc >= ll - ll_tol) {
                beta = cand;
                ll = llc;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if (!accepted) break;  // cannot improve; convergence re-checked below
    }

    refresh();
    if (!converged) converged = max_abs(score) < tol;
    // Saturated linear predictors mean the likelihood ran to the boundary:
    // under complete separation the score also shrinks below tol, so a
    // "converged" flag alone cannot be trusted past |theta| = 30.
    if (max_abs(theta) > 30.0)
        throw SeparationError("fit_logistic: complete or quasi-complete separation detected");

    for (std::size_t i = 0; i < n; ++i) w[i] = pi[i] * (1.0 - pi[i]);
    Matrix cov_inv;
    try {
        SpdMatrix info(detail::weighted_gram(data.X, w));
        cov_inv = info.inverse();
    } catch (const NumericError&) {
        if (max_abs(theta) > 30.0)
            throw SeparationError(
                "fit_logistic: complete or quasi-complete separation detected");
        throw;
    }
    return FittedModel{beta, SpdMatrix(cov_inv), n, converged, ll, data.feature_names};
}

/// Applies a fitted model to new rows (X must carry the intercept column).
inline PredictionSet predict(const FittedModel& m, const Matrix& x) {
    if (x.cols() != m.beta.size()) throw DimensionError("predict: column count mismatch");
    PredictionSet out;
    detail::linear_predictor(x, m.beta, out.theta);
    out.pi.resize(x.rows());
    out.y_hat.resize(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out.pi[i] = sigmoid(out.theta[i]);
        out.y_hat[i] = out.theta[i] > 0.0 ? 1 : 0;
    }
    return out;
}

struct BrierResult {
    double score = 0.0;
    Vector per_sample_sq_errors;  // kept for variance estimation downstream
};

/// Mean squared error between predicted probabilities and outcomes.
inline BrierResult brier_score(const Vector& pi, const std::vector<int>& y) {
    if (pi.size() != y.size()) throw DimensionError("brier_score: length mismatch");
    if (pi.empty()) throw ValidationError("brier_score: empty input");
    BrierResult r;
    r.per_sample_sq_errors.resize(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        const double e = (y[i] - pi[i]) * (y[i] - pi[i]);
        r.per_sample_sq_errors[i] = e;
        r.score += e;
    }
    r.score /= static_cast<double>(pi.size());
    return r;
}

}  // namespace equilog
