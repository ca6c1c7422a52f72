#pragma once
// The three cascading equivalence tests for a pair of logistic models —
// descriptive (coefficient vectors), individual predictive (log-odds on a
// shared test set) and performance (Brier-score ratio) — together with the
// sensitivity-level-to-threshold conversions, the cascade threshold
// converters, and the two-sample normal-means equivalence test.
//
// Equivalence tests invert the usual hypothesis roles: H0 asserts a
// difference of at least epsilon, and *rejecting* H0 establishes
// equivalence.

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "equilog/distributions.hpp"
#include "equilog/errors.hpp"
#include "equilog/glm.hpp"
#include "equilog/linalg.hpp"

namespace equilog {

enum class EquivMethod { DE, IPE, PELower, PEUpper, PECombined, NormalMeans };
enum class EquivDecision { Equivalent, NotEstablished };

/// Which critical value the performance-equivalence TOST uses:
/// PerEq4 takes t_{1-alpha,m-1} per one-sided component; TableHalved takes
/// t_{1-alpha/2,m-1}, matching how published per-component tables are often
/// computed.
enum class PeAlphaConvention { PerEq4, TableHalved };

struct EquivTestResult {
    EquivMethod method;
    double statistic = 0.0;
    double critical_value = 0.0;
    double p_value = 1.0;
    double epsilon = 0.0;  // the threshold actually used (eps_beta^2 for DE)
    double alpha = 0.05;
    EquivDecision decision = EquivDecision::NotEstablished;
    bool degenerate = false;

    bool equivalent() const { return decision == EquivDecision::Equivalent; }
};

/// User-facing sensitivity levels, converted to test thresholds by
/// de_threshold / ipe_threshold / pe_threshold.
struct SensitivityLevels {
    Vector delta_beta;         // per-coefficient allowed difference (log-odds units)
    double delta_theta = 0.075;  // quantile level of |theta| setting eps_theta
    double delta_b = 1.1;        // allowed absolute-error inflation factor
};

inline void validate_levels(const SensitivityLevels& s) {
    if (s.delta_beta.empty())
        throw ValidationError("sensitivity levels: delta_beta must not be empty");
    bool any_positive = false;
    for (double d : s.delta_beta) {
        if (!(d >= 0.0) || !std::isfinite(d))
            throw ValidationError("sensitivity levels: delta_beta entries must be >= 0");
        any_positive = any_positive || d > 0.0;
    }
    if (!any_positive)
        throw ValidationError("sensitivity levels: delta_beta must not be all zero");
    if (!(s.delta_theta > 0.0) || !(s.delta_theta < 1.0))
        throw ValidationError("sensitivity levels: delta_theta must lie in (0,1)");
    if (!(s.delta_b > 1.0))
        throw ValidationError("sensitivity levels: delta_b must be > 1");
}

/// The vector of absolute log-odds differences xi_i = |thetaA_i - thetaB_i|
/// with its mean and (m-1)-denominator standard deviation. This empirical
/// sample is the only representation of the conditional distribution of xi.
struct LogOddsDiffSample {
    Vector xi;
    double mean = 0.0;
    double sd = 0.0;
};

inline LogOddsDiffSample log_odds_diff_sample(const Vector& theta_a, const Vector& theta_b) {
    if (theta_a.size() != theta_b.size())
        throw DimensionError("log_odds_diff_sample: length mismatch");
    if (theta_a.size() < 2)
        throw ValidationError("log_odds_diff_sample: need at least 2 observations");
    LogOddsDiffSample s;
    s.xi.resize(theta_a.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < theta_a.size(); ++i) {
        s.xi[i] = std::abs(theta_a[i] - theta_b[i]);
        sum += s.xi[i];
    }
    const double m = static_cast<double>(s.xi.size());
    s.mean = sum / m;
    double ss = 0.0;
    for (double x : s.xi) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / (m - 1.0));
    return s;
}

// ---------------------------------------------------------------------------
// Descriptive equivalence (coefficient vectors)
// ---------------------------------------------------------------------------

/// eps_beta^2: the squared Mahalanobis S_q size of the allowed
/// per-coefficient difference vector.
inline double de_threshold(const Vector& delta_beta, const SpdMatrix& s_q) {
    return mahalanobis_sq(delta_beta, s_q);
}

/// S_q = V_A + V_B, the covariance of the coefficient difference.
inline SpdMatrix coefficient_diff_cov(const FittedModel& a, const FittedModel& b) {
    if (a.beta.size() != b.beta.size())
        throw DimensionError("coefficient_diff_cov: coefficient count mismatch");
    return SpdMatrix(a.cov.matrix() + b.cov.matrix());
}

/// Wald-type equivalence test on q = betaA - betaB:
/// reject H0 (declare equivalence) iff W = ||q||^2_{S_q} falls below the
/// alpha-quantile of the noncentral chi-square with df = p and
/// noncentrality eps_beta^2. The p-value is the noncentral CDF at W.
inline EquivTestResult descriptive_equivalence(const FittedModel& a, const FittedModel& b,
                                               double epsilon_beta_sq, double alpha) {
    if (a.beta.size() != b.beta.size() || a.feature_names != b.feature_names)
        throw ValidationError("descriptive_equivalence: models have different features");
    if (!a.converged || !b.converged)
        throw ValidationError("descriptive_equivalence: model did not converge");
    if (!(epsilon_beta_sq > 0.0) || !std::isfinite(epsilon_beta_sq))
        throw ValidationError("descriptive_equivalence: epsilon_beta^2 must be positive");
    detail::check_probability(alpha, "descriptive_equivalence alpha");

    const std::size_t p = a.beta.size();
    Vector q(p);
    for (std::size_t j = 0; j < p; ++j) q[j] = a.beta[j] - b.beta[j];
    const SpdMatrix s_q = coefficient_diff_cov(a, b);
    const double w = mahalanobis_sq(q, s_q);
    const double crit = noncentral_chisq_quantile(alpha, static_cast<int>(p), epsilon_beta_sq);

    EquivTestResult r;
    r.method = EquivMethod::DE;
    r.statistic = w;
    r.critical_value = crit;
    r.p_value = noncentral_chisq_cdf(w, static_cast<int>(p), epsilon_beta_sq);
    r.epsilon = epsilon_beta_sq;
    r.alpha = alpha;
    r.decision = w < crit ? EquivDecision::Equivalent : EquivDecision::NotEstablished;
    return r;
}

inline EquivTestResult descriptive_equivalence(const FittedModel& a, const FittedModel& b,
                                               const SensitivityLevels& levels, double alpha) {
    validate_levels(levels);
    if (levels.delta_beta.size() != a.beta.size())
        throw DimensionError("descriptive_equivalence: delta_beta length must equal p");
    const SpdMatrix s_q = coefficient_diff_cov(a, b);
    return descriptive_equivalence(a, b, de_threshold(levels.delta_beta, s_q), alpha);
}

// ---------------------------------------------------------------------------
// Individual predictive equivalence (log-odds vectors)
// ---------------------------------------------------------------------------

/// eps_theta: the ceil(delta_theta * m)-th ascending order statistic of
/// |theta| — the smallest log-odds change that could flip a classification,
/// at the chosen quantile of the gold-standard predictions.
inline double ipe_threshold(const Vector& gold_theta, double delta_theta) {
    if (gold_theta.empty()) throw ValidationError("ipe_threshold: empty predictions");
    if (!(delta_theta > 0.0) || !(delta_theta < 1.0))
        throw ValidationError("ipe_threshold: delta_theta must lie in (0,1)");
    const std::size_t m = gold_theta.size();
    std::size_t rank = static_cast<std::size_t>(
        std::ceil(delta_theta * static_cast<double>(m)));
    rank = std::min(std::max<std::size_t>(rank, 1), m);
    Vector abs_theta(m);
    for (std::size_t i = 0; i < m; ++i) abs_theta[i] = std::abs(gold_theta[i]);
    std::nth_element(abs_theta.begin(),
                     abs_theta.begin() + static_cast<std::ptrdiff_t>(rank - 1),
                     abs_theta.end());
    return abs_theta[rank - 1];
}

struct IpeResult {
    EquivTestResult result;
    LogOddsDiffSample sample;
};

/// One-sided t equivalence test on the mean absolute log-odds difference:
/// reject H0 (declare equivalence) iff
/// sqrt(m) (xi_bar - eps_theta) / sd(xi) < t_{alpha, m-1}.
/// An all-equal xi sample (zero variance) short-circuits to the limit
/// decision xi_bar < eps_theta, flagged degenerate.
inline IpeResult individual_predictive_equivalence(const Vector& theta_a,
                                                   const Vector& theta_b,
                                                   double epsilon_theta, double alpha) {
    if (!(epsilon_theta > 0.0) || !std::isfinite(epsilon_theta))
        throw ValidationError("individual_predictive_equivalence: epsilon_theta must be > 0");
    detail::check_probability(alpha, "individual_predictive_equivalence alpha");
    IpeResult out;
    out.sample = log_odds_diff_sample(theta_a, theta_b);
    const double m = static_cast<double>(out.sample.xi.size());

    EquivTestResult& r = out.result;
    r.method = EquivMethod::IPE;
    r.epsilon = epsilon_theta;
    r.alpha = alpha;
    r.critical_value =
        student_t_quantile(alpha, static_cast<int>(out.sample.xi.size()) - 1);
    if (out.sample.sd == 0.0) {
        const bool eq = out.sample.mean < epsilon_theta;
        r.degenerate = true;
        r.statistic = eq ? -std::numeric_limits<double>::infinity()
                         : std::numeric_limits<double>::infinity();
        r.p_value = eq ? 0.0 : 1.0;
        r.decision = eq ? EquivDecision::Equivalent : EquivDecision::NotEstablished;
        return out;
    }
    r.statistic = std::sqrt(m) * (out.sample.mean - epsilon_theta) / out.sample.sd;
    r.p_value = student_t_cdf(r.statistic, static_cast<int>(out.sample.xi.size()) - 1);
    r.decision = r.statistic < r.critical_value ? EquivDecision::Equivalent
                                                : EquivDecision::NotEstablished;
    return out;
}

// ---------------------------------------------------------------------------
// Performance equivalence (Brier scores)
// ---------------------------------------------------------------------------

/// eps_B = delta_B^2: the Brier-ratio bound implied by tolerating a
/// delta_B-fold inflation of per-sample absolute errors.
inline double pe_threshold(double delta_b) {
    if (!(delta_b > 1.0)) throw ValidationError("pe_threshold: delta_b must be > 1");
    return delta_b * delta_b;
}

struct PeResult {
    EquivTestResult lower;     // tests BS_B/BS_A > 1/eps_B
    EquivTestResult upper;     // tests BS_B/BS_A < eps_B
    EquivTestResult combined;  // equivalent iff both parts reject
};

namespace detail {

struct MeanSd {
    double mean = 0.0, sd = 0.0;
};

inline MeanSd mean_sd(const Vector& v) {
    MeanSd r;
    const double m = static_cast<double>(v.size());
    for (double x : v) r.mean += x;
    r.mean /= m;
    double ss = 0.0;
    for (double x : v) ss += (x - r.mean) * (x - r.mean);
    r.sd = std::sqrt(ss / (m - 1.0));
    return r;
}

}  // namespace detail

/// Two one-sided tests on the Brier-score ratio BS_B/BS_A against the
/// bounds (1/eps_B, eps_B). Each side uses the per-sample contrast
/// d_B - c*d_A with its own sample variance, which absorbs the correlation
/// from scoring both models on the same test set. Equivalence requires
/// t_L > +t_crit and t_U < -t_crit; the combined p-value is the larger of
/// the two one-sided p-values.
inline PeResult performance_equivalence(const Vector& pi_a, const Vector& pi_b,
                                        const std::vector<int>& y, double epsilon_b,
                                        double alpha,
                                        PeAlphaConvention convention = PeAlphaConvention::PerEq4) {
    if (pi_a.size() != pi_b.size() || pi_a.size() != y.size())
        throw DimensionError("performance_equivalence: length mismatch");
    if (pi_a.size() < 2)
        throw ValidationError("performance_equivalence: need at least 2 observations");
    if (!(epsilon_b > 1.0) || !std::isfinite(epsilon_b))
        throw ValidationError("performance_equivalence: epsilon_B must be > 1");
    detail::check_probability(alpha, "performance_equivalence alpha");

    const std::size_t m = pi_a.size();
    const BrierResult bs_a = brier_score(pi_a, y);
    const BrierResult bs_b = brier_score(pi_b, y);
    if (bs_a.score == 0.0)
        throw NumericError("performance_equivalence: Brier score of model A is zero, ratio undefined");
    if (bs_b.score == 0.0)
        throw NumericError("performance_equivalence: Brier score of model B is zero, ratio undefined");

    const double q = convention == PeAlphaConvention::PerEq4 ? 1.0 - alpha : 1.0 - alpha / 2.0;
    const double t_crit = student_t_quantile(q, static_cast<int>(m) - 1);
    const double sqrt_m = std::sqrt(static_cast<double>(m));

    auto one_side = [&](double bound, bool reject_above, EquivMethod method) {
        Vector contrast(m);
        for (std::size_t i = 0; i < m; ++i)
            contrast[i] = bs_b.per_sample_sq_errors[i] - bound * bs_a.per_sample_sq_errors[i];
        const detail::MeanSd ms = detail::mean_sd(contrast);
        EquivTestResult r;
        r.method = method;
        r.epsilon = epsilon_b;
        r.alpha = alpha;
        r.critical_value = reject_above ? t_crit : -t_crit;
        if (ms.sd == 0.0) {
            const bool eq = reject_above ? ms.mean > 0.0 : ms.mean < 0.0;
            r.degenerate = true;
            r.statistic = (reject_above == eq) ? std::numeric_limits<double>::infinity()
                                               : -std::numeric_limits<double>::infinity();
            r.p_value = eq ? 0.0 : 1.0;
            r.decision = eq ? EquivDecision::Equivalent : EquivDecision::NotEstablished;
            return r;
        }
        r.statistic = sqrt_m * ms.mean / ms.sd;
        const double cdf = student_t_cdf(r.statistic, static_cast<int>(m) - 1);
        r.p_value = reject_above ? 1.0 - cdf : cdf;
        const bool eq = reject_above ? r.statistic > r.critical_value
                                     : r.statistic < r.critical_value;
        r.decision = eq ? EquivDecision::Equivalent : EquivDecision::NotEstablished;
        return r;
    };

    PeResult out;
    out.lower = one_side(1.0 / epsilon_b, true, EquivMethod::PELower);
    out.upper = one_side(epsilon_b, false, EquivMethod::PEUpper);

    const bool both = out.lower.equivalent() && out.upper.equivalent();
    const EquivTestResult& binding =
        out.lower.p_value >= out.upper.p_value ? out.lower : out.upper;
    out.combined = binding;
    out.combined.method = EquivMethod::PECombined;
    out.combined.p_value = std::max(out.lower.p_value, out.upper.p_value);
    out.combined.degenerate = out.lower.degenerate || out.upper.degenerate;
    out.combined.decision = both ? EquivDecision::Equivalent : EquivDecision::NotEstablished;
    return out;
}

// ---------------------------------------------------------------------------
// Cascade threshold converters
// ---------------------------------------------------------------------------

/// IPE threshold implied by descriptive equivalence at eps_beta:
/// eps_theta = eps_beta * sqrt(lambda_1(S_q)) * sqrt(mu_X'mu_X + tr(Sigma_X)),
/// where mu_X / Sigma_X are the moments of the test covariate vector (in
/// the same coordinates as the coefficients, so the intercept coordinate
/// contributes mean 1 and zero variance).
inline double cascade_ipe_bound(double epsilon_beta, const SpdMatrix& s_q, const Vector& mu_x,
                                const Matrix& sigma_x) {
    if (!(epsilon_beta >= 0.0) || !std::isfinite(epsilon_beta))
        throw ValidationError("cascade_ipe_bound: epsilon_beta must be >= 0");
    if (sigma_x.rows() != sigma_x.cols() || sigma_x.rows() != mu_x.size())
        throw DimensionError("cascade_ipe_bound: moment dimensions do not match");
    if (mu_x.size() != s_q.dim())
        throw DimensionError("cascade_ipe_bound: moments must match coefficient dimension");
    double trace = 0.0;
    for (std::size_t i = 0; i < sigma_x.rows(); ++i) trace += sigma_x(i, i);
    if (trace < 0.0) throw ValidationError("cascade_ipe_bound: negative trace");
    return epsilon_beta * std::sqrt(max_eigenvalue(s_q)) *
           std::sqrt(dot(mu_x, mu_x) + trace);
}

/// PE threshold implied by individual predictive equivalence at eps_theta:
/// eps_B = exp(2 eps_theta).
inline double cascade_pe_bound(double epsilon_theta) {
    if (!(epsilon_theta > 0.0) || !std::isfinite(epsilon_theta))
        throw ValidationError("cascade_pe_bound: epsilon_theta must be > 0");
    return std::exp(2.0 * epsilon_theta);
}

// ---------------------------------------------------------------------------
// Two-sample normal-means equivalence (the textbook reference test)
// ---------------------------------------------------------------------------

/// Unit-variance two-sample equivalence test on a difference of means:
/// equivalent iff |xbar_diff| < sqrt(chi2_{1,alpha}(n eps^2 / 2)) / sqrt(n/2).
inline EquivTestResult normal_means_equivalence(double xbar_diff, std::size_t n,
                                                double epsilon, double alpha) {
    if (n < 2) throw ValidationError("normal_means_equivalence: n must be >= 2");
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
        throw ValidationError("normal_means_equivalence: epsilon must be > 0");
    detail::check_probability(alpha, "normal_means_equivalence alpha");
    const double half_n = 0.5 * static_cast<double>(n);
    const double ncp = half_n * epsilon * epsilon;
    const double radius = std::sqrt(noncentral_chisq_quantile(alpha, 1, ncp)) / std::sqrt(half_n);

    EquivTestResult r;
    r.method = EquivMethod::NormalMeans;
    r.statistic = xbar_diff;
    r.critical_value = radius;
    r.p_value = noncentral_chisq_cdf(half_n * xbar_diff * xbar_diff, 1, ncp);
    r.epsilon = epsilon;
    r.alpha = alpha;
    r.decision = std::abs(xbar_diff) < radius ? EquivDecision::Equivalent
                                              : EquivDecision::NotEstablished;
    return r;
}

}  // namespace equilog
