#pragma once
// The three significance tests used as comparators for the equivalence
// cascade: a deviance (likelihood-ratio) test for a group effect, the
// Hosmer-Lemeshow goodness-of-fit test, and a paired two-sided t-test on
// Brier scores.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "equilog/distributions.hpp"
#include "equilog/equivalence.hpp"
#include "equilog/errors.hpp"
#include "equilog/glm.hpp"

namespace equilog {

enum class SignifMethod { Deviance, HosmerLemeshow, BrierT };
enum class SignifDecision { RejectNull, FailToReject };

struct SignifTestResult {
    SignifMethod method;
    double statistic = 0.0;
    long df = 0;
    double critical_value = 0.0;
    double p_value = 1.0;
    SignifDecision decision = SignifDecision::FailToReject;
    bool degenerate = false;

    bool rejected() const { return decision == SignifDecision::RejectNull; }
};

/// Likelihood-ratio test for a group effect. The reduced model pools both
/// samples under shared coefficients; the full model adds a group indicator
/// and group-specific covariate blocks (equivalent to fitting each group
/// separately), so the degrees of freedom equal the coefficient count p.
/// D = 2 (l_full - l_reduced) >= 0; reject when D exceeds the central
/// chi-square 1-alpha quantile.
inline SignifTestResult deviance_test(const Dataset& a, const Dataset& b, double alpha) {
    validate_dataset(a);
    validate_dataset(b);
    if (a.p() != b.p()) throw DimensionError("deviance_test: covariate count mismatch");
    detail::check_probability(alpha, "deviance_test alpha");
    const std::size_t na = a.n(), nb = b.n(), p = a.p();

    Dataset reduced;
    reduced.X = Matrix(na + nb, p);
    reduced.y.resize(na + nb);
    Dataset full;
    full.X = Matrix(na + nb, 2 * p);
    full.y.resize(na + nb);
    for (std::size_t i = 0; i < na; ++i) {
        for (std::size_t j = 0; j < p; ++j) reduced.X(i, j) = a.X(i, j);
        reduced.y[i] = a.y[i];
        full.X(i, 0) = 1.0;
        full.X(i, 1) = 1.0;  // group indicator
        for (std::size_t j = 1; j < p; ++j) full.X(i, 1 + j) = a.X(i, j);
        full.y[i] = a.y[i];
    }
    for (std::size_t i = 0; i < nb; ++i) {
        for (std::size_t j = 0; j < p; ++j) reduced.X(na + i, j) = b.X(i, j);
        reduced.y[na + i] = b.y[i];
        full.X(na + i, 0) = 1.0;
        for (std::size_t j = 1; j < p; ++j) full.X(na + i, p + j) = b.X(i, j);
        full.y[na + i] = b.y[i];
    }
    reduced.feature_names = a.feature_names;
    full.feature_names.resize(2 * p);
    full.feature_names[0] = "(Intercept)";
    full.feature_names[1] = "group";
    for (std::size_t j = 1; j < p; ++j) {
        full.feature_names[1 + j] = a.feature_names[j] + ":A";
        full.feature_names[p + j] = b.feature_names[j] + ":B";
    }

    const FittedModel fit_reduced = fit_logistic(reduced);
    const FittedModel fit_full = fit_logistic(full);
    double d = 2.0 * (fit_full.log_likelihood - fit_reduced.log_likelihood);
    if (d < 0.0) d = 0.0;  // nested models; negatives are rounding noise

    SignifTestResult r;
    r.method = SignifMethod::Deviance;
    r.statistic = d;
    r.df = static_cast<long>(p);
    r.critical_value = chisq_quantile(1.0 - alpha, static_cast<int>(p));
    r.p_value = 1.0 - chisq_cdf(d, static_cast<int>(p));
    r.decision = d > r.critical_value ? SignifDecision::RejectNull
                                      : SignifDecision::FailToReject;
    return r;
}

/// Hosmer-Lemeshow goodness-of-fit: observations sorted by fitted
/// probability (ties broken by original index) are split into `groups`
/// near-equal groups; H = sum (O_g - E_g)^2 / (n_g pibar_g (1 - pibar_g))
/// is referred to chi-square with groups-2 degrees of freedom.
inline SignifTestResult hosmer_lemeshow(const Vector& pi, const std::vector<int>& y,
                                        int groups = 10, double alpha = 0.05) {
    if (pi.size() != y.size()) throw DimensionError("hosmer_lemeshow: length mismatch");
    if (groups < 3) throw ValidationError("hosmer_lemeshow: need at least 3 groups");
    if (pi.size() < static_cast<std::size_t>(groups))
        throw ValidationError("hosmer_lemeshow: fewer observations than groups");
    detail::check_probability(alpha, "hosmer_lemeshow alpha");
    const std::size_t m = pi.size();

    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
        if (pi[i] != pi[j]) return pi[i] < pi[j];
        return i < j;
    });

    double h = 0.0;
    for (int g = 0; g < groups; ++g) {
        const std::size_t lo = m * static_cast<std::size_t>(g) / static_cast<std::size_t>(groups);
        const std::size_t hi =
            m * static_cast<std::size_t>(g + 1) / static_cast<std::size_t>(groups);
        const double ng = static_cast<double>(hi - lo);
        double observed = 0.0, expected = 0.0;
        for (std::size_t r = lo; r < hi; ++r) {
            observed += y[idx[r]];
            expected += pi[idx[r]];
        }
        const double pibar = expected / ng;
        if (pibar == 0.0 || pibar == 1.0)
            throw NumericError("hosmer_lemeshow: group " + std::to_string(g + 1) +
                               " has mean fitted probability of exactly " +
                               (pibar == 0.0 ? "0" : "1"));
        h += (observed - expected) * (observed - expected) / (ng * pibar * (1.0 - pibar));
    }

    SignifTestResult r;
    r.method = SignifMethod::HosmerLemeshow;
    r.statistic = h;
    r.df = groups - 2;
    r.critical_value = chisq_quantile(1.0 - alpha, groups - 2);
    r.p_value = 1.0 - chisq_cdf(h, groups - 2);
    r.decision = h > r.critical_value ? SignifDecision::RejectNull
                                      : SignifDecision::FailToReject;
    return r;
}

/// Two-sided t-test on the Brier score difference, with the variance taken
/// from the paired per-sample differences to absorb the correlation from
/// scoring both models on the same test set.
inline SignifTestResult brier_t_test(const Vector& pi_a, const Vector& pi_b,
                                     const std::vector<int>& y, double alpha) {
    if (pi_a.size() != pi_b.size() || pi_a.size() != y.size())
        throw DimensionError("brier_t_test: length mismatch");
    if (pi_a.size() < 2) throw ValidationError("brier_t_test: need at least 2 observations");
    detail::check_probability(alpha, "brier_t_test alpha");
    const std::size_t m = pi_a.size();

    Vector d(m);
    for (std::size_t i = 0; i < m; ++i) {
        const double ea = (y[i] - pi_a[i]) * (y[i] - pi_a[i]);
        const double eb = (y[i] - pi_b[i]) * (y[i] - pi_b[i]);
        d[i] = eb - ea;
    }
    const detail::MeanSd ms = detail::mean_sd(d);

    SignifTestResult r;
    r.method = SignifMethod::BrierT;
    r.df = static_cast<long>(m) - 1;
    r.critical_value = student_t_quantile(1.0 - alpha / 2.0, static_cast<int>(m) - 1);
    if (ms.sd == 0.0) {
        if (ms.mean != 0.0)
            throw NumericError("brier_t_test: zero variance of score differences");
        r.degenerate = true;  // identical predictions
        r.statistic = 0.0;
        r.p_value = 1.0;
        r.decision = SignifDecision::FailToReject;
        return r;
    }
    r.statistic = std::sqrt(static_cast<double>(m)) * ms.mean / ms.sd;
    r.p_value = 2.0 * (1.0 - student_t_cdf(std::abs(r.statistic), static_cast<int>(m) - 1));
    r.decision = std::abs(r.statistic) >= r.critical_value ? SignifDecision::RejectNull
                                                           : SignifDecision::FailToReject;
    return r;
}

}  // namespace equilog
