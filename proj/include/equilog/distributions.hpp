#pragma once
// CDFs and quantile functions used by the equivalence and significance
// tests: normal, central and noncentral chi-square, Student t, gamma.
//
// The noncentral chi-square CDF is evaluated as a Poisson-weighted mixture
// of central chi-square CDFs (truncated when the residual Poisson mass
// drops below 1e-12), not by a moment approximation: critical values gate
// accept/reject decisions, so they are computed to CDF accuracy 1e-6 or
// better. All quantiles invert their CDF by bracket expansion plus
// bisection, which converges unconditionally.

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>

#include "equilog/errors.hpp"

namespace equilog {

namespace detail {

inline void check_probability(double p, const char* who) {
    if (!(p > 0.0) || !(p < 1.0))
        throw ValidationError(std::string(who) + ": p must lie strictly in (0,1)");
}

/// Regularized lower incomplete gamma P(a, x).
inline double regularized_gamma_p(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a) || !std::isfinite(x))
        throw ValidationError("regularized_gamma_p: invalid arguments");
    if (x <= 0.0) return 0.0;
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double del = 1.0 / a;
        double sum = del;
        for (int i = 0; i < 100000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16)
                return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        }
        throw NumericError("regularized_gamma_p: series did not converge");
    }
    // continued fraction for Q(a, x), modified Lentz
    const double fpmin = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / fpmin;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 100000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < fpmin) d = fpmin;
        c = b + an / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) {
            const double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
            return 1.0 - q;
        }
    }
    throw NumericError("regularized_gamma_p: continued fraction did not converge");
}

inline double beta_continued_fraction(double a, double b, double x) {
    const double fpmin = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < fpmin) d = fpmin;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 100000; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < fpmin) d = fpmin;
        c = 1.0 + aa / c;
        if (std::abs(c) < fpmin) c = fpmin;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) return h;
    }
    throw NumericError("regularized_beta: continued fraction did not converge");
}

/// Regularized incomplete beta I_x(a, b).
inline double regularized_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(x))
        throw ValidationError("regularized_beta: invalid arguments");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                       a * std::log(x) + b * std::log1p(-x);
    const double bt = std::exp(lbt);
    if (x < (a + 1.0) / (a + b + 2.0)) return bt * beta_continued_fraction(a, b, x) / a;
    return 1.0 - bt * beta_continued_fraction(b, a, 1.0 - x) / b;
}

}  // namespace detail

/// Standard normal CDF.
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline double chisq_cdf(double x, int df) {
    if (df < 1) throw ValidationError("chisq_cdf: df must be >= 1");
    if (x <= 0.0) return 0.0;
    return detail::regularized_gamma_p(0.5 * df, 0.5 * x);
}

/// Noncentral chi-square CDF with `df` degrees of freedom and noncentrality
/// `ncp`, as the Poisson(ncp/2)-weighted series of central chi-square CDFs.
inline double noncentral_chisq_cdf(double x, int df, double ncp) {
    if (df < 1) throw ValidationError("noncentral_chisq_cdf: df must be >= 1");
    if (!(ncp >= 0.0) || !std::isfinite(ncp))
        throw ValidationError("noncentral_chisq_cdf: ncp must be finite and >= 0");
    if (x <= 0.0) return 0.0;
    if (ncp == 0.0) return chisq_cdf(x, df);

    const double a = 0.5 * df;
    const double s = 0.5 * x;
    const double h = 0.5 * ncp;
    // Start below the Poisson bulk; the tail left of mean - 12*sd - 20 is
    // far under the 1e-12 truncation level.
    const long jlo =
        std::max(0L, static_cast<long>(std::floor(h - 12.0 * std::sqrt(h) - 20.0)));
    const double log_h = std::log(h);
    auto log_weight = [&](long j) {
        return (j == 0 ? 0.0 : j * log_h) - h - std::lgamma(static_cast<double>(j) + 1.0);
    };

    double g = detail::regularized_gamma_p(a + static_cast<double>(jlo), s);
    // g steps down the series via P(a,s) - P(a+1,s) = s^a e^-s / Gamma(a+1)
    double t = std::exp((a + static_cast<double>(jlo)) * std::log(s) - s -
                        std::lgamma(a + static_cast<double>(jlo) + 1.0));
    double cdf = 0.0;
    double weight_sum = 0.0;
    long j = jlo;
    while (true) {
        const double w = std::exp(log_weight(j));
        cdf += w * g;
        weight_sum += w;
        // Past the Poisson mode, stop once the residual mass is truncatable:
        // either the accumulated weight certifies it or the terms themselves
        // have decayed beyond it (guards against accumulation rounding).
        if (static_cast<double>(j) > h && (weight_sum >= 1.0 - 1e-12 || w < 1e-16)) break;
        if (j - jlo > 1000000)
            throw NumericError("noncentral_chisq_cdf: series did not converge");
        g -= t;
        if (g < 0.0) g = 0.0;
        t *= s / (a + static_cast<double>(j) + 1.0);
        ++j;
    }
    return std::min(std::max(cdf, 0.0), 1.0);
}

/// Quantile of the noncentral chi-square distribution: the x with
/// CDF(x) = p, found by bracket expansion and bisection.
inline double noncentral_chisq_quantile(double p, int df, double ncp) {
    detail::check_probability(p, "noncentral_chisq_quantile");
    if (df < 1) throw ValidationError("noncentral_chisq_quantile: df must be >= 1");
    if (!(ncp >= 0.0) || !std::isfinite(ncp))
        throw ValidationError("noncentral_chisq_quantile: ncp must be finite and >= 0");
    double lo = 0.0;
    double hi = df + ncp + 10.0 * std::sqrt(2.0 * (df + 2.0 * ncp)) + 10.0;
    int guard = 0;
    while (noncentral_chisq_cdf(hi, df, ncp) < p) {
        hi *= 2.0;
        if (++guard > 200)
            throw NumericError("noncentral_chisq_quantile: bracket expansion failed");
    }
    while (hi - lo > 1e-8 * std::max(1.0, lo)) {
        const double mid = 0.5 * (lo + hi);
        if (noncentral_chisq_cdf(mid, df, ncp) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double chisq_quantile(double p, int df) { return noncentral_chisq_quantile(p, df, 0.0); }

inline double student_t_cdf(double t, int df) {
    if (df < 1) throw ValidationError("student_t_cdf: df must be >= 1");
    if (!std::isfinite(t)) return t > 0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double ib = detail::regularized_beta(0.5 * df, 0.5, x);
    return t >= 0.0 ? 1.0 - 0.5 * ib : 0.5 * ib;
}

/// Inverse Student t CDF via the incomplete beta representation.
inline double student_t_quantile(double p, int df) {
    detail::check_probability(p, "student_t_quantile");
    if (df < 1) throw ValidationError("student_t_quantile: df must be >= 1");
    if (p == 0.5) return 0.0;
    if (p < 0.5) return -student_t_quantile(1.0 - p, df);
    double lo = 0.0, hi = 1.0;
    int guard = 0;
    while (student_t_cdf(hi, df) < p) {
        hi *= 2.0;
        if (++guard > 2000) throw NumericError("student_t_quantile: bracket expansion failed");
    }
    while (hi - lo > 1e-10 * std::max(1.0, std::abs(hi)) ) {
        const double mid = 0.5 * (lo + hi);
        if (student_t_cdf(mid, df) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

inline double gamma_cdf(double x, double shape, double rate) {
    if (!(shape > 0.0) || !(rate > 0.0))
        throw ValidationError("gamma_cdf: shape and rate must be positive");
    if (x <= 0.0) return 0.0;
    return detail::regularized_gamma_p(shape, rate * x);
}

/// Inverse CDF of Gamma(shape, rate) to relative accuracy 1e-8.
inline double gamma_quantile(double p, double shape, double rate) {
    detail::check_probability(p, "gamma_quantile");
    if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
        throw ValidationError("gamma_quantile: shape and rate must be positive");
    const double mean = shape / rate;
    const double sd = std::sqrt(shape) / rate;
    double lo = 0.0;
    double hi = mean + 10.0 * sd + 10.0 / rate;
    int guard = 0;
    while (gamma_cdf(hi, shape, rate) < p) {
        hi *= 2.0;
        if (++guard > 2000) throw NumericError("gamma_quantile: bracket expansion failed");
    }
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_cdf(mid, shape, rate) < p)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace equilog
