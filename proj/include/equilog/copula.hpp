#pragma once
// Synthetic score regeneration through a Gaussian copula with gamma
// marginals: each score column x is inverted as z = max(x) - x so that z is
// gamma-distributed, gamma parameters come from the method of moments, and
// new rows are drawn by pushing multivariate-normal draws through the
// normal CDF and the gamma quantile function.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <map>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "equilog/dataset.hpp"
#include "equilog/distributions.hpp"
#include "equilog/errors.hpp"
#include "equilog/linalg.hpp"
#include "equilog/rng.hpp"

namespace equilog {

/// Everything needed to regenerate one subgroup's score matrix without the
/// original data: per-variable gamma parameters, the inversion offsets
/// C_i = max(x_i) frozen at estimation time, and the mean/covariance of the
/// inverted variables.
struct CopulaSpec {
    std::string label;
    std::vector<std::string> var_names;
    Vector shape;   // gamma shape per variable
    Vector rate;    // gamma rate per variable
    Vector offset;  // C_i = max of the original column
    Vector mu;      // means of the inverted variables z = C - x
    Matrix sigma;   // covariance of the inverted variables (SPD, repaired if needed)
    std::size_t n_source = 0;
    bool sigma_repaired = false;
};

inline void validate_copula_spec(const CopulaSpec& s) {
    const std::size_t d = s.shape.size();
    if (d == 0) throw ValidationError("copula spec: no variables");
    if (s.rate.size() != d || s.offset.size() != d || s.mu.size() != d ||
        s.sigma.rows() != d || s.sigma.cols() != d ||
        (!s.var_names.empty() && s.var_names.size() != d))
        throw ValidationError("copula spec '" + s.label + "': inconsistent dimensions");
    for (std::size_t j = 0; j < d; ++j)
        if (!(s.shape[j] > 0.0) || !(s.rate[j] > 0.0))
            throw ValidationError("copula spec '" + s.label + "': shapes and rates must be > 0");
}

/// Method-of-moments gamma parameters: shape = mean^2/var, rate = mean/var.
inline std::pair<double, double> gamma_moments_to_params(double mean, double variance) {
    if (!(mean > 0.0) || !(variance > 0.0))
        throw ValidationError("gamma_moments_to_params: mean and variance must be positive");
    return {mean * mean / variance, mean / variance};
}

/// Estimates a CopulaSpec from a raw score matrix (rows = observations).
/// A covariance matrix that fails the SPD check is repaired by flooring its
/// eigenvalues at 1e-10; the repair is recorded on the returned spec.
inline CopulaSpec estimate_copula(const Matrix& scores, const std::string& label,
                                  std::vector<std::string> var_names = {}) {
    const std::size_t n = scores.rows(), d = scores.cols();
    if (n < 2) throw ValidationError("estimate_copula: need at least 2 rows");
    if (d < 1) throw ValidationError("estimate_copula: need at least 1 column");
    if (!scores.all_finite()) throw ValidationError("estimate_copula: non-finite scores");

    CopulaSpec spec;
    spec.label = label;
    spec.n_source = n;
    spec.var_names = std::move(var_names);
    spec.offset.resize(d);
    spec.mu.resize(d);
    spec.shape.resize(d);
    spec.rate.resize(d);

    Matrix z(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        double cmax = scores(0, j);
        for (std::size_t i = 1; i < n; ++i) cmax = std::max(cmax, scores(i, j));
        spec.offset[j] = cmax;
        double mean = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            z(i, j) = cmax - scores(i, j);
            mean += z(i, j);
        }
        spec.mu[j] = mean / static_cast<double>(n);
    }
    spec.sigma = Matrix(d, d);
    for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = j; k < d; ++k) {
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                s += (z(i, j) - spec.mu[j]) * (z(i, k) - spec.mu[k]);
            const double cov = s / static_cast<double>(n - 1);
            spec.sigma(j, k) = cov;
            spec.sigma(k, j) = cov;
        }
        if (spec.sigma(j, j) <= 0.0)
            throw ValidationError("estimate_copula: column " + std::to_string(j + 1) +
                                  " has zero variance");
        const auto [shape, rate] = gamma_moments_to_params(spec.mu[j], spec.sigma(j, j));
        spec.shape[j] = shape;
        spec.rate[j] = rate;
    }

    // A sample covariance can be singular (collinear columns) or carry a
    // rounding-level negative eigenvalue; floor the spectrum at 1e-10 and
    // flag the repair.
    {
        EigenDecomposition eig = symmetric_eigen(spec.sigma);
        if (eig.values.front() < 1e-10) {
            for (double& v : eig.values) v = std::max(v, 1e-10);
            Matrix repaired(d, d);
            for (std::size_t i = 0; i < d; ++i)
                for (std::size_t j = i; j < d; ++j) {
                    double s = 0.0;
                    for (std::size_t k = 0; k < d; ++k)
                        s += eig.vectors(i, k) * eig.values[k] * eig.vectors(j, k);
                    repaired(i, j) = s;
                    repaired(j, i) = s;
                }
            spec.sigma = repaired;
            spec.sigma_repaired = true;
        }
    }
    validate_copula_spec(spec);
    return spec;
}

/// Draws an n-row score matrix from the spec: Y ~ MVN(mu, Sigma), each
/// column standardized by its own mean and sd, mapped through the normal
/// CDF to probabilities, through the gamma quantile to z, and back to the
/// score scale as x = C - z.
inline Matrix regenerate(const CopulaSpec& spec, std::size_t n, RngStream& rng) {
    validate_copula_spec(spec);
    if (n < 1) throw ValidationError("regenerate: n must be >= 1");
    const std::size_t d = spec.shape.size();
    const SpdMatrix sigma(spec.sigma);
    const Matrix y = sample_mvnormal(spec.mu, sigma, n, rng);
    Matrix x(n, d);
    for (std::size_t j = 0; j < d; ++j) {
        const double sd = std::sqrt(spec.sigma(j, j));
        for (std::size_t i = 0; i < n; ++i) {
            double u = normal_cdf((y(i, j) - spec.mu[j]) / sd);
            u = std::min(std::max(u, 1e-16), 1.0 - 1e-16);
            x(i, j) = spec.offset[j] - gamma_quantile(u, spec.shape[j], spec.rate[j]);
        }
    }
    return x;
}

/// One regeneration unit: which spec to draw from, which output group the
/// rows belong to, the response label attached to every row, and how many
/// rows to draw.
struct RegenSubgroup {
    std::string spec_label;
    std::string group;
    int label = 0;
    std::size_t n = 0;
};

struct RegenPlan {
    double train_fraction = 0.75;  // 3:1 split
    std::vector<RegenSubgroup> subgroups;
};

inline void validate_plan(const RegenPlan& plan) {
    if (!(plan.train_fraction > 0.0) || !(plan.train_fraction < 1.0))
        throw ValidationError("regen plan: train_fraction must lie strictly in (0,1)");
    if (plan.subgroups.empty()) throw ValidationError("regen plan: no subgroups");
    for (const auto& sg : plan.subgroups) {
        if (sg.n < 1) throw ValidationError("regen plan: subgroup n must be >= 1");
        if (sg.label != 0 && sg.label != 1)
            throw ValidationError("regen plan: subgroup label must be 0 or 1");
    }
}

struct GroupData {
    std::string group;
    Dataset train;
    Dataset test;
};

/// Regenerates every subgroup, concatenates rows per output group, shuffles
/// and splits by the train fraction. Subgroup i draws from substream 1+i of
/// the given stream and group g shuffles with substream 1+S+g (S = subgroup
/// count), so subgroups may regenerate in parallel without changing output.
inline std::vector<GroupData> build_splits(const RegenPlan& plan,
                                           const std::vector<CopulaSpec>& specs,
                                           const RngStream& rng, unsigned threads = 1) {
    validate_plan(plan);
    std::map<std::string, const CopulaSpec*> by_label;
    for (const auto& s : specs) by_label[s.label] = &s;
    for (const auto& sg : plan.subgroups)
        if (by_label.find(sg.spec_label) == by_label.end())
            throw ValidationError("regen plan: no copula spec labelled '" + sg.spec_label + "'");

    // per-subgroup regeneration, parallelizable because each owns a substream
    std::vector<Matrix> drawn(plan.subgroups.size());
    {
        std::atomic<std::size_t> next{0};
        std::exception_ptr first_error;
        std::mutex error_mutex;
        auto worker = [&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= plan.subgroups.size()) return;
                try {
                    RngStream sub = rng.substream(1 + i);
                    drawn[i] = regenerate(*by_label[plan.subgroups[i].spec_label],
                                          plan.subgroups[i].n, sub);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) first_error = std::current_exception();
                    return;
                }
            }
        };
        if (threads <= 1) {
            worker();
        } else {
            std::vector<std::thread> pool;
            for (unsigned t = 0; t < std::min<unsigned>(threads, 16); ++t)
                pool.emplace_back(worker);
            for (auto& t : pool) t.join();
        }
        if (first_error) std::rethrow_exception(first_error);
    }

    std::vector<std::string> group_order;
    std::map<std::string, std::vector<std::pair<Matrix, int>>> group_rows;
    for (std::size_t i = 0; i < plan.subgroups.size(); ++i) {
        const auto& sg = plan.subgroups[i];
        if (group_rows.find(sg.group) == group_rows.end()) group_order.push_back(sg.group);
        group_rows[sg.group].emplace_back(std::move(drawn[i]), sg.label);
    }

    std::vector<GroupData> out;
    for (std::size_t g = 0; g < group_order.size(); ++g) {
        const std::string& group = group_order[g];
        const auto& pieces = group_rows[group];
        const std::size_t d = pieces.front().first.cols();
        std::size_t total = 0;
        for (const auto& [m, lbl] : pieces) {
            if (m.cols() != d)
                throw ValidationError("regen plan: subgroups of group '" + group +
                                      "' have different variable counts");
            total += m.rows();
        }
        Matrix all(total, d);
        std::vector<int> y(total);
        std::size_t row = 0;
        for (const auto& [m, lbl] : pieces) {
            for (std::size_t i = 0; i < m.rows(); ++i, ++row) {
                for (std::size_t j = 0; j < d; ++j) all(row, j) = m(i, j);
                y[row] = lbl;
            }
        }

        RngStream shuffle_rng = rng.substream(1 + plan.subgroups.size() + g);
        std::vector<std::size_t> order(total);
        std::iota(order.begin(), order.end(), std::size_t{0});
        for (std::size_t i = total; i > 1; --i) {
            const std::size_t j = shuffle_rng.below(i);
            std::swap(order[i - 1], order[j]);
        }

        const std::size_t train_n =
            static_cast<std::size_t>(std::llround(plan.train_fraction * static_cast<double>(total)));
        if (train_n < 1 || train_n >= total)
            throw ValidationError("regen plan: split leaves an empty train or test set for group '" +
                                  group + "'");

        // variable names: all specs feeding a group must agree
        std::vector<std::string> names;
        for (const auto& sg : plan.subgroups)
            if (sg.group == group) {
                const auto& spec = *by_label[sg.spec_label];
                if (names.empty())
                    names = spec.var_names;
                else if (!spec.var_names.empty() && spec.var_names != names)
                    throw ValidationError("regen plan: variable names differ within group '" +
                                          group + "'");
            }

        auto slice = [&](std::size_t lo, std::size_t hi) {
            Matrix cov(hi - lo, d);
            std::vector<int> yy(hi - lo);
            for (std::size_t i = lo; i < hi; ++i) {
                for (std::size_t j = 0; j < d; ++j) cov(i - lo, j) = all(order[i], j);
                yy[i - lo] = y[order[i]];
            }
            return make_dataset(cov, yy, names);
        };
        out.push_back(GroupData{group, slice(0, train_n), slice(train_n, total)});
    }
    return out;
}

}  // namespace equilog
