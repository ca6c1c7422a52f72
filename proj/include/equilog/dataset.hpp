#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "equilog/errors.hpp"
#include "equilog/linalg.hpp"

namespace equilog {

/// Design matrix plus binary response. The first column of X is the
/// intercept (all ones); feature_names[0] is "(Intercept)".
struct Dataset {
    Matrix X;
    std::vector<int> y;
    std::vector<std::string> feature_names;

    std::size_t n() const { return X.rows(); }
    std::size_t p() const { return X.cols(); }
};

inline void validate_dataset(const Dataset& d) {
    if (d.X.rows() == 0 || d.X.cols() == 0)
        throw ValidationError("dataset: empty design matrix");
    if (d.y.size() != d.X.rows())
        throw ValidationError("dataset: response length does not match row count");
    if (d.X.rows() < d.X.cols())
        throw ValidationError("dataset: fewer rows than columns");
    if (!d.feature_names.empty() && d.feature_names.size() != d.X.cols())
        throw ValidationError("dataset: feature name count does not match column count");
    if (!d.X.all_finite()) throw ValidationError("dataset: non-finite design entries");
    for (std::size_t i = 0; i < d.X.rows(); ++i)
        if (d.X(i, 0) != 1.0)
            throw ValidationError("dataset: intercept column must be constant 1");
    for (int v : d.y)
        if (v != 0 && v != 1) throw ValidationError("dataset: response must be binary 0/1");
}

/// Builds a Dataset from a covariate matrix (no intercept column) by
/// prepending the intercept.
inline Dataset make_dataset(const Matrix& covariates, const std::vector<int>& y,
                            std::vector<std::string> names = {}) {
    const std::size_t n = covariates.rows(), q = covariates.cols();
    Dataset d;
    d.X = Matrix(n, q + 1);
    for (std::size_t i = 0; i < n; ++i) {
        d.X(i, 0) = 1.0;
        for (std::size_t j = 0; j < q; ++j) d.X(i, j + 1) = covariates(i, j);
    }
    d.y = y;
    d.feature_names.reserve(q + 1);
    d.feature_names.push_back("(Intercept)");
    for (std::size_t j = 0; j < q; ++j)
        d.feature_names.push_back(j < names.size() ? names[j] : "x" + std::to_string(j + 1));
    validate_dataset(d);
    return d;
}

}  // namespace equilog
