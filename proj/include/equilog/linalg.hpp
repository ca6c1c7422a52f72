#pragma once
// Small dense matrices and symmetric positive definite solves. Everything
// here operates on coefficient-sized problems (p rarely above 20), so plain
// O(p^3) algorithms are used throughout.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <utility>
#include <vector>

#include "equilog/errors.hpp"

namespace equilog {

using Vector = std::vector<double>;

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(const Vector& v) { return std::sqrt(dot(v, v)); }

/// Row-major dense matrix.
class Matrix {
 public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<double>& data() const { return data_; }

    Vector row(std::size_t i) const {
        return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                      data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    }

    Vector operator*(const Vector& v) const {
        if (cols_ != v.size()) throw DimensionError("matvec: size mismatch");
        Vector out(rows_, 0.0);
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += (*this)(i, j) * v[j];
            out[i] = s;
        }
        return out;
    }

    Matrix& operator+=(const Matrix& o) {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError("matrix add: shape mismatch");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    friend Matrix operator+(Matrix a, const Matrix& b) {
        a += b;
        return a;
    }

    bool all_finite() const {
        return std::all_of(data_.begin(), data_.end(),
                           [](double x) { return std::isfinite(x); });
    }

 private:
    std::size_t rows_ = 0, cols_ = 0;
    std::vector<double> data_;
};

namespace detail {

inline Matrix cholesky_lower(const Matrix& a) {
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (!(d > 0.0) || !std::isfinite(d))
            throw NumericError("cholesky: matrix is not positive definite");
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

inline Vector forward_substitute(const Matrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

inline Vector backward_substitute_transposed(const Matrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

}  // namespace detail

struct EigenDecomposition {
    Vector values;   // ascending
    Matrix vectors;  // columns are the matching eigenvectors
};

/// Eigendecomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Accurate to machine precision for the small dimensions used here.
inline EigenDecomposition symmetric_eigen(Matrix a, int max_sweeps = 100) {
    if (a.rows() != a.cols() || a.rows() == 0)
        throw DimensionError("symmetric_eigen: matrix must be square and non-empty");
    const std::size_t n = a.rows();
    Matrix v = Matrix::identity(n);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) norm2 += a(i, j) * a(i, j);

    bool done = (n == 1);
    for (int sweep = 0; sweep < max_sweeps && !done; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off <= norm2 * 1e-30 + 1e-300) {
            done = true;
            break;
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t =
                    (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!done) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off > norm2 * 1e-20 + 1e-300)
            throw NumericError("symmetric_eigen: Jacobi sweeps did not converge");
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });
    EigenDecomposition out;
    out.values.resize(n);
    out.vectors = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        out.values[j] = a(order[j], order[j]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, j) = v(i, order[j]);
    }
    return out;
}

/// Symmetric positive definite matrix with a cached Cholesky factor.
///
/// Construction symmetrizes the input as (S + S^T)/2 so that covariance
/// matrices assembled from floating-point sums are accepted; asymmetry
/// beyond 1e-10 relative to the largest entry is an error. Positive
/// definiteness is established by the Cholesky factorization itself.
class SpdMatrix {
 public:
    explicit SpdMatrix(Matrix m) : m_(std::move(m)) {
        if (m_.rows() != m_.cols() || m_.rows() == 0)
            throw DimensionError("SpdMatrix: matrix must be square and non-empty");
        if (!m_.all_finite()) throw ValidationError("SpdMatrix: non-finite entries");
        const std::size_t n = m_.rows();
        double amax = 0.0, asym = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) amax = std::max(amax, std::abs(m_(i, j)));
            for (std::size_t j = i + 1; j < n; ++j)
                asym = std::max(asym, std::abs(m_(i, j) - m_(j, i)));
        }
        if (asym > 1e-10 * std::max(amax, 1e-300))
            throw ValidationError("SpdMatrix: matrix is not symmetric");
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double avg = 0.5 * (m_(i, j) + m_(j, i));
                m_(i, j) = avg;
                m_(j, i) = avg;
            }
        }
        chol_ = detail::cholesky_lower(m_);
    }

    std::size_t dim() const { return m_.rows(); }
    const Matrix& matrix() const { return m_; }
    const Matrix& chol_lower() const { return chol_; }

    /// Solves S x = rhs via the cached factor.
    Vector solve(const Vector& rhs) const {
        if (rhs.size() != dim()) throw DimensionError("SpdMatrix::solve: size mismatch");
        return detail::backward_substitute_transposed(chol_,
                                                      detail::forward_substitute(chol_, rhs));
    }

    /// v^T S^{-1} v = ||L^{-1} v||^2, via one forward substitution.
    double inverse_quadratic_form(const Vector& v) const {
        if (v.size() != dim())
            throw DimensionError("SpdMatrix::inverse_quadratic_form: size mismatch");
        const Vector w = detail::forward_substitute(chol_, v);
        return dot(w, w);
    }

    Matrix inverse() const {
        const std::size_t n = dim();
        Matrix inv(n, n);
        Vector e(n, 0.0);
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = 1.0;
            const Vector col = solve(e);
            for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
            e[j] = 0.0;
        }
        // exact symmetry for downstream SpdMatrix construction
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double avg = 0.5 * (inv(i, j) + inv(j, i));
                inv(i, j) = avg;
                inv(j, i) = avg;
            }
        return inv;
    }

 private:
    Matrix m_, chol_;
};

/// Squared Mahalanobis norm v^T S^{-1} v, computed through the Cholesky
/// factor rather than an explicit inverse.
inline double mahalanobis_sq(const Vector& v, const SpdMatrix& s) {
    if (v.size() != s.dim()) throw DimensionError("mahalanobis_sq: dimension mismatch");
    return s.inverse_quadratic_form(v);
}

/// Largest eigenvalue of an SPD matrix.
inline double max_eigenvalue(const SpdMatrix& s) {
    return symmetric_eigen(s.matrix()).values.back();
}

}  // namespace equilog
