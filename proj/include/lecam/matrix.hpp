#pragma once

// Small dense linear algebra: row-major matrices, Cholesky, a cyclic Jacobi
// eigensolver, Householder QR and a one-sided Jacobi SVD. Everything targets
// desk-scale dimensions (k <= 32) and uses plain loops with a fixed operation
// order, so results are reproducible bit for bit.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lecam {

using Vector = std::vector<double>;

// ============================================================================
// VECTOR HELPERS
// ============================================================================

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: size mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

inline Vector add(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("add: size mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline Vector sub(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("sub: size mismatch");
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline Vector scaled(const Vector& a, double c) {
    Vector r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = c * a[i];
    return r;
}

// ============================================================================
// MATRIX
// ============================================================================

class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    // Row-major initializer, e.g. Matrix::from_rows({{2, 1}, {1, 2}}).
    static Matrix from_rows(const std::vector<std::vector<double>>& rows) {
        if (rows.empty()) return {};
        Matrix m(rows.size(), rows[0].size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != m.cols_) throw std::invalid_argument("from_rows: ragged rows");
            for (std::size_t j = 0; j < m.cols_; ++j) m(i, j) = rows[i][j];
        }
        return m;
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Vector row(std::size_t r) const {
        Vector v(cols_);
        for (std::size_t j = 0; j < cols_; ++j) v[j] = (*this)(r, j);
        return v;
    }

    void set_row(std::size_t r, const Vector& v) {
        if (v.size() != cols_) throw std::invalid_argument("set_row: size mismatch");
        for (std::size_t j = 0; j < cols_; ++j) (*this)(r, j) = v[j];
    }

private:
    std::size_t rows_ = 0, cols_ = 0;
    Vector data_;
};

inline Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("matmul: shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

inline Vector operator*(const Matrix& a, const Vector& x) {
    if (a.cols() != x.size()) throw std::invalid_argument("matvec: shape mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix subtract: shape mismatch");
    Matrix c(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
    return c;
}

inline double frobenius_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
    return std::sqrt(s);
}

inline double max_abs(const Matrix& a) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) m = std::max(m, std::abs(a(i, j)));
    return m;
}

inline double trace(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("trace: matrix not square");
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) s += a(i, i);
    return s;
}

// ============================================================================
// FACTORIZATIONS
// ============================================================================

// Lower Cholesky factor of a symmetric positive definite matrix.
// Throws std::domain_error when a pivot is not strictly positive.
inline Matrix cholesky(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("cholesky: matrix not square");
    const std::size_t n = a.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = a(j, j);
        for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0)) {
            throw std::domain_error(
                "cholesky: matrix is not positive definite (pivot " + std::to_string(j) +
                " = " + std::to_string(diag) + ")");
        }
        l(j, j) = std::sqrt(diag);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

// Solves (L L^T) x = b given the lower factor L.
inline Vector cholesky_solve(const Matrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    if (b.size() != n) throw std::invalid_argument("cholesky_solve: size mismatch");
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
        y[i] = s / l(i, i);
    }
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = y[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

inline double cholesky_log_det(const Matrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

struct SymmetricEigen {
    Vector values;   // ascending
    Matrix vectors;  // column j pairs with values[j]
};

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Quadratic
// convergence; the off-diagonal mass drops below 1e-14 of the Frobenius norm
// within a handful of sweeps at these sizes.
inline SymmetricEigen symmetric_eigen(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("symmetric_eigen: matrix not square");
    const std::size_t n = m.rows();
    Matrix a = m;
    Matrix v = Matrix::identity(n);
    const double scale = frobenius_norm(m);
    const double tol = scale > 0.0 ? 1e-15 * scale : 0.0;

    for (int sweep = 0; sweep < 128; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
        if (std::sqrt(2.0 * off) <= tol) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= tol / (2.0 * n)) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double aip = a(i, p), aiq = a(i, q);
                    a(i, p) = c * aip - s * aiq;
                    a(i, q) = s * aip + c * aiq;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    const double apj = a(p, j), aqj = a(q, j);
                    a(p, j) = c * apj - s * aqj;
                    a(q, j) = s * apj + c * aqj;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
    }

    SymmetricEigen e;
    e.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) e.values[i] = a(i, i);
    e.vectors = Matrix(n, n);
    // Selection sort for a deterministic ascending order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (e.values[order[j]] < e.values[order[i]]) std::swap(order[i], order[j]);
    Vector sorted(n);
    for (std::size_t i = 0; i < n; ++i) {
        sorted[i] = e.values[order[i]];
        for (std::size_t r = 0; r < n; ++r) e.vectors(r, i) = v(r, order[i]);
    }
    e.values = std::move(sorted);
    return e;
}

// Explicit Q of the Householder QR of a square matrix, with each column
// flipped so the matching R diagonal entry is nonnegative. With Gaussian
// input this yields a Haar-distributed orthogonal matrix.
inline Matrix qr_orthogonal_factor(const Matrix& a) {
    if (a.rows() != a.cols()) throw std::invalid_argument("qr: matrix not square");
    const std::size_t n = a.rows();
    Matrix r = a;
    Matrix q = Matrix::identity(n);

    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = j; i < n; ++i) norm += r(i, j) * r(i, j);
        norm = std::sqrt(norm);
        if (norm == 0.0) continue;
        const double alpha = r(j, j) >= 0.0 ? -norm : norm;
        Vector v(n, 0.0);
        v[j] = r(j, j) - alpha;
        for (std::size_t i = j + 1; i < n; ++i) v[i] = r(i, j);
        double vtv = 0.0;
        for (std::size_t i = j; i < n; ++i) vtv += v[i] * v[i];
        if (vtv == 0.0) continue;
        // r <- (I - 2 v v^T / v^T v) r ; q <- q (I - 2 v v^T / v^T v)
        for (std::size_t col = j; col < n; ++col) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += v[i] * r(i, col);
            const double f = 2.0 * s / vtv;
            for (std::size_t i = j; i < n; ++i) r(i, col) -= f * v[i];
        }
        for (std::size_t row = 0; row < n; ++row) {
            double s = 0.0;
            for (std::size_t i = j; i < n; ++i) s += q(row, i) * v[i];
            const double f = 2.0 * s / vtv;
            for (std::size_t i = j; i < n; ++i) q(row, i) -= f * v[i];
        }
    }
    for (std::size_t j = 0; j < n; ++j) {
        if (r(j, j) < 0.0)
            for (std::size_t i = 0; i < n; ++i) q(i, j) = -q(i, j);
    }
    return q;
}

struct Svd {
    Matrix u;
    Vector singular_values;  // descending
    Matrix v;
};

// One-sided Jacobi (Hestenes) SVD of a square matrix: orthogonalizes column
// pairs until all mutual angles are numerically right angles.
inline Svd jacobi_svd(const Matrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("jacobi_svd: matrix not square");
    const std::size_t n = m.rows();
    Matrix u = m;
    Matrix v = Matrix::identity(n);
    const double eps = 1e-15;

    for (int sweep = 0; sweep < 128; ++sweep) {
        bool converged = true;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                double alpha = 0.0, beta = 0.0, gamma = 0.0;
                for (std::size_t i = 0; i < n; ++i) {
                    alpha += u(i, p) * u(i, p);
                    beta += u(i, q) * u(i, q);
                    gamma += u(i, p) * u(i, q);
                }
                if (std::abs(gamma) <= eps * std::sqrt(alpha * beta)) continue;
                converged = false;
                const double zeta = (beta - alpha) / (2.0 * gamma);
                const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < n; ++i) {
                    const double uip = u(i, p), uiq = u(i, q);
                    u(i, p) = c * uip - s * uiq;
                    u(i, q) = s * uip + c * uiq;
                    const double vip = v(i, p), viq = v(i, q);
                    v(i, p) = c * vip - s * viq;
                    v(i, q) = s * vip + c * viq;
                }
            }
        }
        if (converged) break;
    }

    Svd out;
    out.singular_values.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        double norm = 0.0;
        for (std::size_t i = 0; i < n; ++i) norm += u(i, j) * u(i, j);
        out.singular_values[j] = std::sqrt(norm);
    }
    // Deterministic descending order.
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (out.singular_values[order[j]] > out.singular_values[order[i]])
                std::swap(order[i], order[j]);

    Svd sorted;
    sorted.singular_values.resize(n);
    sorted.u = Matrix(n, n);
    sorted.v = Matrix(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        const double sv = out.singular_values[src];
        sorted.singular_values[j] = sv;
        for (std::size_t i = 0; i < n; ++i) {
            sorted.u(i, j) = sv > 0.0 ? u(i, src) / sv : 0.0;
            sorted.v(i, j) = v(i, src);
        }
    }
    return sorted;
}

// ============================================================================
// SPD MATRIX
// ============================================================================

// Symmetric positive definite matrix with its Cholesky factor and eigensystem
// computed once at construction. Construction is the single validation point:
// asymmetric or non-PD input is rejected here with the failing invariant
// named, so downstream code never re-checks.
class SpdMatrix {
public:
    explicit SpdMatrix(Matrix entries) : entries_(std::move(entries)) {
        if (entries_.rows() != entries_.cols() || entries_.rows() == 0)
            throw std::invalid_argument("SpdMatrix: matrix must be square and non-empty");
        for (std::size_t i = 0; i < entries_.rows(); ++i) {
            for (std::size_t j = i + 1; j < entries_.cols(); ++j) {
                const double diff = std::abs(entries_(i, j) - entries_(j, i));
                const double tol = 1e-12 * std::max(1.0, std::abs(entries_(i, j)));
                if (diff > tol) {
                    throw std::invalid_argument(
                        "SpdMatrix: symmetry violated at (" + std::to_string(i) + "," +
                        std::to_string(j) + "): |a_ij - a_ji| = " + std::to_string(diff));
                }
            }
        }
        chol_ = cholesky(entries_);  // throws domain_error when not PD
        eigen_ = symmetric_eigen(entries_);
        if (!(eigen_.values.front() > 0.0)) {
            throw std::domain_error(
                "SpdMatrix: positive definiteness violated, min eigenvalue = " +
                std::to_string(eigen_.values.front()));
        }
    }

    static SpdMatrix identity(std::size_t k) { return SpdMatrix(Matrix::identity(k)); }

    static SpdMatrix diagonal(const Vector& d) {
        Matrix m(d.size(), d.size());
        for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
        return SpdMatrix(std::move(m));
    }

    static SpdMatrix scaled_identity(std::size_t k, double value) {
        return diagonal(Vector(k, value));
    }

    std::size_t dim() const { return entries_.rows(); }
    const Matrix& entries() const { return entries_; }
    const Matrix& chol() const { return chol_; }
    double operator()(std::size_t i, std::size_t j) const { return entries_(i, j); }

    double min_eigenvalue() const { return eigen_.values.front(); }
    Vector min_eigenvector() const {
        Vector v(dim());
        for (std::size_t i = 0; i < dim(); ++i) v[i] = eigen_.vectors(i, 0);
        return v;
    }
    const Vector& eigenvalues() const { return eigen_.values; }

    double log_det() const { return cholesky_log_det(chol_); }

    Vector solve(const Vector& b) const { return cholesky_solve(chol_, b); }

    // v^T Sigma^{-1} v
    double quad_inv(const Vector& v) const { return dot(v, solve(v)); }

    Matrix inverse() const {
        const std::size_t n = dim();
        Matrix inv(n, n);
        for (std::size_t j = 0; j < n; ++j) {
            Vector e(n, 0.0);
            e[j] = 1.0;
            const Vector col = solve(e);
            for (std::size_t i = 0; i < n; ++i) inv(i, j) = col[i];
        }
        return inv;
    }

    bool is_diagonal(double tol = 0.0) const {
        for (std::size_t i = 0; i < dim(); ++i)
            for (std::size_t j = 0; j < dim(); ++j)
                if (i != j && std::abs(entries_(i, j)) > tol) return false;
        return true;
    }

private:
    Matrix entries_;
    Matrix chol_;
    SymmetricEigen eigen_;
};

// Smallest eigenvalue of an SPD matrix (cached at construction).
inline double min_eigenvalue(const SpdMatrix& m) { return m.min_eigenvalue(); }

inline double max_orthogonality_defect(const Matrix& w) {
    return max_abs(w * w.transposed() - Matrix::identity(w.rows()));
}

}  // namespace lecam
