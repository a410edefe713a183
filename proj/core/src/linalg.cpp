#include "fk/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "fk/errors.hpp"

namespace fk {

namespace {

thread_local MatvecProbe* active_probe = nullptr;

void require_same_size(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        throw DimensionMismatch(std::string(what) + ": size " + std::to_string(a) + " vs " +
                                std::to_string(b));
    }
}

}  // namespace

double dot(std::span<const double> x, std::span<const double> y) {
    require_same_size(x.size(), y.size(), "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

double norm2(std::span<const double> x) {
    // Scaled accumulation: Ritz residuals near convergence sit far below 1.
    double scale = 0.0;
    for (double v : x) scale = std::max(scale, std::abs(v));
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double s = 0.0;
    for (double v : x) {
        const double t = v / scale;
        s += t * t;
    }
    return scale * std::sqrt(s);
}

double norm2(std::span<const Complex> x) {
    double scale = 0.0;
    for (const Complex& v : x) scale = std::max({scale, std::abs(v.real()), std::abs(v.imag())});
    if (scale == 0.0 || !std::isfinite(scale)) return scale;
    double s = 0.0;
    for (const Complex& v : x) {
        const double re = v.real() / scale;
        const double im = v.imag() / scale;
        s += re * re + im * im;
    }
    return scale * std::sqrt(s);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_same_size(x.size(), y.size(), "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
    for (double& v : x) v *= alpha;
}

double normalize(std::span<double> x) {
    const double nrm = norm2(x);
    if (nrm > 0.0) scale(1.0 / nrm, x);
    return nrm;
}

Vector aligned_real_part(std::span<const Complex> x) {
    Complex q{0.0, 0.0};
    for (const Complex& v : x) q += v * v;
    const Complex rot = std::polar(1.0, -0.5 * std::arg(q));
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = (rot * x[i]).real();
    normalize(out);
    return out;
}

Vector multiply(const Matrix& m, std::span<const double> x) {
    require_same_size(m.cols(), x.size(), "matrix-vector product");
    Vector y(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

ComplexVector multiply(const Matrix& m, std::span<const Complex> x) {
    require_same_size(m.cols(), x.size(), "matrix-vector product");
    ComplexVector y(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        Complex s{0.0, 0.0};
        for (std::size_t j = 0; j < m.cols(); ++j) s += m(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

// ---------------------------------------------------------------------------
// CsrMatrix
// ---------------------------------------------------------------------------

CsrMatrix::CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                     std::vector<double> values)
    : n_{n}, row_ptr_{std::move(row_ptr)}, col_idx_{std::move(col_idx)}, values_{std::move(values)} {
    if (row_ptr_.size() != n_ + 1) throw Error("CSR: row_ptr must have n+1 entries");
    if (row_ptr_.front() != 0) throw Error("CSR: row_ptr[0] must be 0");
    if (row_ptr_.back() != col_idx_.size() || col_idx_.size() != values_.size())
        throw Error("CSR: row_ptr[n] must equal nnz");
    for (std::size_t i = 0; i < n_; ++i) {
        if (row_ptr_[i] > row_ptr_[i + 1]) throw Error("CSR: row_ptr must be non-decreasing");
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) {
            if (col_idx_[p] >= n_) throw Error("CSR: column index out of range in row " + std::to_string(i));
            if (p > row_ptr_[i] && col_idx_[p] <= col_idx_[p - 1])
                throw Error("CSR: column indices must increase strictly in row " + std::to_string(i));
        }
    }
}

CsrMatrix CsrMatrix::from_triplets(std::size_t n, std::vector<Triplet> triplets) {
    for (const Triplet& t : triplets) {
        if (t.row >= n || t.col >= n) throw Error("CSR: triplet index out of range");
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<double> values;
    col_idx.reserve(triplets.size());
    values.reserve(triplets.size());
    for (std::size_t p = 0; p < triplets.size(); ++p) {
        const Triplet& t = triplets[p];
        if (p > 0 && t.row == triplets[p - 1].row && t.col == triplets[p - 1].col) {
            values.back() += t.value;
            continue;
        }
        col_idx.push_back(t.col);
        values.push_back(t.value);
        ++row_ptr[t.row + 1];
    }
    std::partial_sum(row_ptr.begin(), row_ptr.end(), row_ptr.begin());
    return CsrMatrix(n, std::move(row_ptr), std::move(col_idx), std::move(values));
}

CsrMatrix CsrMatrix::identity(std::size_t n) {
    const Vector ones(n, 1.0);
    return diagonal(ones);
}

CsrMatrix CsrMatrix::diagonal(std::span<const double> diag) {
    const std::size_t n = diag.size();
    std::vector<std::size_t> row_ptr(n + 1);
    std::vector<std::size_t> col_idx(n);
    std::iota(row_ptr.begin(), row_ptr.end(), std::size_t{0});
    std::iota(col_idx.begin(), col_idx.end(), std::size_t{0});
    return CsrMatrix(n, std::move(row_ptr), std::move(col_idx), Vector(diag.begin(), diag.end()));
}

CsrMatrix CsrMatrix::from_dense(const Matrix& dense) {
    if (dense.rows() != dense.cols()) throw DimensionMismatch("CSR: dense input must be square");
    std::vector<Triplet> triplets;
    for (std::size_t i = 0; i < dense.rows(); ++i)
        for (std::size_t j = 0; j < dense.cols(); ++j)
            if (dense(i, j) != 0.0) triplets.push_back({i, j, dense(i, j)});
    return from_triplets(dense.rows(), std::move(triplets));
}

double CsrMatrix::frobenius_norm() const { return norm2(values_); }

Matrix CsrMatrix::to_dense() const {
    Matrix m(n_, n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) m(i, col_idx_[p]) = values_[p];
    return m;
}

void CsrMatrix::multiply(std::span<const double> x, std::span<double> y) const {
    require_same_size(n_, x.size(), "matvec input");
    require_same_size(n_, y.size(), "matvec output");
    for (std::size_t i = 0; i < n_; ++i) {
        double s = 0.0;
        for (std::size_t p = row_ptr_[i]; p < row_ptr_[i + 1]; ++p) s += values_[p] * x[col_idx_[p]];
        y[i] = s;
    }
    for (MatvecProbe* probe = active_probe; probe != nullptr; probe = probe->previous_) ++probe->count_;
}

MatvecProbe::MatvecProbe() : previous_{active_probe} { active_probe = this; }

MatvecProbe::~MatvecProbe() { active_probe = previous_; }

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y, MatvecCounter& counter) {
    a.multiply(x, y);
    counter.tick();
}

Vector matvec(const CsrMatrix& a, std::span<const double> x, MatvecCounter& counter) {
    Vector y(a.n());
    matvec(a, x, y, counter);
    return y;
}

// ---------------------------------------------------------------------------
// DenseColumns
// ---------------------------------------------------------------------------

DenseColumns::DenseColumns(std::size_t rows, std::size_t reserve_cols) : rows_{rows} {
    data_.reserve(rows * reserve_cols);
}

void DenseColumns::append(std::span<const double> column) {
    require_same_size(rows_, column.size(), "DenseColumns::append");
    data_.insert(data_.end(), column.begin(), column.end());
    ++cols_;
}

void DenseColumns::clear() noexcept {
    data_.clear();
    cols_ = 0;
}

Vector DenseColumns::combine(std::span<const double> coeffs) const {
    require_same_size(cols_, coeffs.size(), "DenseColumns::combine");
    Vector out(rows_, 0.0);
    for (std::size_t j = 0; j < cols_; ++j) axpy(coeffs[j], col(j), out);
    return out;
}

ComplexVector DenseColumns::combine(std::span<const Complex> coeffs) const {
    require_same_size(cols_, coeffs.size(), "DenseColumns::combine");
    ComplexVector out(rows_, Complex{0.0, 0.0});
    for (std::size_t j = 0; j < cols_; ++j) {
        const auto c = col(j);
        for (std::size_t i = 0; i < rows_; ++i) out[i] += coeffs[j] * c[i];
    }
    return out;
}

Vector DenseColumns::transpose_times(std::span<const double> x) const {
    Vector out(cols_);
    for (std::size_t j = 0; j < cols_; ++j) out[j] = dot(col(j), x);
    return out;
}

double DenseColumns::orthonormality_error() const {
    double err = 0.0;
    for (std::size_t i = 0; i < cols_; ++i)
        for (std::size_t j = 0; j <= i; ++j) {
            const double g = dot(col(i), col(j)) - (i == j ? 1.0 : 0.0);
            err = std::max(err, std::abs(g));
        }
    return err;
}

OrthoResult mgs_orthonormalize(const DenseColumns& basis, std::span<const double> z) {
    require_same_size(basis.rows(), z.size(), "mgs_orthonormalize");
    OrthoResult out{Vector(z.begin(), z.end()), Vector(basis.cols(), 0.0), 0.0};
    const double original = norm2(z);
    if (original == 0.0) throw SubspaceExhausted();

    auto sweep = [&] {
        for (std::size_t j = 0; j < basis.cols(); ++j) {
            const double c = dot(basis.col(j), out.v);
            axpy(-c, basis.col(j), out.v);
            out.h[j] += c;
        }
        return norm2(out.v);
    };

    double remaining = sweep();
    if (remaining < original / std::sqrt(2.0)) remaining = sweep();
    if (remaining <= 1e-14 * original) throw SubspaceExhausted();
    scale(1.0 / remaining, out.v);
    out.norm = remaining;
    return out;
}

}  // namespace fk
