#pragma once

// Dense vectors and small matrices, the CSR sparse matrix with its counted
// product, and modified Gram-Schmidt orthonormalization.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace fk {

using Complex = std::complex<double>;
using Vector = std::vector<double>;
using ComplexVector = std::vector<Complex>;

// ---------------------------------------------------------------------------
// Vector kernels
// ---------------------------------------------------------------------------

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);
double norm2(std::span<const Complex> x);
/// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);
/// Scales x to unit length and returns the norm it had.
double normalize(std::span<double> x);

/// Real part of a complex vector after rotating it by the phase that maximizes
/// the norm of that real part, renormalized to unit length. A real input comes
/// back unchanged up to normalization.
Vector aligned_real_part(std::span<const Complex> x);

// ---------------------------------------------------------------------------
// Small dense matrices (row-major)
// ---------------------------------------------------------------------------

template <typename T>
class BasicMatrix {
public:
    BasicMatrix() = default;
    BasicMatrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_{rows}, cols_{cols}, data_(rows * cols, fill) {}

    static BasicMatrix identity(std::size_t n) {
        BasicMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    T& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    std::span<T> data() noexcept { return data_; }
    std::span<const T> data() const noexcept { return data_; }

    std::span<T> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const T> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }

    /// Grows (or shrinks) to rows x cols, keeping the overlapping leading block.
    void resize(std::size_t rows, std::size_t cols) {
        std::vector<T> next(rows * cols, T{});
        for (std::size_t i = 0; i < std::min(rows, rows_); ++i)
            for (std::size_t j = 0; j < std::min(cols, cols_); ++j) next[i * cols + j] = (*this)(i, j);
        rows_ = rows;
        cols_ = cols;
        data_ = std::move(next);
    }

    BasicMatrix transpose() const {
        BasicMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (const T& v : data_) s += std::norm(Complex(v));
        return std::sqrt(s);
    }

    friend bool operator==(const BasicMatrix&, const BasicMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using Matrix = BasicMatrix<double>;
using ComplexMatrix = BasicMatrix<Complex>;

Vector multiply(const Matrix& m, std::span<const double> x);
ComplexVector multiply(const Matrix& m, std::span<const Complex> x);

// ---------------------------------------------------------------------------
// Sparse matrix
// ---------------------------------------------------------------------------

struct Triplet {
    std::size_t row = 0;
    std::size_t col = 0;
    double value = 0.0;
};

/// Real square sparse matrix in compressed-sparse-row form.
///
/// Column indices are strictly increasing within each row; this is checked
/// on construction. Instances are immutable after construction.
class CsrMatrix {
public:
    CsrMatrix() = default;
    CsrMatrix(std::size_t n, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
              std::vector<double> values);

    /// Assembles from unordered triplets; duplicates are summed.
    static CsrMatrix from_triplets(std::size_t n, std::vector<Triplet> triplets);
    static CsrMatrix identity(std::size_t n);
    static CsrMatrix diagonal(std::span<const double> diag);
    /// Keeps entries with |a_ij| > 0.
    static CsrMatrix from_dense(const Matrix& dense);

    std::size_t n() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return values_.size(); }
    std::span<const std::size_t> row_ptr() const noexcept { return row_ptr_; }
    std::span<const std::size_t> col_idx() const noexcept { return col_idx_; }
    std::span<const double> values() const noexcept { return values_; }

    double frobenius_norm() const;
    Matrix to_dense() const;

    /// Raw product y = A x, accumulated left to right within each row. Not
    /// counted by a MatvecCounter; solvers go through fk::matvec.
    void multiply(std::span<const double> x, std::span<double> y) const;

    friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// Number of products with the large matrix.
class MatvecCounter {
public:
    std::uint64_t count() const noexcept { return count_; }
    void tick() noexcept { ++count_; }

private:
    std::uint64_t count_ = 0;
};

/// Counts every CsrMatrix::multiply on the current thread while alive,
/// independently of any MatvecCounter. Probes nest.
class MatvecProbe {
public:
    MatvecProbe();
    ~MatvecProbe();
    MatvecProbe(const MatvecProbe&) = delete;
    MatvecProbe& operator=(const MatvecProbe&) = delete;

    std::uint64_t count() const noexcept { return count_; }

private:
    friend class CsrMatrix;
    std::uint64_t count_ = 0;
    MatvecProbe* previous_ = nullptr;
};

void matvec(const CsrMatrix& a, std::span<const double> x, std::span<double> y, MatvecCounter& counter);
Vector matvec(const CsrMatrix& a, std::span<const double> x, MatvecCounter& counter);

// ---------------------------------------------------------------------------
// Tall skinny column blocks
// ---------------------------------------------------------------------------

/// n x k block stored column-major; grows one column at a time.
class DenseColumns {
public:
    DenseColumns() = default;
    explicit DenseColumns(std::size_t rows, std::size_t reserve_cols = 0);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    std::span<const double> col(std::size_t j) const noexcept { return {data_.data() + j * rows_, rows_}; }
    std::span<double> col(std::size_t j) noexcept { return {data_.data() + j * rows_, rows_}; }

    void append(std::span<const double> column);
    void clear() noexcept;

    /// V s
    Vector combine(std::span<const double> coeffs) const;
    ComplexVector combine(std::span<const Complex> coeffs) const;
    /// V^T x
    Vector transpose_times(std::span<const double> x) const;
    /// max |V^T V - I|
    double orthonormality_error() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

struct OrthoResult {
    Vector v;  ///< unit vector orthogonal to the basis
    Vector h;  ///< projection coefficients V^T z, summed over both sweeps
    double norm = 0.0;  ///< norm of z after projection
};

/// Orthonormalizes z against the orthonormal columns of V with modified
/// Gram-Schmidt. A second sweep runs when the first one removes more than
/// 1 - 1/sqrt(2) of the norm. Throws SubspaceExhausted when the remaining
/// norm is at most 1e-14 ||z||.
OrthoResult mgs_orthonormalize(const DenseColumns& basis, std::span<const double> z);

}  // namespace fk
