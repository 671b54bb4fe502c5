#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

namespace snmf {

/// Dense non-negative vector. Entries are validated once at construction;
/// mutating accessors are provided for update kernels, which preserve
/// non-negativity by construction.
class Vector {
public:
    Vector() = default;
    explicit Vector(std::size_t len) : values_(len, 0.0) {}
    explicit Vector(std::vector<double> values);

    std::size_t size() const { return values_.size(); }
    double operator[](std::size_t i) const { return values_[i]; }
    double& operator[](std::size_t i) { return values_[i]; }
    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    bool operator==(const Vector&) const = default;

private:
    std::vector<double> values_;
};

/// Row-major dense non-negative matrix.
class DenseMatrix {
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    /// Convenience constructor for literals in tests: {{1,2},{3,4}}.
    static DenseMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return values_.size(); }

    double operator()(std::size_t r, std::size_t c) const { return values_[r * cols_ + c]; }
    double& operator()(std::size_t r, std::size_t c) { return values_[r * cols_ + c]; }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }
    std::span<const double> row(std::size_t r) const {
        return std::span<const double>(values_.data() + r * cols_, cols_);
    }
    std::span<double> row(std::size_t r) {
        return std::span<double>(values_.data() + r * cols_, cols_);
    }

    bool operator==(const DenseMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

/// Compressed-row sparse matrix. Stored entries are strictly positive;
/// absent entries are exactly zero. Column indices are strictly increasing
/// within each row.
class SparseMatrix {
public:
    struct Triplet {
        std::size_t row;
        std::size_t col;
        double value;
    };

    SparseMatrix() = default;

    /// Builds from coordinate triplets. Duplicate (row, col) pairs are summed.
    /// Throws on out-of-bounds indices or values <= 0.
    static SparseMatrix from_triplets(std::size_t rows, std::size_t cols,
                                      std::vector<Triplet> triplets);

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t nnz() const { return values_.size(); }

    std::span<const std::size_t> row_cols(std::size_t r) const {
        return std::span<const std::size_t>(col_idx_.data() + row_ptr_[r],
                                            row_ptr_[r + 1] - row_ptr_[r]);
    }
    std::span<const double> row_vals(std::size_t r) const {
        return std::span<const double>(values_.data() + row_ptr_[r],
                                       row_ptr_[r + 1] - row_ptr_[r]);
    }
    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::size_t> col_indices() const { return col_idx_; }
    std::span<const double> values() const { return values_; }

    DenseMatrix to_dense() const;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::size_t> row_ptr_;  // size rows_ + 1
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

/// A data stratum is either dense or sparse. Model parameters (v, W, H) are
/// always dense.
using StratumMatrix = std::variant<DenseMatrix, SparseMatrix>;

std::size_t matrix_rows(const StratumMatrix& m);
std::size_t matrix_cols(const StratumMatrix& m);
DenseMatrix to_dense(const StratumMatrix& m);

// --- kernels -------------------------------------------------------------

/// Dense product A * B. Throws on inner-dimension mismatch.
DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const SparseMatrix& a, const DenseMatrix& b);
DenseMatrix matmul(const StratumMatrix& a, const DenseMatrix& b);

/// X * Y^T.
DenseMatrix matmul_nt(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix matmul_nt(const SparseMatrix& x, const DenseMatrix& y);
DenseMatrix matmul_nt(const StratumMatrix& x, const DenseMatrix& y);

/// X^T * Y.
DenseMatrix matmul_tn(const DenseMatrix& x, const DenseMatrix& y);
DenseMatrix matmul_tn(const DenseMatrix& x, const SparseMatrix& y);
DenseMatrix matmul_tn(const DenseMatrix& x, const StratumMatrix& y);

DenseMatrix transpose(const DenseMatrix& m);

/// Column sums, i.e. A^T 1.
Vector column_sums(const DenseMatrix& a);
Vector column_sums(const SparseMatrix& a);
Vector column_sums(const StratumMatrix& a);

/// result[i,j] = x[i,j] * num[i,j] / (den[i,j] + eps), with the multiplicative
/// convention that a zero in x stays exactly zero regardless of num and den.
DenseMatrix elementwise_mul_div(const DenseMatrix& x, const DenseMatrix& num,
                                const DenseMatrix& den, double eps);
Vector elementwise_mul_div(const Vector& x, const Vector& num, const Vector& den,
                           double eps);

double frobenius_norm_sq(const DenseMatrix& a);
double frobenius_norm_sq(const SparseMatrix& a);
double frobenius_norm_sq(const StratumMatrix& a);

}  // namespace snmf
