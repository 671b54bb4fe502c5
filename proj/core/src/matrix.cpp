#include "snmf/matrix.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace snmf {

namespace {

[[noreturn]] void throw_shape(const std::string& what) {
    throw std::invalid_argument(what);
}

std::string shape_str(std::size_t r, std::size_t c) {
    return std::to_string(r) + "x" + std::to_string(c);
}

}  // namespace

Vector::Vector(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0)) {
            throw std::invalid_argument("Vector: negative or non-finite entry at index " +
                                        std::to_string(i));
        }
    }
}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw_shape("DenseMatrix: expected " + std::to_string(rows_ * cols_) +
                    " values for shape " + shape_str(rows_, cols_) + ", got " +
                    std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!(values_[i] >= 0.0)) {
            throw std::invalid_argument("DenseMatrix: negative or non-finite entry at (" +
                                        std::to_string(i / cols_) + ", " +
                                        std::to_string(i % cols_) + ")");
        }
    }
}

DenseMatrix DenseMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows[0].size();
    std::vector<double> values;
    values.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) {
            throw_shape("DenseMatrix::from_rows: ragged rows");
        }
        values.insert(values.end(), row.begin(), row.end());
    }
    return DenseMatrix(r, c, std::move(values));
}

SparseMatrix SparseMatrix::from_triplets(std::size_t rows, std::size_t cols,
                                         std::vector<Triplet> triplets) {
    for (const auto& t : triplets) {
        if (t.row >= rows || t.col >= cols) {
            throw std::invalid_argument("SparseMatrix: entry (" + std::to_string(t.row) + ", " +
                                        std::to_string(t.col) + ") out of bounds for shape " +
                                        shape_str(rows, cols));
        }
        if (!(t.value > 0.0)) {
            throw std::invalid_argument("SparseMatrix: entry (" + std::to_string(t.row) + ", " +
                                        std::to_string(t.col) + ") must be positive");
        }
    }
    std::sort(triplets.begin(), triplets.end(), [](const Triplet& a, const Triplet& b) {
        return a.row != b.row ? a.row < b.row : a.col < b.col;
    });

    SparseMatrix m;
    m.rows_ = rows;
    m.cols_ = cols;
    m.row_ptr_.assign(rows + 1, 0);
    m.col_idx_.reserve(triplets.size());
    m.values_.reserve(triplets.size());
    for (std::size_t i = 0; i < triplets.size();) {
        std::size_t j = i + 1;
        double sum = triplets[i].value;
        while (j < triplets.size() && triplets[j].row == triplets[i].row &&
               triplets[j].col == triplets[i].col) {
            sum += triplets[j].value;
            ++j;
        }
        m.col_idx_.push_back(triplets[i].col);
        m.values_.push_back(sum);
        ++m.row_ptr_[triplets[i].row + 1];
        i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) {
        m.row_ptr_[r + 1] += m.row_ptr_[r];
    }
    return m;
}

DenseMatrix SparseMatrix::to_dense() const {
    DenseMatrix d(rows_, cols_);
    for (std::size_t r = 0; r < rows_; ++r) {
        const auto cols = row_cols(r);
        const auto vals = row_vals(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            d(r, cols[k]) = vals[k];
        }
    }
    return d;
}

std::size_t matrix_rows(const StratumMatrix& m) {
    return std::visit([](const auto& a) { return a.rows(); }, m);
}

std::size_t matrix_cols(const StratumMatrix& m) {
    return std::visit([](const auto& a) { return a.cols(); }, m);
}

DenseMatrix to_dense(const StratumMatrix& m) {
    if (const auto* d = std::get_if<DenseMatrix>(&m)) {
        return *d;
    }
    return std::get<SparseMatrix>(m).to_dense();
}

DenseMatrix matmul(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw_shape("matmul: inner dimensions differ, " + shape_str(a.rows(), a.cols()) +
                    " * " + shape_str(b.rows(), b.cols()));
    }
    DenseMatrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            const auto b_row = b.row(k);
            for (std::size_t j = 0; j < n; ++j) {
                out_row[j] += aik * b_row[j];
            }
        }
    }
    return out;
}

DenseMatrix matmul(const SparseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw_shape("matmul: inner dimensions differ, " + shape_str(a.rows(), a.cols()) +
                    " * " + shape_str(b.rows(), b.cols()));
    }
    DenseMatrix out(a.rows(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto out_row = out.row(i);
        const auto cols = a.row_cols(i);
        const auto vals = a.row_vals(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double av = vals[k];
            const auto b_row = b.row(cols[k]);
            for (std::size_t j = 0; j < n; ++j) {
                out_row[j] += av * b_row[j];
            }
        }
    }
    return out;
}

DenseMatrix matmul(const StratumMatrix& a, const DenseMatrix& b) {
    return std::visit([&](const auto& m) { return matmul(m, b); }, a);
}

DenseMatrix matmul_nt(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.cols() != y.cols()) {
        throw_shape("matmul_nt: column counts differ, " + shape_str(x.rows(), x.cols()) +
                    " * " + shape_str(y.rows(), y.cols()) + "^T");
    }
    DenseMatrix out(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto x_row = x.row(i);
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const auto y_row = y.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < x.cols(); ++k) {
                acc += x_row[k] * y_row[k];
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DenseMatrix matmul_nt(const SparseMatrix& x, const DenseMatrix& y) {
    if (x.cols() != y.cols()) {
        throw_shape("matmul_nt: column counts differ, " + shape_str(x.rows(), x.cols()) +
                    " * " + shape_str(y.rows(), y.cols()) + "^T");
    }
    DenseMatrix out(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto cols = x.row_cols(i);
        const auto vals = x.row_vals(i);
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const auto y_row = y.row(j);
            double acc = 0.0;
            for (std::size_t k = 0; k < cols.size(); ++k) {
                acc += vals[k] * y_row[cols[k]];
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DenseMatrix matmul_nt(const StratumMatrix& x, const DenseMatrix& y) {
    return std::visit([&](const auto& m) { return matmul_nt(m, y); }, x);
}

DenseMatrix matmul_tn(const DenseMatrix& x, const DenseMatrix& y) {
    if (x.rows() != y.rows()) {
        throw_shape("matmul_tn: row counts differ, " + shape_str(x.rows(), x.cols()) +
                    "^T * " + shape_str(y.rows(), y.cols()));
    }
    DenseMatrix out(x.cols(), y.cols());
    for (std::size_t p = 0; p < x.rows(); ++p) {
        const auto x_row = x.row(p);
        const auto y_row = y.row(p);
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double xp = x_row[i];
            if (xp == 0.0) continue;
            auto out_row = out.row(i);
            for (std::size_t j = 0; j < y.cols(); ++j) {
                out_row[j] += xp * y_row[j];
            }
        }
    }
    return out;
}

DenseMatrix matmul_tn(const DenseMatrix& x, const SparseMatrix& y) {
    if (x.rows() != y.rows()) {
        throw_shape("matmul_tn: row counts differ, " + shape_str(x.rows(), x.cols()) +
                    "^T * " + shape_str(y.rows(), y.cols()));
    }
    DenseMatrix out(x.cols(), y.cols());
    for (std::size_t p = 0; p < y.rows(); ++p) {
        const auto x_row = x.row(p);
        const auto cols = y.row_cols(p);
        const auto vals = y.row_vals(p);
        for (std::size_t i = 0; i < x.cols(); ++i) {
            const double xp = x_row[i];
            if (xp == 0.0) continue;
            auto out_row = out.row(i);
            for (std::size_t k = 0; k < cols.size(); ++k) {
                out_row[cols[k]] += xp * vals[k];
            }
        }
    }
    return out;
}

DenseMatrix matmul_tn(const DenseMatrix& x, const StratumMatrix& y) {
    return std::visit([&](const auto& m) { return matmul_tn(x, m); }, y);
}

DenseMatrix transpose(const DenseMatrix& m) {
    DenseMatrix out(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            out(j, i) = m(i, j);
        }
    }
    return out;
}

Vector column_sums(const DenseMatrix& a) {
    Vector out(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < a.cols(); ++j) {
            out[j] += row[j];
        }
    }
    return out;
}

Vector column_sums(const SparseMatrix& a) {
    Vector out(a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        const auto cols = a.row_cols(i);
        const auto vals = a.row_vals(i);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            out[cols[k]] += vals[k];
        }
    }
    return out;
}

Vector column_sums(const StratumMatrix& a) {
    return std::visit([](const auto& m) { return column_sums(m); }, a);
}

DenseMatrix elementwise_mul_div(const DenseMatrix& x, const DenseMatrix& num,
                                const DenseMatrix& den, double eps) {
    if (x.rows() != num.rows() || x.cols() != num.cols() || x.rows() != den.rows() ||
        x.cols() != den.cols()) {
        throw_shape("elementwise_mul_div: shapes differ");
    }
    if (eps < 0.0) {
        throw std::invalid_argument("elementwise_mul_div: eps must be >= 0");
    }
    DenseMatrix out(x.rows(), x.cols());
    const auto xv = x.values();
    const auto nv = num.values();
    const auto dv = den.values();
    auto ov = out.values();
    for (std::size_t i = 0; i < xv.size(); ++i) {
        ov[i] = xv[i] == 0.0 ? 0.0 : xv[i] * nv[i] / (dv[i] + eps);
    }
    return out;
}

Vector elementwise_mul_div(const Vector& x, const Vector& num, const Vector& den,
                           double eps) {
    if (x.size() != num.size() || x.size() != den.size()) {
        throw_shape("elementwise_mul_div: lengths differ");
    }
    if (eps < 0.0) {
        throw std::invalid_argument("elementwise_mul_div: eps must be >= 0");
    }
    Vector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] == 0.0 ? 0.0 : x[i] * num[i] / (den[i] + eps);
    }
    return out;
}

double frobenius_norm_sq(const DenseMatrix& a) {
    double acc = 0.0;
    for (double v : a.values()) {
        acc += v * v;
    }
    return acc;
}

double frobenius_norm_sq(const SparseMatrix& a) {
    double acc = 0.0;
    for (double v : a.values()) {
        acc += v * v;
    }
    return acc;
}

double frobenius_norm_sq(const StratumMatrix& a) {
    return std::visit([](const auto& m) { return frobenius_norm_sq(m); }, a);
}

}  // namespace snmf
