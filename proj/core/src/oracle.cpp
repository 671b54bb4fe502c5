#include "snmf/oracle.hpp"

#include <stdexcept>
#include <string>

namespace snmf::oracle {

namespace {

// Deliberately plain triple loops, kept separate from the engine's kernels.

DenseMatrix product(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows()) {
        throw std::invalid_argument("oracle product: inner dimensions differ");
    }
    DenseMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(k, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DenseMatrix product_tn(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows()) {
        throw std::invalid_argument("oracle product_tn: row counts differ");
    }
    DenseMatrix out(a.cols(), b.cols());
    for (std::size_t i = 0; i < a.cols(); ++i) {
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double acc = 0.0;
            for (std::size_t p = 0; p < a.rows(); ++p) {
                acc += a(p, i) * b(p, j);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DenseMatrix product_nt(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.cols()) {
        throw std::invalid_argument("oracle product_nt: column counts differ");
    }
    DenseMatrix out(a.rows(), b.rows());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < b.rows(); ++j) {
            double acc = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc += a(i, k) * b(j, k);
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DenseMatrix ratio_update(const DenseMatrix& x, const DenseMatrix& num,
                         const DenseMatrix& den, double eps) {
    DenseMatrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t j = 0; j < x.cols(); ++j) {
            const double v = x(i, j);
            out(i, j) = v == 0.0 ? 0.0 : v * num(i, j) / (den(i, j) + eps);
        }
    }
    return out;
}

}  // namespace

DenseMatrix standard_nmf_update_h(const DenseMatrix& a, const DenseMatrix& w,
                                  const DenseMatrix& h, double eps) {
    if (w.rows() != a.rows() || w.cols() != h.rows() || h.cols() != a.cols()) {
        throw std::invalid_argument("standard_nmf_update_h: inconsistent shapes");
    }
    const DenseMatrix num = product_tn(w, a);        // W^T A
    const DenseMatrix den = product(product_tn(w, w), h);  // (W^T W) H
    return ratio_update(h, num, den, eps);
}

DenseMatrix standard_nmf_update_w(const DenseMatrix& a, const DenseMatrix& w,
                                  const DenseMatrix& h, double eps) {
    if (w.rows() != a.rows() || w.cols() != h.rows() || h.cols() != a.cols()) {
        throw std::invalid_argument("standard_nmf_update_w: inconsistent shapes");
    }
    const DenseMatrix num = product_nt(a, h);        // A H^T
    const DenseMatrix den = product_nt(product(w, h), h);  // (W H) H^T
    return ratio_update(w, num, den, eps);
}

BlockSystem assemble_block(const StrataDataset& dataset, const Model& model) {
    const std::size_t s = dataset.stratum_count();
    const std::size_t n = dataset.cols();
    const std::size_t r = model.rank();
    if (model.v.size() != s || model.w.size() != s || model.h.cols() != n) {
        throw std::invalid_argument("assemble_block: model/dataset shapes inconsistent");
    }

    std::size_t total_rows = 0;
    std::vector<std::size_t> stratum_rows;
    stratum_rows.reserve(s);
    for (std::size_t i = 0; i < s; ++i) {
        stratum_rows.push_back(dataset.rows(i));
        total_rows += dataset.rows(i);
    }

    BlockSystem sys;
    sys.strata = s;
    sys.rank = r;
    sys.stratum_rows = stratum_rows;
    sys.a_hat = DenseMatrix(total_rows, n);
    sys.w_hat = DenseMatrix(total_rows, s + r);
    sys.h_hat = DenseMatrix(s + r, n);

    std::size_t row0 = 0;
    for (std::size_t i = 0; i < s; ++i) {
        const DenseMatrix a = to_dense(dataset.stratum(i));
        for (std::size_t p = 0; p < a.rows(); ++p) {
            for (std::size_t j = 0; j < n; ++j) {
                sys.a_hat(row0 + p, j) = a(p, j);
            }
            sys.w_hat(row0 + p, i) = 1.0;
            for (std::size_t k = 0; k < r; ++k) {
                sys.w_hat(row0 + p, s + k) = model.w[i](p, k);
            }
        }
        row0 += a.rows();
    }
    for (std::size_t i = 0; i < s; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            sys.h_hat(i, j) = model.v[i][j];
        }
    }
    for (std::size_t k = 0; k < r; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            sys.h_hat(s + k, j) = model.h(k, j);
        }
    }
    return sys;
}

SplitVH block_vh_update(const StrataDataset& dataset, const Model& model, double eps) {
    const BlockSystem sys = assemble_block(dataset, model);
    const DenseMatrix h_hat_next =
        standard_nmf_update_h(sys.a_hat, sys.w_hat, sys.h_hat, eps);

    SplitVH out;
    const std::size_t s = sys.strata;
    const std::size_t n = h_hat_next.cols();
    out.v.reserve(s);
    for (std::size_t i = 0; i < s; ++i) {
        Vector v(n);
        for (std::size_t j = 0; j < n; ++j) {
            v[j] = h_hat_next(i, j);
        }
        out.v.push_back(std::move(v));
    }
    out.h = DenseMatrix(sys.rank, n);
    for (std::size_t k = 0; k < sys.rank; ++k) {
        for (std::size_t j = 0; j < n; ++j) {
            out.h(k, j) = h_hat_next(s + k, j);
        }
    }
    return out;
}

}  // namespace snmf::oracle
