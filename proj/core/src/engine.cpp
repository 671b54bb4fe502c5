#include "snmf/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "snmf/rng.hpp"

namespace snmf {

StrataDataset::StrataDataset(std::vector<StratumMatrix> strata, std::vector<std::string> names)
    : strata_(std::move(strata)), names_(std::move(names)) {
    if (strata_.empty()) {
        throw std::invalid_argument("StrataDataset: need at least one stratum");
    }
    cols_ = matrix_cols(strata_[0]);
    if (cols_ == 0) {
        throw std::invalid_argument("StrataDataset: strata must have at least one column");
    }
    for (std::size_t i = 0; i < strata_.size(); ++i) {
        if (matrix_rows(strata_[i]) == 0) {
            throw std::invalid_argument("StrataDataset: stratum " + std::to_string(i) +
                                        " has no rows");
        }
        if (matrix_cols(strata_[i]) != cols_) {
            throw std::invalid_argument(
                "StrataDataset: stratum " + std::to_string(i) + " has " +
                std::to_string(matrix_cols(strata_[i])) + " columns, expected " +
                std::to_string(cols_));
        }
    }
    if (names_.empty()) {
        for (std::size_t i = 0; i < strata_.size(); ++i) {
            names_.push_back("stratum_" + std::to_string(i));
        }
    } else if (names_.size() != strata_.size()) {
        throw std::invalid_argument("StrataDataset: got " + std::to_string(names_.size()) +
                                    " names for " + std::to_string(strata_.size()) +
                                    " strata");
    }
}

void validate(const FitConfig& config) {
    if (config.rank < 1) {
        throw std::invalid_argument("FitConfig: rank must be >= 1");
    }
    if (config.inner_v_updates < 1) {
        throw std::invalid_argument("FitConfig: inner_v_updates must be >= 1");
    }
    if (!(config.eps >= 0.0)) {
        throw std::invalid_argument("FitConfig: eps must be >= 0");
    }
    if (config.log_every < 1) {
        throw std::invalid_argument("FitConfig: log_every must be >= 1");
    }
}

namespace {

void check_shapes(const Model& model, const StrataDataset& dataset) {
    const std::size_t s = dataset.stratum_count();
    const std::size_t n = dataset.cols();
    const std::size_t r = model.rank();
    if (model.v.size() != s || model.w.size() != s) {
        throw std::invalid_argument("model/dataset stratum counts differ");
    }
    if (model.h.cols() != n) {
        throw std::invalid_argument("model H has " + std::to_string(model.h.cols()) +
                                    " columns, dataset has " + std::to_string(n));
    }
    for (std::size_t i = 0; i < s; ++i) {
        if (model.v[i].size() != n || model.w[i].rows() != dataset.rows(i) ||
            model.w[i].cols() != r) {
            throw std::invalid_argument("model shapes inconsistent with dataset at stratum " +
                                        std::to_string(i));
        }
    }
}

/// H^T (W^T 1): length-n vector with entries sum_k H(k,j) * colsum_W(k).
Vector shift_denominator_term(const DenseMatrix& w, const DenseMatrix& h) {
    const Vector wsum = column_sums(w);
    Vector hw(h.cols());
    for (std::size_t k = 0; k < h.rows(); ++k) {
        const double wk = wsum[k];
        if (wk == 0.0) continue;
        const auto h_row = h.row(k);
        for (std::size_t j = 0; j < h.cols(); ++j) {
            hw[j] += wk * h_row[j];
        }
    }
    return hw;
}

/// W H + 1 v^T, the model's reconstruction of one stratum.
DenseMatrix reconstruct(const DenseMatrix& w, const Vector& v, const DenseMatrix& h) {
    DenseMatrix r = matmul(w, h);
    for (std::size_t p = 0; p < r.rows(); ++p) {
        auto row = r.row(p);
        for (std::size_t j = 0; j < r.cols(); ++j) {
            row[j] += v[j];
        }
    }
    return r;
}

void update_v_pass(Model& model, const std::vector<Vector>& col_sums_a, double eps,
                   const StrataDataset& dataset, std::size_t passes) {
    const std::size_t s = dataset.stratum_count();
    for (std::size_t i = 0; i < s; ++i) {
        const double m_i = static_cast<double>(dataset.rows(i));
        // H and W are fixed during the inner passes, so this term is constant.
        const Vector hw = shift_denominator_term(model.w[i], model.h);
        const Vector& num = col_sums_a[i];
        Vector& v = model.v[i];
        for (std::size_t pass = 0; pass < passes; ++pass) {
            for (std::size_t j = 0; j < v.size(); ++j) {
                const double x = v[j];
                v[j] = x == 0.0 ? 0.0 : x * num[j] / (x * m_i + hw[j] + eps);
            }
        }
    }
}

void update_w_pass(Model& model, const StrataDataset& dataset, double eps) {
    const std::size_t s = dataset.stratum_count();
    for (std::size_t i = 0; i < s; ++i) {
        const DenseMatrix num = matmul_nt(dataset.stratum(i), model.h);
        const DenseMatrix den = matmul_nt(reconstruct(model.w[i], model.v[i], model.h), model.h);
        model.w[i] = elementwise_mul_div(model.w[i], num, den, eps);
    }
}

void accumulate(DenseMatrix& acc, const DenseMatrix& term) {
    auto a = acc.values();
    const auto t = term.values();
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += t[i];
    }
}

void update_h_pass(Model& model, const StrataDataset& dataset, double eps) {
    const std::size_t s = dataset.stratum_count();
    DenseMatrix num(model.h.rows(), model.h.cols());
    DenseMatrix den(model.h.rows(), model.h.cols());
    // Summation is sequential by stratum index to keep runs bit-reproducible.
    for (std::size_t i = 0; i < s; ++i) {
        accumulate(num, matmul_tn(model.w[i], dataset.stratum(i)));
        accumulate(den, matmul_tn(model.w[i], reconstruct(model.w[i], model.v[i], model.h)));
    }
    model.h = elementwise_mul_div(model.h, num, den, eps);
}

std::vector<Vector> all_column_sums(const StrataDataset& dataset) {
    std::vector<Vector> out;
    out.reserve(dataset.stratum_count());
    for (std::size_t i = 0; i < dataset.stratum_count(); ++i) {
        out.push_back(column_sums(dataset.stratum(i)));
    }
    return out;
}

double stratum_residual_sq(const StratumMatrix& a, const Vector& v, const DenseMatrix& wh) {
    double acc = 0.0;
    if (const auto* d = std::get_if<DenseMatrix>(&a)) {
        for (std::size_t p = 0; p < d->rows(); ++p) {
            const auto a_row = d->row(p);
            const auto wh_row = wh.row(p);
            for (std::size_t j = 0; j < d->cols(); ++j) {
                const double r = a_row[j] - v[j] - wh_row[j];
                acc += r * r;
            }
        }
        return acc;
    }
    const auto& sp = std::get<SparseMatrix>(a);
    for (std::size_t p = 0; p < sp.rows(); ++p) {
        const auto cols = sp.row_cols(p);
        const auto vals = sp.row_vals(p);
        const auto wh_row = wh.row(p);
        std::size_t k = 0;
        for (std::size_t j = 0; j < sp.cols(); ++j) {
            double a_pj = 0.0;
            if (k < cols.size() && cols[k] == j) {
                a_pj = vals[k];
                ++k;
            }
            const double r = a_pj - v[j] - wh_row[j];
            acc += r * r;
        }
    }
    return acc;
}

double total_frobenius_sq(const StrataDataset& dataset) {
    double acc = 0.0;
    for (std::size_t i = 0; i < dataset.stratum_count(); ++i) {
        acc += frobenius_norm_sq(dataset.stratum(i));
    }
    return acc;
}

}  // namespace

Model init_model(const StrataDataset& dataset, const FitConfig& config) {
    validate(config);
    const std::size_t s = dataset.stratum_count();
    const std::size_t n = dataset.cols();
    const std::size_t r = config.rank;
    const double hi = 1.0 / std::sqrt(static_cast<double>(r));

    UniformRng rng(config.seed);
    Model model;
    model.h = DenseMatrix(r, n);
    for (double& x : model.h.values()) {
        x = rng.next(0.0, hi);
    }
    model.w.reserve(s);
    for (std::size_t i = 0; i < s; ++i) {
        DenseMatrix w(dataset.rows(i), r);
        for (double& x : w.values()) {
            x = rng.next(0.0, hi);
        }
        model.w.push_back(std::move(w));
    }
    model.v.reserve(s);
    for (std::size_t i = 0; i < s; ++i) {
        Vector v(n);
        for (double& x : v.values()) {
            x = rng.next();
        }
        model.v.push_back(std::move(v));
    }
    return model;
}

Model update_v(Model model, const StrataDataset& dataset, double eps) {
    check_shapes(model, dataset);
    const auto col_sums_a = all_column_sums(dataset);
    update_v_pass(model, col_sums_a, eps, dataset, 1);
    return model;
}

Model update_w(Model model, const StrataDataset& dataset, double eps) {
    check_shapes(model, dataset);
    update_w_pass(model, dataset, eps);
    return model;
}

Model update_h(Model model, const StrataDataset& dataset, double eps) {
    check_shapes(model, dataset);
    update_h_pass(model, dataset, eps);
    return model;
}

double objective(const Model& model, const StrataDataset& dataset) {
    check_shapes(model, dataset);
    double acc = 0.0;
    for (std::size_t i = 0; i < dataset.stratum_count(); ++i) {
        const DenseMatrix wh = matmul(model.w[i], model.h);
        acc += stratum_residual_sq(dataset.stratum(i), model.v[i], wh);
    }
    return acc;
}

double loss(const Model& model, const StrataDataset& dataset) {
    return std::sqrt(objective(model, dataset));
}

double normalized_loss(const Model& model, const StrataDataset& dataset) {
    const double denom = total_frobenius_sq(dataset);
    if (!(denom > 0.0)) {
        throw std::invalid_argument(
            "normalized_loss: dataset is all zero, normalized loss undefined");
    }
    return std::sqrt(objective(model, dataset) / denom);
}

std::pair<Model, LossTrace> fit(const StrataDataset& dataset, const FitConfig& config,
                                const FitObserver& observer) {
    validate(config);
    const double data_norm_sq = total_frobenius_sq(dataset);
    if (!(data_norm_sq > 0.0)) {
        throw std::invalid_argument("fit: dataset is all zero, normalized loss undefined");
    }

    Model model = init_model(dataset, config);
    const auto col_sums_a = all_column_sums(dataset);

    LossTrace trace;
    const auto record = [&](std::size_t iteration) {
        const double obj = objective(model, dataset);
        trace.entries.push_back(
            {iteration, std::sqrt(obj), std::sqrt(obj / data_norm_sq)});
        if (observer) {
            observer(iteration, model);
        }
    };

    record(0);
    for (std::size_t t = 1; t <= config.outer_iters; ++t) {
        update_v_pass(model, col_sums_a, config.eps, dataset, config.inner_v_updates);
        update_w_pass(model, dataset, config.eps);
        update_h_pass(model, dataset, config.eps);
        if (t % config.log_every == 0 || t == config.outer_iters) {
            record(t);
        }
    }
    return {std::move(model), std::move(trace)};
}

std::vector<double> strata_means(const Model& model) {
    std::vector<double> means;
    means.reserve(model.v.size());
    for (const Vector& v : model.v) {
        double sum = 0.0;
        for (double x : v.values()) {
            sum += x;
        }
        means.push_back(v.size() == 0 ? 0.0 : sum / static_cast<double>(v.size()));
    }
    return means;
}

std::vector<Vector> normalize_v(const Model& model) {
    std::vector<Vector> out;
    out.reserve(model.v.size());
    for (std::size_t i = 0; i < model.v.size(); ++i) {
        const Vector& v = model.v[i];
        double sum = 0.0;
        for (double x : v.values()) {
            sum += x;
        }
        if (!(sum > 0.0)) {
            throw std::invalid_argument("normalize_v: stratum " + std::to_string(i) +
                                        " has zero-sum v(i)");
        }
        Vector scaled(v.size());
        for (std::size_t j = 0; j < v.size(); ++j) {
            scaled[j] = v[j] / sum;
        }
        out.push_back(std::move(scaled));
    }
    return out;
}

std::vector<TopFeature> topk_features(const Model& model, std::size_t stratum,
                                      std::size_t k) {
    if (stratum >= model.v.size()) {
        throw std::invalid_argument("topk_features: stratum " + std::to_string(stratum) +
                                    " out of range");
    }
    const Vector& v = model.v[stratum];
    if (k > v.size()) {
        throw std::invalid_argument("topk_features: k = " + std::to_string(k) +
                                    " exceeds feature count " + std::to_string(v.size()));
    }
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return v[a] != v[b] ? v[a] > v[b] : a < b;
    });
    std::vector<TopFeature> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.push_back({idx[i], v[idx[i]]});
    }
    return out;
}

std::vector<LabeledFeature> topk_features(const Model& model, std::size_t stratum,
                                          std::size_t k,
                                          std::span<const std::string> vocab) {
    const auto top = topk_features(model, stratum, k);
    std::vector<LabeledFeature> out;
    out.reserve(top.size());
    for (const auto& f : top) {
        if (f.index >= vocab.size()) {
            throw std::invalid_argument("topk_features: vocabulary has " +
                                        std::to_string(vocab.size()) +
                                        " entries, feature index " +
                                        std::to_string(f.index) + " out of range");
        }
        out.push_back({vocab[f.index], f.weight});
    }
    return out;
}

double sparsity(const Vector& v, double threshold) {
    if (!(threshold >= 0.0)) {
        throw std::invalid_argument("sparsity: threshold must be >= 0");
    }
    if (v.size() == 0) {
        return 0.0;
    }
    std::size_t count = 0;
    for (double x : v.values()) {
        if (x > threshold) {
            ++count;
        }
    }
    return static_cast<double>(count) / static_cast<double>(v.size());
}

}  // namespace snmf
