#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "snmf/matrix.hpp"

namespace snmf {

/// Ordered collection of strata data matrices sharing a column dimension.
class StrataDataset {
public:
    StrataDataset(std::vector<StratumMatrix> strata, std::vector<std::string> names = {});

    std::size_t stratum_count() const { return strata_.size(); }
    std::size_t cols() const { return cols_; }
    std::size_t rows(std::size_t i) const { return matrix_rows(strata_[i]); }
    const StratumMatrix& stratum(std::size_t i) const { return strata_[i]; }
    const std::vector<std::string>& names() const { return names_; }
    const std::string& name(std::size_t i) const { return names_[i]; }

private:
    std::vector<StratumMatrix> strata_;
    std::vector<std::string> names_;
    std::size_t cols_ = 0;
};

/// Factorization state: per-stratum shifts v(i) and coefficients W(i), plus
/// the shared topics matrix H. All entries stay non-negative under the
/// multiplicative updates.
struct Model {
    std::vector<Vector> v;       // s vectors of length n
    std::vector<DenseMatrix> w;  // s matrices, m_i x r
    DenseMatrix h;               // r x n

    std::size_t stratum_count() const { return v.size(); }
    std::size_t rank() const { return h.rows(); }
    std::size_t cols() const { return h.cols(); }
};

struct FitConfig {
    std::size_t rank = 1;
    std::size_t outer_iters = 100;
    std::size_t inner_v_updates = 2;  // M
    double eps = 1e-9;
    std::uint64_t seed = 0;
    std::size_t log_every = 1;
};

/// Throws std::invalid_argument if the config is unusable.
void validate(const FitConfig& config);

struct LossTrace {
    struct Entry {
        std::size_t iteration;
        double loss;             // sqrt of the objective
        double normalized_loss;  // sqrt(objective / sum_i ||A(i)||_F^2)
    };
    std::vector<Entry> entries;
};

}  // namespace snmf
