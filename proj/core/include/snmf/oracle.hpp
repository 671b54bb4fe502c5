#pragma once

#include <vector>

#include "snmf/model.hpp"

namespace snmf::oracle {

/// Classical Lee-Seung multiplicative updates for ||A - WH||_F^2, computed
/// with naive dense loops that share no code with the engine kernels. These
/// exist so the test suite can verify the engine algebraically.
DenseMatrix standard_nmf_update_h(const DenseMatrix& a, const DenseMatrix& w,
                                  const DenseMatrix& h, double eps);
DenseMatrix standard_nmf_update_w(const DenseMatrix& a, const DenseMatrix& w,
                                  const DenseMatrix& h, double eps);

/// The stacked system in which the stratified v/H updates coincide with a
/// standard NMF update on H-hat:
///   A-hat: all strata stacked vertically (sum(m_i) x n);
///   W-hat: s leading stratum-indicator all-ones columns, then the W(i)
///          blocks (sum(m_i) x (s + r));
///   H-hat: v(0)^T..v(s-1)^T stacked above H ((s + r) x n).
struct BlockSystem {
    DenseMatrix a_hat;
    DenseMatrix w_hat;
    DenseMatrix h_hat;
    std::size_t strata = 0;
    std::size_t rank = 0;
    std::vector<std::size_t> stratum_rows;
};

BlockSystem assemble_block(const StrataDataset& dataset, const Model& model);

struct SplitVH {
    std::vector<Vector> v;
    DenseMatrix h;
};

/// Applies the standard H update to the assembled block system and splits the
/// result back into (v(0)..v(s-1), H). All pieces derive from the same
/// parameter snapshot.
SplitVH block_vh_update(const StrataDataset& dataset, const Model& model, double eps);

}  // namespace snmf::oracle
