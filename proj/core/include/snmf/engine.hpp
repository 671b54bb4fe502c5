#pragma once

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "snmf/model.hpp"

namespace snmf {

/// Random model: H and every W(i) i.i.d. uniform on [0, 1/sqrt(r)), every
/// v(i) i.i.d. uniform on [0, 1). One seeded generator is consumed in a fixed
/// order (H, then W(0)..W(s-1), then v(0)..v(s-1), each row-major), so equal
/// seeds give bit-identical models.
Model init_model(const StrataDataset& dataset, const FitConfig& config);

/// One multiplicative pass over every v(i):
///   v(i) <- v(i) * A(i)^T 1 / (v(i) m_i + H^T W(i)^T 1 + eps).
/// Strata are independent; entries that are exactly zero stay zero.
Model update_v(Model model, const StrataDataset& dataset, double eps);

/// W(i) <- W(i) * A(i) H^T / ((W(i) H + 1 v(i)^T) H^T + eps).
Model update_w(Model model, const StrataDataset& dataset, double eps);

/// H <- H * sum_i W(i)^T A(i) / (sum_i W(i)^T (W(i) H + 1 v(i)^T) + eps),
/// numerator and denominator each summed over strata before the division.
Model update_h(Model model, const StrataDataset& dataset, double eps);

/// sum_i ||A(i) - 1 v(i)^T - W(i) H||_F^2.
double objective(const Model& model, const StrataDataset& dataset);

/// sqrt of the objective.
double loss(const Model& model, const StrataDataset& dataset);

/// sqrt(objective / sum_i ||A(i)||_F^2). Throws if the dataset is all zero.
double normalized_loss(const Model& model, const StrataDataset& dataset);

/// Called after each logged iteration (including iteration 0, right after
/// initialization) with the current model.
using FitObserver = std::function<void(std::size_t iteration, const Model& model)>;

/// Runs exactly config.outer_iters iterations; each one performs
/// config.inner_v_updates v-passes, then one W update, then one H update, in
/// that order, each consuming the latest parameter values. The trace records
/// iteration 0 and every log_every-th iteration thereafter (the final
/// iteration is always recorded). Losses are logged after the iteration's
/// updates.
std::pair<Model, LossTrace> fit(const StrataDataset& dataset, const FitConfig& config,
                                const FitObserver& observer = {});

/// Mean of each v(i).
std::vector<double> strata_means(const Model& model);

/// Each v(i) scaled to sum to one. Throws, naming the stratum, if some v(i)
/// sums to zero.
std::vector<Vector> normalize_v(const Model& model);

struct TopFeature {
    std::size_t index;
    double weight;
};

/// The k largest entries of v(stratum), descending, ties broken by ascending
/// index. Throws if stratum or k is out of range; k == 0 yields an empty list.
std::vector<TopFeature> topk_features(const Model& model, std::size_t stratum,
                                      std::size_t k);

struct LabeledFeature {
    std::string label;
    double weight;
};

/// Same, with vocabulary labels substituted for indices.
std::vector<LabeledFeature> topk_features(const Model& model, std::size_t stratum,
                                          std::size_t k,
                                          std::span<const std::string> vocab);

/// Fraction of entries strictly above threshold.
double sparsity(const Vector& v, double threshold);

}  // namespace snmf
