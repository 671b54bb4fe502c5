#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "snmf/model.hpp"

namespace snmf {

/// Synthetic stratified dataset: each stratum is a uniform low-rank product
/// plus a planted per-stratum shift, A(i) = U(i) V(i) + 1 v_true(i)^T.
/// With shared_product the base product is drawn once and reused for every
/// stratum (A(i) = U V + 1 v_true(i)^T), so only the shift distinguishes the
/// strata; a shared rank-inner_rank model can then fit the data exactly.
struct SyntheticSpec {
    std::size_t strata = 1;
    std::size_t rows = 1;        // rows per stratum
    std::size_t cols = 1;
    std::size_t inner_rank = 1;  // rank of the noiseless product; 0 gives a pure shift
    std::vector<double> shift_low;   // per-stratum uniform bounds, size = strata
    std::vector<double> shift_high;
    bool shared_product = false;
    std::uint64_t seed = 0;
};

void validate(const SyntheticSpec& spec);

struct SyntheticDataset {
    StrataDataset dataset;
    std::vector<Vector> v_true;  // the planted shifts
};

/// Deterministic per seed. A single seeded generator is consumed stratum by
/// stratum, drawing U(i) (rows x inner_rank, row-major, uniform [0,1)), then
/// V(i) (inner_rank x cols), then v_true(i) (uniform [shift_low(i),
/// shift_high(i))). With shared_product the order is U, V, then every
/// v_true(i).
SyntheticDataset generate(const SyntheticSpec& spec);

/// Named preset configurations for the CLI. "paper" is 4 strata of 100x100,
/// a shared inner product of rank 5, shifts uniform on [i-1, i] for stratum
/// i in 1..4.
SyntheticSpec synthetic_preset(std::string_view name, std::uint64_t seed);

}  // namespace snmf
