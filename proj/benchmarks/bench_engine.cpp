#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "snmf/datagen.hpp"
#include "snmf/engine.hpp"
#include "snmf/matrix.hpp"
#include "snmf/rng.hpp"

namespace {

snmf::StrataDataset make_dataset(std::size_t strata, std::size_t rows, std::size_t cols) {
    snmf::SyntheticSpec spec;
    spec.strata = strata;
    spec.rows = rows;
    spec.cols = cols;
    spec.inner_rank = 5;
    spec.shift_low.assign(strata, 0.0);
    spec.shift_high.assign(strata, 1.0);
    spec.seed = 17;
    return snmf::generate(spec).dataset;
}

snmf::Model make_model(const snmf::StrataDataset& dataset, std::size_t rank) {
    snmf::FitConfig config;
    config.rank = rank;
    config.seed = 17;
    return snmf::init_model(dataset, config);
}

snmf::DenseMatrix random_dense(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    snmf::UniformRng rng(seed);
    std::vector<double> values(rows * cols);
    for (auto& x : values) x = rng.next();
    return snmf::DenseMatrix(rows, cols, std::move(values));
}

snmf::SparseMatrix random_sparse(std::size_t rows, std::size_t cols, std::uint64_t seed) {
    snmf::UniformRng rng(seed);
    std::vector<snmf::SparseMatrix::Triplet> triplets;
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c)
            if (rng.next() < 0.05) triplets.push_back({r, c, rng.next(0.1, 1.0)});
    return snmf::SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

void BM_MatmulDense(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_dense(n, n, 1);
    const auto b = random_dense(n, 8, 2);
    for (auto _ : state) benchmark::DoNotOptimize(snmf::matmul(a, b));
}
BENCHMARK(BM_MatmulDense)->Arg(100)->Arg(400);

void BM_MatmulSparse(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = random_sparse(n, n, 1);
    const auto b = random_dense(n, 8, 2);
    for (auto _ : state) benchmark::DoNotOptimize(snmf::matmul(a, b));
}
BENCHMARK(BM_MatmulSparse)->Arg(100)->Arg(400);

void BM_UpdateV(benchmark::State& state) {
    const auto dataset = make_dataset(4, 100, 100);
    const auto model = make_model(dataset, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(snmf::update_v(model, dataset, 1e-9));
}
BENCHMARK(BM_UpdateV);

void BM_UpdateW(benchmark::State& state) {
    const auto dataset = make_dataset(4, 100, 100);
    const auto model = make_model(dataset, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(snmf::update_w(model, dataset, 1e-9));
}
BENCHMARK(BM_UpdateW);

void BM_UpdateH(benchmark::State& state) {
    const auto dataset = make_dataset(4, 100, 100);
    const auto model = make_model(dataset, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(snmf::update_h(model, dataset, 1e-9));
}
BENCHMARK(BM_UpdateH);

void BM_Objective(benchmark::State& state) {
    const auto dataset = make_dataset(4, 100, 100);
    const auto model = make_model(dataset, 5);
    for (auto _ : state)
        benchmark::DoNotOptimize(snmf::objective(model, dataset));
}
BENCHMARK(BM_Objective);

void BM_FitIteration(benchmark::State& state) {
    const auto dataset = make_dataset(4, 100, 100);
    snmf::FitConfig config;
    config.rank = 5;
    config.outer_iters = 1;
    config.seed = 17;
    for (auto _ : state)
        benchmark::DoNotOptimize(snmf::fit(dataset, config));
}
BENCHMARK(BM_FitIteration);

}  // namespace

BENCHMARK_MAIN();
