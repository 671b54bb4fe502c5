#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "snmf/datagen.hpp"
#include "test_support.hpp"

using namespace snmf;

namespace {

SyntheticSpec small_spec() {
    SyntheticSpec spec;
    spec.strata = 2;
    spec.rows = 3;
    spec.cols = 4;
    spec.inner_rank = 2;
    spec.shift_low = {0.0, 1.0};
    spec.shift_high = {1.0, 2.0};
    spec.seed = 11;
    return spec;
}

double mean(const Vector& v) {
    double sum = 0.0;
    for (double x : v.values()) sum += x;
    return sum / static_cast<double>(v.size());
}

/// A(i) minus its planted shift, the inner product the generator drew.
DenseMatrix strip_shift(const DenseMatrix& a, const Vector& shift) {
    DenseMatrix out = a;
    for (std::size_t p = 0; p < out.rows(); ++p) {
        auto row = out.row(p);
        for (std::size_t j = 0; j < out.cols(); ++j) {
            row[j] -= shift[j];
        }
    }
    return out;
}

}  // namespace

TEST_CASE("spec validation") {
    CHECK_NOTHROW(validate(small_spec()));

    SyntheticSpec bad = small_spec();
    bad.strata = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);

    bad = small_spec();
    bad.rows = 0;
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);

    bad = small_spec();
    bad.shift_low = {0.0};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);

    bad = small_spec();
    bad.shift_low = {0.5, 1.0};
    bad.shift_high = {0.4, 2.0};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);

    bad = small_spec();
    bad.shift_low = {-0.1, 1.0};
    CHECK_THROWS_AS(validate(bad), std::invalid_argument);
}

TEST_CASE("generated data matches the documented draw order") {
    const SyntheticSpec spec = small_spec();
    const SyntheticDataset out = generate(spec);

    UniformRng rng(spec.seed);
    for (std::size_t i = 0; i < spec.strata; ++i) {
        DenseMatrix u(spec.rows, spec.inner_rank);
        for (double& x : u.values()) x = rng.next();
        DenseMatrix v(spec.inner_rank, spec.cols);
        for (double& x : v.values()) x = rng.next();
        DenseMatrix a = matmul(u, v);
        Vector shift(spec.cols);
        for (std::size_t j = 0; j < spec.cols; ++j) {
            shift[j] = rng.next(spec.shift_low[i], spec.shift_high[i]);
        }
        for (std::size_t p = 0; p < a.rows(); ++p) {
            auto row = a.row(p);
            for (std::size_t j = 0; j < a.cols(); ++j) {
                row[j] += shift[j];
            }
        }
        CHECK(std::get<DenseMatrix>(out.dataset.stratum(i)) == a);
        CHECK(out.v_true[i] == shift);
    }
}

TEST_CASE("shared product draws one base then all shifts") {
    SyntheticSpec spec = small_spec();
    spec.shared_product = true;
    const SyntheticDataset out = generate(spec);

    UniformRng rng(spec.seed);
    DenseMatrix u(spec.rows, spec.inner_rank);
    for (double& x : u.values()) x = rng.next();
    DenseMatrix v(spec.inner_rank, spec.cols);
    for (double& x : v.values()) x = rng.next();
    const DenseMatrix base = matmul(u, v);

    for (std::size_t i = 0; i < spec.strata; ++i) {
        Vector shift(spec.cols);
        for (std::size_t j = 0; j < spec.cols; ++j) {
            shift[j] = rng.next(spec.shift_low[i], spec.shift_high[i]);
        }
        CHECK(out.v_true[i] == shift);
        const DenseMatrix stripped =
            strip_shift(std::get<DenseMatrix>(out.dataset.stratum(i)), shift);
        CHECK(testutil::max_rel_diff(stripped, base) <= 1e-12);
    }
}

TEST_CASE("generation is deterministic per seed") {
    const SyntheticSpec spec = small_spec();
    const SyntheticDataset a = generate(spec);
    const SyntheticDataset b = generate(spec);
    for (std::size_t i = 0; i < spec.strata; ++i) {
        CHECK(std::get<DenseMatrix>(a.dataset.stratum(i)) ==
              std::get<DenseMatrix>(b.dataset.stratum(i)));
        CHECK(a.v_true[i] == b.v_true[i]);
    }

    SyntheticSpec other = spec;
    other.seed = 12;
    const SyntheticDataset c = generate(other);
    CHECK(std::get<DenseMatrix>(a.dataset.stratum(0)) !=
          std::get<DenseMatrix>(c.dataset.stratum(0)));
}

TEST_CASE("zero inner rank gives a pure shift dataset") {
    SyntheticSpec spec = small_spec();
    spec.inner_rank = 0;
    const SyntheticDataset out = generate(spec);
    for (std::size_t i = 0; i < spec.strata; ++i) {
        const auto& a = std::get<DenseMatrix>(out.dataset.stratum(i));
        for (std::size_t p = 0; p < a.rows(); ++p) {
            for (std::size_t j = 0; j < a.cols(); ++j) {
                CHECK(a(p, j) == out.v_true[i][j]);
            }
        }
    }
}

TEST_CASE("preset configuration") {
    const SyntheticSpec spec = synthetic_preset("paper", 5);
    CHECK(spec.strata == 4);
    CHECK(spec.rows == 100);
    CHECK(spec.cols == 100);
    CHECK(spec.inner_rank == 5);
    CHECK(spec.shared_product);
    CHECK(spec.seed == 5);
    REQUIRE(spec.shift_low.size() == 4);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(spec.shift_low[i] == static_cast<double>(i));
        CHECK(spec.shift_high[i] == static_cast<double>(i) + 1.0);
    }

    CHECK_THROWS_AS(synthetic_preset("nope", 0), std::invalid_argument);
}

TEST_CASE("preset data shape and bounds") {
    const SyntheticDataset out = generate(synthetic_preset("paper", 0));
    REQUIRE(out.dataset.stratum_count() == 4);
    CHECK(out.dataset.cols() == 100);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(out.dataset.rows(i) == 100);
        CHECK(out.dataset.name(i) == "stratum_" + std::to_string(i));
        const double lo = static_cast<double>(i);
        const auto& a = std::get<DenseMatrix>(out.dataset.stratum(i));
        for (double x : a.values()) {
            CHECK(x >= lo);
        }
        for (double x : out.v_true[i].values()) {
            CHECK(x >= lo);
            CHECK(x < lo + 1.0);
        }
    }
}

TEST_CASE("planted shift means concentrate") {
    for (std::uint64_t seed : {0ULL, 1ULL, 2ULL}) {
        const SyntheticDataset out = generate(synthetic_preset("paper", seed));
        for (std::size_t i = 0; i < 4; ++i) {
            const double expected = static_cast<double>(i) + 0.5;
            CHECK(std::fabs(mean(out.v_true[i]) - expected) <= 0.1);
        }
    }
}
