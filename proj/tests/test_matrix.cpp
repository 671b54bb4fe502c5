#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <stdexcept>

#include "snmf/matrix.hpp"
#include "test_support.hpp"

using namespace snmf;

TEST_CASE("construction validates entries") {
    CHECK_THROWS_AS(Vector({1.0, -0.5}), std::invalid_argument);
    CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, -2.0}), std::invalid_argument);
    CHECK_THROWS_AS(DenseMatrix(2, 2, {1.0, 2.0, 3.0}), std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 0, 0.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 0, -1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{2, 0, 1.0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, 2, {{0, 2, 1.0}}),
                    std::invalid_argument);
}

TEST_CASE("sparse triplets are summed and sorted") {
    const SparseMatrix m = SparseMatrix::from_triplets(
        2, 3, {{1, 2, 1.0}, {0, 1, 2.0}, {1, 0, 4.0}, {0, 1, 3.0}});
    CHECK(m.nnz() == 3);
    REQUIRE(m.row_cols(0).size() == 1);
    CHECK(m.row_cols(0)[0] == 1);
    CHECK(m.row_vals(0)[0] == 5.0);
    REQUIRE(m.row_cols(1).size() == 2);
    CHECK(m.row_cols(1)[0] == 0);
    CHECK(m.row_cols(1)[1] == 2);
    CHECK(m.row_vals(1)[0] == 4.0);
    CHECK(m.row_vals(1)[1] == 1.0);

    const DenseMatrix d = m.to_dense();
    CHECK(d == DenseMatrix::from_rows({{0, 5, 0}, {4, 0, 1}}));
}

TEST_CASE("matmul identity") {
    const DenseMatrix eye = DenseMatrix::from_rows({{1, 0}, {0, 1}});
    const DenseMatrix b = DenseMatrix::from_rows({{5, 6}, {7, 8}});
    CHECK(matmul(eye, b) == b);
}

TEST_CASE("matmul hand instance") {
    const DenseMatrix a = DenseMatrix::from_rows({{1, 2}});
    const DenseMatrix b = DenseMatrix::from_rows({{3}, {4}});
    const DenseMatrix c = matmul(a, b);
    REQUIRE(c.rows() == 1);
    REQUIRE(c.cols() == 1);
    CHECK(c(0, 0) == 11.0);
}

TEST_CASE("sparse matmul hand instance") {
    const SparseMatrix a = SparseMatrix::from_triplets(2, 2, {{0, 1, 2.0}});
    const DenseMatrix b = DenseMatrix::from_rows({{1}, {1}});
    const DenseMatrix c = matmul(a, b);
    CHECK(c == DenseMatrix::from_rows({{2}, {0}}));
}

TEST_CASE("matmul rejects dimension mismatch") {
    const DenseMatrix a(2, 3);
    const DenseMatrix b(2, 2);
    CHECK_THROWS_AS(matmul(a, b), std::invalid_argument);
    CHECK_THROWS_AS(matmul_nt(a, DenseMatrix(2, 2)), std::invalid_argument);
    CHECK_THROWS_AS(matmul_tn(a, DenseMatrix(3, 2)), std::invalid_argument);
}

TEST_CASE("column_sums") {
    CHECK(column_sums(DenseMatrix::from_rows({{1, 2}, {3, 4}})) == Vector({4, 6}));
    CHECK(column_sums(DenseMatrix(2, 3)) == Vector({0, 0, 0}));
    const SparseMatrix sp = SparseMatrix::from_triplets(2, 2, {{1, 1, 5.0}});
    CHECK(column_sums(sp) == Vector({0, 5}));
}

TEST_CASE("elementwise_mul_div") {
    const auto one = [](double x) { return DenseMatrix(1, 1, {x}); };
    CHECK(elementwise_mul_div(one(2), one(3), one(3), 0.0)(0, 0) == 2.0);
    CHECK(elementwise_mul_div(one(1), one(4), one(2), 0.0)(0, 0) == 2.0);
    CHECK(elementwise_mul_div(one(0), one(9), one(0), 1e-9)(0, 0) == 0.0);
    CHECK_THROWS_AS(elementwise_mul_div(one(1), one(1), DenseMatrix(1, 2), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(elementwise_mul_div(one(1), one(1), one(1), -1.0),
                    std::invalid_argument);
}

TEST_CASE("elementwise zero is absorbing regardless of num and den") {
    const DenseMatrix x = DenseMatrix::from_rows({{0, 2}, {3, 0}});
    const DenseMatrix num = DenseMatrix::from_rows({{9, 8}, {7, 6}});
    const DenseMatrix den = DenseMatrix::from_rows({{0, 4}, {2, 0}});
    const DenseMatrix out = elementwise_mul_div(x, num, den, 0.0);
    CHECK(out(0, 0) == 0.0);
    CHECK(out(1, 1) == 0.0);
    CHECK(out(0, 1) == 4.0);
    CHECK(out(1, 0) == 10.5);
}

TEST_CASE("transpose") {
    const DenseMatrix m = DenseMatrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(transpose(m) == DenseMatrix::from_rows({{1, 4}, {2, 5}, {3, 6}}));
    CHECK(transpose(transpose(m)) == m);
}

TEST_CASE("non-negativity closure on random inputs") {
    UniformRng rng(11);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t m = rng.next_index(1, 8);
        const std::size_t k = rng.next_index(1, 8);
        const std::size_t n = rng.next_index(1, 8);
        const DenseMatrix a = testutil::random_dense(rng, m, k);
        const DenseMatrix b = testutil::random_dense(rng, k, n);
        const DenseMatrix c = testutil::random_dense(rng, m, n);

        const auto all_nonneg = [](const DenseMatrix& x) {
            for (double v : x.values()) {
                if (!(v >= 0.0)) return false;
            }
            return true;
        };
        CHECK(all_nonneg(matmul(a, b)));
        CHECK(all_nonneg(matmul_nt(b, c)));
        CHECK(all_nonneg(matmul_tn(a, a)));
        CHECK(all_nonneg(elementwise_mul_div(a, a, a, 1e-9)));
        const Vector sums = column_sums(a);
        for (double v : sums.values()) {
            CHECK(v >= 0.0);
        }
    }
}

TEST_CASE("sparse kernels agree with their densification") {
    UniformRng rng(23);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t m = rng.next_index(1, 10);
        const std::size_t k = rng.next_index(1, 10);
        const std::size_t n = rng.next_index(1, 10);
        const SparseMatrix sp = testutil::random_sparse(rng, m, k);
        const DenseMatrix dn = sp.to_dense();
        const DenseMatrix b = testutil::random_dense(rng, k, n);
        const DenseMatrix y = testutil::random_dense(rng, n, k);
        const DenseMatrix x = testutil::random_dense(rng, m, k);

        CHECK(testutil::max_rel_diff(matmul(sp, b), matmul(dn, b)) <= 1e-12);
        CHECK(testutil::max_rel_diff(matmul_nt(sp, y), matmul_nt(dn, y)) <= 1e-12);
        CHECK(testutil::max_rel_diff(matmul_tn(x, sp), matmul_tn(x, dn)) <= 1e-12);
        CHECK(testutil::max_rel_diff(column_sums(sp), column_sums(dn)) <= 1e-12);
        CHECK(testutil::rel_diff(frobenius_norm_sq(sp), frobenius_norm_sq(dn)) <= 1e-12);
    }
}

TEST_CASE("variant helpers dispatch to both representations") {
    const StratumMatrix dense = DenseMatrix::from_rows({{1, 2}, {3, 4}});
    const StratumMatrix sparse = SparseMatrix::from_triplets(2, 2, {{0, 0, 1.5}});
    CHECK(matrix_rows(dense) == 2);
    CHECK(matrix_cols(sparse) == 2);
    CHECK(to_dense(sparse) == DenseMatrix::from_rows({{1.5, 0}, {0, 0}}));
    CHECK(frobenius_norm_sq(dense) == doctest::Approx(30.0));
    CHECK(column_sums(dense) == Vector({4, 6}));
}
