#include "snmf/datagen.hpp"

#include <stdexcept>
#include <string>

#include "snmf/rng.hpp"

namespace snmf {

void validate(const SyntheticSpec& spec) {
    if (spec.strata < 1 || spec.rows < 1 || spec.cols < 1) {
        throw std::invalid_argument("SyntheticSpec: strata, rows and cols must be >= 1");
    }
    if (spec.shift_low.size() != spec.strata || spec.shift_high.size() != spec.strata) {
        throw std::invalid_argument("SyntheticSpec: need one shift bound pair per stratum");
    }
    for (std::size_t i = 0; i < spec.strata; ++i) {
        if (!(spec.shift_low[i] >= 0.0) || !(spec.shift_high[i] >= spec.shift_low[i])) {
            throw std::invalid_argument("SyntheticSpec: stratum " + std::to_string(i) +
                                        " needs 0 <= shift_low <= shift_high");
        }
    }
}

namespace {

DenseMatrix draw_uniform(UniformRng& rng, std::size_t rows, std::size_t cols) {
    DenseMatrix m(rows, cols);
    for (double& x : m.values()) {
        x = rng.next();
    }
    return m;
}

}  // namespace

SyntheticDataset generate(const SyntheticSpec& spec) {
    validate(spec);
    UniformRng rng(spec.seed);

    DenseMatrix shared_base;
    if (spec.shared_product) {
        const DenseMatrix u = draw_uniform(rng, spec.rows, spec.inner_rank);
        const DenseMatrix v = draw_uniform(rng, spec.inner_rank, spec.cols);
        shared_base = matmul(u, v);
    }

    std::vector<StratumMatrix> strata;
    std::vector<std::string> names;
    std::vector<Vector> v_true;
    strata.reserve(spec.strata);
    v_true.reserve(spec.strata);

    for (std::size_t i = 0; i < spec.strata; ++i) {
        DenseMatrix a;
        if (spec.shared_product) {
            a = shared_base;
        } else {
            const DenseMatrix u = draw_uniform(rng, spec.rows, spec.inner_rank);
            const DenseMatrix v = draw_uniform(rng, spec.inner_rank, spec.cols);
            a = matmul(u, v);
        }
        Vector shift(spec.cols);
        for (double& x : shift.values()) {
            x = rng.next(spec.shift_low[i], spec.shift_high[i]);
        }
        for (std::size_t p = 0; p < a.rows(); ++p) {
            auto row = a.row(p);
            for (std::size_t j = 0; j < a.cols(); ++j) {
                row[j] += shift[j];
            }
        }
        strata.emplace_back(std::move(a));
        names.push_back("stratum_" + std::to_string(i));
        v_true.push_back(std::move(shift));
    }

    return SyntheticDataset{StrataDataset(std::move(strata), std::move(names)),
                            std::move(v_true)};
}

SyntheticSpec synthetic_preset(std::string_view name, std::uint64_t seed) {
    if (name == "paper") {
        SyntheticSpec spec;
        spec.strata = 4;
        spec.rows = 100;
        spec.cols = 100;
        spec.inner_rank = 5;
        spec.shared_product = true;
        for (std::size_t i = 0; i < 4; ++i) {
            spec.shift_low.push_back(static_cast<double>(i));
            spec.shift_high.push_back(static_cast<double>(i) + 1.0);
        }
        spec.seed = seed;
        return spec;
    }
    throw std::invalid_argument("unknown synthetic preset: " + std::string(name));
}

}  // namespace snmf
