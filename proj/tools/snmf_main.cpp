#include <charconv>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "snmf/datagen.hpp"
#include "snmf/engine.hpp"
#include "snmf/io.hpp"
#include "snmf/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') {
            out += "\"\"";
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p);
    if (!f) {
        throw snmf::IoError("cannot open " + p.string() + " for writing");
    }
    return f;
}

void finish(std::ofstream& f, const fs::path& p) {
    if (!f) {
        throw snmf::IoError("failed writing " + p.string());
    }
}

struct FitArgs {
    std::string manifest;
    std::size_t rank = 1;
    std::size_t iters = 100;
    std::size_t v_updates = 2;
    double eps = 1e-9;
    std::uint64_t seed = 0;
    std::size_t log_every = 1;
    std::string out;
};

int run_fit(const FitArgs& args) {
    const fs::path manifest_path(args.manifest);
    const snmf::Manifest manifest = snmf::load_manifest(manifest_path);
    const snmf::LoadedStrata loaded =
        snmf::load_strata(manifest, manifest_path.parent_path());
    const snmf::StrataDataset& dataset = loaded.dataset;

    snmf::FitConfig config;
    config.rank = args.rank;
    config.outer_iters = args.iters;
    config.inner_v_updates = args.v_updates;
    config.eps = args.eps;
    config.seed = args.seed;
    config.log_every = args.log_every;
    snmf::validate(config);

    const fs::path out(args.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw snmf::IoError("cannot create " + out.string() + ": " + ec.message());
    }

    struct MeansRow {
        std::size_t iteration;
        std::vector<double> means;
    };
    std::vector<MeansRow> means_trace;
    const auto observer = [&](std::size_t iteration, const snmf::Model& m) {
        means_trace.push_back({iteration, snmf::strata_means(m)});
    };

    const auto t0 = std::chrono::steady_clock::now();
    auto [model, trace] = snmf::fit(dataset, config, observer);
    const double wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    snmf::save_model(model, out / "model", dataset.names(), config);

    // The effective vocabulary (exclusions applied), so report --vocab has a
    // file that matches the model's columns.
    if (!loaded.vocab.empty()) {
        const fs::path p = out / "vocab.txt";
        std::ofstream f = open_out(p);
        for (const std::string& token : loaded.vocab) {
            f << token << '\n';
        }
        finish(f, p);
    }

    {
        const fs::path p = out / "loss_trace.csv";
        std::ofstream f = open_out(p);
        f << "iteration,loss,normalized_loss\n";
        for (const auto& e : trace.entries) {
            f << e.iteration << ',' << snmf::format_double(e.loss) << ','
              << snmf::format_double(e.normalized_loss) << '\n';
        }
        finish(f, p);
    }

    const std::vector<double> final_means = snmf::strata_means(model);
    {
        const fs::path p = out / "strata_means.csv";
        std::ofstream f = open_out(p);
        f << "stratum,mean\n";
        for (std::size_t i = 0; i < final_means.size(); ++i) {
            f << csv_escape(dataset.name(i)) << ',' << snmf::format_double(final_means[i])
              << '\n';
        }
        finish(f, p);
    }
    {
        const fs::path p = out / "strata_means_trace.csv";
        std::ofstream f = open_out(p);
        f << "iteration,stratum,mean\n";
        for (const auto& row : means_trace) {
            for (std::size_t i = 0; i < row.means.size(); ++i) {
                f << row.iteration << ',' << csv_escape(dataset.name(i)) << ','
                  << snmf::format_double(row.means[i]) << '\n';
            }
        }
        finish(f, p);
    }

    json report;
    report["config"] = {{"rank", config.rank},
                        {"iters", config.outer_iters},
                        {"v_updates", config.inner_v_updates},
                        {"eps", config.eps},
                        {"seed", config.seed},
                        {"log_every", config.log_every},
                        {"rng", snmf::UniformRng::algorithm_id()}};
    report["final_loss"] = trace.entries.back().loss;
    report["final_normalized_loss"] = trace.entries.back().normalized_loss;
    report["strata_means"] = json::array();
    for (std::size_t i = 0; i < final_means.size(); ++i) {
        report["strata_means"].push_back(
            {{"stratum", dataset.name(i)}, {"mean", final_means[i]}});
    }
    report["wall_time_seconds"] = wall_seconds;
    report["outputs"] = {{"model_dir", "model"},
                         {"loss_trace", "loss_trace.csv"},
                         {"strata_means", "strata_means.csv"},
                         {"strata_means_trace", "strata_means_trace.csv"}};
    if (!loaded.vocab.empty()) {
        report["outputs"]["vocab"] = "vocab.txt";
    }
    {
        const fs::path p = out / "report.json";
        std::ofstream f = open_out(p);
        f << report.dump(2) << '\n';
        finish(f, p);
    }

    std::cout << "fit: " << dataset.stratum_count() << " strata, n=" << dataset.cols()
              << ", rank=" << config.rank << ", iters=" << config.outer_iters << '\n';
    std::cout << "final loss=" << snmf::format_double(trace.entries.back().loss)
              << " normalized_loss="
              << snmf::format_double(trace.entries.back().normalized_loss) << '\n';
    std::cout << "outputs written to " << out.string() << '\n';
    return 0;
}

struct SynthArgs {
    std::string preset;
    std::size_t strata = 0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::size_t inner_rank = 1;
    std::vector<std::string> shifts;
    bool shared_product = false;
    std::uint64_t seed = 0;
    std::string out;
};

double parse_bound(const std::string& text) {
    double value = 0.0;
    const auto result = std::from_chars(text.data(), text.data() + text.size(), value);
    if (result.ec != std::errc() || result.ptr != text.data() + text.size()) {
        throw std::invalid_argument("--shifts: cannot parse bound '" + text + "'");
    }
    return value;
}

int run_synth(const SynthArgs& args) {
    snmf::SyntheticSpec spec;
    if (!args.preset.empty()) {
        spec = snmf::synthetic_preset(args.preset, args.seed);
    } else {
        if (args.strata == 0 || args.rows == 0 || args.cols == 0) {
            throw std::invalid_argument(
                "synth needs either --preset or --strata/--rows/--cols");
        }
        spec.strata = args.strata;
        spec.rows = args.rows;
        spec.cols = args.cols;
        spec.inner_rank = args.inner_rank;
        spec.shared_product = args.shared_product;
        spec.seed = args.seed;
        if (args.shifts.empty()) {
            spec.shift_low.assign(spec.strata, 0.0);
            spec.shift_high.assign(spec.strata, 1.0);
        } else {
            if (args.shifts.size() != spec.strata) {
                throw std::invalid_argument("--shifts: got " +
                                            std::to_string(args.shifts.size()) +
                                            " ranges for " + std::to_string(spec.strata) +
                                            " strata");
            }
            for (const std::string& range : args.shifts) {
                const std::size_t colon = range.find(':');
                if (colon == std::string::npos) {
                    throw std::invalid_argument("--shifts: expected lo:hi, got '" + range +
                                                "'");
                }
                spec.shift_low.push_back(parse_bound(range.substr(0, colon)));
                spec.shift_high.push_back(parse_bound(range.substr(colon + 1)));
            }
        }
    }

    const snmf::SyntheticDataset synth = snmf::generate(spec);

    const fs::path out(args.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw snmf::IoError("cannot create " + out.string() + ": " + ec.message());
    }

    snmf::Manifest manifest;
    manifest.cols = spec.cols;
    for (std::size_t i = 0; i < spec.strata; ++i) {
        const std::string a_name = "A_" + std::to_string(i) + ".csv";
        snmf::write_dense_csv(out / a_name, snmf::to_dense(synth.dataset.stratum(i)));

        snmf::DenseMatrix v_row(1, spec.cols);
        for (std::size_t j = 0; j < spec.cols; ++j) {
            v_row(0, j) = synth.v_true[i][j];
        }
        snmf::write_dense_csv(out / ("v_true_" + std::to_string(i) + ".csv"), v_row);

        manifest.strata.push_back({synth.dataset.name(i), a_name, "dense-csv", 0});
    }
    snmf::write_manifest(out / "manifest.json", manifest);

    std::cout << "synth: " << spec.strata << " strata of " << spec.rows << "x" << spec.cols
              << ", inner rank " << spec.inner_rank << ", seed " << spec.seed << '\n';
    std::cout << "outputs written to " << out.string() << '\n';
    return 0;
}

struct ReportArgs {
    std::string model_dir;
    std::size_t k = 3;
    std::string vocab;
    std::string out;
};

int run_report(const ReportArgs& args) {
    const snmf::StoredModel stored = snmf::load_model(args.model_dir);
    const snmf::Model& model = stored.model;
    const std::size_t n = model.cols();

    std::vector<std::string> vocab;
    if (!args.vocab.empty()) {
        vocab = snmf::load_vocab(args.vocab);
        if (vocab.size() != n) {
            throw std::invalid_argument(args.vocab + ": has " +
                                        std::to_string(vocab.size()) +
                                        " entries, model has " + std::to_string(n) +
                                        " columns");
        }
    }

    // Validate before any file is created so a bad k leaves no partial output.
    std::vector<std::vector<snmf::TopFeature>> tops;
    for (std::size_t i = 0; i < model.stratum_count(); ++i) {
        tops.push_back(snmf::topk_features(model, i, args.k));
    }

    const fs::path out = args.out.empty() ? fs::path(args.model_dir) : fs::path(args.out);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) {
        throw snmf::IoError("cannot create " + out.string() + ": " + ec.message());
    }

    {
        const fs::path p = out / "topk.csv";
        std::ofstream f = open_out(p);
        f << "stratum,rank,feature,weight\n";
        for (std::size_t i = 0; i < model.stratum_count(); ++i) {
            for (std::size_t order = 0; order < tops[i].size(); ++order) {
                const std::string label = vocab.empty()
                                              ? std::to_string(tops[i][order].index)
                                              : vocab[tops[i][order].index];
                f << csv_escape(stored.stratum_names[i]) << ',' << (order + 1) << ','
                  << csv_escape(label) << ','
                  << snmf::format_double(tops[i][order].weight) << '\n';
            }
        }
        finish(f, p);
    }

    bool any_zero_sum = false;
    {
        const fs::path p = out / "normalized_v.csv";
        std::ofstream f = open_out(p);
        f << "stratum,index,value\n";
        for (std::size_t i = 0; i < model.stratum_count(); ++i) {
            double sum = 0.0;
            for (double x : model.v[i].values()) {
                sum += x;
            }
            if (!(sum > 0.0)) {
                std::cerr << "error: stratum '" << stored.stratum_names[i]
                          << "' has zero-sum v, skipped in normalized_v.csv\n";
                any_zero_sum = true;
                continue;
            }
            for (std::size_t j = 0; j < n; ++j) {
                f << csv_escape(stored.stratum_names[i]) << ',' << j << ','
                  << snmf::format_double(model.v[i][j] / sum) << '\n';
            }
        }
        finish(f, p);
    }

    std::cout << "report written to " << out.string() << '\n';
    return any_zero_sum ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stratified non-negative matrix factorization"};
    app.require_subcommand(1);

    FitArgs fit_args;
    CLI::App* fit = app.add_subcommand("fit", "Fit a model to the strata in a manifest");
    fit->add_option("manifest", fit_args.manifest, "Path to manifest.json")->required();
    fit->add_option("--rank", fit_args.rank, "Factorization rank r")->required();
    fit->add_option("--iters", fit_args.iters, "Outer iterations")->capture_default_str();
    fit->add_option("--v-updates", fit_args.v_updates, "Inner v updates per iteration")
        ->capture_default_str();
    fit->add_option("--eps", fit_args.eps, "Denominator guard")->capture_default_str();
    fit->add_option("--seed", fit_args.seed, "Seed for the initial model")
        ->capture_default_str();
    fit->add_option("--log-every", fit_args.log_every, "Trace cadence")
        ->capture_default_str();
    fit->add_option("--out", fit_args.out, "Output directory")->required();

    SynthArgs synth_args;
    CLI::App* synth = app.add_subcommand("synth", "Generate a synthetic dataset");
    synth->add_option("--preset", synth_args.preset, "Named preset (paper)");
    synth->add_option("--strata", synth_args.strata, "Number of strata");
    synth->add_option("--rows", synth_args.rows, "Rows per stratum");
    synth->add_option("--cols", synth_args.cols, "Columns");
    synth->add_option("--inner-rank", synth_args.inner_rank,
                      "Rank of the planted product (0 gives a pure shift)")
        ->capture_default_str();
    synth->add_option("--shifts", synth_args.shifts,
                      "Per-stratum shift bounds lo:hi, comma separated")
        ->delimiter(',');
    synth->add_flag("--shared-product", synth_args.shared_product,
                    "Reuse one base product for every stratum");
    synth->add_option("--seed", synth_args.seed, "Generator seed")->capture_default_str();
    synth->add_option("--out", synth_args.out, "Output directory")->required();

    ReportArgs report_args;
    CLI::App* report = app.add_subcommand("report", "Summarize a saved model");
    report->add_option("model_dir", report_args.model_dir, "Saved model directory")
        ->required();
    report->add_option("--k", report_args.k, "Features per stratum in topk.csv")
        ->capture_default_str();
    report->add_option("--vocab", report_args.vocab, "Vocabulary file for feature labels");
    report->add_option("--out", report_args.out,
                       "Output directory (default: the model directory)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(fit)) {
            return run_fit(fit_args);
        }
        if (app.got_subcommand(synth)) {
            return run_synth(synth_args);
        }
        return run_report(report_args);
    } catch (const snmf::IoError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
