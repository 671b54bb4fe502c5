#include "snmf/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "snmf/rng.hpp"

namespace snmf {

namespace {

using nlohmann::json;

bool parse_number(std::string_view text, double& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto result = std::from_chars(first, last, out);
    return result.ec == std::errc() && result.ptr == last;
}

bool parse_index(std::string_view text, std::size_t& out) {
    const char* first = text.data();
    const char* last = text.data() + text.size();
    unsigned long long value = 0;
    const auto result = std::from_chars(first, last, value);
    if (result.ec != std::errc() || result.ptr != last) {
        return false;
    }
    out = static_cast<std::size_t>(value);
    return true;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return cells;
}

std::ifstream open_for_read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open " + path.string() + " for reading");
    }
    return in;
}

std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot open " + path.string() + " for writing");
    }
    return out;
}

json parse_json_file(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
}

}  // namespace

std::string format_double(double x) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, result.ptr);
}

DenseMatrix load_dense_csv(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t data_rows = 0;
    std::size_t line_no = 0;
    std::string line;
    bool tried_header = false;

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            continue;
        }
        const auto cells = split_csv_line(line);
        if (data_rows == 0 && !tried_header) {
            tried_header = true;
            bool numeric = true;
            for (const auto& cell : cells) {
                double ignored;
                if (!parse_number(cell, ignored)) {
                    numeric = false;
                    break;
                }
            }
            if (!numeric) {
                continue;  // header row
            }
        }
        if (cols == 0) {
            cols = cells.size();
        } else if (cells.size() != cols) {
            throw std::invalid_argument(path.string() + ": ragged row " +
                                        std::to_string(line_no) + " has " +
                                        std::to_string(cells.size()) + " cells, expected " +
                                        std::to_string(cols));
        }
        for (std::size_t c = 0; c < cells.size(); ++c) {
            double value;
            if (!parse_number(cells[c], value) || !std::isfinite(value)) {
                throw std::invalid_argument(path.string() + ": non-numeric value at row " +
                                            std::to_string(line_no) + ", col " +
                                            std::to_string(c + 1));
            }
            if (value < 0.0) {
                throw std::invalid_argument(path.string() + ": negative value at row " +
                                            std::to_string(line_no) + ", col " +
                                            std::to_string(c + 1));
            }
            values.push_back(value);
        }
        ++data_rows;
    }
    if (data_rows == 0) {
        throw std::invalid_argument(path.string() + ": no data rows");
    }
    return DenseMatrix(data_rows, cols, std::move(values));
}

void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& m) {
    std::ofstream out = open_for_write(path);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t c = 0; c < m.cols(); ++c) {
            if (c != 0) {
                out << ',';
            }
            out << format_double(m(r, c));
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

SparseMatrix load_sparse_coo(const std::filesystem::path& path, std::size_t rows,
                             std::size_t cols) {
    std::ifstream in = open_for_read(path);
    std::vector<SparseMatrix::Triplet> triplets;
    std::string line;
    std::size_t line_no = 0;

    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view stripped = trim(line);
        if (stripped.empty() || stripped.front() == '#') {
            continue;
        }
        std::istringstream tokens{std::string(stripped)};
        std::string row_tok, col_tok, val_tok, extra;
        if (!(tokens >> row_tok >> col_tok >> val_tok) || (tokens >> extra)) {
            throw std::invalid_argument(path.string() + ": line " + std::to_string(line_no) +
                                        ": expected 'row col value'");
        }
        std::size_t row, col;
        double value;
        if (!parse_index(row_tok, row) || !parse_index(col_tok, col)) {
            throw std::invalid_argument(path.string() + ": line " + std::to_string(line_no) +
                                        ": indices must be non-negative integers");
        }
        if (!parse_number(val_tok, value) || !std::isfinite(value)) {
            throw std::invalid_argument(path.string() + ": line " + std::to_string(line_no) +
                                        ": non-numeric value");
        }
        if (row >= rows || col >= cols) {
            throw std::invalid_argument(path.string() + ": line " + std::to_string(line_no) +
                                        ": entry (" + std::to_string(row) + ", " +
                                        std::to_string(col) + ") out of bounds for " +
                                        std::to_string(rows) + "x" + std::to_string(cols));
        }
        if (!(value > 0.0)) {
            throw std::invalid_argument(path.string() + ": line " + std::to_string(line_no) +
                                        ": value must be positive");
        }
        triplets.push_back({row, col, value});
    }
    return SparseMatrix::from_triplets(rows, cols, std::move(triplets));
}

void write_sparse_coo(const std::filesystem::path& path, const SparseMatrix& m) {
    std::ofstream out = open_for_write(path);
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto cols = m.row_cols(r);
        const auto vals = m.row_vals(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            out << r << ' ' << cols[k] << ' ' << format_double(vals[k]) << '\n';
        }
    }
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

std::vector<std::string> load_vocab(const std::filesystem::path& path) {
    std::ifstream in = open_for_read(path);
    std::vector<std::string> vocab;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        vocab.push_back(line);
    }
    return vocab;
}

namespace {

std::vector<std::size_t> document_frequencies(const SparseMatrix& counts) {
    std::vector<std::size_t> df(counts.cols(), 0);
    for (std::size_t r = 0; r < counts.rows(); ++r) {
        for (std::size_t col : counts.row_cols(r)) {
            ++df[col];
        }
    }
    return df;
}

std::vector<double> smoothed_idf(const std::vector<std::size_t>& df, std::size_t docs) {
    std::vector<double> idf(df.size());
    for (std::size_t j = 0; j < df.size(); ++j) {
        idf[j] = std::log((1.0 + static_cast<double>(docs)) /
                          (1.0 + static_cast<double>(df[j]))) +
                 1.0;
    }
    return idf;
}

SparseMatrix apply_tfidf(const SparseMatrix& counts, const std::vector<double>& idf) {
    std::vector<SparseMatrix::Triplet> triplets;
    triplets.reserve(counts.nnz());
    for (std::size_t r = 0; r < counts.rows(); ++r) {
        const auto cols = counts.row_cols(r);
        const auto vals = counts.row_vals(r);
        double norm_sq = 0.0;
        for (std::size_t k = 0; k < cols.size(); ++k) {
            const double w = vals[k] * idf[cols[k]];
            norm_sq += w * w;
        }
        if (norm_sq == 0.0) {
            continue;  // empty document stays a zero row
        }
        const double scale = 1.0 / std::sqrt(norm_sq);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            triplets.push_back({r, cols[k], vals[k] * idf[cols[k]] * scale});
        }
    }
    return SparseMatrix::from_triplets(counts.rows(), counts.cols(), std::move(triplets));
}

}  // namespace

SparseMatrix tfidf(const SparseMatrix& counts) {
    return apply_tfidf(counts, smoothed_idf(document_frequencies(counts), counts.rows()));
}

std::vector<SparseMatrix> tfidf(const std::vector<SparseMatrix>& strata_counts) {
    if (strata_counts.empty()) {
        return {};
    }
    const std::size_t cols = strata_counts[0].cols();
    std::vector<std::size_t> df(cols, 0);
    std::size_t docs = 0;
    for (const auto& counts : strata_counts) {
        if (counts.cols() != cols) {
            throw std::invalid_argument("tfidf: strata column counts differ");
        }
        docs += counts.rows();
        const auto local = document_frequencies(counts);
        for (std::size_t j = 0; j < cols; ++j) {
            df[j] += local[j];
        }
    }
    const auto idf = smoothed_idf(df, docs);
    std::vector<SparseMatrix> out;
    out.reserve(strata_counts.size());
    for (const auto& counts : strata_counts) {
        out.push_back(apply_tfidf(counts, idf));
    }
    return out;
}

Manifest load_manifest(const std::filesystem::path& path) {
    const json j = parse_json_file(path);
    Manifest manifest;
    try {
        manifest.cols = j.at("n").get<std::size_t>();
        for (const auto& entry : j.at("strata")) {
            StratumEntry s;
            s.name = entry.at("name").get<std::string>();
            s.path = entry.at("path").get<std::string>();
            s.format = entry.at("format").get<std::string>();
            if (s.format == "sparse-coo") {
                s.rows = entry.at("rows").get<std::size_t>();
            } else if (s.format != "dense-csv") {
                throw std::invalid_argument("unknown stratum format: " + s.format);
            }
            manifest.strata.push_back(std::move(s));
        }
        if (j.contains("vocab")) {
            manifest.vocab_path = j.at("vocab").get<std::string>();
        }
        if (j.contains("tfidf")) {
            manifest.apply_tfidf = j.at("tfidf").get<bool>();
        }
        if (j.contains("exclude_columns")) {
            for (const auto& c : j.at("exclude_columns")) {
                manifest.exclude_columns.push_back(c.get<std::size_t>());
            }
        }
    } catch (const json::exception& e) {
        throw std::invalid_argument(path.string() + ": " + e.what());
    }
    if (manifest.strata.empty()) {
        throw std::invalid_argument(path.string() + ": manifest declares no strata");
    }
    for (std::size_t i = 0; i < manifest.strata.size(); ++i) {
        for (std::size_t k = i + 1; k < manifest.strata.size(); ++k) {
            if (manifest.strata[i].name == manifest.strata[k].name) {
                throw std::invalid_argument(path.string() + ": duplicate stratum name '" +
                                            manifest.strata[i].name + "'");
            }
        }
    }
    return manifest;
}

void write_manifest(const std::filesystem::path& path, const Manifest& manifest) {
    json j;
    j["n"] = manifest.cols;
    j["strata"] = json::array();
    for (const auto& s : manifest.strata) {
        json entry;
        entry["name"] = s.name;
        entry["path"] = s.path;
        entry["format"] = s.format;
        if (s.format == "sparse-coo") {
            entry["rows"] = s.rows;
        }
        j["strata"].push_back(entry);
    }
    if (!manifest.vocab_path.empty()) {
        j["vocab"] = manifest.vocab_path;
    }
    if (manifest.apply_tfidf) {
        j["tfidf"] = true;
    }
    if (!manifest.exclude_columns.empty()) {
        j["exclude_columns"] = manifest.exclude_columns;
    }
    std::ofstream out = open_for_write(path);
    out << j.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + path.string());
    }
}

namespace {

std::vector<std::size_t> kept_columns(std::size_t cols,
                                      const std::vector<std::size_t>& excluded) {
    std::vector<bool> drop(cols, false);
    for (std::size_t c : excluded) {
        if (c >= cols) {
            throw std::invalid_argument("exclude_columns: index " + std::to_string(c) +
                                        " out of range for " + std::to_string(cols) +
                                        " columns");
        }
        drop[c] = true;
    }
    std::vector<std::size_t> keep;
    keep.reserve(cols);
    for (std::size_t c = 0; c < cols; ++c) {
        if (!drop[c]) {
            keep.push_back(c);
        }
    }
    if (keep.empty()) {
        throw std::invalid_argument("exclude_columns: all columns excluded");
    }
    return keep;
}

DenseMatrix select_columns(const DenseMatrix& m, const std::vector<std::size_t>& keep) {
    DenseMatrix out(m.rows(), keep.size());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        for (std::size_t k = 0; k < keep.size(); ++k) {
            out(r, k) = m(r, keep[k]);
        }
    }
    return out;
}

SparseMatrix select_columns(const SparseMatrix& m, const std::vector<std::size_t>& keep) {
    std::vector<std::size_t> remap(m.cols(), SIZE_MAX);
    for (std::size_t k = 0; k < keep.size(); ++k) {
        remap[keep[k]] = k;
    }
    std::vector<SparseMatrix::Triplet> triplets;
    triplets.reserve(m.nnz());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        const auto cols = m.row_cols(r);
        const auto vals = m.row_vals(r);
        for (std::size_t k = 0; k < cols.size(); ++k) {
            if (remap[cols[k]] != SIZE_MAX) {
                triplets.push_back({r, remap[cols[k]], vals[k]});
            }
        }
    }
    return SparseMatrix::from_triplets(m.rows(), keep.size(), std::move(triplets));
}

}  // namespace

LoadedStrata load_strata(const Manifest& manifest, const std::filesystem::path& base_dir) {
    const auto keep = kept_columns(manifest.cols, manifest.exclude_columns);
    const bool pruning = keep.size() != manifest.cols;

    std::vector<StratumMatrix> strata;
    std::vector<std::string> names;
    std::vector<SparseMatrix> sparse_counts;  // only used when apply_tfidf
    for (const auto& entry : manifest.strata) {
        std::filesystem::path p(entry.path);
        if (p.is_relative()) {
            p = base_dir / p;
        }
        names.push_back(entry.name);
        if (entry.format == "dense-csv") {
            if (manifest.apply_tfidf) {
                throw std::invalid_argument(
                    "manifest requests tfidf but stratum '" + entry.name +
                    "' is dense-csv; tfidf input must be sparse-coo term counts");
            }
            DenseMatrix m = load_dense_csv(p);
            if (m.cols() != manifest.cols) {
                throw std::invalid_argument(p.string() + ": has " + std::to_string(m.cols()) +
                                            " columns, manifest declares " +
                                            std::to_string(manifest.cols));
            }
            strata.emplace_back(pruning ? select_columns(m, keep) : std::move(m));
        } else {
            SparseMatrix m = load_sparse_coo(p, entry.rows, manifest.cols);
            if (pruning) {
                m = select_columns(m, keep);
            }
            if (manifest.apply_tfidf) {
                sparse_counts.push_back(std::move(m));
                strata.emplace_back(SparseMatrix());  // placeholder, filled below
            } else {
                strata.emplace_back(std::move(m));
            }
        }
    }
    if (manifest.apply_tfidf) {
        auto transformed = tfidf(sparse_counts);
        for (std::size_t i = 0; i < transformed.size(); ++i) {
            strata[i] = std::move(transformed[i]);
        }
    }

    LoadedStrata out{StrataDataset(std::move(strata), std::move(names)), {}};
    if (!manifest.vocab_path.empty()) {
        std::filesystem::path vp(manifest.vocab_path);
        if (vp.is_relative()) {
            vp = base_dir / vp;
        }
        auto vocab = load_vocab(vp);
        if (vocab.size() != manifest.cols) {
            throw std::invalid_argument(vp.string() + ": has " + std::to_string(vocab.size()) +
                                        " entries, manifest declares " +
                                        std::to_string(manifest.cols) + " columns");
        }
        if (pruning) {
            std::vector<std::string> kept;
            kept.reserve(keep.size());
            for (std::size_t c : keep) {
                kept.push_back(std::move(vocab[c]));
            }
            vocab = std::move(kept);
        }
        out.vocab = std::move(vocab);
    }
    return out;
}

namespace {

json config_to_json(const FitConfig& config) {
    json j;
    j["rank"] = config.rank;
    j["outer_iters"] = config.outer_iters;
    j["inner_v_updates"] = config.inner_v_updates;
    j["eps"] = config.eps;
    j["seed"] = config.seed;
    j["log_every"] = config.log_every;
    j["rng"] = UniformRng::algorithm_id();
    return j;
}

FitConfig config_from_json(const json& j) {
    FitConfig config;
    config.rank = j.at("rank").get<std::size_t>();
    config.outer_iters = j.at("outer_iters").get<std::size_t>();
    config.inner_v_updates = j.at("inner_v_updates").get<std::size_t>();
    config.eps = j.at("eps").get<double>();
    config.seed = j.at("seed").get<std::uint64_t>();
    config.log_every = j.at("log_every").get<std::size_t>();
    if (j.contains("rng") && j.at("rng").get<std::string>() != UniformRng::algorithm_id()) {
        throw std::invalid_argument("model was produced with generator '" +
                                    j.at("rng").get<std::string>() + "', this build uses '" +
                                    UniformRng::algorithm_id() + "'");
    }
    return config;
}

DenseMatrix load_matrix_checked(const std::filesystem::path& path, std::size_t rows,
                                std::size_t cols) {
    if (!std::filesystem::exists(path)) {
        throw IoError("missing model file: " + path.string());
    }
    DenseMatrix m = load_dense_csv(path);
    if (m.rows() != rows || m.cols() != cols) {
        throw std::invalid_argument(path.string() + ": is " + std::to_string(m.rows()) + "x" +
                                    std::to_string(m.cols()) + ", metadata expects " +
                                    std::to_string(rows) + "x" + std::to_string(cols));
    }
    return m;
}

}  // namespace

void save_model(const Model& model, const std::filesystem::path& dir,
                const std::vector<std::string>& stratum_names, const FitConfig& config) {
    const std::size_t s = model.stratum_count();
    if (stratum_names.size() != s) {
        throw std::invalid_argument("save_model: got " + std::to_string(stratum_names.size()) +
                                    " names for " + std::to_string(s) + " strata");
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) {
        throw IoError("cannot create " + dir.string() + ": " + ec.message());
    }

    json meta;
    meta["rank"] = model.rank();
    meta["cols"] = model.cols();
    meta["strata"] = json::array();
    for (std::size_t i = 0; i < s; ++i) {
        json entry;
        entry["name"] = stratum_names[i];
        entry["rows"] = model.w[i].rows();
        meta["strata"].push_back(entry);
    }
    meta["config"] = config_to_json(config);

    write_dense_csv(dir / "H.csv", model.h);
    for (std::size_t i = 0; i < s; ++i) {
        write_dense_csv(dir / ("W_" + std::to_string(i) + ".csv"), model.w[i]);
        DenseMatrix row(1, model.v[i].size());
        for (std::size_t j = 0; j < model.v[i].size(); ++j) {
            row(0, j) = model.v[i][j];
        }
        write_dense_csv(dir / ("v_" + std::to_string(i) + ".csv"), row);
    }
    std::ofstream out = open_for_write(dir / "model.json");
    out << meta.dump(2) << '\n';
    if (!out) {
        throw IoError("failed writing " + (dir / "model.json").string());
    }
}

StoredModel load_model(const std::filesystem::path& dir) {
    const std::filesystem::path meta_path = dir / "model.json";
    if (!std::filesystem::exists(meta_path)) {
        throw IoError("missing model file: " + meta_path.string());
    }
    const json meta = parse_json_file(meta_path);

    StoredModel stored;
    std::size_t rank, cols;
    std::vector<std::size_t> rows;
    try {
        rank = meta.at("rank").get<std::size_t>();
        cols = meta.at("cols").get<std::size_t>();
        for (const auto& entry : meta.at("strata")) {
            stored.stratum_names.push_back(entry.at("name").get<std::string>());
            rows.push_back(entry.at("rows").get<std::size_t>());
        }
        stored.config = config_from_json(meta.at("config"));
    } catch (const json::exception& e) {
        throw std::invalid_argument(meta_path.string() + ": " + e.what());
    }
    if (rows.empty()) {
        throw std::invalid_argument(meta_path.string() + ": metadata declares no strata");
    }

    stored.model.h = load_matrix_checked(dir / "H.csv", rank, cols);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        stored.model.w.push_back(
            load_matrix_checked(dir / ("W_" + std::to_string(i) + ".csv"), rows[i], rank));
        const DenseMatrix v_row =
            load_matrix_checked(dir / ("v_" + std::to_string(i) + ".csv"), 1, cols);
        Vector v(cols);
        for (std::size_t j = 0; j < cols; ++j) {
            v[j] = v_row(0, j);
        }
        stored.model.v.push_back(std::move(v));
    }
    return stored;
}

}  // namespace snmf
