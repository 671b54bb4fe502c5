#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "snmf/model.hpp"

namespace snmf {

/// Filesystem-level failure (missing file, unreadable, unwritable). Format
/// and validation problems are std::invalid_argument instead.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double x);

// --- dense CSV -------------------------------------------------------------

/// Comma-separated rows of non-negative decimals. A single leading header row
/// is auto-detected (first row with a non-numeric cell) and skipped. Errors
/// name the offending 1-based row and column.
DenseMatrix load_dense_csv(const std::filesystem::path& path);
void write_dense_csv(const std::filesystem::path& path, const DenseMatrix& m);

// --- sparse coordinate text ("row col value", whitespace-separated, 0-based)

/// Values must be positive; duplicate (row, col) pairs are summed. Lines that
/// are blank or start with '#' are skipped.
SparseMatrix load_sparse_coo(const std::filesystem::path& path, std::size_t rows,
                             std::size_t cols);
void write_sparse_coo(const std::filesystem::path& path, const SparseMatrix& m);

/// One token per line; line index = column index.
std::vector<std::string> load_vocab(const std::filesystem::path& path);

// --- TF-IDF -----------------------------------------------------------------

/// Smoothed TF-IDF over raw term counts (documents as rows):
///   tf = raw count, idf = ln((1 + D) / (1 + df)) + 1,
/// rows then scaled to unit Euclidean norm (zero rows stay zero). D is the
/// total document count of the input.
SparseMatrix tfidf(const SparseMatrix& counts);

/// Same transform with document frequencies and D pooled across strata, so
/// every stratum is weighted against the global corpus.
std::vector<SparseMatrix> tfidf(const std::vector<SparseMatrix>& strata_counts);

// --- manifest ----------------------------------------------------------------

struct StratumEntry {
    std::string name;
    std::string path;    // relative paths resolve against the manifest's directory
    std::string format;  // "dense-csv" or "sparse-coo"
    std::size_t rows = 0;  // required for sparse-coo
};

struct Manifest {
    std::size_t cols = 0;  // shared column count of the stored files
    std::vector<StratumEntry> strata;
    std::string vocab_path;  // optional
    bool apply_tfidf = false;
    std::vector<std::size_t> exclude_columns;  // 0-based indices into the stored columns
};

Manifest load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const Manifest& manifest);

struct LoadedStrata {
    StrataDataset dataset;
    std::vector<std::string> vocab;  // empty when the manifest names none
};

/// Loads every stratum, applies the column exclusion list and, if requested,
/// global TF-IDF (sparse strata only).
LoadedStrata load_strata(const Manifest& manifest, const std::filesystem::path& base_dir);

// --- model store ---------------------------------------------------------------

/// One dense CSV per matrix (H.csv, W_0.csv.., v_0.csv.. with vectors stored
/// as a single row) plus model.json holding shapes, stratum names and the fit
/// configuration. Round-trips are bit-exact.
void save_model(const Model& model, const std::filesystem::path& dir,
                const std::vector<std::string>& stratum_names, const FitConfig& config);

struct StoredModel {
    Model model;
    std::vector<std::string> stratum_names;
    FitConfig config;
};

StoredModel load_model(const std::filesystem::path& dir);

}  // namespace snmf
