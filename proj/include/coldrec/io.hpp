#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

#include "coldrec/cer.hpp"
#include "coldrec/evaluation.hpp"
#include "coldrec/features.hpp"
#include "coldrec/folds.hpp"
#include "coldrec/interactions.hpp"

namespace coldrec::io {

namespace fs = std::filesystem;

/// Raised for malformed input files; the message carries path and line.
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Writes through a temporary sibling and renames it into place.
void write_text_atomic(const fs::path& path, const std::string& content);
void write_binary_atomic(const fs::path& path, const std::string& bytes);

/// Builds a directory under a temporary name and renames it over `target`
/// when `fill` returns; on exception the temporary directory is removed.
void build_dir_atomic(const fs::path& target, const std::function<void(const fs::path&)>& fill);

std::string read_file(const fs::path& path);

// Interactions: CSV `user_id,item_id,rating[,timestamp]`.
std::vector<RawRating> read_ratings_csv(const fs::path& path);
std::string interactions_csv(const InteractionMatrix& m, const IdMap& users, const IdMap& items);

// Id maps: CSV `index,id`.
std::string idmap_csv(const IdMap& map);
IdMap read_idmap_csv(const fs::path& path);

/// fold<k>/{train,warm_test,cold_test}.csv and cold_items.txt, plus
/// users.csv and items.csv at the root.
void write_folds(const fs::path& dir, const std::vector<FoldSplit>& folds, const IdMap& users,
                 const IdMap& items);
struct LoadedFolds {
  IdMap users;
  IdMap items;
  std::vector<FoldSplit> folds;
};
LoadedFolds read_folds(const fs::path& dir);

// FMAT binary: "FMAT", u32 version = 1, u64 rows, u64 cols, rows x
// (u32 length + UTF-8 id), rows * cols little-endian f64 row-major.
std::string fmat_bytes(const FeatureMatrix& m);
FeatureMatrix parse_fmat(const std::string& bytes, const std::string& origin = "<memory>");
void write_fmat(const fs::path& path, const FeatureMatrix& m);
FeatureMatrix read_fmat(const fs::path& path);

// Item-level CSV `item_id,f0,...,f{D-1}`.
std::string feature_csv(const FeatureMatrix& m);
FeatureMatrix read_feature_csv(const fs::path& path);
/// Dispatches on extension: .fmat binary, anything else CSV.
FeatureMatrix read_features(const fs::path& path);

// Frame descriptors: headerless CSV, T rows x D columns, one file per item.
std::string frames_csv(const RowMatrix& frames);
FrameFeatureMatrix read_frames_csv(const fs::path& path, const std::string& item_id);
/// Every `<item_id>.csv` in `dir`, sorted by item id.
std::vector<FrameFeatureMatrix> read_frames_dir(const fs::path& dir);

// Genres: CSV `item_id,genres` with `|`-separated labels.
std::string genres_csv(const GenreMatrix& g);
std::vector<ItemGenres> read_genres_csv(const fs::path& path);

// Model directory: hyper.json, U.fmat, V.fmat, W.fmat, training_log.csv.
nlohmann::json hyper_to_json(const CerHyperParams& h);
CerHyperParams hyper_from_json(const nlohmann::json& j, CerHyperParams base = {});
void save_model(const fs::path& dir, const CerModel& model, const IdMap* users = nullptr,
                const IdMap* items = nullptr);
CerModel load_model(const fs::path& dir);

// Reports.
nlohmann::json report_to_json(const EvaluationReport& r);
EvaluationReport report_from_json(const nlohmann::json& j);
/// Long form `metric,cutoff,fold,value`.
std::string report_csv(const EvaluationReport& r);

struct ReportRow {
  std::string label;
  EvaluationReport report;
};
/// One row per run, columns per (metric, cutoff) cross-fold means, column
/// maxima in bold. Cutoff sets must agree across runs.
std::string comparison_markdown(const std::vector<ReportRow>& rows);
std::string comparison_csv(const std::vector<ReportRow>& rows);

}  // namespace coldrec::io
