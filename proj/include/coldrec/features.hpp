#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coldrec/types.hpp"

namespace coldrec {

/// Frame- or segment-level descriptors of one item, T x D.
struct FrameFeatureMatrix {
  std::string item_id;
  RowMatrix values;
};

/// Item-level descriptors, one row per item, aligned with `item_ids`.
struct FeatureMatrix {
  std::vector<std::string> item_ids;
  RowMatrix values;

  Index n_items() const { return values.rows(); }
  Index dim() const { return values.cols(); }
};

/// Reorders rows to follow `order`; every id in `order` must be present.
FeatureMatrix align_rows(const FeatureMatrix& m, std::span<const std::string> order);

enum class Aggregator { max, mean, median, variance, mad, iqr, all };

Aggregator parse_aggregator(std::string_view name);
std::string_view to_string(Aggregator a);

/// Column-wise statistic over the frames. Variance is the population form,
/// quantiles use linear interpolation between closest ranks. `all`
/// concatenates the six statistics in declaration order.
Vector aggregate_frames(const RowMatrix& frames, Aggregator method);

/// Linear-interpolation quantile of an unsorted sample, q in [0, 1].
double quantile(std::vector<double> values, double q);

/// Element-wise sign(x) * sqrt(|x|).
Vector ssr(const Vector& x);

/// x / ||x||; the zero vector is returned unchanged.
Vector l2_normalize(const Vector& x);
void l2_normalize_rows(RowMatrix& m);

struct PcaModel {
  Vector mean;
  RowMatrix components;  // k x D, orthonormal rows, descending eigenvalue
  Vector eigenvalues;

  Index k() const { return components.rows(); }
  Index input_dim() const { return mean.size(); }
};

/// Principal components of the sample covariance (1 / (n - 1)). Each
/// component's largest-magnitude entry is made positive. Zero-variance
/// input yields zero eigenvalues and identity-row components.
PcaModel fit_pca(const RowMatrix& m, Index k);
RowMatrix apply_pca(const PcaModel& model, const RowMatrix& m);
RowMatrix inverse_pca(const PcaModel& model, const RowMatrix& scores);

FeatureMatrix fit_apply_pca(const FeatureMatrix& m, Index k);

struct PipelineFlags {
  bool ssr = true;
  bool pca = true;
  bool l2 = true;
};

/// aggregate -> SSR -> full-rank PCA fitted over all items -> L2.
FeatureMatrix build_descriptors(std::span<const FrameFeatureMatrix> per_item_frames,
                                Aggregator method, PipelineFlags flags = {});

struct GenreMatrix {
  std::vector<std::string> item_ids;
  std::vector<std::string> vocabulary;
  RowMatrix values;  // n_items x vocabulary.size(), entries in {0, 1}
};

/// The 19 MovieLens genre labels in their canonical order.
const std::vector<std::string>& default_genre_vocabulary();

struct ItemGenres {
  std::string item_id;
  std::vector<std::string> genres;
};

/// One-hot rows over `vocabulary`; an unknown label is an error naming it.
GenreMatrix encode_genres(std::span<const ItemGenres> per_item,
                          const std::vector<std::string>& vocabulary = default_genre_vocabulary());

}  // namespace coldrec
