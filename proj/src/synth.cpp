#include "coldrec/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

namespace coldrec {

namespace {

RowMatrix gaussian(Index rows, Index cols, double stddev, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, stddev);
  RowMatrix m(rows, cols);
  for (Index r = 0; r < rows; ++r)
    for (Index c = 0; c < cols; ++c) m(r, c) = normal(rng);
  return m;
}


}  // namespace

SynthDataset synth_dataset(const SynthConfig& c) {
  if (c.n_users < 1 || c.n_items < 1 || c.feature_dim < 1 || c.latent_dim < 1) {
    throw std::invalid_argument("synth: dimensions must be positive");
  }
  if (c.n_cold < 0 || c.n_cold >= c.n_items) throw std::invalid_argument("synth: need 0 <= n_cold < n_items");
  if (!(c.density_target > 0 && c.density_target < 1)) throw std::invalid_argument("synth: density must be in (0, 1)");
  if (!(c.noise_std >= 0) || !(c.popularity_skew >= 0)) {
    throw std::invalid_argument("synth: noise and skew must be non-negative");
  }

  std::mt19937_64 rng(derive_seed(c.seed, "synth"));
  SynthDataset out;
  auto& truth = out.truth;
  truth.n_cold = c.n_cold;
  truth.user_factors = gaussian(c.n_users, c.latent_dim, 1.0, rng);
  truth.projection = gaussian(c.feature_dim, c.latent_dim, 1.0 / std::sqrt(static_cast<double>(c.feature_dim)), rng);
  const RowMatrix features = gaussian(c.n_items, c.feature_dim, 1.0, rng);
  truth.item_factors = features * truth.projection;
  if (c.noise_std > 0) truth.item_factors += gaussian(c.n_items, c.latent_dim, c.noise_std, rng);

  // Zipf popularity: item at popularity rank r gets bias -skew/2 * ln(r).
  std::vector<Index> rank(static_cast<std::size_t>(c.n_items));
  std::iota(rank.begin(), rank.end(), 1);
  std::shuffle(rank.begin(), rank.end(), rng);
  truth.popularity_bias.resize(c.n_items);
  for (Index i = 0; i < c.n_items; ++i) {
    truth.popularity_bias[i] = -0.5 * c.popularity_skew * std::log(static_cast<double>(rank[static_cast<std::size_t>(i)]));
  }

  RowMatrix affinity = truth.user_factors * truth.item_factors.transpose() / std::sqrt(static_cast<double>(c.latent_dim));
  affinity.rowwise() += truth.popularity_bias.transpose();

  const Index total = c.n_users * c.n_items;
  const auto target = static_cast<Index>(std::llround(c.density_target * static_cast<double>(total)));
  if (target < 1 || target >= total) throw std::invalid_argument("synth: density target gives a degenerate threshold");
  std::vector<double> flat(affinity.data(), affinity.data() + total);
  std::nth_element(flat.begin(), flat.begin() + (target - 1), flat.end(), std::greater<>());
  truth.threshold = flat[static_cast<std::size_t>(target - 1)];

  std::vector<Interaction> positives;
  positives.reserve(static_cast<std::size_t>(target));
  for (Index u = 0; u < c.n_users; ++u)
    for (Index i = 0; i < c.n_items; ++i)
      if (affinity(u, i) >= truth.threshold) positives.push_back({u, i});
  truth.realized_density = static_cast<double>(positives.size()) / static_cast<double>(total);
  out.interactions = InteractionMatrix(c.n_users, c.n_items, std::move(positives));

  out.features.values = features;
  for (Index i = 0; i < c.n_items; ++i) out.features.item_ids.push_back("i" + std::to_string(i));

  // Genres follow random projections of the content so they correlate with it.
  const auto& vocab = default_genre_vocabulary();
  const auto n_genres = static_cast<Index>(vocab.size());
  const RowMatrix genre_dirs = gaussian(c.feature_dim, n_genres, 1.0 / std::sqrt(static_cast<double>(c.feature_dim)), rng);
  const RowMatrix genre_scores = features * genre_dirs;
  out.genres.vocabulary = vocab;
  out.genres.item_ids = out.features.item_ids;
  out.genres.values = RowMatrix::Zero(c.n_items, n_genres);
  for (Index i = 0; i < c.n_items; ++i) {
    Index arg = 0;
    for (Index g = 0; g < n_genres; ++g) {
      if (genre_scores(i, g) > 1.0) out.genres.values(i, g) = 1.0;
      if (genre_scores(i, g) > genre_scores(i, arg)) arg = g;
    }
    out.genres.values(i, arg) = 1.0;
  }
  return out;
}

std::vector<FeatureMatrix> split_modalities(const FeatureMatrix& features, int parts) {
  if (parts < 1 || parts > features.dim()) throw std::invalid_argument("split_modalities: bad part count");
  std::vector<FeatureMatrix> out;
  Index offset = 0;
  for (int p = 0; p < parts; ++p) {
    const Index width = features.dim() / parts + (p < features.dim() % parts ? 1 : 0);
    FeatureMatrix m;
    m.item_ids = features.item_ids;
    m.values = features.values.middleCols(offset, width);
    out.push_back(std::move(m));
    offset += width;
  }
  return out;
}

std::vector<FrameFeatureMatrix> synth_frames(const FeatureMatrix& features, Index frames_per_item, double frame_noise,
                                             std::uint64_t seed) {
  if (frames_per_item < 1) throw std::invalid_argument("synth_frames: need at least one frame per item");
  std::mt19937_64 rng(derive_seed(seed, "frames"));
  std::vector<FrameFeatureMatrix> out;
  out.reserve(static_cast<std::size_t>(features.n_items()));
  for (Index i = 0; i < features.n_items(); ++i) {
    RowMatrix noise = gaussian(frames_per_item, features.dim(), frame_noise, rng);
    const Eigen::RowVectorXd centre = noise.colwise().mean();
    noise.rowwise() -= centre;
    noise.rowwise() += features.values.row(i);
    out.push_back({features.item_ids[static_cast<std::size_t>(i)], std::move(noise)});
  }
  return out;
}

}  // namespace coldrec
