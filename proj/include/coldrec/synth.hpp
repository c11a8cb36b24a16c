#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "coldrec/features.hpp"
#include "coldrec/interactions.hpp"

namespace coldrec {

struct SynthConfig {
  Index n_users = 2000;
  Index n_items = 500;
  Index n_cold = 100;
  Index feature_dim = 32;
  Index latent_dim = 8;
  double popularity_skew = 1.0;  // Zipf exponent; 0 disables the bias
  double noise_std = 0.1;
  double density_target = 0.05;
  std::uint64_t seed = 0;
};

struct SynthGroundTruth {
  RowMatrix user_factors;   // n_users x latent
  RowMatrix projection;     // feature_dim x latent
  RowMatrix item_factors;   // n_items x latent, W*^T x_i + noise
  Vector popularity_bias;   // per item, -skew * ln(rank)
  double threshold = 0.0;
  double realized_density = 0.0;
  Index n_cold = 0;
};

struct SynthDataset {
  InteractionMatrix interactions;
  FeatureMatrix features;
  GenreMatrix genres;
  SynthGroundTruth truth;
};

/// Draws a planted low-rank model whose item latents are a noisy linear
/// function of the item features, adds a Zipf popularity bias, and keeps
/// the top `density_target` fraction of affinities as positives.
/// Deterministic per seed.
SynthDataset synth_dataset(const SynthConfig& config);

/// Splits the columns of `features` into `parts` contiguous blocks, so each
/// block carries a share of the generating signal.
std::vector<FeatureMatrix> split_modalities(const FeatureMatrix& features, int parts);

/// Expands item vectors into T noisy frame descriptors per item whose
/// column means equal the item vector up to rounding.
std::vector<FrameFeatureMatrix> synth_frames(const FeatureMatrix& features, Index frames_per_item,
                                             double frame_noise, std::uint64_t seed);

}  // namespace coldrec
