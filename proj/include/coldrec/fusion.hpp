#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coldrec/features.hpp"

namespace coldrec {

enum class FusionMethod { concat, sum, max };

FusionMethod parse_fusion_method(std::string_view name);
std::string_view to_string(FusionMethod m);

struct FusionSpec {
  FusionMethod method = FusionMethod::concat;
  std::vector<std::string> inputs;
  std::optional<Index> reduce_dim;  // sum/max target; defaults to the smallest input dim
  bool renormalize = true;

  /// At least two inputs; reduce_dim no larger than the smallest input dim.
  void validate(std::span<const Index> input_dims) const;
};

// Inputs must share n_items and item order; otherwise std::invalid_argument.
FeatureMatrix fuse_concat(std::span<const FeatureMatrix> inputs, bool renormalize = true);
FeatureMatrix fuse_sum(std::span<const FeatureMatrix> inputs, bool renormalize = true,
                       std::optional<Index> reduce_dim = std::nullopt);
FeatureMatrix fuse_max(std::span<const FeatureMatrix> inputs, bool renormalize = true,
                       std::optional<Index> reduce_dim = std::nullopt);

/// Reduces every input wider than `target` with PCA fitted on that input;
/// inputs already at `target` pass through untouched.
std::vector<FeatureMatrix> reduce_to_common_dim(std::span<const FeatureMatrix> inputs, Index target);

FeatureMatrix fuse(const FusionSpec& spec, std::span<const FeatureMatrix> inputs);

}  // namespace coldrec
