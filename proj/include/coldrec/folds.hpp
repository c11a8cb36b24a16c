#pragma once

#include <cstdint>
#include <vector>

#include "coldrec/interactions.hpp"

namespace coldrec {

struct FoldSplit {
  int fold_index = 0;
  InteractionMatrix train;
  InteractionMatrix warm_test;
  InteractionMatrix cold_test;
  std::vector<Index> warm_items;  // sorted
  std::vector<Index> cold_items;  // sorted
};

struct SplitRatios {
  double train = 0.6;
  double warm = 0.2;
  double cold = 0.2;
};

/// Item-level cold holdout plus per-item train/warm split of the remaining
/// positives. The cold partition is redrawn for every fold from a seed
/// derived from (seed, fold index). An item with a single positive keeps it
/// in train; any item with at least two keeps at least one in train.
std::vector<FoldSplit> split_folds(const InteractionMatrix& full, int n_folds = 5,
                                   SplitRatios ratios = {}, std::uint64_t seed = 0);

/// Throws std::logic_error describing the first violated FoldSplit invariant.
void check_fold_invariants(const FoldSplit& fold);

struct ValidationSplit {
  InteractionMatrix train;
  InteractionMatrix validation;
};

/// Moves `fraction` of each user's positives (rounded, at least one kept in
/// train) into a validation matrix for early stopping and tuning.
ValidationSplit holdout_validation(const InteractionMatrix& train, double fraction,
                                   std::uint64_t seed);

}  // namespace coldrec
