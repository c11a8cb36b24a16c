#include "coldrec/folds.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace coldrec {

std::vector<FoldSplit> split_folds(const InteractionMatrix& full, int n_folds, SplitRatios ratios,
                                   std::uint64_t seed) {
  if (n_folds < 1) throw std::invalid_argument("n_folds must be >= 1");
  if (!(ratios.train > 0 && ratios.warm > 0 && ratios.cold > 0)) {
    throw std::invalid_argument("split ratios must be positive");
  }
  if (std::abs(ratios.train + ratios.warm + ratios.cold - 1.0) > 1e-9) {
    throw std::invalid_argument("split ratios must sum to 1");
  }
  const Index n_items = full.n_items();
  const Index n_cold = std::min<Index>(n_items, std::llround(ratios.cold * static_cast<double>(n_items)));
  const double warm_share = ratios.warm / (ratios.train + ratios.warm);

  std::vector<FoldSplit> folds;
  folds.reserve(static_cast<std::size_t>(n_folds));
  for (int f = 0; f < n_folds; ++f) {
    std::mt19937_64 rng(derive_seed(seed + static_cast<std::uint64_t>(f), "split"));
    std::vector<Index> order(static_cast<std::size_t>(n_items));
    for (Index i = 0; i < n_items; ++i) order[static_cast<std::size_t>(i)] = i;
    std::shuffle(order.begin(), order.end(), rng);

    FoldSplit fold;
    fold.fold_index = f;
    fold.cold_items.assign(order.begin(), order.begin() + n_cold);
    fold.warm_items.assign(order.begin() + n_cold, order.end());
    std::sort(fold.cold_items.begin(), fold.cold_items.end());
    std::sort(fold.warm_items.begin(), fold.warm_items.end());

    std::vector<Interaction> train, warm_test, cold_test;
    for (Index item : fold.cold_items) {
      for (Index u : full.users_of(item)) cold_test.push_back({u, item});
    }
    for (Index item : fold.warm_items) {
      auto users = full.users_of(item);
      std::vector<Index> shuffled(users.begin(), users.end());
      std::shuffle(shuffled.begin(), shuffled.end(), rng);
      const auto count = static_cast<Index>(shuffled.size());
      Index n_warm = std::llround(warm_share * static_cast<double>(count));
      n_warm = std::clamp<Index>(n_warm, 0, std::max<Index>(count - 1, 0));
      for (Index k = 0; k < count; ++k) {
        const Interaction p{shuffled[static_cast<std::size_t>(k)], item};
        (k < n_warm ? warm_test : train).push_back(p);
      }
    }
    fold.train = InteractionMatrix(full.n_users(), n_items, std::move(train));
    fold.warm_test = InteractionMatrix(full.n_users(), n_items, std::move(warm_test));
    fold.cold_test = InteractionMatrix(full.n_users(), n_items, std::move(cold_test));
    folds.push_back(std::move(fold));
  }
  return folds;
}

void check_fold_invariants(const FoldSplit& fold) {
  auto fail = [&](const std::string& what) {
    throw std::logic_error("fold " + std::to_string(fold.fold_index) + ": " + what);
  };
  const Index n_users = fold.train.n_users();
  const Index n_items = fold.train.n_items();
  for (const auto* m : {&fold.warm_test, &fold.cold_test}) {
    if (m->n_users() != n_users || m->n_items() != n_items) fail("matrix shapes differ");
  }
  std::vector<char> is_cold(static_cast<std::size_t>(n_items), 0);
  std::vector<char> is_warm(static_cast<std::size_t>(n_items), 0);
  for (Index i : fold.cold_items) is_cold[static_cast<std::size_t>(i)] = 1;
  for (Index i : fold.warm_items) {
    if (is_cold[static_cast<std::size_t>(i)]) fail("item " + std::to_string(i) + " is both warm and cold");
    is_warm[static_cast<std::size_t>(i)] = 1;
  }
  for (Index i : fold.cold_items) {
    if (fold.train.item_count(i) != 0) fail("cold item " + std::to_string(i) + " has train positives");
  }
  for (const auto& p : fold.warm_test.positives()) {
    if (!is_warm[static_cast<std::size_t>(p.item)]) fail("warm_test positive on non-warm item");
  }
  for (const auto& p : fold.cold_test.positives()) {
    if (!is_cold[static_cast<std::size_t>(p.item)]) fail("cold_test positive on non-cold item");
  }
}

ValidationSplit holdout_validation(const InteractionMatrix& train, double fraction,
                                   std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("validation fraction must be in [0, 1)");
  }
  std::mt19937_64 rng(derive_seed(seed, "validation"));
  std::vector<Interaction> kept, held;
  for (Index u = 0; u < train.n_users(); ++u) {
    auto items = train.items_of(u);
    std::vector<Index> shuffled(items.begin(), items.end());
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    const auto count = static_cast<Index>(shuffled.size());
    Index n_held = std::llround(fraction * static_cast<double>(count));
    n_held = std::clamp<Index>(n_held, 0, std::max<Index>(count - 1, 0));
    for (Index k = 0; k < count; ++k) {
      (k < n_held ? held : kept).push_back({u, shuffled[static_cast<std::size_t>(k)]});
    }
  }
  return {InteractionMatrix(train.n_users(), train.n_items(), std::move(kept)),
          InteractionMatrix(train.n_users(), train.n_items(), std::move(held))};
}

}  // namespace coldrec
