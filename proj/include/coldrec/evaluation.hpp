#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coldrec/cer.hpp"
#include "coldrec/folds.hpp"

namespace coldrec {

enum class Scenario { warm, cold };

Scenario parse_scenario(std::string_view name);
std::string_view to_string(Scenario s);

struct EvaluationConfig {
  std::vector<Index> cutoffs{5, 15, 30};
  Scenario scenario = Scenario::cold;
  bool exclude_train_positives = true;  // warm scenario only
  std::optional<RowMatrix> genres;      // rows aligned with item indices

  void validate() const;
};

inline constexpr std::string_view kMetricNames[] = {"map", "ndcg", "intra_list", "coverage",
                                                    "entropy"};

/// Metric values of one fold: metric -> cutoff -> value.
struct FoldMetrics {
  int fold = 0;
  std::map<std::string, std::map<Index, double>> values;
  Index n_users = 0;            // users with at least one relevant item
  Index n_distinct_items = 0;   // distinct items at the largest cutoff

  bool operator==(const FoldMetrics&) const = default;
};

struct MetricSummary {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single fold

  bool operator==(const MetricSummary&) const = default;
};

struct EvaluationReport {
  Scenario scenario = Scenario::cold;
  std::vector<Index> cutoffs;
  std::vector<FoldMetrics> folds;
  std::map<std::string, std::map<Index, MetricSummary>> summary;

  /// Recomputes `summary` from `folds`.
  void summarize();
  bool operator==(const EvaluationReport& other) const;
};

/// Writes the scores of `catalogue` items for `user` into `out`.
using Scorer = std::function<void(Index user, std::span<const Index> catalogue, std::span<double> out)>;

/// Scenario catalogue: warm items for warm, cold items for cold.
std::vector<Index> scenario_catalogue(const FoldSplit& fold, Scenario scenario);

/// Ranks the scenario catalogue per evaluable user with `scorer` and computes
/// every metric at every cutoff.
FoldMetrics evaluate_rankings(const Scorer& scorer, const FoldSplit& fold,
                              const EvaluationConfig& config);

FoldMetrics evaluate_fold(const CerModel& model, const FoldSplit& fold, const RowMatrix& x,
                          const EvaluationConfig& config);

/// Trains one model per fold (validation held out of fold.train) and
/// evaluates it.
EvaluationReport cross_validate(std::span<const FoldSplit> folds, const RowMatrix& x,
                                const CerHyperParams& hyper, const EvaluationConfig& config);

/// Validation MAP@5 over warm items, excluding training positives.
double validation_map5(const CerModel& model, const InteractionMatrix& train,
                       const InteractionMatrix& validation, const RowMatrix& x,
                       als::Exec exec = als::Exec::parallel);

}  // namespace coldrec
