#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "coldrec/cer.hpp"
#include "coldrec/folds.hpp"

namespace coldrec {

enum class SearchStrategy { grid, bayesian };

SearchStrategy parse_search_strategy(std::string_view name);
std::string_view to_string(SearchStrategy s);

struct SearchSpace {
  double lower = 0.2;
  double upper = 1.4;
  int budget = 15;
  SearchStrategy strategy = SearchStrategy::bayesian;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Trial {
  double d = 0.0;
  std::vector<double> fold_map5;
  bool failed = false;
  std::string error;

  double mean() const;
};

struct TuningResult {
  double best_d = 0.0;
  double best_mean = 0.0;
  std::vector<Trial> trace;  // in evaluation order
};

/// Per-fold MAP@5 for one candidate d. Throwing marks the candidate failed.
using CandidateEvaluator = std::function<std::vector<double>(double d)>;

TuningResult tune_scaling(const CandidateEvaluator& evaluate, const SearchSpace& space);

/// Trains scaled-CER on each fold's train split (validation held out of it)
/// and scores validation MAP@5.
TuningResult tune_scaling(std::span<const FoldSplit> folds, const RowMatrix& x,
                          const CerHyperParams& hyper, const SearchSpace& space);

/// Uniform grid of `budget` points including both endpoints; the midpoint
/// when budget is 1.
std::vector<double> grid_points(double lower, double upper, int budget);

namespace gp {

struct Posterior {
  double mean = 0.0;
  double stddev = 0.0;
};

/// 1-D Gaussian process with a unit-variance squared-exponential kernel on
/// standardised observations.
class Regressor {
 public:
  Regressor(std::span<const double> xs, std::span<const double> ys, double length_scale,
            double noise);
  /// Posterior in the original y units.
  Posterior predict(double x) const;

 private:
  std::vector<double> xs_;
  Vector alpha_;
  Eigen::LLT<Eigen::MatrixXd> chol_;
  double length_scale_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
};

/// Expected improvement over `best` for a maximisation problem.
double expected_improvement(Posterior p, double best);

}  // namespace gp

}  // namespace coldrec
