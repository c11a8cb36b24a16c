#include "coldrec/tuning.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "coldrec/evaluation.hpp"

namespace coldrec {

SearchStrategy parse_search_strategy(std::string_view name) {
  if (name == "grid") return SearchStrategy::grid;
  if (name == "bayesian") return SearchStrategy::bayesian;
  throw std::invalid_argument("unknown search strategy '" + std::string(name) + "'");
}

std::string_view to_string(SearchStrategy s) { return s == SearchStrategy::grid ? "grid" : "bayesian"; }

void SearchSpace::validate() const {
  if (!(lower < upper)) throw std::invalid_argument("search space needs lower < upper");
  if (!(lower > 0)) throw std::invalid_argument("scaling factor search must stay above 0");
  if (budget < 1) throw std::invalid_argument("search budget must be >= 1");
}

double Trial::mean() const {
  if (failed || fold_map5.empty()) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (double v : fold_map5) s += v;
  return s / static_cast<double>(fold_map5.size());
}

std::vector<double> grid_points(double lower, double upper, int budget) {
  if (budget < 1) throw std::invalid_argument("grid needs at least one point");
  if (budget == 1) return {0.5 * (lower + upper)};
  std::vector<double> pts(static_cast<std::size_t>(budget));
  for (int j = 0; j < budget; ++j) {
    pts[static_cast<std::size_t>(j)] = lower + (upper - lower) * static_cast<double>(j) / static_cast<double>(budget - 1);
  }
  pts.back() = upper;
  return pts;
}

namespace gp {

namespace {
double kernel(double a, double b, double ell) {
  const double r = (a - b) / ell;
  return std::exp(-0.5 * r * r);
}
}  // namespace

Regressor::Regressor(std::span<const double> xs, std::span<const double> ys, double length_scale, double noise)
    : xs_(xs.begin(), xs.end()), length_scale_(length_scale) {
  if (xs.size() != ys.size() || xs.empty()) throw std::invalid_argument("gp: need matching, non-empty samples");
  const auto n = static_cast<Index>(xs.size());
  double mean = 0.0;
  for (double y : ys) mean += y;
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (double y : ys) ss += (y - mean) * (y - mean);
  y_mean_ = mean;
  y_scale_ = n > 1 && ss > 0 ? std::sqrt(ss / static_cast<double>(n)) : 1.0;

  Eigen::MatrixXd k(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) k(i, j) = kernel(xs_[static_cast<std::size_t>(i)], xs_[static_cast<std::size_t>(j)], length_scale);
  k.diagonal().array() += noise;
  chol_.compute(k);
  if (chol_.info() != Eigen::Success) throw std::runtime_error("gp: kernel matrix not positive definite");
  Vector y(n);
  for (Index i = 0; i < n; ++i) y[i] = (ys[static_cast<std::size_t>(i)] - y_mean_) / y_scale_;
  alpha_ = chol_.solve(y);
}

Posterior Regressor::predict(double x) const {
  const auto n = static_cast<Index>(xs_.size());
  Vector ks(n);
  for (Index i = 0; i < n; ++i) ks[i] = kernel(x, xs_[static_cast<std::size_t>(i)], length_scale_);
  const double mu = ks.dot(alpha_);
  const double var = std::max(0.0, 1.0 - ks.dot(chol_.solve(ks)));
  return {y_mean_ + y_scale_ * mu, y_scale_ * std::sqrt(var)};
}

double expected_improvement(Posterior p, double best) {
  const double gain = p.mean - best;
  if (!(p.stddev > 0)) return std::max(gain, 0.0);
  const double z = gain / p.stddev;
  const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
  const double cdf = 0.5 * std::erfc(-z / std::numbers::sqrt2);
  return gain * cdf + p.stddev * pdf;
}

}  // namespace gp

namespace {

Trial run_trial(const CandidateEvaluator& evaluate, double d) {
  Trial t;
  t.d = d;
  try {
    t.fold_map5 = evaluate(d);
    if (t.fold_map5.empty()) throw std::runtime_error("evaluator returned no folds");
    for (double v : t.fold_map5) {
      if (!std::isfinite(v)) throw std::runtime_error("non-finite MAP@5");
    }
  } catch (const std::exception& e) {
    t.failed = true;
    t.error = e.what();
    t.fold_map5.clear();
  }
  return t;
}

// Next Bayesian proposal: argmax of expected improvement over a dense grid,
// skipping points already evaluated.
double propose(const std::vector<Trial>& trace, const SearchSpace& space) {
  std::vector<double> xs, ys;
  for (const auto& t : trace) {
    if (t.failed) continue;
    xs.push_back(t.d);
    ys.push_back(t.mean());
  }
  const gp::Regressor model(xs, ys, (space.upper - space.lower) / 4.0, 1e-6);
  const double best = *std::max_element(ys.begin(), ys.end());
  const double min_gap = 1e-9 * (space.upper - space.lower);
  constexpr int kCandidates = 1001;
  double arg = space.lower;
  double best_ei = -1.0;
  for (int j = 0; j < kCandidates; ++j) {
    const double x = space.lower + (space.upper - space.lower) * j / (kCandidates - 1);
    const bool seen = std::any_of(trace.begin(), trace.end(), [&](const Trial& t) { return std::abs(t.d - x) <= min_gap; });
    if (seen) continue;
    const double ei = gp::expected_improvement(model.predict(x), best);
    if (ei > best_ei) {
      best_ei = ei;
      arg = x;
    }
  }
  return std::clamp(arg, space.lower, space.upper);
}

}  // namespace

TuningResult tune_scaling(const CandidateEvaluator& evaluate, const SearchSpace& space) {
  space.validate();
  TuningResult result;
  if (space.strategy == SearchStrategy::grid) {
    for (double d : grid_points(space.lower, space.upper, space.budget)) result.trace.push_back(run_trial(evaluate, d));
  } else {
    std::mt19937_64 rng(derive_seed(space.seed, "tuner"));
    const double offset = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    constexpr double kGolden = 0.6180339887498949;
    int quasi = 0;
    auto next_quasi = [&] {
      const double u = std::fmod(offset + kGolden * quasi++, 1.0);
      return space.lower + (space.upper - space.lower) * u;
    };
    const int n_init = std::min(4, space.budget);
    for (int j = 0; j < n_init; ++j) result.trace.push_back(run_trial(evaluate, next_quasi()));
    while (static_cast<int>(result.trace.size()) < space.budget) {
      const auto ok = std::count_if(result.trace.begin(), result.trace.end(), [](const Trial& t) { return !t.failed; });
      const double d = ok >= 2 ? propose(result.trace, space) : next_quasi();
      result.trace.push_back(run_trial(evaluate, d));
    }
  }

  const Trial* best = nullptr;
  for (const auto& t : result.trace) {
    if (t.failed) continue;
    if (best == nullptr || t.mean() > best->mean() || (t.mean() == best->mean() && t.d < best->d)) best = &t;
  }
  if (best == nullptr) throw std::runtime_error("every tuning candidate failed: " + result.trace.back().error);
  result.best_d = best->d;
  result.best_mean = best->mean();
  return result;
}

TuningResult tune_scaling(std::span<const FoldSplit> folds, const RowMatrix& x, const CerHyperParams& hyper,
                          const SearchSpace& space) {
  if (folds.empty()) throw std::invalid_argument("tune_scaling: no folds");
  std::vector<ValidationSplit> splits;
  for (const auto& fold : folds) {
    splits.push_back(holdout_validation(fold.train, hyper.validation_fraction,
                                        hyper.seed + static_cast<std::uint64_t>(fold.fold_index)));
  }
  CandidateEvaluator evaluate = [&](double d) {
    std::vector<double> per_fold;
    for (std::size_t f = 0; f < folds.size(); ++f) {
      CerHyperParams h = hyper;
      h.scaling = d;
      h.scaled = true;
      const CerModel model = train(splits[f].train, x, folds[f].warm_items, h, splits[f].validation);
      per_fold.push_back(validation_map5(model, splits[f].train, splits[f].validation, x));
    }
    return per_fold;
  };
  return tune_scaling(evaluate, space);
}

}  // namespace coldrec
