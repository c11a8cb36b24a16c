#include "coldrec/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <stdexcept>
#include <string>
#include <unordered_set>

#include "coldrec/metrics.hpp"

namespace coldrec {

Scenario parse_scenario(std::string_view name) {
  if (name == "warm") return Scenario::warm;
  if (name == "cold") return Scenario::cold;
  throw std::invalid_argument("unknown scenario '" + std::string(name) + "' (expected warm or cold)");
}

std::string_view to_string(Scenario s) { return s == Scenario::warm ? "warm" : "cold"; }

void EvaluationConfig::validate() const {
  if (cutoffs.empty()) throw std::invalid_argument("evaluation needs at least one cutoff");
  for (std::size_t k = 0; k < cutoffs.size(); ++k) {
    if (cutoffs[k] < 1) throw std::invalid_argument("cutoffs must be positive");
    if (k > 0 && cutoffs[k] <= cutoffs[k - 1]) throw std::invalid_argument("cutoffs must be strictly ascending");
  }
}

void EvaluationReport::summarize() {
  summary.clear();
  if (folds.empty()) return;
  for (const auto& [metric, by_cutoff] : folds.front().values) {
    for (const auto& [cutoff, unused] : by_cutoff) {
      std::vector<double> v;
      for (const auto& f : folds) {
        auto m = f.values.find(metric);
        if (m == f.values.end()) continue;
        auto c = m->second.find(cutoff);
        if (c != m->second.end()) v.push_back(c->second);
      }
      double mean = 0.0;
      for (double x : v) mean += x;
      mean /= static_cast<double>(v.size());
      double ss = 0.0;
      for (double x : v) ss += (x - mean) * (x - mean);
      const double sd = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) : 0.0;
      summary[metric][cutoff] = {mean, sd};
    }
  }
}

bool EvaluationReport::operator==(const EvaluationReport& other) const {
  return scenario == other.scenario && cutoffs == other.cutoffs && folds == other.folds &&
         summary == other.summary;
}

std::vector<Index> scenario_catalogue(const FoldSplit& fold, Scenario scenario) {
  return scenario == Scenario::warm ? fold.warm_items : fold.cold_items;
}

FoldMetrics evaluate_rankings(const Scorer& scorer, const FoldSplit& fold, const EvaluationConfig& config) {
  config.validate();
  const auto catalogue = scenario_catalogue(fold, config.scenario);
  const InteractionMatrix& test = config.scenario == Scenario::warm ? fold.warm_test : fold.cold_test;
  const bool exclude = config.scenario == Scenario::warm && config.exclude_train_positives;
  const Index max_n = config.cutoffs.back();

  std::vector<Index> users;
  for (Index u = 0; u < test.n_users(); ++u) {
    if (test.user_count(u) > 0) users.push_back(u);
  }
  if (users.empty()) throw std::invalid_argument("fold " + std::to_string(fold.fold_index) + ": no evaluable users");
  if (catalogue.empty()) throw std::invalid_argument("empty scenario catalogue");

  std::vector<metrics::ItemList> lists(users.size());
  std::vector<metrics::ItemList> relevants(users.size());
  std::exception_ptr error;
#pragma omp parallel
  {
    std::vector<double> scores(catalogue.size());
#pragma omp for schedule(dynamic, 32)
    for (std::size_t k = 0; k < users.size(); ++k) {
      try {
        const Index u = users[k];
        scorer(u, catalogue, scores);
        std::span<const Index> excl;
        if (exclude) excl = fold.train.items_of(u);
        lists[k] = rank_top(scores, catalogue, max_n, excl);
        auto rel = test.items_of(u);
        relevants[k].assign(rel.begin(), rel.end());
      } catch (...) {
#pragma omp critical(coldrec_eval_error)
        if (!error) error = std::current_exception();
      }
    }
  }
  if (error) std::rethrow_exception(error);

  FoldMetrics out;
  out.fold = fold.fold_index;
  out.n_users = static_cast<Index>(users.size());
  for (Index n : config.cutoffs) {
    out.values["map"][n] = metrics::map_at(lists, relevants, n);
    out.values["ndcg"][n] = metrics::ndcg_at(lists, relevants, n);
    out.values["coverage"][n] = metrics::item_coverage(lists, catalogue, n);
    out.values["entropy"][n] = metrics::shannon_entropy(lists, n);
    if (config.genres && n >= 2 &&
        std::any_of(lists.begin(), lists.end(), [](const auto& l) { return l.size() >= 2; })) {
      out.values["intra_list"][n] = metrics::intra_list_diversity(lists, *config.genres, n);
    }
  }
  std::unordered_set<Index> distinct;
  for (const auto& l : lists) distinct.insert(l.begin(), l.end());
  out.n_distinct_items = static_cast<Index>(distinct.size());
  return out;
}

FoldMetrics evaluate_fold(const CerModel& model, const FoldSplit& fold, const RowMatrix& x,
                          const EvaluationConfig& config) {
  const auto catalogue = scenario_catalogue(fold, config.scenario);
  if (config.scenario == Scenario::cold) {
    for (Index i : catalogue) {
      if (model.is_warm.at(static_cast<std::size_t>(i))) {
        throw std::invalid_argument("cold catalogue item " + std::to_string(i) + " is warm in the model");
      }
    }
  }
  const RowMatrix reps = item_representations(model, x, catalogue);
  Scorer scorer = [&](Index user, std::span<const Index>, std::span<double> out) {
    Eigen::Map<Vector> dst(out.data(), static_cast<Index>(out.size()));
    dst.noalias() = reps * model.users.row(user).transpose();
  };
  return evaluate_rankings(scorer, fold, config);
}

EvaluationReport cross_validate(std::span<const FoldSplit> folds, const RowMatrix& x, const CerHyperParams& hyper,
                                const EvaluationConfig& config) {
  EvaluationReport report;
  report.scenario = config.scenario;
  report.cutoffs = config.cutoffs;
  for (const auto& fold : folds) {
    const auto split = holdout_validation(fold.train, hyper.validation_fraction,
                                          hyper.seed + static_cast<std::uint64_t>(fold.fold_index));
    const CerModel model = train(split.train, x, fold.warm_items, hyper, split.validation);
    report.folds.push_back(evaluate_fold(model, fold, x, config));
  }
  report.summarize();
  return report;
}

double validation_map5(const CerModel& model, const InteractionMatrix& train, const InteractionMatrix& validation,
                       const RowMatrix& x, als::Exec exec) {
  std::vector<Index> users;
  for (Index u = 0; u < validation.n_users(); ++u) {
    if (validation.user_count(u) > 0) users.push_back(u);
  }
  if (users.empty()) return 0.0;
  const RowMatrix reps = item_representations(model, x, model.warm_items);
  RowMatrix scores;
  als::score_users(model.users, users, reps, scores, exec);
  double sum = 0.0;
  for (std::size_t k = 0; k < users.size(); ++k) {
    const auto row = scores.row(static_cast<Index>(k));
    const auto list = rank_top({row.data(), static_cast<std::size_t>(row.size())}, model.warm_items, 5,
                               train.items_of(users[k]));
    sum += metrics::average_precision(list, validation.items_of(users[k]), 5);
  }
  return sum / static_cast<double>(users.size());
}

}  // namespace coldrec
