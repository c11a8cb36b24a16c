#include "coldrec/cer.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "coldrec/evaluation.hpp"

namespace coldrec {

void CerHyperParams::validate() const {
  auto bad = [](const std::string& what) { throw std::invalid_argument("hyperparameter " + what); };
  if (latent_dim < 1) bad("latent_dim must be >= 1");
  if (!(reg_user >= 0)) bad("reg_user must be >= 0");
  if (!(reg_item >= 0)) bad("reg_item must be >= 0");
  if (!(reg_proj >= 0)) bad("reg_proj must be >= 0");
  if (!(base_confidence > 0 && base_confidence <= 1)) bad("base_confidence must be in (0, 1]");
  if (!(scaling > 0) || !std::isfinite(scaling)) bad("scaling must be > 0");
  if (max_sweeps < 0) bad("max_sweeps must be >= 0");
  if (patience < 1) bad("patience must be >= 1");
  if (!(init_scale >= 0)) bad("init_scale must be >= 0");
  if (!(validation_fraction >= 0 && validation_fraction < 1)) bad("validation_fraction must be in [0, 1)");
}

double confidence(bool positive, double norm, const CerHyperParams& hyper) {
  if (!positive) return hyper.base_confidence;
  if (!(norm > 0)) throw std::invalid_argument("positive rating in a column with zero norm");
  if (!hyper.scaled) return 1.0;
  return std::pow(norm, hyper.scaling - 1.0);
}

std::vector<double> positive_confidences(const InteractionMatrix& r, const CerHyperParams& hyper) {
  const Vector norms = column_norms(r);
  std::vector<double> conf(static_cast<std::size_t>(r.n_items()), 1.0);
  for (Index i = 0; i < r.n_items(); ++i) {
    if (r.item_count(i) > 0) conf[static_cast<std::size_t>(i)] = confidence(true, norms[i], hyper);
  }
  return conf;
}

CerModel init_model(Index n_users, Index n_items, Index content_dim, std::span<const Index> warm_items,
                    const CerHyperParams& hyper) {
  hyper.validate();
  CerModel model;
  model.hyper = hyper;
  model.warm_items.assign(warm_items.begin(), warm_items.end());
  std::sort(model.warm_items.begin(), model.warm_items.end());
  if (std::adjacent_find(model.warm_items.begin(), model.warm_items.end()) != model.warm_items.end()) {
    throw std::invalid_argument("duplicate warm item");
  }
  model.is_warm.assign(static_cast<std::size_t>(n_items), 0);
  for (Index i : model.warm_items) {
    if (i < 0 || i >= n_items) throw std::out_of_range("warm item " + std::to_string(i) + " out of range");
    model.is_warm[static_cast<std::size_t>(i)] = 1;
  }
  const Index k = hyper.latent_dim;
  model.users = RowMatrix::Zero(n_users, k);
  model.items = RowMatrix::Zero(n_items, k);
  model.projection = RowMatrix::Zero(content_dim, k);

  std::mt19937_64 rng(derive_seed(hyper.seed, "init"));
  if (hyper.init_scale > 0) {
    std::normal_distribution<double> normal(0.0, hyper.init_scale);
    for (Index u = 0; u < n_users; ++u)
      for (Index f = 0; f < k; ++f) model.users(u, f) = normal(rng);
    for (Index i : model.warm_items)
      for (Index f = 0; f < k; ++f) model.items(i, f) = normal(rng);
  }
  return model;
}

double objective(const CerModel& model, const InteractionMatrix& r, const RowMatrix& x) {
  const auto& h = model.hyper;
  const auto conf = positive_confidences(r, h);
  const Eigen::MatrixXd item_gram = als::gram(model.items, model.warm_items);
  double data = 0.0;
  for (Index u = 0; u < r.n_users(); ++u) {
    const auto uu = model.users.row(u);
    data += h.base_confidence * uu.dot(item_gram * uu.transpose());
    for (Index i : r.items_of(u)) {
      if (!model.is_warm[static_cast<std::size_t>(i)]) continue;
      const double s = uu.dot(model.items.row(i));
      const double c = conf[static_cast<std::size_t>(i)];
      data += c * (1.0 - s) * (1.0 - s) - h.base_confidence * s * s;
    }
  }
  double tether = 0.0;
  for (Index i : model.warm_items) {
    tether += (model.items.row(i) - x.row(i) * model.projection).squaredNorm();
  }
  return data + h.reg_user * model.users.squaredNorm() + h.reg_item * tether +
         h.reg_proj * model.projection.squaredNorm();
}

Vector update_user(Index user, const CerModel& model, const InteractionMatrix& r,
                   const Eigen::MatrixXd& item_gram) {
  const auto conf = positive_confidences(r, model.hyper);
  auto neighbours = r.items_of(user);
  std::vector<double> c(neighbours.size());
  for (std::size_t j = 0; j < neighbours.size(); ++j) c[j] = conf[static_cast<std::size_t>(neighbours[j])];
  return als::solve_row(item_gram, model.hyper.base_confidence, model.hyper.reg_user, model.items,
                        neighbours, c, nullptr);
}

Vector update_item(Index item, const CerModel& model, const InteractionMatrix& r, const RowMatrix& x,
                   const Eigen::MatrixXd& user_gram) {
  if (!model.is_warm.at(static_cast<std::size_t>(item))) {
    throw std::invalid_argument("update_item: item " + std::to_string(item) + " is not warm");
  }
  const auto conf = positive_confidences(r, model.hyper);
  auto neighbours = r.users_of(item);
  std::vector<double> c(neighbours.size(), conf[static_cast<std::size_t>(item)]);
  const Vector prior = model.hyper.reg_item * (x.row(item) * model.projection).transpose();
  return als::solve_row(user_gram, model.hyper.base_confidence, model.hyper.reg_item, model.users,
                        neighbours, c, &prior);
}

RowMatrix update_projection(const CerModel& model, const RowMatrix& x) {
  const auto& h = model.hyper;
  if (!(h.reg_item > 0)) throw std::invalid_argument("update_projection: reg_item must be > 0");
  const Index d = x.cols();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(d, model.latent_dim());
  for (Index i : model.warm_items) {
    a.selfadjointView<Eigen::Lower>().rankUpdate(x.row(i).transpose());
    b.noalias() += x.row(i).transpose() * model.items.row(i);
  }
  Eigen::MatrixXd full = a.selfadjointView<Eigen::Lower>();
  full.diagonal().array() += h.reg_proj / h.reg_item;
  Eigen::LLT<Eigen::MatrixXd> llt(full);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("projection system is singular; use reg_proj > 0");
  }
  return llt.solve(b);
}

void sweep_users(CerModel& model, const InteractionMatrix& r, als::Exec exec) {
  const auto conf = positive_confidences(r, model.hyper);
  als::user_phase(r, conf, model.items, model.warm_items, model.hyper.base_confidence,
                  model.hyper.reg_user, model.users, exec);
}

void sweep_items(CerModel& model, const InteractionMatrix& r, const RowMatrix& x, als::Exec exec) {
  const auto conf = positive_confidences(r, model.hyper);
  const RowMatrix content_pred = x * model.projection;
  als::item_phase(r, conf, model.users, model.warm_items, content_pred, model.hyper.base_confidence,
                  model.hyper.reg_item, model.items, exec);
}

void sweep_projection(CerModel& model, const RowMatrix& x) { model.projection = update_projection(model, x); }

namespace {

void check_training_inputs(const InteractionMatrix& r, const RowMatrix& x, const CerModel& model,
                           const InteractionMatrix& validation) {
  if (x.rows() != r.n_items()) {
    throw std::invalid_argument("feature matrix has " + std::to_string(x.rows()) + " rows for " +
                                std::to_string(r.n_items()) + " items");
  }
  if (!x.allFinite()) throw std::invalid_argument("feature matrix has non-finite entries");
  for (Index i = 0; i < r.n_items(); ++i) {
    if (r.item_count(i) > 0 && !model.is_warm[static_cast<std::size_t>(i)]) {
      throw std::invalid_argument("item " + std::to_string(i) + " has training positives but is not warm");
    }
  }
  if (validation.nnz() > 0) {
    if (validation.n_users() != r.n_users() || validation.n_items() != r.n_items()) {
      throw std::invalid_argument("validation matrix shape differs from training matrix");
    }
    for (const auto& p : validation.positives()) {
      if (r.contains(p.user, p.item)) throw std::invalid_argument("validation overlaps training positives");
    }
  }
}

}  // namespace

CerModel train(const InteractionMatrix& r_train, const RowMatrix& x, std::span<const Index> warm_items,
               const CerHyperParams& hyper, const InteractionMatrix& validation, als::Exec exec) {
  CerModel model = init_model(r_train.n_users(), r_train.n_items(), x.cols(), warm_items, hyper);
  check_training_inputs(r_train, x, model, validation);
  const bool early_stopping = validation.nnz() > 0;

  auto record = [&](int sweep) {
    TrainingLogEntry e;
    e.sweep = sweep;
    e.objective = objective(model, r_train, x);
    if (!std::isfinite(e.objective)) {
      throw std::runtime_error("non-finite objective at sweep " + std::to_string(sweep));
    }
    e.val_map5 = early_stopping ? validation_map5(model, r_train, validation, x, exec) : 0.0;
    model.training_log.push_back(e);
    return e;
  };

  record(0);
  CerModel best = model;
  double best_val = -1.0;
  int stale = 0;
  for (int sweep = 1; sweep <= hyper.max_sweeps; ++sweep) {
    sweep_users(model, r_train, exec);
    sweep_items(model, r_train, x, exec);
    sweep_projection(model, x);
    const auto entry = record(sweep);
    model.best_sweep = sweep;
    if (!early_stopping) continue;
    if (entry.val_map5 > best_val) {
      best_val = entry.val_map5;
      best = model;
      stale = 0;
    } else if (++stale >= hyper.patience) {
      break;
    }
  }
  if (!early_stopping || hyper.max_sweeps == 0) return model;
  best.training_log = model.training_log;
  return best;
}

double predict_warm(const CerModel& model, Index user, Index item) {
  if (item < 0 || item >= model.n_items()) throw std::out_of_range("item index out of range");
  if (!model.is_warm[static_cast<std::size_t>(item)]) {
    throw std::invalid_argument("item " + std::to_string(item) + " is cold; use predict_cold");
  }
  return model.users.row(user).dot(model.items.row(item));
}

double predict_cold(const CerModel& model, Index user, const Vector& content) {
  if (content.size() != model.content_dim()) {
    throw std::invalid_argument("content vector has dim " + std::to_string(content.size()) + ", expected " +
                                std::to_string(model.content_dim()));
  }
  return model.users.row(user).dot(content.transpose() * model.projection);
}

RowMatrix item_representations(const CerModel& model, const RowMatrix& x, std::span<const Index> catalogue) {
  RowMatrix reps(static_cast<Index>(catalogue.size()), model.latent_dim());
  for (std::size_t j = 0; j < catalogue.size(); ++j) {
    const Index i = catalogue[j];
    if (i < 0 || i >= model.n_items()) throw std::out_of_range("catalogue item out of range");
    if (model.is_warm[static_cast<std::size_t>(i)]) {
      reps.row(static_cast<Index>(j)) = model.items.row(i);
    } else {
      if (x.cols() != model.content_dim() || i >= x.rows()) {
        throw std::invalid_argument("cold item " + std::to_string(i) + " needs a content row of dim " +
                                    std::to_string(model.content_dim()));
      }
      reps.row(static_cast<Index>(j)) = x.row(i) * model.projection;
    }
  }
  return reps;
}

std::vector<Index> rank_top(std::span<const double> scores, std::span<const Index> catalogue, Index n,
                            std::span<const Index> exclusions) {
  if (n < 1) throw std::invalid_argument("top-n length must be >= 1");
  std::vector<std::pair<double, Index>> candidates;
  candidates.reserve(catalogue.size());
  for (std::size_t j = 0; j < catalogue.size(); ++j) {
    if (std::binary_search(exclusions.begin(), exclusions.end(), catalogue[j])) continue;
    candidates.emplace_back(scores[j], catalogue[j]);
  }
  const auto take = std::min<std::size_t>(static_cast<std::size_t>(n), candidates.size());
  auto better = [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take), candidates.end(),
                    better);
  std::vector<Index> out(take);
  for (std::size_t k = 0; k < take; ++k) out[k] = candidates[k].second;
  return out;
}

std::vector<Index> topn(const CerModel& model, Index user, std::span<const Index> catalogue, Index n,
                        std::span<const Index> exclusions, const RowMatrix& x) {
  const RowMatrix reps = item_representations(model, x, catalogue);
  const Vector scores = reps * model.users.row(user).transpose();
  return rank_top({scores.data(), static_cast<std::size_t>(scores.size())}, catalogue, n, exclusions);
}

}  // namespace coldrec
