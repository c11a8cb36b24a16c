#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "coldrec/als_kernels.hpp"
#include "coldrec/features.hpp"
#include "coldrec/interactions.hpp"

namespace coldrec {

/// Defaults are configurable and echoed into every run directory.
struct CerHyperParams {
  Index latent_dim = 50;
  double reg_user = 0.01;
  double reg_item = 1.0;
  double reg_proj = 0.01;
  double base_confidence = 0.01;
  double scaling = 1.0;       // d; 1 reproduces the unscaled model
  bool scaled = true;         // false: positives always get confidence 1
  int max_sweeps = 50;
  int patience = 5;
  double init_scale = 0.01;
  double validation_fraction = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// c_ui: norm_i^(d - 1) for a positive, c0 otherwise.
double confidence(bool positive, double norm, const CerHyperParams& hyper);

/// Positive confidence per item column of `r`.
std::vector<double> positive_confidences(const InteractionMatrix& r, const CerHyperParams& hyper);

struct TrainingLogEntry {
  int sweep = 0;
  double objective = 0.0;
  double val_map5 = 0.0;
};

struct CerModel {
  RowMatrix users;       // n_users x k
  RowMatrix items;       // n_items x k; cold rows are zero and never read
  RowMatrix projection;  // D x k
  CerHyperParams hyper;
  std::vector<Index> warm_items;  // sorted
  std::vector<char> is_warm;      // per item
  std::vector<TrainingLogEntry> training_log;
  int best_sweep = 0;

  Index n_users() const { return users.rows(); }
  Index n_items() const { return items.rows(); }
  Index latent_dim() const { return users.cols(); }
  Index content_dim() const { return projection.rows(); }
};

/// Seeded Gaussian(0, init_scale^2) user and warm-item factors, W = 0.
CerModel init_model(Index n_users, Index n_items, Index content_dim,
                    std::span<const Index> warm_items, const CerHyperParams& hyper);

/// sum_{u, i warm} c_ui (r_ui - u.v)^2 + l_u sum ||u||^2
///   + l_v sum_{i warm} ||v_i - W^T x_i||^2 + l_w ||W||_F^2
double objective(const CerModel& model, const InteractionMatrix& r, const RowMatrix& x);

/// Exact minimiser of the objective over one user row.
Vector update_user(Index user, const CerModel& model, const InteractionMatrix& r,
                   const Eigen::MatrixXd& item_gram);
/// Exact minimiser over one warm item row.
Vector update_item(Index item, const CerModel& model, const InteractionMatrix& r,
                   const RowMatrix& x, const Eigen::MatrixXd& user_gram);
/// W = (X^T X + (l_w / l_v) I)^-1 X^T V over warm items.
RowMatrix update_projection(const CerModel& model, const RowMatrix& x);

void sweep_users(CerModel& model, const InteractionMatrix& r, als::Exec exec = als::Exec::parallel);
void sweep_items(CerModel& model, const InteractionMatrix& r, const RowMatrix& x,
                 als::Exec exec = als::Exec::parallel);
void sweep_projection(CerModel& model, const RowMatrix& x);

/// ALS with early stopping on validation MAP@5 over warm items. Returns the
/// snapshot with the best validation score. With an empty validation
/// matrix every sweep runs and the last one is returned.
CerModel train(const InteractionMatrix& r_train, const RowMatrix& x,
               std::span<const Index> warm_items, const CerHyperParams& hyper,
               const InteractionMatrix& validation, als::Exec exec = als::Exec::parallel);

double predict_warm(const CerModel& model, Index user, Index item);
double predict_cold(const CerModel& model, Index user, const Vector& content);

/// Per-item vectors used for scoring: V row for warm items, W^T x_i for the rest.
RowMatrix item_representations(const CerModel& model, const RowMatrix& x,
                               std::span<const Index> catalogue);

/// Top-n of `catalogue` by descending score, ties to the smaller index,
/// with `exclusions` (sorted) removed.
std::vector<Index> topn(const CerModel& model, Index user, std::span<const Index> catalogue,
                        Index n, std::span<const Index> exclusions, const RowMatrix& x);

/// Ranking helper shared by topn and evaluation.
std::vector<Index> rank_top(std::span<const double> scores, std::span<const Index> catalogue,
                            Index n, std::span<const Index> exclusions);

}  // namespace coldrec
