#pragma once

#include <span>

#include "coldrec/interactions.hpp"
#include "coldrec/types.hpp"

// Row-parallel ALS kernels. Every row solve reads only shared, read-only
// state, so the serial and OpenMP loops produce bit-identical results; the
// serial loop is kept as the reference for tests and benchmarks.

namespace coldrec::als {

enum class Exec { serial, parallel };

/// Sets the OpenMP thread count used by Exec::parallel; n <= 0 keeps the
/// runtime default.
void set_threads(int n);
int max_threads();

/// F^T F over the given rows of `factors` (all rows when `rows` is empty).
Eigen::MatrixXd gram(const RowMatrix& factors, std::span<const Index> rows = {});

/// Solves (c0 * gram + sum_j (c_j - c0) f_j f_j^T + lambda I) x
///        = sum_j c_j f_j + prior
/// for one row, where j runs over `neighbours` and c_j = pos_conf[j].
/// Throws std::runtime_error if the system is not positive definite.
Vector solve_row(const Eigen::MatrixXd& base_gram, double c0, double lambda,
                 const RowMatrix& factors, std::span<const Index> neighbours,
                 std::span<const double> neighbour_conf, const Vector* prior);

/// Recomputes every user row of `users` from the item factors.
/// `pos_conf[i]` is the positive confidence of item i.
void user_phase(const InteractionMatrix& r, std::span<const double> pos_conf,
                const RowMatrix& items, std::span<const Index> warm_items, double c0,
                double lambda, RowMatrix& users, Exec exec);

/// Recomputes the rows of `items` listed in `warm_items`; row i of
/// `content_pred` is the content prediction W^T x_i that item i is pulled
/// toward with weight `lambda`.
void item_phase(const InteractionMatrix& r, std::span<const double> pos_conf,
                const RowMatrix& users, std::span<const Index> warm_items,
                const RowMatrix& content_pred, double c0, double lambda, RowMatrix& items,
                Exec exec);

/// scores(u, j) = users.row(u) . reps.row(j) for every listed user.
void score_users(const RowMatrix& users, std::span<const Index> user_rows, const RowMatrix& reps,
                 RowMatrix& scores, Exec exec);

}  // namespace coldrec::als
