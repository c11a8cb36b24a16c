#include "coldrec/als_kernels.hpp"

#include <exception>
#include <stdexcept>
#include <string>
#include <vector>

#include <omp.h>

namespace coldrec::als {

void set_threads(int n) {
  if (n > 0) omp_set_num_threads(n);
}

int max_threads() { return omp_get_max_threads(); }

Eigen::MatrixXd gram(const RowMatrix& factors, std::span<const Index> rows) {
  const Index k = factors.cols();
  if (rows.empty()) return factors.transpose() * factors;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(k, k);
  for (Index r : rows) g.selfadjointView<Eigen::Lower>().rankUpdate(factors.row(r).transpose());
  return g.selfadjointView<Eigen::Lower>();
}

Vector solve_row(const Eigen::MatrixXd& base_gram, double c0, double lambda, const RowMatrix& factors,
                 std::span<const Index> neighbours, std::span<const double> neighbour_conf,
                 const Vector* prior) {
  const Index k = factors.cols();
  Eigen::MatrixXd a = c0 * base_gram;
  a.diagonal().array() += lambda;
  Vector b = Vector::Zero(k);
  for (std::size_t j = 0; j < neighbours.size(); ++j) {
    const auto f = factors.row(neighbours[j]).transpose();
    const double c = neighbour_conf[j];
    a.noalias() += (c - c0) * (f * f.transpose());
    b.noalias() += c * f;
  }
  if (prior != nullptr) b += *prior;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("ALS row system is not positive definite (regulariser " +
                             std::to_string(lambda) + ")");
  }
  return llt.solve(b);
}

namespace {

// Runs body(row) for every row, serially or with OpenMP, and rethrows the
// first exception after the loop.
template <typename Body>
void for_each_row(Index n, Exec exec, Body body) {
  if (exec == Exec::serial) {
    for (Index r = 0; r < n; ++r) body(r);
    return;
  }
  std::exception_ptr error;
#pragma omp parallel for schedule(dynamic, 32)
  for (Index r = 0; r < n; ++r) {
    try {
      body(r);
    } catch (...) {
#pragma omp critical(coldrec_als_error)
      if (!error) error = std::current_exception();
    }
  }
  if (error) std::rethrow_exception(error);
}

}  // namespace

void user_phase(const InteractionMatrix& r, std::span<const double> pos_conf, const RowMatrix& items,
                std::span<const Index> warm_items, double c0, double lambda, RowMatrix& users,
                Exec exec) {
  const Eigen::MatrixXd base = gram(items, warm_items);
  for_each_row(r.n_users(), exec, [&](Index u) {
    auto neighbours = r.items_of(u);
    std::vector<double> conf(neighbours.size());
    for (std::size_t j = 0; j < neighbours.size(); ++j) conf[j] = pos_conf[static_cast<std::size_t>(neighbours[j])];
    users.row(u) = solve_row(base, c0, lambda, items, neighbours, conf, nullptr).transpose();
  });
}

void item_phase(const InteractionMatrix& r, std::span<const double> pos_conf, const RowMatrix& users,
                std::span<const Index> warm_items, const RowMatrix& content_pred, double c0,
                double lambda, RowMatrix& items, Exec exec) {
  const Eigen::MatrixXd base = gram(users);
  for_each_row(static_cast<Index>(warm_items.size()), exec, [&](Index w) {
    const Index i = warm_items[static_cast<std::size_t>(w)];
    auto neighbours = r.users_of(i);
    std::vector<double> conf(neighbours.size(), pos_conf[static_cast<std::size_t>(i)]);
    const Vector prior = lambda * content_pred.row(i).transpose();
    items.row(i) = solve_row(base, c0, lambda, users, neighbours, conf, &prior).transpose();
  });
}

void score_users(const RowMatrix& users, std::span<const Index> user_rows, const RowMatrix& reps,
                 RowMatrix& scores, Exec exec) {
  scores.resize(static_cast<Index>(user_rows.size()), reps.rows());
  for_each_row(static_cast<Index>(user_rows.size()), exec, [&](Index k) {
    scores.row(k).noalias() = (reps * users.row(user_rows[static_cast<std::size_t>(k)]).transpose()).transpose();
  });
}

}  // namespace coldrec::als
