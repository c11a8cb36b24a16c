#include "coldrec/features.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <Eigen/Eigenvalues>

namespace coldrec {

FeatureMatrix align_rows(const FeatureMatrix& m, std::span<const std::string> order) {
  std::unordered_map<std::string, Index> row_of;
  for (Index r = 0; r < m.n_items(); ++r) row_of.emplace(m.item_ids[static_cast<std::size_t>(r)], r);
  FeatureMatrix out;
  out.item_ids.assign(order.begin(), order.end());
  out.values.resize(static_cast<Index>(order.size()), m.dim());
  for (std::size_t k = 0; k < order.size(); ++k) {
    auto it = row_of.find(order[k]);
    if (it == row_of.end()) throw std::invalid_argument("no feature row for item '" + order[k] + "'");
    out.values.row(static_cast<Index>(k)) = m.values.row(it->second);
  }
  return out;
}

Aggregator parse_aggregator(std::string_view name) {
  if (name == "max") return Aggregator::max;
  if (name == "mean") return Aggregator::mean;
  if (name == "median") return Aggregator::median;
  if (name == "variance" || name == "var") return Aggregator::variance;
  if (name == "mad") return Aggregator::mad;
  if (name == "iqr") return Aggregator::iqr;
  if (name == "all") return Aggregator::all;
  throw std::invalid_argument("unknown aggregator '" + std::string(name) + "'");
}

std::string_view to_string(Aggregator a) {
  switch (a) {
    case Aggregator::max: return "max";
    case Aggregator::mean: return "mean";
    case Aggregator::median: return "median";
    case Aggregator::variance: return "variance";
    case Aggregator::mad: return "mad";
    case Aggregator::iqr: return "iqr";
    case Aggregator::all: return "all";
  }
  return "?";
}

namespace {

// `sorted` must be ascending.
double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// Statistics are evaluated on the sorted column so the result does not
// depend on frame order, bit for bit.
double column_statistic(std::vector<double> col, Aggregator method) {
  std::sort(col.begin(), col.end());
  const auto n = static_cast<double>(col.size());
  switch (method) {
    case Aggregator::max: return col.back();
    case Aggregator::mean: {
      double s = 0.0;
      for (double v : col) s += v;
      return s / n;
    }
    case Aggregator::median: return sorted_quantile(col, 0.5);
    case Aggregator::variance: {
      double s = 0.0;
      for (double v : col) s += v;
      const double mean = s / n;
      double ss = 0.0;
      for (double v : col) ss += (v - mean) * (v - mean);
      return ss / n;
    }
    case Aggregator::mad: {
      const double med = sorted_quantile(col, 0.5);
      for (double& v : col) v = std::abs(v - med);
      std::sort(col.begin(), col.end());
      return sorted_quantile(col, 0.5);
    }
    case Aggregator::iqr: return sorted_quantile(col, 0.75) - sorted_quantile(col, 0.25);
    case Aggregator::all: break;
  }
  throw std::logic_error("column_statistic: composite aggregator");
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile of empty sample");
  std::sort(values.begin(), values.end());
  return sorted_quantile(values, q);
}

Vector aggregate_frames(const RowMatrix& frames, Aggregator method) {
  const Index t = frames.rows();
  const Index d = frames.cols();
  if (t < 1 || d < 1) throw std::invalid_argument("aggregate_frames: empty frame matrix");
  if (!frames.allFinite()) throw std::invalid_argument("aggregate_frames: non-finite descriptor");
  if (method == Aggregator::all) {
    constexpr Aggregator parts[] = {Aggregator::max,      Aggregator::mean, Aggregator::median,
                                    Aggregator::variance, Aggregator::mad,  Aggregator::iqr};
    Vector out(6 * d);
    for (std::size_t p = 0; p < 6; ++p) out.segment(static_cast<Index>(p) * d, d) = aggregate_frames(frames, parts[p]);
    return out;
  }
  Vector out(d);
  std::vector<double> col(static_cast<std::size_t>(t));
  for (Index j = 0; j < d; ++j) {
    for (Index r = 0; r < t; ++r) col[static_cast<std::size_t>(r)] = frames(r, j);
    out[j] = column_statistic(col, method);
  }
  return out;
}

Vector ssr(const Vector& x) {
  return x.unaryExpr([](double v) {
    if (v > 0) return std::sqrt(v);
    if (v < 0) return -std::sqrt(-v);
    return 0.0;
  });
}

Vector l2_normalize(const Vector& x) {
  const double n = x.norm();
  if (n == 0.0) return x;
  return x / n;
}

void l2_normalize_rows(RowMatrix& m) {
  for (Index r = 0; r < m.rows(); ++r) {
    const double n = m.row(r).norm();
    if (n > 0.0) m.row(r) /= n;
  }
}

PcaModel fit_pca(const RowMatrix& m, Index k) {
  const Index n = m.rows();
  const Index d = m.cols();
  if (k < 1 || k > d) {
    throw std::invalid_argument("fit_pca: k = " + std::to_string(k) + " outside [1, " + std::to_string(d) + "]");
  }
  if (n < 2) throw std::invalid_argument("fit_pca: need at least two rows");
  PcaModel model;
  model.mean = m.colwise().mean().transpose();
  const RowMatrix centered = m.rowwise() - model.mean.transpose();
  const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);

  model.components.resize(k, d);
  model.eigenvalues.resize(k);
  if (cov.cwiseAbs().maxCoeff() == 0.0) {
    model.components = RowMatrix::Identity(k, d);
    model.eigenvalues.setZero();
    return model;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) throw std::runtime_error("fit_pca: eigendecomposition failed");
  // Eigen returns ascending eigenvalues.
  for (Index c = 0; c < k; ++c) {
    const Index src = d - 1 - c;
    Vector v = solver.eigenvectors().col(src);
    Index arg = 0;
    for (Index j = 1; j < d; ++j) {
      if (std::abs(v[j]) > std::abs(v[arg])) arg = j;
    }
    if (v[arg] < 0) v = -v;
    model.components.row(c) = v.transpose();
    model.eigenvalues[c] = std::max(0.0, solver.eigenvalues()[src]);
  }
  return model;
}

RowMatrix apply_pca(const PcaModel& model, const RowMatrix& m) {
  if (m.cols() != model.input_dim()) {
    throw std::invalid_argument("apply_pca: input dim " + std::to_string(m.cols()) + " != model dim " +
                                std::to_string(model.input_dim()));
  }
  return (m.rowwise() - model.mean.transpose()) * model.components.transpose();
}

RowMatrix inverse_pca(const PcaModel& model, const RowMatrix& scores) {
  if (scores.cols() != model.k()) throw std::invalid_argument("inverse_pca: score dim mismatch");
  RowMatrix out = scores * model.components;
  out.rowwise() += model.mean.transpose();
  return out;
}

FeatureMatrix fit_apply_pca(const FeatureMatrix& m, Index k) {
  FeatureMatrix out;
  out.item_ids = m.item_ids;
  out.values = apply_pca(fit_pca(m.values, k), m.values);
  return out;
}

FeatureMatrix build_descriptors(std::span<const FrameFeatureMatrix> per_item_frames,
                                Aggregator method, PipelineFlags flags) {
  if (per_item_frames.empty()) throw std::invalid_argument("build_descriptors: no items");
  const Index d = per_item_frames.front().values.cols();
  for (const auto& f : per_item_frames) {
    if (f.values.cols() != d) {
      throw std::invalid_argument("build_descriptors: item '" + f.item_id + "' has " +
                                  std::to_string(f.values.cols()) + " columns, expected " + std::to_string(d));
    }
  }
  const auto n = static_cast<Index>(per_item_frames.size());
  const Index out_dim = method == Aggregator::all ? 6 * d : d;
  FeatureMatrix out;
  out.values.resize(n, out_dim);
  for (const auto& f : per_item_frames) out.item_ids.push_back(f.item_id);

  std::string error;
#pragma omp parallel for schedule(dynamic, 16)
  for (Index r = 0; r < n; ++r) {
    try {
      Vector row = aggregate_frames(per_item_frames[static_cast<std::size_t>(r)].values, method);
      if (flags.ssr) row = ssr(row);
      out.values.row(r) = row.transpose();
    } catch (const std::exception& e) {
#pragma omp critical
      error = "item '" + per_item_frames[static_cast<std::size_t>(r)].item_id + "': " + e.what();
    }
  }
  if (!error.empty()) throw std::invalid_argument("build_descriptors: " + error);

  if (flags.pca) out.values = apply_pca(fit_pca(out.values, out_dim), out.values);
  if (flags.l2) l2_normalize_rows(out.values);
  return out;
}

const std::vector<std::string>& default_genre_vocabulary() {
  static const std::vector<std::string> vocab{
      "adventure", "animation", "children",    "comedy", "fantasy",   "romance", "drama",
      "action",    "crime",     "thriller",    "horror", "sci-fi",    "mystery", "IMAX",
      "documentary", "war",     "film-Noir",   "musical", "western"};
  return vocab;
}

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace

GenreMatrix encode_genres(std::span<const ItemGenres> per_item, const std::vector<std::string>& vocabulary) {
  std::unordered_map<std::string, Index> column;
  for (std::size_t c = 0; c < vocabulary.size(); ++c) {
    if (!column.emplace(lower(vocabulary[c]), static_cast<Index>(c)).second) {
      throw std::invalid_argument("duplicate genre label '" + vocabulary[c] + "' in vocabulary");
    }
  }
  GenreMatrix g;
  g.vocabulary = vocabulary;
  g.values = RowMatrix::Zero(static_cast<Index>(per_item.size()), static_cast<Index>(vocabulary.size()));
  for (std::size_t r = 0; r < per_item.size(); ++r) {
    g.item_ids.push_back(per_item[r].item_id);
    for (const auto& label : per_item[r].genres) {
      auto it = column.find(lower(label));
      if (it == column.end()) {
        throw std::invalid_argument("unknown genre label '" + label + "' for item '" + per_item[r].item_id + "'");
      }
      g.values(static_cast<Index>(r), it->second) = 1.0;
    }
  }
  return g;
}

}  // namespace coldrec
