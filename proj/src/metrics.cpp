#include "coldrec/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <unordered_set>

namespace coldrec::metrics {

namespace {

bool is_relevant(std::span<const Index> relevant, Index item) {
  return std::binary_search(relevant.begin(), relevant.end(), item);
}

std::size_t truncated(std::size_t size, Index n) { return std::min(size, static_cast<std::size_t>(n)); }

void check_cutoff(Index n) {
  if (n < 1) throw std::invalid_argument("cutoff must be >= 1");
}

}  // namespace

double average_precision(std::span<const Index> ranked, std::span<const Index> relevant, Index n) {
  check_cutoff(n);
  if (relevant.empty()) throw std::invalid_argument("average_precision: no relevant items");
  double hits = 0.0;
  double sum = 0.0;
  const std::size_t len = truncated(ranked.size(), n);
  for (std::size_t i = 0; i < len; ++i) {
    if (!is_relevant(relevant, ranked[i])) continue;
    hits += 1.0;
    sum += hits / static_cast<double>(i + 1);
  }
  return sum / static_cast<double>(std::min<Index>(n, static_cast<Index>(relevant.size())));
}

double map_at(std::span<const ItemList> lists, std::span<const ItemList> relevants, Index n) {
  if (lists.size() != relevants.size()) throw std::invalid_argument("map_at: list count mismatch");
  double sum = 0.0;
  std::size_t users = 0;
  for (std::size_t u = 0; u < lists.size(); ++u) {
    if (relevants[u].empty()) continue;
    sum += average_precision(lists[u], relevants[u], n);
    ++users;
  }
  if (users == 0) throw std::invalid_argument("map_at: no user with relevant items");
  return sum / static_cast<double>(users);
}

double ndcg(std::span<const Index> ranked, std::span<const Index> relevant, Index n) {
  check_cutoff(n);
  const std::size_t ideal = truncated(relevant.size(), n);
  if (ideal == 0) throw std::invalid_argument("ndcg: ideal DCG is zero");
  double idcg = 0.0;
  for (std::size_t i = 0; i < ideal; ++i) idcg += 1.0 / std::log2(static_cast<double>(i + 2));
  double dcg = 0.0;
  const std::size_t len = truncated(ranked.size(), n);
  for (std::size_t i = 0; i < len; ++i) {
    if (is_relevant(relevant, ranked[i])) dcg += 1.0 / std::log2(static_cast<double>(i + 2));
  }
  return dcg / idcg;
}

double ndcg_at(std::span<const ItemList> lists, std::span<const ItemList> relevants, Index n) {
  if (lists.size() != relevants.size()) throw std::invalid_argument("ndcg_at: list count mismatch");
  double sum = 0.0;
  std::size_t users = 0;
  for (std::size_t u = 0; u < lists.size(); ++u) {
    if (relevants[u].empty()) continue;
    sum += ndcg(lists[u], relevants[u], n);
    ++users;
  }
  if (users == 0) throw std::invalid_argument("ndcg_at: no user with relevant items");
  return sum / static_cast<double>(users);
}

double cosine_similarity(const RowMatrix& features, Index a, Index b) {
  const double na = features.row(a).norm();
  const double nb = features.row(b).norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return features.row(a).dot(features.row(b)) / (na * nb);
}

double list_diversity(std::span<const Index> list, const RowMatrix& genres, Index n) {
  check_cutoff(n);
  const std::size_t len = truncated(list.size(), n);
  if (len < 2) throw std::invalid_argument("list_diversity: list shorter than two");
  double sum = 0.0;
  for (std::size_t i = 0; i < len; ++i) {
    for (std::size_t j = 0; j < len; ++j) {
      if (i != j) sum += 1.0 - cosine_similarity(genres, list[i], list[j]);
    }
  }
  return sum / static_cast<double>(len * (len - 1));
}

double intra_list_diversity(std::span<const ItemList> lists, const RowMatrix& genres, Index n) {
  check_cutoff(n);
  double sum = 0.0;
  std::size_t counted = 0;
  for (const auto& list : lists) {
    if (truncated(list.size(), n) < 2) continue;
    sum += list_diversity(list, genres, n);
    ++counted;
  }
  if (counted == 0) throw std::invalid_argument("intra_list_diversity: no list with two or more items");
  return sum / static_cast<double>(counted);
}

double item_coverage(std::span<const ItemList> lists, std::span<const Index> catalogue, Index n) {
  check_cutoff(n);
  if (catalogue.empty()) throw std::invalid_argument("item_coverage: empty catalogue");
  const std::unordered_set<Index> allowed(catalogue.begin(), catalogue.end());
  std::unordered_set<Index> seen;
  for (const auto& list : lists) {
    const std::size_t len = truncated(list.size(), n);
    for (std::size_t k = 0; k < len; ++k) {
      if (!allowed.contains(list[k])) throw std::invalid_argument("item_coverage: recommended item outside catalogue");
      seen.insert(list[k]);
    }
  }
  return static_cast<double>(seen.size()) / static_cast<double>(allowed.size());
}

double shannon_entropy(std::span<const ItemList> lists, Index n) {
  check_cutoff(n);
  std::map<Index, std::size_t> counts;
  std::size_t total = 0;
  for (const auto& list : lists) {
    const std::size_t len = truncated(list.size(), n);
    for (std::size_t k = 0; k < len; ++k) ++counts[list[k]];
    total += len;
  }
  if (total == 0) throw std::invalid_argument("shannon_entropy: no recommendations");
  double h = 0.0;
  for (const auto& [item, c] : counts) {
    const double p = static_cast<double>(c) / static_cast<double>(total);
    h -= p * std::log(p);
  }
  return h;
}

double expected_random_ap(Index m, Index k, Index n) {
  if (m < 1 || k < 1 || k > m) throw std::invalid_argument("expected_random_ap: need 1 <= K <= M");
  check_cutoff(n);
  const double md = static_cast<double>(m);
  const double kd = static_cast<double>(k);
  const double p_hit = kd / md;
  const double p_pair = m > 1 ? kd * (kd - 1.0) / (md * (md - 1.0)) : 0.0;
  double sum = 0.0;
  for (Index i = 1; i <= std::min(n, m); ++i) {
    const double id = static_cast<double>(i);
    sum += (p_hit + (id - 1.0) * p_pair) / id;
  }
  return sum / static_cast<double>(std::min(n, k));
}

}  // namespace coldrec::metrics
