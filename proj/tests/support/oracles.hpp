#pragma once

// Brute-force reference implementations written straight from the metric
// and loss definitions. They share no code with the library.

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include "coldrec/cer.hpp"
#include "coldrec/interactions.hpp"

namespace oracle {

using coldrec::Index;
using coldrec::RowMatrix;
using List = std::vector<Index>;

inline bool is_relevant(const List& relevant, Index item) {
  for (Index r : relevant) {
    if (r == item) return true;
  }
  return false;
}

inline double ap(const List& ranked, const List& relevant, Index n) {
  const Index k = static_cast<Index>(relevant.size());
  double sum = 0.0;
  for (Index i = 1; i <= n && i <= static_cast<Index>(ranked.size()); ++i) {
    if (!is_relevant(relevant, ranked[i - 1])) continue;
    Index hits = 0;
    for (Index j = 1; j <= i; ++j) hits += is_relevant(relevant, ranked[j - 1]) ? 1 : 0;
    sum += static_cast<double>(hits) / static_cast<double>(i);
  }
  return sum / static_cast<double>(std::min(n, k));
}

inline double ndcg(const List& ranked, const List& relevant, Index n) {
  double dcg = 0.0;
  for (Index i = 1; i <= n && i <= static_cast<Index>(ranked.size()); ++i) {
    const double gain = std::pow(2.0, is_relevant(relevant, ranked[i - 1]) ? 1.0 : 0.0) - 1.0;
    dcg += gain / std::log2(static_cast<double>(i) + 1.0);
  }
  double idcg = 0.0;
  for (Index i = 1; i <= std::min<Index>(n, static_cast<Index>(relevant.size())); ++i) {
    idcg += 1.0 / std::log2(static_cast<double>(i) + 1.0);
  }
  return dcg / idcg;
}

inline double mean_over_evaluable(const std::vector<List>& lists, const std::vector<List>& rel,
                                  Index n, double (*metric)(const List&, const List&, Index)) {
  double sum = 0.0;
  Index users = 0;
  for (std::size_t u = 0; u < lists.size(); ++u) {
    if (rel[u].empty()) continue;
    sum += metric(lists[u], rel[u], n);
    ++users;
  }
  return sum / static_cast<double>(users);
}

inline double cossim(const RowMatrix& g, Index a, Index b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (Index c = 0; c < g.cols(); ++c) {
    dot += g(a, c) * g(b, c);
    na += g(a, c) * g(a, c);
    nb += g(b, c) * g(b, c);
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

inline double intra_list(const std::vector<List>& lists, const RowMatrix& g, Index n) {
  double sum = 0.0;
  Index counted = 0;
  for (const auto& full : lists) {
    const List l(full.begin(), full.begin() + std::min<Index>(n, static_cast<Index>(full.size())));
    if (l.size() < 2) continue;
    double pair_sum = 0.0;
    for (std::size_t i = 0; i < l.size(); ++i) {
      for (std::size_t j = 0; j < l.size(); ++j) {
        if (i != j) pair_sum += 1.0 - cossim(g, l[i], l[j]);
      }
    }
    sum += pair_sum / static_cast<double>(l.size() * (l.size() - 1));
    ++counted;
  }
  return sum / static_cast<double>(counted);
}

inline double coverage(const std::vector<List>& lists, const List& catalogue, Index n) {
  std::set<Index> seen;
  for (const auto& l : lists) {
    for (Index i = 0; i < n && i < static_cast<Index>(l.size()); ++i) seen.insert(l[i]);
  }
  return static_cast<double>(seen.size()) / static_cast<double>(catalogue.size());
}

inline double entropy(const std::vector<List>& lists, Index n) {
  std::map<Index, double> counts;
  double total = 0.0;
  for (const auto& l : lists) {
    for (Index i = 0; i < n && i < static_cast<Index>(l.size()); ++i) {
      counts[l[i]] += 1.0;
      total += 1.0;
    }
  }
  double h = 0.0;
  for (const auto& [item, c] : counts) h -= (c / total) * std::log(c / total);
  return h;
}

struct ObjectiveTerms {
  double data = 0.0;
  double user_reg = 0.0;
  double tether = 0.0;
  double proj_reg = 0.0;
  double total() const { return data + user_reg + tether + proj_reg; }
};

// Dense evaluation over every (user, warm item) cell.
inline ObjectiveTerms objective(const coldrec::CerModel& m, const coldrec::InteractionMatrix& r,
                                const RowMatrix& x) {
  const auto& h = m.hyper;
  ObjectiveTerms t;
  for (Index i = 0; i < m.n_items(); ++i) {
    if (!m.is_warm[static_cast<std::size_t>(i)]) continue;
    const double norm = std::sqrt(static_cast<double>(r.item_count(i)));
    for (Index u = 0; u < m.n_users(); ++u) {
      const bool pos = r.contains(u, i);
      double c = h.base_confidence;
      if (pos) c = h.scaled ? std::pow(norm, h.scaling - 1.0) : 1.0;
      double pred = 0.0;
      for (Index f = 0; f < m.latent_dim(); ++f) pred += m.users(u, f) * m.items(i, f);
      const double e = (pos ? 1.0 : 0.0) - pred;
      t.data += c * e * e;
    }
  }
  for (Index u = 0; u < m.n_users(); ++u) {
    for (Index f = 0; f < m.latent_dim(); ++f) t.user_reg += h.reg_user * m.users(u, f) * m.users(u, f);
  }
  for (Index i = 0; i < m.n_items(); ++i) {
    if (!m.is_warm[static_cast<std::size_t>(i)]) continue;
    for (Index f = 0; f < m.latent_dim(); ++f) {
      double wx = 0.0;
      for (Index d = 0; d < x.cols(); ++d) wx += m.projection(d, f) * x(i, d);
      const double e = m.items(i, f) - wx;
      t.tether += h.reg_item * e * e;
    }
  }
  for (Index d = 0; d < m.projection.rows(); ++d) {
    for (Index f = 0; f < m.latent_dim(); ++f) {
      t.proj_reg += h.reg_proj * m.projection(d, f) * m.projection(d, f);
    }
  }
  return t;
}

// Random ranking lists and relevant sets over `n_items` for `n_users`.
struct RankingInstance {
  std::vector<List> lists;
  std::vector<List> relevant;
  List catalogue;
  RowMatrix genres;
};

inline RankingInstance random_instance(std::mt19937_64& rng, Index max_users = 10, Index max_items = 20) {
  std::uniform_int_distribution<Index> n_users_d(1, max_users), n_items_d(2, max_items);
  const Index n_users = n_users_d(rng), n_items = n_items_d(rng);
  RankingInstance inst;
  for (Index i = 0; i < n_items; ++i) inst.catalogue.push_back(i);
  std::bernoulli_distribution coin(0.3);
  inst.genres = RowMatrix::Zero(n_items, 5);
  for (Index i = 0; i < n_items; ++i) {
    for (Index g = 0; g < 5; ++g) inst.genres(i, g) = coin(rng) ? 1.0 : 0.0;
  }
  for (Index u = 0; u < n_users; ++u) {
    List perm = inst.catalogue;
    std::shuffle(perm.begin(), perm.end(), rng);
    std::uniform_int_distribution<Index> len_d(0, n_items);
    perm.resize(static_cast<std::size_t>(len_d(rng)));
    inst.lists.push_back(perm);
    List rel;
    for (Index i = 0; i < n_items; ++i) {
      if (coin(rng)) rel.push_back(i);
    }
    inst.relevant.push_back(rel);
  }
  // At least one evaluable user with a non-empty list.
  if (std::all_of(inst.relevant.begin(), inst.relevant.end(), [](const List& l) { return l.empty(); })) {
    inst.relevant[0].push_back(0);
  }
  if (inst.lists[0].size() < 2) inst.lists[0] = {1, 0};
  return inst;
}

}  // namespace oracle
