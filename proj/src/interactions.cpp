#include "coldrec/interactions.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>

namespace coldrec {

IdMap::IdMap(std::vector<std::string> ids) {
  for (auto& id : ids) {
    if (index_.contains(id)) throw std::invalid_argument("duplicate identifier '" + id + "'");
    index_.emplace(id, static_cast<Index>(ids_.size()));
    ids_.push_back(std::move(id));
  }
}

Index IdMap::intern(const std::string& id) {
  auto [it, inserted] = index_.try_emplace(id, static_cast<Index>(ids_.size()));
  if (inserted) ids_.push_back(id);
  return it->second;
}

std::optional<Index> IdMap::find(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

Index IdMap::at(const std::string& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw std::out_of_range("unknown identifier '" + id + "'");
  return it->second;
}

namespace {

void build_csr(Index n_rows, const std::vector<std::pair<Index, Index>>& sorted_pairs,
               std::vector<Index>& ptr, std::vector<Index>& cols) {
  ptr.assign(static_cast<std::size_t>(n_rows) + 1, 0);
  cols.clear();
  cols.reserve(sorted_pairs.size());
  for (const auto& [row, col] : sorted_pairs) {
    ++ptr[static_cast<std::size_t>(row) + 1];
    cols.push_back(col);
  }
  for (std::size_t r = 0; r < static_cast<std::size_t>(n_rows); ++r) ptr[r + 1] += ptr[r];
}

}  // namespace

InteractionMatrix::InteractionMatrix(Index n_users, Index n_items, std::vector<Interaction> positives)
    : n_users_(n_users), n_items_(n_items) {
  if (n_users < 0 || n_items < 0) throw std::invalid_argument("negative matrix dimension");
  std::sort(positives.begin(), positives.end());
  for (std::size_t k = 0; k < positives.size(); ++k) {
    const auto& p = positives[k];
    if (p.user < 0 || p.user >= n_users || p.item < 0 || p.item >= n_items) {
      throw std::out_of_range("interaction (" + std::to_string(p.user) + ", " +
                              std::to_string(p.item) + ") outside " + std::to_string(n_users) +
                              " x " + std::to_string(n_items));
    }
    if (k > 0 && positives[k - 1] == p) {
      throw std::invalid_argument("duplicate interaction (" + std::to_string(p.user) + ", " +
                                  std::to_string(p.item) + ")");
    }
  }
  std::vector<std::pair<Index, Index>> by_user;
  std::vector<std::pair<Index, Index>> by_item;
  by_user.reserve(positives.size());
  by_item.reserve(positives.size());
  for (const auto& p : positives) {
    by_user.emplace_back(p.user, p.item);
    by_item.emplace_back(p.item, p.user);
  }
  std::sort(by_item.begin(), by_item.end());
  build_csr(n_users, by_user, user_ptr_, user_items_);
  build_csr(n_items, by_item, item_ptr_, item_users_);
}

std::span<const Index> InteractionMatrix::items_of(Index user) const {
  const auto b = static_cast<std::size_t>(user_ptr_.at(static_cast<std::size_t>(user)));
  const auto e = static_cast<std::size_t>(user_ptr_.at(static_cast<std::size_t>(user) + 1));
  return {user_items_.data() + b, e - b};
}

std::span<const Index> InteractionMatrix::users_of(Index item) const {
  const auto b = static_cast<std::size_t>(item_ptr_.at(static_cast<std::size_t>(item)));
  const auto e = static_cast<std::size_t>(item_ptr_.at(static_cast<std::size_t>(item) + 1));
  return {item_users_.data() + b, e - b};
}

bool InteractionMatrix::contains(Index user, Index item) const {
  auto items = items_of(user);
  return std::binary_search(items.begin(), items.end(), item);
}

std::vector<Interaction> InteractionMatrix::positives() const {
  std::vector<Interaction> out;
  out.reserve(user_items_.size());
  for (Index u = 0; u < n_users_; ++u) {
    for (Index i : items_of(u)) out.push_back({u, i});
  }
  return out;
}

bool InteractionMatrix::operator==(const InteractionMatrix& other) const {
  return n_users_ == other.n_users_ && n_items_ == other.n_items_ &&
         user_ptr_ == other.user_ptr_ && user_items_ == other.user_items_;
}

namespace {

InteractionMatrix collect_positives(std::span<const RawRating> ratings, double threshold,
                                    const std::function<Index(const std::string&)>& user_index,
                                    const std::function<Index(const std::string&)>& item_index,
                                    const std::function<Index()>& n_users,
                                    const std::function<Index()>& n_items) {
  if (!std::isfinite(threshold)) throw std::invalid_argument("positive threshold must be finite");
  std::map<std::pair<Index, Index>, double> seen;
  for (const auto& r : ratings) {
    if (!std::isfinite(r.rating)) {
      throw std::invalid_argument("non-finite rating for (" + r.user + ", " + r.item + ")");
    }
    const Index u = user_index(r.user);
    const Index i = item_index(r.item);
    auto [it, inserted] = seen.try_emplace({u, i}, r.rating);
    if (!inserted && it->second != r.rating) {
      throw std::invalid_argument("conflicting ratings for pair (" + r.user + ", " + r.item + ")");
    }
  }
  std::vector<Interaction> positives;
  for (const auto& [pair, rating] : seen) {
    if (rating >= threshold) positives.push_back({pair.first, pair.second});
  }
  return InteractionMatrix(n_users(), n_items(), std::move(positives));
}

}  // namespace

BinarizedRatings binarize(std::span<const RawRating> ratings, double positive_threshold) {
  BinarizedRatings out;
  out.matrix = collect_positives(
      ratings, positive_threshold, [&](const std::string& id) { return out.users.intern(id); },
      [&](const std::string& id) { return out.items.intern(id); },
      [&] { return out.users.size(); }, [&] { return out.items.size(); });
  return out;
}

InteractionMatrix binarize_with(std::span<const RawRating> ratings, const IdMap& users,
                                const IdMap& items, double positive_threshold) {
  return collect_positives(
      ratings, positive_threshold, [&](const std::string& id) { return users.at(id); },
      [&](const std::string& id) { return items.at(id); }, [&] { return users.size(); },
      [&] { return items.size(); });
}

Vector column_norms(const InteractionMatrix& r) {
  Vector norms(r.n_items());
  for (Index i = 0; i < r.n_items(); ++i) norms[i] = std::sqrt(static_cast<double>(r.item_count(i)));
  return norms;
}

}  // namespace coldrec
