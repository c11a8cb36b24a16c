#pragma once

#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "coldrec/types.hpp"

namespace coldrec {

/// Bijection between external identifier strings and dense indices.
/// Indices are assigned in first-seen order.
class IdMap {
 public:
  IdMap() = default;
  explicit IdMap(std::vector<std::string> ids);

  /// Returns the index of `id`, inserting it if unseen.
  Index intern(const std::string& id);
  std::optional<Index> find(const std::string& id) const;
  /// Throws std::out_of_range naming the id if unknown.
  Index at(const std::string& id) const;
  const std::string& id(Index index) const { return ids_.at(static_cast<std::size_t>(index)); }

  Index size() const { return static_cast<Index>(ids_.size()); }
  const std::vector<std::string>& ids() const { return ids_; }

  bool operator==(const IdMap& other) const { return ids_ == other.ids_; }

 private:
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Index> index_;
};

struct Interaction {
  Index user;
  Index item;
  bool operator==(const Interaction&) const = default;
  auto operator<=>(const Interaction&) const = default;
};

/// Sparse binary user x item matrix. Stores every positive twice, once
/// grouped by user and once grouped by item, both sorted by index.
class InteractionMatrix {
 public:
  InteractionMatrix() = default;
  /// Validates bounds and rejects duplicate pairs.
  InteractionMatrix(Index n_users, Index n_items, std::vector<Interaction> positives);

  Index n_users() const { return n_users_; }
  Index n_items() const { return n_items_; }
  Index nnz() const { return static_cast<Index>(user_items_.size()); }

  std::span<const Index> items_of(Index user) const;
  std::span<const Index> users_of(Index item) const;
  Index item_count(Index item) const { return item_ptr_[item + 1] - item_ptr_[item]; }
  Index user_count(Index user) const { return user_ptr_[user + 1] - user_ptr_[user]; }
  bool contains(Index user, Index item) const;

  /// All positives in (user, item) lexicographic order.
  std::vector<Interaction> positives() const;

  bool operator==(const InteractionMatrix& other) const;

 private:
  Index n_users_ = 0;
  Index n_items_ = 0;
  std::vector<Index> user_ptr_{0};
  std::vector<Index> user_items_;
  std::vector<Index> item_ptr_{0};
  std::vector<Index> item_users_;
};

struct RawRating {
  std::string user;
  std::string item;
  double rating;
};

struct BinarizedRatings {
  InteractionMatrix matrix;
  IdMap users;
  IdMap items;
};

/// Keeps pairs with rating >= threshold as positives. Every user and item
/// seen in the input receives an index, positive or not. Conflicting
/// duplicate ratings for one pair are rejected.
BinarizedRatings binarize(std::span<const RawRating> ratings, double positive_threshold = 5.0);

/// Same as binarize() against fixed identifier maps; an identifier missing
/// from either map is an error.
InteractionMatrix binarize_with(std::span<const RawRating> ratings, const IdMap& users,
                                const IdMap& items, double positive_threshold = 5.0);

/// Euclidean norm of every item column; sqrt(count) for binary data.
Vector column_norms(const InteractionMatrix& r);

}  // namespace coldrec
