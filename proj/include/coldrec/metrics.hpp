#pragma once

#include <span>
#include <vector>

#include "coldrec/types.hpp"

// Ranking and beyond-accuracy metrics over top-N recommendation lists.
// `relevant` arguments are sorted, duplicate-free item index lists.

namespace coldrec::metrics {

using ItemList = std::vector<Index>;

/// (1 / min(N, K)) * sum_{i <= N} P@i * rel(i). K = 0 throws.
double average_precision(std::span<const Index> ranked, std::span<const Index> relevant, Index n);

/// Mean AP over users with at least one relevant item; throws when none.
double map_at(std::span<const ItemList> lists, std::span<const ItemList> relevants, Index n);

/// DCG@N / IDCG@N with binary gains; IDCG = 0 throws.
double ndcg(std::span<const Index> ranked, std::span<const Index> relevant, Index n);
double ndcg_at(std::span<const ItemList> lists, std::span<const ItemList> relevants, Index n);

/// Cosine similarity of two rows; 0 if either is the zero vector.
double cosine_similarity(const RowMatrix& features, Index a, Index b);

/// Mean pairwise (1 - cossim) inside one list truncated to N.
double list_diversity(std::span<const Index> list, const RowMatrix& genres, Index n);
/// Mean of list_diversity over lists with at least two items; throws when none.
double intra_list_diversity(std::span<const ItemList> lists, const RowMatrix& genres, Index n);

/// Distinct items recommended in the top N across lists over the catalogue size.
double item_coverage(std::span<const ItemList> lists, std::span<const Index> catalogue, Index n);

/// Natural-log entropy of recommendation counts in the top N; throws if empty.
double shannon_entropy(std::span<const ItemList> lists, Index n);

/// Expected AP@N of a uniformly random ranking of M items holding K relevant.
double expected_random_ap(Index m, Index k, Index n);

}  // namespace coldrec::metrics
