#include <cmath>
#include <numeric>
#include <random>

#include "coldrec/metrics.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace coldrec;
using metrics::ItemList;

TEST_CASE("average precision") {
  const ItemList ranked{10, 11, 12, 13, 14};
  CHECK(metrics::average_precision(ranked, ItemList{10, 12}, 5) == doctest::Approx(0.833333).epsilon(1e-6));
  CHECK(metrics::average_precision(ranked, ItemList{20, 21}, 5) == 0.0);
  CHECK(metrics::average_precision(ranked, ItemList{10, 11}, 5) == 1.0);
  CHECK(metrics::average_precision(ranked, ItemList{10, 11, 12, 13, 14, 15, 16}, 3) == 1.0);
  CHECK_THROWS(metrics::average_precision(ranked, ItemList{}, 5));
}

TEST_CASE("MAP averages over evaluable users") {
  const std::vector<ItemList> lists{{1, 2}, {3, 4}, {5}};
  // APs 1.0 and 0.5; the third user has no relevant items.
  const std::vector<ItemList> rel{{1}, {4}, {}};
  CHECK(metrics::map_at(lists, rel, 2) == doctest::Approx(0.75));
  const std::vector<ItemList> single_rel{{2}, {}, {}};
  CHECK(metrics::map_at(lists, single_rel, 2) == 0.5);
  const std::vector<ItemList> none{{}, {}, {}};
  CHECK_THROWS(metrics::map_at(lists, none, 2));
}

TEST_CASE("NDCG") {
  const ItemList ranked{10, 11, 12, 13, 14};
  CHECK(metrics::ndcg(ranked, ItemList{10, 12}, 5) == doctest::Approx(0.919721).epsilon(1e-6));
  CHECK(metrics::ndcg(ranked, ItemList{10, 11}, 5) == 1.0);
  CHECK(metrics::ndcg(ranked, ItemList{99}, 5) == 0.0);
  CHECK_THROWS(metrics::ndcg(ranked, ItemList{}, 5));
}

TEST_CASE("intra-list diversity") {
  const RowMatrix g{{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0, 0, 0}};
  CHECK(metrics::list_diversity(ItemList{0, 1}, g, 2) == 0.0);
  CHECK(metrics::list_diversity(ItemList{0, 2}, g, 2) == 1.0);
  // cos([1,0,0],[1,1,0]) = 1/sqrt(2)
  CHECK(metrics::list_diversity(ItemList{0, 3}, g, 2) == doctest::Approx(1 - 1 / std::sqrt(2.0)));
  CHECK(metrics::cosine_similarity(g, 0, 4) == 0.0);
  const RowMatrix half{{1.0, std::sqrt(3.0)}, {1.0, 0.0}};
  CHECK(metrics::list_diversity(ItemList{0, 1}, half, 2) == doctest::Approx(0.5));
  const std::vector<ItemList> lists{{0, 2}, {1}, {0, 1}};
  CHECK(metrics::intra_list_diversity(lists, g, 5) == doctest::Approx(0.5));
  const std::vector<ItemList> short_lists{{0}, {}};
  CHECK_THROWS(metrics::intra_list_diversity(short_lists, g, 5));
}

TEST_CASE("coverage") {
  ItemList catalogue(10);
  std::iota(catalogue.begin(), catalogue.end(), 0);
  const std::vector<ItemList> lists{{0, 1}, {1, 2}};
  CHECK(metrics::item_coverage(lists, catalogue, 5) == doctest::Approx(0.3));
  CHECK(metrics::item_coverage(lists, catalogue, 1) == doctest::Approx(0.2));
  const std::vector<ItemList> everything{catalogue};
  CHECK(metrics::item_coverage(everything, catalogue, 10) == 1.0);
  const std::vector<ItemList> nothing{{}, {}};
  CHECK(metrics::item_coverage(nothing, catalogue, 5) == 0.0);
  const std::vector<ItemList> outside{{42}};
  CHECK_THROWS(metrics::item_coverage(outside, catalogue, 5));
  CHECK_THROWS(metrics::item_coverage(lists, ItemList{}, 5));
}

TEST_CASE("Shannon entropy") {
  const std::vector<ItemList> same{{7}, {7}, {7}};
  CHECK(metrics::shannon_entropy(same, 1) == 0.0);
  const std::vector<ItemList> even{{0, 1, 2}, {3, 4, 5}};
  CHECK(metrics::shannon_entropy(even, 3) == doctest::Approx(std::log(6.0)));
  const std::vector<ItemList> skew{{0}, {0}, {0}, {1}};
  CHECK(metrics::shannon_entropy(skew, 1) == doctest::Approx(0.562335).epsilon(1e-6));
  const std::vector<ItemList> empty{{}, {}};
  CHECK_THROWS(metrics::shannon_entropy(empty, 3));
}

TEST_CASE("metrics match brute-force oracles") {
  std::mt19937_64 rng(51);
  for (int t = 0; t < 200; ++t) {
    const auto inst = oracle::random_instance(rng);
    for (Index n : {1, 2, 5, 20}) {
      CHECK(std::abs(metrics::map_at(inst.lists, inst.relevant, n) -
                     oracle::mean_over_evaluable(inst.lists, inst.relevant, n, oracle::ap)) <= 1e-12);
      CHECK(std::abs(metrics::ndcg_at(inst.lists, inst.relevant, n) -
                     oracle::mean_over_evaluable(inst.lists, inst.relevant, n, oracle::ndcg)) <= 1e-12);
      CHECK(std::abs(metrics::shannon_entropy(inst.lists, n) - oracle::entropy(inst.lists, n)) <= 1e-12);
      CHECK(metrics::item_coverage(inst.lists, inst.catalogue, n) == oracle::coverage(inst.lists, inst.catalogue, n));
      if (n >= 2) {
        CHECK(std::abs(metrics::intra_list_diversity(inst.lists, inst.genres, n) -
                       oracle::intra_list(inst.lists, inst.genres, n)) <= 1e-12);
      }
    }
  }
}

TEST_CASE("metric properties") {
  std::mt19937_64 rng(52);
  for (int t = 0; t < 50; ++t) {
    const auto inst = oracle::random_instance(rng);
    // Monotone in N once N >= K.
    for (std::size_t u = 0; u < inst.lists.size(); ++u) {
      const auto& rel = inst.relevant[u];
      if (rel.empty()) continue;
      const Index k = static_cast<Index>(rel.size());
      for (Index n = k; n < 20; ++n) {
        CHECK(metrics::average_precision(inst.lists[u], rel, n + 1) >= metrics::average_precision(inst.lists[u], rel, n));
        CHECK(metrics::ndcg(inst.lists[u], rel, n + 1) >= metrics::ndcg(inst.lists[u], rel, n) - 1e-15);
      }
    }
    // Relabelling items consistently leaves every metric unchanged.
    const Index offset = 1000;
    auto relabel = [&](std::vector<ItemList> v) {
      for (auto& l : v) {
        for (auto& i : l) i = offset - i;
      }
      return v;
    };
    auto sorted_relabel = [&](std::vector<ItemList> v) {
      v = relabel(v);
      for (auto& l : v) std::sort(l.begin(), l.end());
      return v;
    };
    const auto lists2 = relabel(inst.lists);
    const auto rel2 = sorted_relabel(inst.relevant);
    CHECK(metrics::map_at(lists2, rel2, 5) == doctest::Approx(metrics::map_at(inst.lists, inst.relevant, 5)));
    CHECK(metrics::shannon_entropy(lists2, 5) == doctest::Approx(metrics::shannon_entropy(inst.lists, 5)));
    // Entropy bounded by ln(distinct items).
    std::set<Index> distinct;
    for (const auto& l : inst.lists) {
      for (std::size_t i = 0; i < std::min<std::size_t>(5, l.size()); ++i) distinct.insert(l[i]);
    }
    CHECK(metrics::shannon_entropy(inst.lists, 5) <= std::log(static_cast<double>(distinct.size())) + 1e-12);
  }
}

TEST_CASE("expected random AP matches enumeration") {
  // Average over all orderings of 5 items with 2 relevant.
  ItemList items{0, 1, 2, 3, 4};
  const ItemList rel{0, 1};
  for (Index n : {1, 2, 3, 5}) {
    double sum = 0.0;
    int count = 0;
    do {
      sum += metrics::average_precision(items, rel, n);
      ++count;
    } while (std::next_permutation(items.begin(), items.end()));
    CHECK(metrics::expected_random_ap(5, 2, n) == doctest::Approx(sum / count).epsilon(1e-12));
  }
}
