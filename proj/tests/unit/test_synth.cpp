#include <algorithm>
#include <cmath>

#include "coldrec/synth.hpp"
#include "doctest.h"

using namespace coldrec;

namespace {

SynthConfig small(std::uint64_t seed) {
  SynthConfig c;
  c.n_users = 300;
  c.n_items = 120;
  c.n_cold = 20;
  c.feature_dim = 12;
  c.latent_dim = 4;
  c.seed = seed;
  return c;
}

}  // namespace

TEST_CASE("synth realizes the requested density") {
  auto c = small(1);
  c.density_target = 0.02;
  const auto ds = synth_dataset(c);
  const double realized = static_cast<double>(ds.interactions.nnz()) / static_cast<double>(c.n_users * c.n_items);
  CHECK(std::abs(realized - 0.02) <= 0.2 * 0.02);
  CHECK(ds.truth.realized_density == doctest::Approx(realized));
}

TEST_CASE("synth is bit-identical per seed") {
  const auto a = synth_dataset(small(4));
  const auto b = synth_dataset(small(4));
  const auto c = synth_dataset(small(5));
  CHECK(a.interactions == b.interactions);
  CHECK(a.features.values == b.features.values);
  CHECK(a.genres.values == b.genres.values);
  CHECK_FALSE(a.interactions == c.interactions);
}

TEST_CASE("without noise or skew the positives are the top affinities") {
  auto c = small(2);
  c.noise_std = 0.0;
  c.popularity_skew = 0.0;
  const auto ds = synth_dataset(c);
  const RowMatrix affinity = ds.truth.user_factors * ds.truth.item_factors.transpose();
  double min_pos = 1e300, max_neg = -1e300;
  for (Index u = 0; u < c.n_users; ++u) {
    for (Index i = 0; i < c.n_items; ++i) {
      if (ds.interactions.contains(u, i)) {
        min_pos = std::min(min_pos, affinity(u, i));
      } else {
        max_neg = std::max(max_neg, affinity(u, i));
      }
    }
  }
  CHECK(min_pos >= max_neg);
  const RowMatrix planted = ds.features.values * ds.truth.projection;
  CHECK((planted - ds.truth.item_factors).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("synth output shapes") {
  const auto ds = synth_dataset(small(3));
  CHECK(ds.features.n_items() == 120);
  CHECK(ds.features.dim() == 12);
  CHECK(ds.features.item_ids.front() == "i0");
  CHECK(ds.genres.values.cols() == 19);
  for (Index i = 0; i < ds.genres.values.rows(); ++i) CHECK(ds.genres.values.row(i).sum() >= 1.0);
  CHECK(ds.truth.n_cold == 20);
}

TEST_CASE("synth rejects infeasible configurations") {
  auto c = small(0);
  c.n_cold = c.n_items;
  CHECK_THROWS(synth_dataset(c));
  c = small(0);
  c.density_target = 0.0;
  CHECK_THROWS(synth_dataset(c));
  c.density_target = 1.0;
  CHECK_THROWS(synth_dataset(c));
}

TEST_CASE("split_modalities and synth_frames") {
  const auto ds = synth_dataset(small(6));
  const auto parts = split_modalities(ds.features, 3);
  REQUIRE(parts.size() == 3);
  CHECK(parts[0].dim() + parts[1].dim() + parts[2].dim() == 12);
  CHECK(parts[1].values.col(0) == ds.features.values.col(parts[0].dim()));
  CHECK_THROWS(split_modalities(ds.features, 13));

  const auto frames = synth_frames(parts[0], 5, 0.3, 8);
  REQUIRE(frames.size() == 120);
  CHECK(frames[7].item_id == "i7");
  CHECK(frames[7].values.rows() == 5);
  const Vector mean = frames[7].values.colwise().mean().transpose();
  CHECK((mean - parts[0].values.row(7).transpose()).cwiseAbs().maxCoeff() < 1e-12);
}
