#include <algorithm>
#include <cmath>
#include <random>

#include "coldrec/features.hpp"
#include "doctest.h"

using namespace coldrec;

namespace {

RowMatrix random_rows(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  RowMatrix m(rows, cols);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = g(rng);
  return m;
}

constexpr Aggregator kSix[] = {Aggregator::max, Aggregator::mean, Aggregator::median,
                               Aggregator::variance, Aggregator::mad, Aggregator::iqr};

}  // namespace

TEST_CASE("aggregate_frames examples") {
  RowMatrix f(3, 2);
  f << 1, 2, 3, 4, 5, 6;
  CHECK(aggregate_frames(f, Aggregator::mean) == Vector{{3.0, 4.0}});
  CHECK(aggregate_frames(f, Aggregator::max) == Vector{{5.0, 6.0}});
  CHECK(aggregate_frames(f, Aggregator::median) == Vector{{3.0, 4.0}});
  CHECK(aggregate_frames(f, Aggregator::variance)(0) == doctest::Approx(8.0 / 3.0));

  RowMatrix mad(5, 1);
  mad << 1, 2, 3, 4, 100;
  CHECK(aggregate_frames(mad, Aggregator::mad)(0) == 1.0);
  RowMatrix iqr(4, 1);
  iqr << 1, 2, 3, 4;
  CHECK(aggregate_frames(iqr, Aggregator::iqr)(0) == 1.5);
  CHECK(quantile({1, 2, 3, 4}, 0.25) == 1.75);
  CHECK(quantile({4, 1, 3, 2}, 0.75) == 3.25);
}

TEST_CASE("a single frame") {
  const RowMatrix f{{2.0, -1.0, 7.0}};
  for (auto a : {Aggregator::max, Aggregator::mean, Aggregator::median}) {
    CHECK(aggregate_frames(f, a) == f.row(0).transpose());
  }
  for (auto a : {Aggregator::variance, Aggregator::mad, Aggregator::iqr}) {
    CHECK(aggregate_frames(f, a) == Vector::Zero(3));
  }
  CHECK(aggregate_frames(f, Aggregator::all).size() == 18);
  CHECK_THROWS(aggregate_frames(RowMatrix(0, 3), Aggregator::mean));
}

TEST_CASE("aggregators are invariant to frame order") {
  std::mt19937_64 rng(21);
  for (int t = 0; t < 30; ++t) {
    const RowMatrix f = random_rows(rng, 1 + t % 7, 4);
    std::vector<Index> perm(static_cast<std::size_t>(f.rows()));
    for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<Index>(i);
    std::shuffle(perm.begin(), perm.end(), rng);
    RowMatrix g(f.rows(), f.cols());
    for (Index r = 0; r < f.rows(); ++r) g.row(r) = f.row(perm[static_cast<std::size_t>(r)]);
    for (auto a : kSix) CHECK(aggregate_frames(f, a) == aggregate_frames(g, a));
  }
}

TEST_CASE("aggregator names round trip") {
  for (auto a : kSix) CHECK(parse_aggregator(to_string(a)) == a);
  CHECK(parse_aggregator("all") == Aggregator::all);
  CHECK_THROWS(parse_aggregator("mode"));
}

TEST_CASE("ssr") {
  CHECK(ssr(Vector{{4.0, -9.0, 0.0}}) == Vector{{2.0, -3.0, 0.0}});
  CHECK(ssr(Vector{{1.0}}) == Vector{{1.0}});
  CHECK(ssr(Vector{{0.25}}) == Vector{{0.5}});
  std::mt19937_64 rng(22);
  const Vector x = random_rows(rng, 50, 1).col(0) * 5.0;
  CHECK(ssr(-x) == -ssr(x));
  for (Index j = 0; j < x.size(); ++j) CHECK(std::abs(ssr(x)(j)) <= std::max(1.0, std::abs(x(j))));
}

TEST_CASE("l2_normalize") {
  const Vector v = l2_normalize(Vector{{3.0, 4.0}});
  CHECK(v(0) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(v(1) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(l2_normalize(Vector::Zero(2)) == Vector::Zero(2));
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    const Vector x = random_rows(rng, 6, 1).col(0);
    const Vector once = l2_normalize(x);
    CHECK(std::abs(once.norm() - 1.0) < 1e-9);
    CHECK((l2_normalize(once) - once).cwiseAbs().maxCoeff() < 1e-15);
  }
}

TEST_CASE("PCA on points along y = x") {
  RowMatrix m(5, 2);
  for (Index i = 0; i < 5; ++i) m.row(i) << i, i;
  const auto p = fit_pca(m, 2);
  CHECK(p.components(0, 0) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(p.components(0, 1) == doctest::Approx(1 / std::sqrt(2.0)));
  CHECK(std::abs(p.eigenvalues(1)) < 1e-12);
  const RowMatrix s = apply_pca(p, m);
  for (Index i = 0; i < 5; ++i) CHECK(std::abs(s(i, 1)) < 1e-12);
}

TEST_CASE("PCA properties") {
  std::mt19937_64 rng(24);
  const RowMatrix m = random_rows(rng, 30, 6);
  const auto p = fit_pca(m, 6);
  CHECK((p.components * p.components.transpose() - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-8);
  for (Index k = 1; k < 6; ++k) CHECK(p.eigenvalues(k) <= p.eigenvalues(k - 1));
  for (Index k = 0; k < 6; ++k) {
    Index arg = 0;
    p.components.row(k).cwiseAbs().maxCoeff(&arg);
    CHECK(p.components(k, arg) > 0);
  }
  const RowMatrix s = apply_pca(p, m);
  CHECK((inverse_pca(p, s) - m).cwiseAbs().maxCoeff() < 1e-8);
  const Eigen::MatrixXd cov = (s.transpose() * s) / 29.0;
  CHECK((cov - Eigen::MatrixXd(p.eigenvalues.asDiagonal())).cwiseAbs().maxCoeff() < 1e-6);
  for (Index a = 0; a < 5; ++a) {
    CHECK((s.row(a) - s.row(a + 1)).norm() == doctest::Approx((m.row(a) - m.row(a + 1)).norm()).epsilon(1e-10));
  }
  const RowMatrix mean_row = p.mean.transpose();
  CHECK(apply_pca(p, mean_row).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("PCA edge cases") {
  const RowMatrix constant = RowMatrix::Constant(4, 3, 2.5);
  const auto p = fit_pca(constant, 3);
  CHECK(p.eigenvalues == Vector::Zero(3));
  CHECK(p.components == RowMatrix::Identity(3, 3));
  CHECK(apply_pca(p, constant) == RowMatrix::Zero(4, 3));
  CHECK_THROWS(fit_pca(constant, 4));
  CHECK_THROWS(fit_pca(constant, 0));
  CHECK_THROWS(fit_pca(RowMatrix::Zero(1, 3), 1));
  CHECK_THROWS(apply_pca(p, RowMatrix::Zero(2, 2)));
}

TEST_CASE("build_descriptors") {
  std::mt19937_64 rng(25);
  std::vector<FrameFeatureMatrix> frames;
  for (int i = 0; i < 12; ++i) frames.push_back({"v" + std::to_string(i), random_rows(rng, 3 + i % 4, 5)});

  const auto plain = build_descriptors(frames, Aggregator::median, {false, false, false});
  for (std::size_t i = 0; i < frames.size(); ++i) {
    CHECK(plain.values.row(static_cast<Index>(i)).transpose() == aggregate_frames(frames[i].values, Aggregator::median));
  }
  const auto full = build_descriptors(frames, Aggregator::mean, {});
  CHECK(full.dim() == 5);
  CHECK(full.item_ids == plain.item_ids);
  for (Index i = 0; i < full.n_items(); ++i) CHECK(std::abs(full.values.row(i).norm() - 1.0) < 1e-9);
  CHECK(build_descriptors(frames, Aggregator::all, {}).dim() == 30);

  frames[3].values = random_rows(rng, 2, 4);
  CHECK_THROWS(build_descriptors(frames, Aggregator::mean, {}));
}

TEST_CASE("align_rows") {
  FeatureMatrix m{{"a", "b", "c"}, RowMatrix{{1.0}, {2.0}, {3.0}}};
  const std::vector<std::string> order{"c", "a", "b"};
  const auto aligned = align_rows(m, order);
  CHECK(aligned.item_ids == order);
  CHECK(aligned.values(0, 0) == 3.0);
  const std::vector<std::string> missing{"a", "z"};
  CHECK_THROWS(align_rows(m, missing));
}

TEST_CASE("encode_genres") {
  const auto& vocab = default_genre_vocabulary();
  REQUIRE(vocab.size() == 19);
  CHECK(vocab.front() == "adventure");
  const std::vector<ItemGenres> g{{"a", {"adventure"}}, {"b", {}}, {"c", vocab}, {"d", {"Drama", "western"}}};
  const auto enc = encode_genres(g);
  CHECK(enc.values.cols() == 19);
  CHECK(enc.values(0, 0) == 1.0);
  CHECK(enc.values.row(0).sum() == 1.0);
  CHECK(enc.values.row(1).sum() == 0.0);
  CHECK(enc.values.row(2) == Eigen::RowVectorXd::Ones(19));
  CHECK(enc.values.row(3).sum() == 2.0);
  CHECK(((enc.values.array() == 0.0) || (enc.values.array() == 1.0)).all());

  const std::vector<ItemGenres> bad{{"a", {"opera"}}};
  try {
    encode_genres(bad);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("opera") != std::string::npos);
  }
  const std::vector<std::string> small{"x", "y"};
  CHECK(encode_genres(std::vector<ItemGenres>{{"a", {"y"}}}, small).values == RowMatrix{{0.0, 1.0}});
}
