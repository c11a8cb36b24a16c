#include <cmath>
#include <stdexcept>

#include "coldrec/synth.hpp"
#include "coldrec/tuning.hpp"
#include "doctest.h"

using namespace coldrec;

TEST_CASE("grid points") {
  const auto mid = grid_points(0.2, 1.4, 1);
  REQUIRE(mid.size() == 1);
  CHECK(mid[0] == doctest::Approx(0.8).epsilon(1e-12));
  const auto g = grid_points(0.0, 1.0, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == 0.0);
  CHECK(g.back() == 1.0);
  CHECK(g[2] == 0.5);
}

TEST_CASE("search space validation") {
  SearchSpace s;
  CHECK_NOTHROW(s.validate());
  s.lower = 1.5;
  CHECK_THROWS(s.validate());
  s = {};
  s.budget = 0;
  CHECK_THROWS(s.validate());
  s = {};
  s.lower = 0.0;
  CHECK_THROWS(s.validate());
  CHECK(parse_search_strategy("grid") == SearchStrategy::grid);
  CHECK_THROWS(parse_search_strategy("random"));
}

TEST_CASE("budget 1 evaluates a single candidate") {
  SearchSpace s;
  s.budget = 1;
  for (auto strategy : {SearchStrategy::grid, SearchStrategy::bayesian}) {
    s.strategy = strategy;
    const auto r = tune_scaling([](double d) { return std::vector<double>{d}; }, s);
    REQUIRE(r.trace.size() == 1);
    CHECK(r.best_d == r.trace[0].d);
  }
}

TEST_CASE("grid recovers the nearest grid point") {
  SearchSpace s;
  s.strategy = SearchStrategy::grid;
  s.budget = 13;
  const auto r = tune_scaling([](double d) { return std::vector<double>{-std::abs(d - 0.93)}; }, s);
  CHECK(r.best_d == doctest::Approx(0.9));
  CHECK(r.trace.size() == 13);
}

TEST_CASE("bayesian search stays in bounds, is deterministic and returns the argmax") {
  SearchSpace s;
  s.seed = 17;
  auto f = [](double d) { return std::vector<double>{std::sin(3 * d), std::cos(2 * d)}; };
  const auto a = tune_scaling(f, s);
  const auto b = tune_scaling(f, s);
  REQUIRE(a.trace.size() == 15);
  double best = -1e300;
  for (std::size_t k = 0; k < a.trace.size(); ++k) {
    CHECK(a.trace[k].d >= s.lower);
    CHECK(a.trace[k].d <= s.upper);
    CHECK(a.trace[k].d == b.trace[k].d);
    best = std::max(best, a.trace[k].mean());
  }
  CHECK(a.best_mean == best);
  s.seed = 18;
  CHECK(tune_scaling(f, s).trace[0].d != a.trace[0].d);
}

TEST_CASE("ties go to the smaller d") {
  SearchSpace s;
  s.strategy = SearchStrategy::grid;
  s.budget = 7;
  const auto r = tune_scaling([](double) { return std::vector<double>{0.5}; }, s);
  CHECK(r.best_d == s.lower);
}

TEST_CASE("failed candidates are recorded and skipped") {
  SearchSpace s;
  s.strategy = SearchStrategy::grid;
  s.budget = 5;
  const auto r = tune_scaling(
      [](double d) -> std::vector<double> {
        if (d > 1.0) throw std::runtime_error("diverged");
        return {d};
      },
      s);
  int failed = 0;
  for (const auto& t : r.trace) {
    if (t.failed) {
      ++failed;
      CHECK(t.error == "diverged");
    }
  }
  CHECK(failed == 2);
  CHECK(r.best_d == doctest::Approx(0.8));
  CHECK_THROWS(tune_scaling([](double) -> std::vector<double> { throw std::runtime_error("x"); }, s));
}

TEST_CASE("gaussian process posterior") {
  const std::vector<double> xs{0.0, 1.0, 2.0}, ys{1.0, 3.0, 2.0};
  const gp::Regressor r(xs, ys, 0.5, 1e-6);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const auto p = r.predict(xs[k]);
    CHECK(p.mean == doctest::Approx(ys[k]).epsilon(1e-4));
    CHECK(p.stddev < 1e-2);
  }
  CHECK(r.predict(10.0).stddev > 0.5);
  CHECK(gp::expected_improvement({1.0, 0.0}, 0.5) == doctest::Approx(0.5));
  CHECK(gp::expected_improvement({0.0, 0.0}, 0.5) == 0.0);
  CHECK(gp::expected_improvement({0.5, 1.0}, 0.5) == doctest::Approx(1.0 / std::sqrt(2 * M_PI)));
}

TEST_CASE("tuning on real folds") {
  SynthConfig sc;
  sc.n_users = 150;
  sc.n_items = 60;
  sc.n_cold = 10;
  sc.seed = 71;
  const auto ds = synth_dataset(sc);
  const auto folds = split_folds(ds.interactions, 2, {}, 71);
  CerHyperParams h;
  h.latent_dim = 6;
  h.max_sweeps = 4;
  SearchSpace s;
  s.budget = 5;
  const auto r = tune_scaling(folds, ds.features.values, h, s);
  REQUIRE(r.trace.size() == 5);
  for (const auto& t : r.trace) CHECK(t.fold_map5.size() == 2);
}
