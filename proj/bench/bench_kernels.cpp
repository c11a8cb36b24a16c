#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "coldrec/als_kernels.hpp"
#include "coldrec/cer.hpp"
#include "coldrec/synth.hpp"

namespace {

using namespace coldrec;

struct Fixture {
  InteractionMatrix r;
  std::vector<Index> warm;
  std::vector<Index> all_users;
  std::vector<double> conf;
  RowMatrix users, items, content_pred;

  explicit Fixture(Index k) {
    SynthConfig sc;
    sc.n_users = 4000;
    sc.n_items = 1500;
    sc.n_cold = 0;
    sc.seed = 5;
    r = synth_dataset(sc).interactions;
    warm.resize(static_cast<std::size_t>(r.n_items()));
    std::iota(warm.begin(), warm.end(), Index{0});
    all_users.resize(static_cast<std::size_t>(r.n_users()));
    std::iota(all_users.begin(), all_users.end(), Index{0});
    CerHyperParams h;
    h.scaling = 0.8;
    conf = positive_confidences(r, h);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 0.1);
    const auto fill = [&](Index rows) {
      RowMatrix m(rows, k);
      for (Index i = 0; i < m.size(); ++i) m.data()[i] = g(rng);
      return m;
    };
    users = fill(r.n_users());
    items = fill(r.n_items());
    content_pred = fill(r.n_items());
  }
};

const Fixture& fixture(Index k) {
  static std::map<Index, Fixture> cache;
  return cache.try_emplace(k, k).first->second;
}

als::Exec exec_of(const benchmark::State& state) {
  return state.range(1) ? als::Exec::parallel : als::Exec::serial;
}

void BM_UserPhase(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  RowMatrix out = f.users;
  for (auto _ : state) {
    als::user_phase(f.r, f.conf, f.items, f.warm, 0.01, 0.01, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * f.r.n_users());
}

void BM_ItemPhase(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  RowMatrix out = f.items;
  for (auto _ : state) {
    als::item_phase(f.r, f.conf, f.users, f.warm, f.content_pred, 0.01, 1.0, out, exec_of(state));
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * f.r.n_items());
}

void BM_ScoreUsers(benchmark::State& state) {
  const auto& f = fixture(state.range(0));
  RowMatrix scores;
  for (auto _ : state) {
    als::score_users(f.users, f.all_users, f.items, scores, exec_of(state));
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetItemsProcessed(state.iterations() * f.r.n_users());
}

void args(benchmark::internal::Benchmark* b) {
  b->ArgNames({"k", "parallel"});
  for (Index k : {16, 64}) {
    for (int p : {0, 1}) b->Args({k, p});
  }
  b->Unit(benchmark::kMillisecond)->UseRealTime();
}

}  // namespace

BENCHMARK(BM_UserPhase)->Apply(args);
BENCHMARK(BM_ItemPhase)->Apply(args);
BENCHMARK(BM_ScoreUsers)->Apply(args);

BENCHMARK_MAIN();
