#include "fidtrust/embedder.hpp"
#include "fidtrust/metrics.hpp"
#include "fidtrust/rng.hpp"
#include "fidtrust/serial.hpp"
#include "fidtrust/synthetic.hpp"

#include <benchmark/benchmark.h>

using namespace fidtrust;

namespace {

RowMatrix random_rows(std::size_t n, std::size_t k, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  RowMatrix m(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = rng.normal();
  return m;
}

StochasticEmbeddingSet random_tensor(std::size_t I, std::size_t J, std::size_t K) {
  CounterRng rng(7, 0);
  std::vector<double> v(I * J * K);
  for (double& x : v) x = rng.normal();
  return StochasticEmbeddingSet(I, J, K, std::move(v));
}

const Embedder& toy() {
  static const Embedder e{ToyEmbedderConfig{}};
  return e;
}

const RowMatrix& toy_features() {
  static const RowMatrix f = [] {
    SyntheticSpec spec;
    spec.count = 256;
    return embed_features(toy(), make_synthetic_set(spec, 3));
  }();
  return f;
}

void BM_cov_parallel(benchmark::State& s) {
  const RowMatrix m = random_rows(1024, static_cast<std::size_t>(s.range(0)), 1);
  for (auto _ : s) benchmark::DoNotOptimize(mean_and_cov(m));
}
void BM_cov_serial(benchmark::State& s) {
  const RowMatrix m = random_rows(1024, static_cast<std::size_t>(s.range(0)), 1);
  for (auto _ : s) benchmark::DoNotOptimize(serial::mean_and_cov(m));
}
BENCHMARK(BM_cov_parallel)->Arg(64)->Arg(256);
BENCHMARK(BM_cov_serial)->Arg(64)->Arg(256);

void BM_fid_samples_parallel(benchmark::State& s) {
  const auto t = random_tensor(256, 20, 64);
  const auto ref = mean_and_cov(random_rows(256, 64, 2));
  for (auto _ : s) benchmark::DoNotOptimize(fid_samples(t, ref));
}
void BM_fid_samples_serial(benchmark::State& s) {
  const auto t = random_tensor(256, 20, 64);
  const auto ref = mean_and_cov(random_rows(256, 64, 2));
  for (auto _ : s) benchmark::DoNotOptimize(serial::fid_samples(t, ref));
}
BENCHMARK(BM_fid_samples_parallel);
BENCHMARK(BM_fid_samples_serial);

void BM_pvar_parallel(benchmark::State& s) {
  const auto t = random_tensor(256, 20, 64);
  for (auto _ : s) benchmark::DoNotOptimize(pvar(t));
}
void BM_pvar_serial(benchmark::State& s) {
  const auto t = random_tensor(256, 20, 64);
  for (auto _ : s) benchmark::DoNotOptimize(serial::pvar(t));
}
BENCHMARK(BM_pvar_parallel);
BENCHMARK(BM_pvar_serial);

void BM_knn_parallel(benchmark::State& s) {
  const EmbeddingSet a(random_rows(512, 64, 3)), b(random_rows(512, 64, 4));
  for (auto _ : s) benchmark::DoNotOptimize(knn_ood_score(a, b));
}
void BM_knn_serial(benchmark::State& s) {
  const EmbeddingSet a(random_rows(512, 64, 3)), b(random_rows(512, 64, 4));
  for (auto _ : s) benchmark::DoNotOptimize(serial::knn_ood_score(a, b));
}
BENCHMARK(BM_knn_parallel);
BENCHMARK(BM_knn_serial);

void BM_embed_parallel(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(embed_stochastic_features(toy(), toy_features(), 20, 5));
}
void BM_embed_serial(benchmark::State& s) {
  for (auto _ : s) benchmark::DoNotOptimize(serial::embed_stochastic_features(toy(), toy_features(), 20, 5));
}
BENCHMARK(BM_embed_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_embed_serial)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
