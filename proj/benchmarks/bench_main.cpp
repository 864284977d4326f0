#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include <waveinfer/covariance.hpp>
#include <waveinfer/model.hpp>
#include <waveinfer/normality.hpp>
#include <waveinfer/semigroup.hpp>
#include <waveinfer/simulate.hpp>

using namespace waveinfer;

namespace {

Model wave(int modes) { return builtin_preset(PresetKind::Wave, modes, 1.0, 0.2); }

void BM_ModePropagator(benchmark::State& state) {
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(mode_propagator(1.0, 0.2, 9.8696044, t));
    t += 1e-9;
  }
}
BENCHMARK(BM_ModePropagator);

void BM_SimulateEuler(benchmark::State& state) {
  const Model m = wave(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(m, Scheme::Euler, 0.001, 10.0, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SimulateEuler)->Arg(10)->Arg(40)->Unit(benchmark::kMillisecond);

void BM_SimulateExact(benchmark::State& state) {
  const Model m = wave(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(simulate_path(m, Scheme::Exact, 0.001, 10.0, 1));
  state.SetItemsProcessed(state.iterations() * 10000);
}
BENCHMARK(BM_SimulateExact)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_QInfinityApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXd f(n, n);
  for (auto& x : f.reshaped()) x = g(rng);
  const Model m = wave(n).with_q_matrix(f * f.transpose());
  ModeState x(static_cast<std::size_t>(n));
  for (auto& p : x) p = {g(rng), g(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(q_infinity_apply(m, x));
}
BENCHMARK(BM_QInfinityApply)->Arg(4)->Arg(32)->Arg(128);

void BM_AsymptoticVariances(benchmark::State& state) {
  const Model m = wave(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(asymptotic_variances(m));
}
BENCHMARK(BM_AsymptoticVariances)->Arg(10)->Arg(100);

void BM_ShapiroWilk(benchmark::State& state) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  std::vector<double> v(static_cast<std::size_t>(state.range(0)));
  for (auto& x : v) x = g(rng);
  for (auto _ : state) benchmark::DoNotOptimize(normality_test(v));
}
BENCHMARK(BM_ShapiroWilk)->Arg(100)->Arg(5000);

}  // namespace
BENCHMARK_MAIN();
