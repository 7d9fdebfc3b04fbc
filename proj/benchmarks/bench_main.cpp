#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <vector>

#include "mckean/grid.hpp"
#include "mckean/meanfield.hpp"
#include "mckean/metrics.hpp"
#include "mckean/particle.hpp"

using namespace mckean;

namespace {

PotentialSpec kuramoto(double beta) {
  return {Domain::torus(), ZeroConfinement{}, CosineSumInteraction{{1.0, 0.5}}, beta};
}

std::vector<double> uniform(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = u(gen);
  return x;
}

void BM_DriftPairwise(benchmark::State& state) {
  const auto spec = kuramoto(1.0);
  const auto x = uniform(static_cast<std::size_t>(state.range(0)), 1);
  std::vector<double> out(x.size());
  for (auto _ : state) {
    pairwise_interaction_drift(spec, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DriftPairwise)->RangeMultiplier(4)->Range(64, 4096)->Complexity();

void BM_DriftFourier(benchmark::State& state) {
  const auto spec = kuramoto(1.0);
  const auto x = uniform(static_cast<std::size_t>(state.range(0)), 1);
  std::vector<double> out(x.size());
  for (auto _ : state) {
    interaction_drift(spec, x, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_DriftFourier)->RangeMultiplier(4)->Range(64, 65536)->Complexity();

void BM_EulerMaruyama(benchmark::State& state) {
  auto model = std::make_shared<const PotentialSpec>(kuramoto(1.0));
  ParticleEnsemble ens(model, uniform(static_cast<std::size_t>(state.range(0)), 2), 3);
  for (auto _ : state) step_euler_maruyama(ens, 1e-4);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EulerMaruyama)->Arg(1024)->Arg(16384);

void BM_PdeStep(benchmark::State& state) {
  const auto spec = kuramoto(3.0);
  const auto grid = torus_grid(static_cast<std::size_t>(state.range(0)));
  auto rho = GridDensity::from_function(
      grid, [](double x) { return std::exp(0.5 * std::cos(2 * std::numbers::pi * x)); });
  McKeanVlasovSolver solver(spec, grid);
  for (auto _ : state) {
    solver.step(rho, 1e-5);
    benchmark::DoNotOptimize(rho.values.data());
  }
}
BENCHMARK(BM_PdeStep)->Arg(256)->Arg(1024)->Arg(4096);

void BM_Wasserstein(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const EmpiricalMeasure a{1, uniform(n, 4)}, b{1, uniform(n, 5)};
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein2_1d(a, b, Domain::torus()));
}
BENCHMARK(BM_Wasserstein)->Arg(1024)->Arg(16384);

}  // namespace

BENCHMARK_MAIN();
