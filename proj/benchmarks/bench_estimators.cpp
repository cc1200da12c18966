#include <benchmark/benchmark.h>

#include <vector>

#include "dmm/distributions.hpp"
#include "dmm/em.hpp"
#include "dmm/estimators.hpp"
#include "dmm/hermite.hpp"
#include "dmm/moment_space.hpp"
#include "dmm/quadrature.hpp"

namespace {

// Five-component model from the runtime comparison.
const dmm::GaussianMixture& five_component() {
  static const dmm::GaussianMixture model(
      dmm::DiscreteDistribution({-0.236, -0.168, -0.987, 0.299, 0.150}, {0.123, 0.552, 0.010, 0.080, 0.235}), 1.0);
  return model;
}

void BM_MixingMoments(benchmark::State& state) {
  const auto xs = dmm::sample(five_component(), static_cast<std::size_t>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(dmm::estimate_mixing_moments(xs, 9, 1.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MixingMoments)->RangeMultiplier(10)->Range(1000, 100000);

void BM_DmmKnownVariance(benchmark::State& state) {
  const auto xs = dmm::sample(five_component(), static_cast<std::size_t>(state.range(0)), 2);
  dmm::EstimatorConfig cfg;
  cfg.k = 5;
  cfg.sigma2 = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(dmm::dmm_known_variance(xs, cfg));
}
BENCHMARK(BM_DmmKnownVariance)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);

void BM_Lindsay(benchmark::State& state) {
  const dmm::GaussianMixture model(dmm::DiscreteDistribution({-0.5, 0.5}, {0.5, 0.5}), 0.25);
  const auto xs = dmm::sample(model, static_cast<std::size_t>(state.range(0)), 3);
  dmm::EstimatorConfig cfg;
  cfg.k = 2;
  for (auto _ : state) benchmark::DoNotOptimize(dmm::lindsay_unknown_variance(xs, cfg));
}
BENCHMARK(BM_Lindsay)->RangeMultiplier(10)->Range(1000, 100000)->Unit(benchmark::kMillisecond);

void BM_EmKnownVariance(benchmark::State& state) {
  const auto xs = dmm::sample(five_component(), static_cast<std::size_t>(state.range(0)), 4);
  dmm::EMConfig cfg;
  cfg.k = 5;
  for (auto _ : state) benchmark::DoNotOptimize(dmm::em_fit(xs, cfg, 1.0));
}
BENCHMARK(BM_EmKnownVariance)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_Project(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto xs = dmm::sample(dmm::GaussianMixture(dmm::DiscreteDistribution::point_mass(0.0), 1.0), 100, 5);
  const auto est = dmm::estimate_mixing_moments(xs, 2 * k - 1, 1.0);
  const dmm::MomentVector noisy(est.values, dmm::Interval(-3.0, 3.0));
  for (auto _ : state) benchmark::DoNotOptimize(dmm::project(noisy));
}
BENCHMARK(BM_Project)->DenseRange(2, 5)->Unit(benchmark::kMicrosecond);

void BM_GaussQuadrature(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  std::vector<double> atoms;
  std::vector<double> weights;
  for (int i = 0; i < k; ++i) {
    atoms.push_back(-0.9 + 1.8 * i / (k - 1));
    weights.push_back(1.0 / k);
  }
  const auto m = dmm::exact_moments(dmm::DiscreteDistribution(atoms, weights), 2 * k - 1, dmm::Interval(-1.0, 1.0));
  for (auto _ : state) benchmark::DoNotOptimize(dmm::gauss_quadrature(m));
}
BENCHMARK(BM_GaussQuadrature)->DenseRange(2, 8)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
