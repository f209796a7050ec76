#include <benchmark/benchmark.h>

#include <random>

#include "srr/calibration.hpp"
#include "srr/pca.hpp"
#include "srr/pipeline.hpp"
#include "srr/solver.hpp"
#include "srr/synthetic.hpp"

namespace {

srr::GbmSpec spec(Eigen::Index n, std::size_t steps) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> z;
  srr::GbmSpec s;
  s.mu.resize(n);
  s.sigma.resize(n, n - 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    s.mu(j) = 4e-4 + 2e-4 * z(rng);
    for (Eigen::Index k = 0; k < n - 1; ++k) s.sigma(j, k) = 0.01 / std::sqrt(double(n)) * z(rng);
  }
  s.s0 = Eigen::VectorXd::Constant(n, 100.0);
  s.steps = steps;
  s.seed = 1;
  return s;
}

// One date of the paper-scale problem: 2500 x 28 window.
void BM_Calibrate(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto market = srr::simulate_gbm(spec(n, 2501));
  for (auto _ : state) benchmark::DoNotOptimize(srr::calibrate(market.returns));
}
BENCHMARK(BM_Calibrate)->Arg(5)->Arg(28);

void BM_Pca(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto panel = srr::center_columns(srr::simulate_gbm(spec(n, 2501)).returns.values);
  for (auto _ : state) benchmark::DoNotOptimize(srr::pca(panel));
}
BENCHMARK(BM_Pca)->Arg(5)->Arg(28);

void BM_SolveLu(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto s = spec(n, 2);
  const auto sys = srr::build_phi(s.sigma, s.mu);
  for (auto _ : state) benchmark::DoNotOptimize(srr::solve_lu(sys));
}
BENCHMARK(BM_SolveLu)->Arg(5)->Arg(28);

void BM_SolveSvd(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto s = spec(n, 2);
  const auto sys = srr::build_phi(s.sigma, s.mu);
  for (auto _ : state) benchmark::DoNotOptimize(srr::solve_svd(sys));
}
BENCHMARK(BM_SolveSvd)->Arg(5)->Arg(28);

// 100 output dates of the moving-window pipeline.
void BM_Pipeline(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const auto market = srr::simulate_gbm(spec(n, 2601));
  srr::PipelineConfig cfg;
  cfg.threads = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(srr::run_srr_series(market.returns, cfg));
  state.SetItemsProcessed(state.iterations() * 101);
}
BENCHMARK(BM_Pipeline)->Args({5, 1})->Args({28, 1})->Args({28, 0})->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
