#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "weylgeom/flagdyn.hpp"
#include "weylgeom/gitconfig.hpp"
#include "weylgeom/morse.hpp"
#include "weylgeom/symspace.hpp"
#include "weylgeom/thickenings.hpp"

using namespace weylgeom;

namespace {

Matrix random_sl(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix g(n, n);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  if (g.determinant() < 0) g.col(0) *= -1;
  return g / std::pow(g.determinant(), 1.0 / n);
}

std::vector<Matrix> standard_pair() {
  Matrix g1 = Matrix::Zero(3, 3);
  g1.diagonal() << 4, 1, 0.25;
  const Matrix h = (Eigen::AngleAxisd(0.9, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(0.7, Eigen::Vector3d::UnitY()) *
                    Eigen::AngleAxisd(1.3, Eigen::Vector3d::UnitX()))
                       .toRotationMatrix();
  return {g1, h * g1 * h.transpose()};
}

}  // namespace

static void BM_BuildGroup(benchmark::State& state) {
  const auto type = CoxeterType::a(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(WeylGroup::build(type));
}
BENCHMARK(BM_BuildGroup)->DenseRange(2, 5);

static void BM_CountBalanced(benchmark::State& state) {
  auto g = WeylGroup::build(CoxeterType::a(static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(count_balanced(g));
}
BENCHMARK(BM_CountBalanced)->DenseRange(2, 4);

static void BM_DeltaDistance(benchmark::State& state) {
  std::mt19937_64 rng(1);
  const int n = static_cast<int>(state.range(0));
  const auto x = SymPoint::from_group(random_sl(n, rng)), y = SymPoint::from_group(random_sl(n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(delta_distance(x, y));
}
BENCHMARK(BM_DeltaDistance)->DenseRange(3, 6);

static void BM_RelativePosition(benchmark::State& state) {
  std::mt19937_64 rng(2);
  const int n = static_cast<int>(state.range(0));
  const auto f = Flag::from_basis(random_sl(n, rng)), g = Flag::from_basis(random_sl(n, rng));
  for (auto _ : state) benchmark::DoNotOptimize(relative_position(f, g));
}
BENCHMARK(BM_RelativePosition)->DenseRange(3, 6);

static void BM_SchottkyCertificate(benchmark::State& state) {
  const auto gens = standard_pair();
  const auto z = ZetaType::standard(3);
  for (auto _ : state)
    benchmark::DoNotOptimize(schottky_certificate(gens, static_cast<int>(state.range(0)), RegularityCone(0.1), z));
}
BENCHMARK(BM_SchottkyCertificate)->Arg(6)->Arg(12)->Unit(benchmark::kMillisecond);

static void BM_OrbitGrowth(benchmark::State& state) {
  const auto gens = standard_pair();
  for (auto _ : state) benchmark::DoNotOptimize(orbit_growth(gens, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_OrbitGrowth)->Arg(6)->Arg(8)->Unit(benchmark::kMillisecond);

static void BM_DiagonalCheck(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::vector<Rational> turns, weights;
  for (int i = 0; i < n; ++i) {
    turns.emplace_back(i % 3, 5);
    weights.emplace_back(i + 1);
  }
  const auto z = WeightedConfig::circle_turns(turns, WeightVector(weights));
  for (auto _ : state) benchmark::DoNotOptimize(diagonal_thickening_check(z, true, 0.0));
}
BENCHMARK(BM_DiagonalCheck)->DenseRange(3, 6);

BENCHMARK_MAIN();
