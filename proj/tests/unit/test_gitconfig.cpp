#include <doctest.h>

#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <random>

#include "weylgeom/error.hpp"
#include "weylgeom/gitconfig.hpp"

using namespace weylgeom;

namespace {

WeightVector ints(std::initializer_list<int> v) {
  std::vector<Rational> q;
  for (int x : v) q.emplace_back(x);
  return WeightVector(q);
}

// All set partitions of {0..n-1} as restricted growth strings.
std::vector<std::vector<int>> set_partitions(int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  std::function<void(int, int)> rec = [&](int i, int blocks) {
    if (i == n) {
      out.push_back(cur);
      return;
    }
    for (int b = 0; b <= blocks; ++b) {
      cur[static_cast<std::size_t>(i)] = b;
      rec(i + 1, std::max(blocks, b + 1));
    }
  };
  if (n > 0) rec(0, 0);
  return out;
}

// Configuration realizing a partition: block b sits at turn b / (n + 1).
WeightedConfig from_partition(const std::vector<int>& blocks, const WeightVector& a) {
  std::vector<Rational> turns;
  for (int b : blocks) turns.emplace_back(b, static_cast<int>(blocks.size()) + 1);
  return WeightedConfig::circle_turns(turns, a);
}

// Heaviest block of a partition, independent of the clustering code.
Rational max_block_mass(const std::vector<int>& blocks, const WeightVector& a) {
  std::map<int, Rational> mass;
  for (std::size_t i = 0; i < blocks.size(); ++i) mass[blocks[i]] += a[i];
  Rational best = 0;
  for (const auto& [b, m] : mass) best = std::max(best, m);
  return best;
}

}  // namespace

TEST_CASE("aggregate masses") {
  auto z = WeightedConfig::circle({0.0, 1.0, 2.0}, ints({1, 1, 1}));
  auto c = aggregate_masses(z);
  REQUIRE(c.size() == 3);
  for (const auto& k : c) CHECK(k.mass == 1);

  z = WeightedConfig::circle({0.5, 0.5}, ints({1, 2}));
  c = aggregate_masses(z);
  REQUIRE(c.size() == 1);
  CHECK(c[0].mass == 3);

  z = WeightedConfig::circle({0.0, 1e-9, std::numbers::pi}, ints({2, 3, 7}));
  c = aggregate_masses(z, 1e-6);
  REQUIRE(c.size() == 2);
  CHECK(c[0].mass == 5);
  CHECK(c[1].mass == 7);
  CHECK(aggregate_masses(z, 1e-12).size() == 3);

  // Wrap-around: 0 and 2 pi - 1e-10 coincide.
  z = WeightedConfig::circle({1e-10, 2 * std::numbers::pi - 1e-10, 3.0}, ints({1, 1, 1}));
  CHECK(aggregate_masses(z).size() == 2);

  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> k(0, 3), w(1, 9);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Rational> turns, weights;
    for (int i = 0; i < 6; ++i) {
      turns.emplace_back(k(rng), 4);
      weights.emplace_back(w(rng), w(rng));
    }
    const auto zz = WeightedConfig::circle_turns(turns, WeightVector(weights));
    Rational sum = 0;
    for (const auto& cl : aggregate_masses(zz, 0.0)) sum += cl.mass;
    CHECK(sum == zz.total_mass());
  }
}

TEST_CASE("stability examples") {
  const auto distinct = WeightedConfig::circle({0.1, 2.0, 4.0}, ints({1, 1, 1}));
  CHECK(is_stable(distinct));
  CHECK(is_semistable(distinct));

  // a_1 > M/2: nothing is semistable, not even distinct points.
  const auto heavy = WeightedConfig::circle({0.1, 2.0, 4.0, 5.0}, ints({4, 1, 1, 1}));
  CHECK_FALSE(is_semistable(heavy));
  CHECK_FALSE(is_stable(heavy));

  const auto pairs = WeightedConfig::circle({0.3, 0.3, 2.0, 2.0}, ints({1, 1, 1, 1}));
  CHECK(is_semistable(pairs));
  CHECK_FALSE(is_stable(pairs));

  // Sphere points: stability only needs masses.
  Vector p(3), q(3), r(3);
  p << 1, 0, 0;
  q << 0, 1, 0;
  r << 0, 0, 2;
  const auto s2 = WeightedConfig::sphere({p, q, r, r}, ints({1, 1, 1, 1}));
  CHECK(is_semistable(s2));
  CHECK_FALSE(is_stable(s2));
  CHECK(aggregate_masses(s2).size() == 3);
}

TEST_CASE("relative position of configurations") {
  const auto z = WeightedConfig::circle({0.1, 0.2, 0.3}, ints({1, 1, 1}));
  CHECK(relpos_config(z, z) == std::vector<int>{1, 1, 1});
  const auto far = WeightedConfig::circle({1.1, 1.2, 1.3}, ints({1, 1, 1}));
  CHECK(relpos_config(z, far) == std::vector<int>{-1, -1, -1});
  const auto mid = WeightedConfig::circle({1.1, 0.2, 1.3}, ints({1, 1, 1}));
  CHECK(relpos_config(z, mid) == std::vector<int>{-1, 1, -1});
  const auto four = WeightedConfig::circle({0.1, 0.2, 0.3, 0.4}, ints({1, 1, 1, 1}));
  CHECK_THROWS_AS(relpos_config(z, four), Error);
}

TEST_CASE("diagonal thickening examples") {
  const auto distinct = WeightedConfig::circle({0.1, 2.0, 4.0}, ints({1, 1, 1}));
  CHECK_FALSE(diagonal_thickening_check(distinct, true));
  CHECK_FALSE(diagonal_thickening_check(distinct, false));

  const auto together = WeightedConfig::circle({1.0, 1.0, 1.0}, ints({1, 1, 1}));
  CHECK(diagonal_thickening_check(together, true));
  CHECK(diagonal_thickening_check(together, false));

  const auto z = WeightedConfig::circle({0.5, 0.5, 2.0, 4.0}, ints({2, 1, 1, 1}));
  CHECK(diagonal_thickening_check(z, true));
  CHECK(diagonal_thickening_check(z, false));

  // Mass exactly M/2: in the closure only.
  const auto pairs = WeightedConfig::circle({0.3, 0.3, 2.0, 2.0}, ints({1, 1, 1, 1}));
  CHECK_FALSE(diagonal_thickening_check(pairs, true));
  CHECK(diagonal_thickening_check(pairs, false));

  Vector p(3);
  p << 1, 0, 0;
  CHECK_THROWS_AS(diagonal_thickening_check(WeightedConfig::sphere({p, p}, ints({1, 1})), true), Error);
}

TEST_CASE("diagonal check: backends agree on every coincidence pattern, n <= 4") {
  std::size_t checked = 0;
  for (int n = 1; n <= 4; ++n) {
    const auto parts = set_partitions(n);
    // All weight vectors with entries in {1, 2, 3}.
    std::vector<int> w(static_cast<std::size_t>(n), 1);
    while (true) {
      std::vector<Rational> q(w.begin(), w.end());
      const WeightVector a(q);
      const Rational half = a.total() / 2;
      for (const auto& blocks : parts) {
        const auto z = from_partition(blocks, a);
        const Rational heaviest = max_block_mass(blocks, a);
        CHECK(diagonal_thickening_check(z, true, 0.0) == (heaviest > half));
        CHECK(diagonal_thickening_check(z, false, 0.0) == (heaviest >= half));
        ++checked;
      }
      int i = 0;
      while (i < n && w[static_cast<std::size_t>(i)] == 3) w[static_cast<std::size_t>(i++)] = 1;
      if (i == n) break;
      ++w[static_cast<std::size_t>(i)];
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("diagonal check: 10^4 random configurations") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> size(1, 6), num(1, 12), den(1, 5);
  std::size_t inside = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = size(rng);
    std::uniform_int_distribution<int> slot(0, n);
    std::vector<Rational> weights, turns;
    for (int i = 0; i < n; ++i) {
      weights.emplace_back(num(rng), den(rng));
      turns.emplace_back(slot(rng), n + 1);
    }
    const auto z = WeightedConfig::circle_turns(turns, WeightVector(weights));
    const bool strict = diagonal_thickening_check(z, true, 0.0);
    const bool closed = diagonal_thickening_check(z, false, 0.0);
    CHECK((!strict || closed));
    inside += strict;
  }
  CHECK(inside > 100);
}

TEST_CASE("stability is rotation invariant and homogeneous in the weights") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> slot(0, 5), num(1, 7);
  std::uniform_real_distribution<double> turn(0.0, 2 * std::numbers::pi);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 2 + trial % 5;
    std::vector<double> angles;
    std::vector<Rational> weights;
    for (int i = 0; i < n; ++i) {
      angles.push_back(slot(rng) * 1.0471975511965976);
      weights.emplace_back(num(rng));
    }
    const auto z = WeightedConfig::circle(angles, WeightVector(weights));
    const auto r = z.rotated(turn(rng));
    CHECK(is_stable(z) == is_stable(r));
    CHECK(is_semistable(z) == is_semistable(r));

    std::vector<Rational> scaled;
    const Rational c(num(rng), num(rng));
    for (const auto& w : weights) scaled.push_back(w * c);
    const auto zs = z.with_weights(WeightVector(scaled));
    CHECK(is_stable(z) == is_stable(zs));
    CHECK(is_semistable(z) == is_semistable(zs));
  }
}

TEST_CASE("balanced weights: stable iff semistable, n <= 5") {
  std::mt19937_64 rng(9);
  std::uniform_int_distribution<int> num(1, 9);
  int tested_weights = 0;
  for (int n = 1; n <= 5; ++n) {
    const auto parts = set_partitions(n);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Rational> q;
      for (int i = 0; i < n; ++i) q.emplace_back(num(rng));
      const WeightVector a(q);
      if (!weight_is_balanced(a)) continue;
      ++tested_weights;
      for (const auto& blocks : parts) {
        const auto z = from_partition(blocks, a);
        CHECK(is_stable(z, 0.0) == is_semistable(z, 0.0));
      }
    }
  }
  CHECK(tested_weights > 20);
}

TEST_CASE("walls and chambers") {
  const auto sym = wall_chamber_report(ints({1, 1, 1, 1}));
  CHECK(sym.on_wall());
  REQUIRE(sym.walls.size() == 3);
  for (const auto& I : sym.walls) CHECK(I.size() == 2);

  const auto r2111 = wall_chamber_report(ints({2, 1, 1, 1}));
  CHECK_FALSE(r2111.on_wall());
  const auto r5431 = wall_chamber_report(ints({5, 4, 3, 1}));
  CHECK_FALSE(r5431.on_wall());
  CHECK(r2111.signs != r5431.signs);
  CHECK(r2111.signs.size() == 8);

  // Walls are exactly the failures of balance.
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> num(1, 6);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<Rational> q;
    for (int i = 0; i < 1 + trial % 7; ++i) q.emplace_back(num(rng));
    const WeightVector a(q);
    CHECK(wall_chamber_report(a).on_wall() == !weight_is_balanced(a));
  }
}
