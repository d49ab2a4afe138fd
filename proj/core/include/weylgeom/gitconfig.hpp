#pragma once

#include <optional>
#include <vector>

#include "weylgeom/linalg.hpp"
#include "weylgeom/rational.hpp"
#include "weylgeom/thickenings.hpp"

namespace weylgeom {

// n weighted points on the circle (angles) or on a sphere S^k (unit vectors).
class WeightedConfig {
 public:
  // Angles are reduced to [0, 2 pi).
  static WeightedConfig circle(std::vector<double> angles, WeightVector weights);
  // Exact angles given as fractions of a full turn, reduced to [0, 1);
  // coincidence between such points is decided exactly.
  static WeightedConfig circle_turns(std::vector<Rational> turns, WeightVector weights);
  // Points are normalized; all must have the same dimension k + 1 >= 2.
  static WeightedConfig sphere(std::vector<Vector> points, WeightVector weights);

  std::size_t size() const { return points_.size(); }
  bool is_circle() const { return circle_; }
  const std::vector<double>& angles() const { return angles_; }  // circle only
  const std::vector<Vector>& points() const { return points_; }   // unit vectors in both cases
  const std::optional<std::vector<Rational>>& turns() const { return turns_; }
  const WeightVector& weights() const { return weights_; }
  Rational total_mass() const { return weights_.total(); }

  // Angular distance between points i and j (0 exactly for equal exact turns).
  double distance(std::size_t i, std::size_t j) const;
  // Same configuration with point i moved onto point j.
  WeightedConfig with_point_of(std::size_t i, std::size_t j) const;
  // All points rotated by t (circle only).
  WeightedConfig rotated(double t) const;
  WeightedConfig with_weights(WeightVector weights) const;

 private:
  WeightedConfig(std::vector<Vector> points, std::vector<double> angles, std::optional<std::vector<Rational>> turns,
                 WeightVector weights, bool circle);
  std::vector<Vector> points_;
  std::vector<double> angles_;
  std::optional<std::vector<Rational>> turns_;
  WeightVector weights_;
  bool circle_;
};

struct MassCluster {
  std::vector<std::size_t> members;  // ascending
  Rational mass;
};

// Points within angular distance tol are joined (transitively); clusters are
// ordered by smallest member.
std::vector<MassCluster> aggregate_masses(const WeightedConfig& z, double tol = 1e-9);

// Every cluster mass < M/2 (stable) or <= M/2 (semistable), compared exactly.
bool is_stable(const WeightedConfig& z, double tol = 1e-9);
bool is_semistable(const WeightedConfig& z, double tol = 1e-9);

// +1 where the points agree (within tol), -1 elsewhere.
std::vector<int> relpos_config(const WeightedConfig& z, const WeightedConfig& z_prime, double tol = 1e-9);

// Membership of z in the thickening of the diagonal for the weights of z:
// strict -> Th_a(D) (mu_z not semistable), otherwise its closure (mu_z not
// stable). Computed from stability and from relative positions to diagonal
// points with the metric thickening of W = (Z_2)^n; InconsistentBackends if
// they disagree. Circle configurations only.
bool diagonal_thickening_check(const WeightedConfig& z, bool strict, double tol = 1e-9);

struct WallReport {
  // Index sets I (containing 0, one per complementary pair) with
  // sum_I a = sum_{not I} a.
  std::vector<std::vector<int>> walls;
  // Sign of sum_I a - sum_{not I} a for every such I, in subset order
  // (bit j of the enumeration index selects index j + 1).
  std::vector<int> signs;
  bool on_wall() const { return !walls.empty(); }
};

// Exhaustive over 2^(n-1) index sets; n <= 24.
WallReport wall_chamber_report(const WeightVector& a);

}  // namespace weylgeom
