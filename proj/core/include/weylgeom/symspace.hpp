#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weylgeom/linalg.hpp"

namespace weylgeom {

// Point of SL(n,R)/SO(n) as a positive definite symmetric matrix of
// determinant one. A factor F with P = F F^T is kept together with its
// inverse; all distance computations go through F_x^{-1} F_y so that points
// far out in the space keep their accuracy when built from group elements.
class SymPoint {
 public:
  // Validates symmetry (1e-12 relative) and positivity, then rescales to det 1.
  static SymPoint from_matrix(const Matrix& p);
  // g . o = g g^T for g with det != 0 (rescaled to |det| = 1).
  static SymPoint from_group(const Matrix& g);
  // Same, with a separately computed inverse (e.g. g^{-N} built from the
  // inverse generator) to avoid inverting an ill-conditioned factor.
  static SymPoint from_group(const Matrix& g, const Matrix& g_inverse);
  static SymPoint origin(int n);
  // diag(exp(2 v)): the point at Delta-distance v from o in the model flat.
  static SymPoint from_flat(const Vector& v);

  int dim() const { return static_cast<int>(factor_.rows()); }
  Matrix matrix() const { return factor_ * factor_.transpose(); }
  const Matrix& factor() const { return factor_; }
  const Matrix& inverse_factor() const { return inverse_factor_; }

  // g o x = g x g^T.
  SymPoint act(const Matrix& g) const;

 private:
  SymPoint(Matrix factor, Matrix inverse_factor)
      : factor_(std::move(factor)), inverse_factor_(std::move(inverse_factor)) {}
  Matrix factor_;
  Matrix inverse_factor_;
};

// Vector in the closed euclidean Weyl chamber: descending, zero sum.
class DeltaVector {
 public:
  DeltaVector() = default;
  // Validates descending order and zero sum (1e-10, scaled by the norm).
  explicit DeltaVector(Vector v);
  // Sorts descending and subtracts the mean.
  static DeltaVector normalized(Vector v);

  const Vector& values() const { return v_; }
  double operator[](Eigen::Index i) const { return v_(i); }
  int size() const { return static_cast<int>(v_.size()); }
  double norm() const { return v_.norm(); }
  Vector gaps() const;
  double min_gap() const;
  // iota(v) = (-v_n, ..., -v_1).
  DeltaVector iota() const;

 private:
  Vector v_;
};

// Theta inside the open chamber: normalized vectors whose consecutive gaps
// are all >= lower_margin, optionally cut further by linear constraints
// a . (v/|v|) >= b. Constraints are applied to v and iota(v), which keeps
// the cone iota-invariant.
class RegularityCone {
 public:
  struct Constraint {
    Vector a;
    double b;
  };
  explicit RegularityCone(double lower_margin, std::vector<Constraint> constraints = {});
  double lower_margin() const { return margin_; }
  bool contains(const DeltaVector& v) const;
  // Smallest normalized gap minus the margin (>= 0 inside).
  double margin_of(const DeltaVector& v) const;

 private:
  double margin_;
  std::vector<Constraint> constraints_;
};

// phi(v) = sum c_i v_i. Default c_i = n + 1 - 2i (sum of positive roots).
class FinslerFunctional {
 public:
  static FinslerFunctional standard(int n);
  // c must be strictly decreasing with c_j + c_{n+1-j} constant, which makes
  // phi positive on the chamber and iota-invariant.
  explicit FinslerFunctional(Vector c);

  const Vector& coefficients() const { return c_; }
  double operator()(const DeltaVector& v) const { return c_.dot(v.values()); }

 private:
  Vector c_;
};

struct CartanDecomposition {
  Matrix U;
  Vector mu;  // singular values, descending
  Matrix V;   // g = U diag(mu) V^T
};

CartanDecomposition cartan(const Matrix& g);

DeltaVector delta_distance(const SymPoint& x, const SymPoint& y);
double finsler_distance(const SymPoint& x, const SymPoint& y, const FinslerFunctional& phi);
double finsler_distance(const SymPoint& x, const SymPoint& y);
// 2 |d_Delta(x, y)|, the distance of the metric tr(x^-1 dx x^-1 dx).
double riemannian_distance(const SymPoint& x, const SymPoint& y);

// Point at fraction t of the geodesic from x to y.
SymPoint geodesic_point(const SymPoint& x, const SymPoint& y, double t);
SymPoint midpoint(const SymPoint& x, const SymPoint& y);

// Riemannian inner product tr(x^-1 a x^-1 b) of tangent vectors at x.
double tangent_inner(const SymPoint& x, const Matrix& a, const Matrix& b);
// Velocity at t = 0 of the unit-time geodesic from x to y.
Matrix log_map(const SymPoint& x, const SymPoint& y);

struct RegularityReport {
  // margins[k][l] = log(mu_l / mu_{l+1}) of the k-th matrix.
  std::vector<std::vector<double>> margins;
  std::vector<bool> in_cone;
  bool regular = false;
};

// Margins of each matrix; the sequence is called regular when each margin
// index grows along the sequence and ends above `threshold`.
RegularityReport sequence_regularity(std::span<const Matrix> gs, const RegularityCone& cone,
                                     double threshold = 1.0);

bool theta_regular_segment(const SymPoint& x, const SymPoint& y, const RegularityCone& cone);

struct HoroEstimate {
  std::vector<double> times;
  std::vector<double> values;
  double final_value = 0;
  bool converged = false;
};

struct HoroOptions {
  double tolerance = 1e-6;
};

// Estimates of phi(d(x, p_t)) - phi(d(o, p_t)) along the ray
// p_t = (h e^{tD})(h e^{tD})^T, h = F_p k, where F_p is the Cholesky factor
// of p and k an optional orthogonal frame.
HoroEstimate horofunction_estimate(const SymPoint& p, const DeltaVector& direction, const SymPoint& x,
                                   std::span<const double> times, const FinslerFunctional& phi,
                                   const std::optional<Matrix>& frame = std::nullopt, HoroOptions options = {});
// Same along the ray with explicit base matrix h (any invertible matrix).
HoroEstimate horofunction_ray_estimate(const Matrix& h, const DeltaVector& direction, const SymPoint& x,
                                       std::span<const double> times, const FinslerFunctional& phi,
                                       HoroOptions options = {});

// Product of many matrices kept as Q diag(e^d) T with Q orthogonal and T
// well conditioned, so singular values spanning hundreds of orders of
// magnitude stay accurate.
class MatrixProduct {
 public:
  explicit MatrixProduct(int n);
  void left_multiply(const Matrix& a);
  // log singular values, descending.
  Vector log_singular_values() const;
  // Left singular vectors (columns, descending singular values).
  Matrix left_singular_vectors() const;
  Matrix to_matrix() const;

 private:
  Matrix q_;
  Vector d_;
  Matrix t_;
  linalg::Svd svd() const;
};

}  // namespace weylgeom
