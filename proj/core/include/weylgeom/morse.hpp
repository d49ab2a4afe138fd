#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "weylgeom/symspace.hpp"

namespace weylgeom {

// Regular, iota-invariant unit vector of the open chamber.
class ZetaType {
 public:
  // Normalizes to unit length; throws InvalidArgument unless the gaps are
  // positive and iota(zeta) = zeta.
  explicit ZetaType(Vector zeta);
  // (n-1, n-3, ..., -(n-1)) / norm.
  static ZetaType standard(int n);

  const Vector& values() const { return zeta_; }
  int size() const { return static_cast<int>(zeta_.size()); }

 private:
  Vector zeta_;
};

// Unit tangent vector at x of type zeta pointing into the chamber of the
// segment x -> y. TieError when the segment lies on a wall.
Matrix zeta_direction(const SymPoint& x, const SymPoint& y, const ZetaType& zeta);

// Riemannian angle at x between the zeta directions towards y1 and y2.
double zeta_angle(const SymPoint& x, const SymPoint& y1, const SymPoint& y2, const ZetaType& zeta);

// phi(d(x,z)) + phi(d(z,y)) - phi(d(x,y)); zero exactly on the diamond.
double diamond_defect(const SymPoint& x, const SymPoint& y, const SymPoint& z, const FinslerFunctional& phi);
bool diamond_membership(const SymPoint& x, const SymPoint& y, const SymPoint& z, const FinslerFunctional& phi,
                        double tol = 1e-9);

struct PathViolation {
  enum class Kind { Spacing, Regularity, Straightness };
  Kind kind;
  std::size_t index;  // segment index for spacing/regularity, vertex index for straightness
};

std::string_view violation_name(PathViolation::Kind kind);

struct PathCertificate {
  std::vector<double> segment_lengths;
  std::vector<bool> regularity_flags;
  std::vector<double> vertex_angles;  // interior vertices 1..n-2
  double spacing_margin = 0;          // min length - s
  // min angle - (pi - epsilon); empty without interior vertices.
  std::optional<double> straightness_margin;
  bool pass = false;
  std::optional<PathViolation> first_violation;
};

PathCertificate straightness_check(std::span<const SymPoint> path, const RegularityCone& theta,
                                   const ZetaType& zeta, double epsilon, double s);

struct SchottkyOptions {
  double epsilon = 0.2;
  double s = 10.0;
};

struct SchottkyTriple {
  std::string letters;                 // alpha beta gamma, e.g. "aBb"
  double spacing[2] = {0, 0};          // d(m0, m1), d(m1, m2)
  bool regular[2] = {false, false};
  double half_angles[2] = {0, 0};      // at m1 towards (m0, x1) and (m2, x2)
  double straightness_angle = 0;       // angle at m1 between m0 and m2
  bool pass = false;
};

struct SchottkyReport {
  int N = 0;
  std::vector<SchottkyTriple> triples;
  double spacing_margin = 0;      // min spacing - s
  double angle_margin = 0;        // epsilon/2 - max half angle
  bool pass = false;
};

// Midpoint path check for rho(alpha_i) = g_i^N: every triple of letters
// alpha != beta, gamma != beta^-1 from {g_i, g_i^-1}, the quadruple
// (alpha^N o, o, beta^N o, beta^N gamma^N o) and its midpoints m0 m1 m2.
// NotAntipodalGenerators unless the attracting flags of all letters are
// pairwise antipodal.
SchottkyReport schottky_certificate(std::span<const Matrix> generators, int N, const RegularityCone& theta,
                                    const ZetaType& zeta, SchottkyOptions options = {});

struct SchottkySearch {
  std::optional<int> n0;  // smallest N passing at N..N+confirm
  std::vector<SchottkyReport> reports;
};

SchottkySearch schottky_search(std::span<const Matrix> generators, int n_max, int confirm, const RegularityCone& theta,
                               const ZetaType& zeta, SchottkyOptions options = {});

struct OrbitGrowth {
  double min_ratio = 0;  // min over reduced words of d(o, w o) / |w|
  double max_ratio = 0;
  std::size_t words = 0;
};

// Riemannian displacement per letter over all freely reduced words of
// length 1..max_len in the given matrices.
OrbitGrowth orbit_growth(std::span<const Matrix> generators, int max_len);

struct WindowDefect {
  std::size_t length = 0;
  double max_defect = 0;
  std::size_t worst_start = 0;
  double min_regularity_margin = 0;  // over the window endpoint segments
};

struct MorseDefectReport {
  double qi_lower_margin = 0;  // min of d(q_s, q_t) - (|t-s|/L - A)
  double qi_upper_margin = 0;  // min of L|t-s| + A - d(q_s, q_t)
  std::size_t qi_violations = 0;
  std::vector<WindowDefect> windows;  // window lengths > B
  double max_defect = 0;
};

// Quasi-isometry margins (Riemannian distance, integer parameters) and, for
// every window longer than B, the largest diamond defect of an interior
// point with respect to the window endpoints.
MorseDefectReport morse_defect_report(std::span<const SymPoint> path, const RegularityCone& theta, double B,
                                      double L, double A, const FinslerFunctional& phi);

// Point (x, y) of the model flat of SL(3) in an orthonormal basis whose
// first axis (2,-1,-1)/sqrt 6 is a wall; the open chamber is 0 < angle < 60 deg.
SymPoint sl3_flat_point(double x, double y);

}  // namespace weylgeom
