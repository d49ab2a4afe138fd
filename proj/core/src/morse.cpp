#include "weylgeom/morse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "weylgeom/error.hpp"
#include "weylgeom/flagdyn.hpp"

#include <Eigen/SVD>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/eigen.hpp>

namespace weylgeom {

namespace {

constexpr double kTieRelative = 1e-8;

// Left singular frame K of F_x^-1 F_y; the zeta direction at x is
// F_x K diag(zeta) K^T F_x^T, so angles only need the frames.
Matrix zeta_frame(const SymPoint& x, const SymPoint& y) {
  if (x.dim() != y.dim()) throw Error(Errc::InvalidArgument, "points have different dimensions");
  const MatrixL m = x.inverse_factor().cast<long double>() * y.factor().cast<long double>();
  const auto svd = linalg::jacobi_svd(m);
  Vector ls = svd.log_sigma;
  ls.array() -= ls.mean();
  const double norm = ls.norm();
  if (!(norm > 0)) throw Error(Errc::TieError, "segment is degenerate (endpoints coincide)");
  for (Eigen::Index i = 0; i + 1 < ls.size(); ++i)
    if (ls(i) - ls(i + 1) < kTieRelative * norm) throw Error(Errc::TieError, "segment lies on a wall of the chamber");
  return svd.U;
}

double frame_angle(const Matrix& k1, const Matrix& k2, const ZetaType& zeta) {
  // Unit vectors a = diag(zeta), b = O diag(zeta) O^T with O = K1^T K2; the
  // chord formula keeps small angles accurate.
  const Matrix o = k1.transpose() * k2;
  const Matrix a = zeta.values().asDiagonal();
  const Matrix b = o * a * o.transpose();
  return 2.0 * std::asin(std::min(1.0, (a - b).norm() / 2.0));
}

void check_zeta(const SymPoint& x, const ZetaType& zeta) {
  if (zeta.size() != x.dim()) throw Error(Errc::InvalidArgument, "zeta type has wrong dimension");
}

}  // namespace

// --- zeta type -------------------------------------------------------------

ZetaType::ZetaType(Vector zeta) {
  const double norm = zeta.norm();
  if (zeta.size() < 2 || !(norm > 0)) throw Error(Errc::InvalidArgument, "zeta must be a nonzero vector, n >= 2");
  zeta /= norm;
  const Eigen::Index n = zeta.size();
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(zeta(i) - zeta(i + 1) > 1e-12)) throw Error(Errc::InvalidArgument, "zeta must be regular (strictly descending)");
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::fabs(zeta(i) + zeta(n - 1 - i)) > 1e-12)
      throw Error(Errc::InvalidArgument, "zeta must be iota-invariant");
  zeta_ = std::move(zeta);
}

ZetaType ZetaType::standard(int n) {
  Vector v(n);
  for (int i = 0; i < n; ++i) v(i) = n - 1 - 2 * i;
  return ZetaType(v);
}

Matrix zeta_direction(const SymPoint& x, const SymPoint& y, const ZetaType& zeta) {
  check_zeta(x, zeta);
  const Matrix k = x.factor() * zeta_frame(x, y);
  return k * zeta.values().asDiagonal() * k.transpose();
}

double zeta_angle(const SymPoint& x, const SymPoint& y1, const SymPoint& y2, const ZetaType& zeta) {
  check_zeta(x, zeta);
  return frame_angle(zeta_frame(x, y1), zeta_frame(x, y2), zeta);
}

double diamond_defect(const SymPoint& x, const SymPoint& y, const SymPoint& z, const FinslerFunctional& phi) {
  return finsler_distance(x, z, phi) + finsler_distance(z, y, phi) - finsler_distance(x, y, phi);
}

bool diamond_membership(const SymPoint& x, const SymPoint& y, const SymPoint& z, const FinslerFunctional& phi,
                        double tol) {
  return diamond_defect(x, y, z, phi) <= tol;
}

// --- straight paths --------------------------------------------------------

std::string_view violation_name(PathViolation::Kind kind) {
  switch (kind) {
    case PathViolation::Kind::Spacing: return "spacing";
    case PathViolation::Kind::Regularity: return "regularity";
    case PathViolation::Kind::Straightness: return "straightness";
  }
  return "unknown";
}

PathCertificate straightness_check(std::span<const SymPoint> path, const RegularityCone& theta, const ZetaType& zeta,
                                   double epsilon, double s) {
  if (path.size() < 2) throw Error(Errc::InvalidArgument, "a path needs at least two points");
  PathCertificate c;
  c.spacing_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const auto v = delta_distance(path[i], path[i + 1]);
    const double len = 2.0 * v.norm();
    c.segment_lengths.push_back(len);
    c.spacing_margin = std::min(c.spacing_margin, len - s);
    const bool reg = len > 0 && theta.contains(v);
    c.regularity_flags.push_back(reg);
    if (!c.first_violation && len < s) c.first_violation = PathViolation{PathViolation::Kind::Spacing, i};
    if (!c.first_violation && !reg) c.first_violation = PathViolation{PathViolation::Kind::Regularity, i};
  }
  for (std::size_t i = 1; i + 1 < path.size(); ++i) {
    double angle;
    try {
      angle = zeta_angle(path[i], path[i - 1], path[i + 1], zeta);
    } catch (const Error& e) {
      if (e.code() != Errc::TieError) throw;
      throw Error(Errc::TieError, std::string(e.what()) + " at vertex " + std::to_string(i));
    }
    c.vertex_angles.push_back(angle);
    const double margin = angle - (std::numbers::pi - epsilon);
    c.straightness_margin = c.straightness_margin ? std::min(*c.straightness_margin, margin) : margin;
    if (!c.first_violation && margin < 0) c.first_violation = PathViolation{PathViolation::Kind::Straightness, i};
  }
  c.pass = !c.first_violation;
  return c;
}

// --- Schottky certificate ------------------------------------------------

namespace {

// Orbit points of high powers have factors with condition numbers near
// 16^N, so the midpoint geometry is carried out in 100 digit floats.
using Real = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<100>, boost::multiprecision::et_off>;
using MatrixH = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

struct PointH {
  MatrixH f, finv;
};

struct SvdH {
  MatrixH u;
  std::vector<Real> log_sigma;  // centered, descending
};

MatrixH matrix_power(const MatrixH& g, int n) {
  MatrixH r = MatrixH::Identity(g.rows(), g.cols());
  for (int i = 0; i < n; ++i) r = g * r;
  return r;
}

SvdH relative_svd_h(const PointH& x, const PointH& y) {
  const MatrixH m = x.finv * y.f;
  Eigen::JacobiSVD<MatrixH> svd(m, Eigen::ComputeFullU);
  SvdH out;
  out.u = svd.matrixU();
  Real mean = 0;
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out.log_sigma.push_back(log(svd.singularValues()(i)));
    mean += out.log_sigma.back();
  }
  mean /= m.rows();
  for (auto& l : out.log_sigma) l -= mean;
  return out;
}

PointH midpoint_h(const PointH& x, const PointH& y) {
  const SvdH s = relative_svd_h(x, y);
  const Eigen::Index n = x.f.rows();
  MatrixH d = MatrixH::Zero(n, n), dinv = MatrixH::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    d(i, i) = exp(s.log_sigma[static_cast<std::size_t>(i)] / 2);
    dinv(i, i) = 1 / d(i, i);
  }
  return {x.f * s.u * d, dinv * s.u.transpose() * x.finv};
}

DeltaVector delta_h(const PointH& x, const PointH& y) {
  const SvdH s = relative_svd_h(x, y);
  Vector v(static_cast<Eigen::Index>(s.log_sigma.size()));
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = static_cast<double>(s.log_sigma[static_cast<std::size_t>(i)]);
  return DeltaVector::normalized(v);
}

Matrix frame_h(const PointH& x, const PointH& y) {
  const SvdH s = relative_svd_h(x, y);
  Real norm = 0;
  for (const auto& l : s.log_sigma) norm += l * l;
  norm = sqrt(norm);
  if (!(norm > 0)) throw Error(Errc::TieError, "segment is degenerate (endpoints coincide)");
  for (std::size_t i = 0; i + 1 < s.log_sigma.size(); ++i)
    if (s.log_sigma[i] - s.log_sigma[i + 1] < kTieRelative * norm)
      throw Error(Errc::TieError, "segment lies on a wall of the chamber");
  return s.u.unaryExpr([](const Real& r) { return static_cast<double>(r); });
}

void require_antipodal_letters(std::span<const Matrix> generators) {
  std::vector<Flag> flags;
  for (const auto& g : generators) {
    flags.push_back(attracting_flag(g));
    flags.push_back(repelling_flag(g));
  }
  for (std::size_t i = 0; i < flags.size(); ++i)
    for (std::size_t j = i + 1; j < flags.size(); ++j) {
      bool ok = false;
      try {
        ok = is_antipodal(flags[i], flags[j]);
      } catch (const Error& e) {
        if (e.code() != Errc::AmbiguousRank) throw;
      }
      if (!ok)
        throw Error(Errc::NotAntipodalGenerators, "fixed flags " + std::to_string(i) + " and " + std::to_string(j) +
                                                      " of the generators are not antipodal");
    }
}

}  // namespace

SchottkyReport schottky_certificate(std::span<const Matrix> generators, int N, const RegularityCone& theta,
                                    const ZetaType& zeta, SchottkyOptions options) {
  if (generators.empty()) throw Error(Errc::InvalidArgument, "need at least one generator");
  if (N < 1) throw Error(Errc::InvalidArgument, "N must be at least 1");
  const int n = static_cast<int>(generators.front().rows());
  for (const auto& g : generators)
    if (g.rows() != n || g.cols() != n) throw Error(Errc::InvalidArgument, "generators must be square of equal size");
  if (zeta.size() != n) throw Error(Errc::InvalidArgument, "zeta type has wrong dimension");
  require_antipodal_letters(generators);

  // letters[2i] = g_i^N, letters[2i+1] = g_i^-N, each with its inverse.
  std::vector<PointH> letters;
  for (const auto& g : generators) {
    const MatrixH gh = g.cast<Real>();
    const MatrixH gi = gh.inverse();
    const MatrixH p = matrix_power(gh, N), pi = matrix_power(gi, N);
    letters.push_back({p, pi});
    letters.push_back({pi, p});
  }
  const PointH o{MatrixH::Identity(n, n), MatrixH::Identity(n, n)};
  const int k = static_cast<int>(letters.size());

  SchottkyReport report;
  report.N = N;
  report.spacing_margin = std::numeric_limits<double>::infinity();
  report.angle_margin = std::numeric_limits<double>::infinity();
  report.pass = true;
  for (int a = 0; a < k; ++a)
    for (int b = 0; b < k; ++b) {
      if (a == b) continue;
      for (int c = 0; c < k; ++c) {
        if (c == (b ^ 1)) continue;
        const int word[3] = {a, b, c};
        SchottkyTriple t;
        t.letters = word_to_string(word);
        const PointH& x0 = letters[static_cast<std::size_t>(a)];
        const PointH& x2 = letters[static_cast<std::size_t>(b)];
        const PointH x3{x2.f * letters[static_cast<std::size_t>(c)].f,
                        letters[static_cast<std::size_t>(c)].finv * x2.finv};
        const PointH m0 = midpoint_h(x0, o), m1 = midpoint_h(o, x2), m2 = midpoint_h(x2, x3);
        const DeltaVector d01 = delta_h(m0, m1), d12 = delta_h(m1, m2);
        t.spacing[0] = 2.0 * d01.norm();
        t.spacing[1] = 2.0 * d12.norm();
        t.regular[0] = theta.contains(d01);
        t.regular[1] = theta.contains(d12);
        const Matrix k0 = frame_h(m1, m0), kx1 = frame_h(m1, o);
        const Matrix k2 = frame_h(m1, m2), kx2 = frame_h(m1, x2);
        t.half_angles[0] = frame_angle(k0, kx1, zeta);
        t.half_angles[1] = frame_angle(k2, kx2, zeta);
        t.straightness_angle = frame_angle(k0, k2, zeta);
        const double half = options.epsilon / 2;
        t.pass = t.spacing[0] >= options.s && t.spacing[1] >= options.s && t.regular[0] && t.regular[1] &&
                 t.half_angles[0] < half && t.half_angles[1] < half;
        report.spacing_margin = std::min({report.spacing_margin, t.spacing[0] - options.s, t.spacing[1] - options.s});
        report.angle_margin = std::min({report.angle_margin, half - t.half_angles[0], half - t.half_angles[1]});
        report.pass = report.pass && t.pass;
        report.triples.push_back(std::move(t));
      }
    }
  return report;
}

SchottkySearch schottky_search(std::span<const Matrix> generators, int n_max, int confirm, const RegularityCone& theta,
                               const ZetaType& zeta, SchottkyOptions options) {
  if (confirm < 0 || n_max < 1) throw Error(Errc::InvalidArgument, "need n_max >= 1 and confirm >= 0");
  SchottkySearch out;
  int run = 0;
  for (int N = 1; N <= n_max + confirm; ++N) {
    out.reports.push_back(schottky_certificate(generators, N, theta, zeta, options));
    run = out.reports.back().pass ? run + 1 : 0;
    if (run == confirm + 1) {
      out.n0 = N - confirm;
      break;
    }
    if (run == 0 && N >= n_max) break;
  }
  return out;
}

OrbitGrowth orbit_growth(std::span<const Matrix> generators, int max_len) {
  if (generators.empty() || max_len < 1) throw Error(Errc::InvalidArgument, "need generators and max_len >= 1");
  const int n = static_cast<int>(generators.front().rows());
  std::vector<Matrix> letters;
  for (const auto& g : generators) {
    letters.push_back(g);
    letters.push_back(g.inverse());
  }
  OrbitGrowth out;
  out.min_ratio = std::numeric_limits<double>::infinity();
  // Depth-first over reduced words, prepending letters.
  struct Frame {
    MatrixProduct product;
    int first;
    int length;
  };
  std::vector<Frame> stack;
  stack.push_back({MatrixProduct(n), -1, 0});
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    if (f.length > 0) {
      Vector ls = f.product.log_singular_values();
      ls.array() -= ls.mean();
      const double ratio = 2.0 * ls.norm() / f.length;
      out.min_ratio = std::min(out.min_ratio, ratio);
      out.max_ratio = std::max(out.max_ratio, ratio);
      ++out.words;
    }
    if (f.length == max_len) continue;
    for (int l = static_cast<int>(letters.size()) - 1; l >= 0; --l) {
      if (f.first >= 0 && l == (f.first ^ 1)) continue;
      Frame next{f.product, l, f.length + 1};
      next.product.left_multiply(letters[static_cast<std::size_t>(l)]);
      stack.push_back(std::move(next));
    }
  }
  return out;
}

// --- Morse defects -------------------------------------------------------

MorseDefectReport morse_defect_report(std::span<const SymPoint> path, const RegularityCone& theta, double B, double L,
                                      double A, const FinslerFunctional& phi) {
  if (path.size() < 2) throw Error(Errc::InvalidArgument, "a path needs at least two points");
  if (!(L > 0)) throw Error(Errc::InvalidArgument, "L must be positive");
  const std::size_t n = path.size();
  Matrix riem(n, n), fins(n, n);
  std::vector<std::vector<double>> reg(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    riem(i, i) = fins(i, i) = 0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const auto v = delta_distance(path[i], path[j]);
      riem(i, j) = riem(j, i) = 2.0 * v.norm();
      fins(i, j) = phi(v);
      fins(j, i) = phi(v.iota());
      reg[i][j] = v.norm() > 0 ? theta.margin_of(v) : -theta.lower_margin();
    }
  }
  MorseDefectReport r;
  r.qi_lower_margin = r.qi_upper_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      const double dt = static_cast<double>(j - i);
      const double lo = riem(i, j) - (dt / L - A);
      const double hi = L * dt + A - riem(i, j);
      r.qi_lower_margin = std::min(r.qi_lower_margin, lo);
      r.qi_upper_margin = std::min(r.qi_upper_margin, hi);
      const double slack = 1e-9 * (1.0 + riem(i, j));
      if (lo < -slack || hi < -slack) ++r.qi_violations;
    }
  for (std::size_t len = 2; len < n; ++len) {
    if (!(static_cast<double>(len) > B)) continue;
    WindowDefect w;
    w.length = len;
    w.min_regularity_margin = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + len < n; ++i) {
      const std::size_t j = i + len;
      w.min_regularity_margin = std::min(w.min_regularity_margin, reg[i][j]);
      for (std::size_t m = i + 1; m < j; ++m) {
        const double d = fins(i, m) + fins(m, j) - fins(i, j);
        if (d > w.max_defect) {
          w.max_defect = d;
          w.worst_start = i;
        }
      }
    }
    r.max_defect = std::max(r.max_defect, w.max_defect);
    r.windows.push_back(w);
  }
  return r;
}

SymPoint sl3_flat_point(double x, double y) {
  Vector v(3);
  v << 2 * x / std::sqrt(6.0), -x / std::sqrt(6.0) + y / std::sqrt(2.0), -x / std::sqrt(6.0) - y / std::sqrt(2.0);
  return SymPoint::from_flat(v);
}

}  // namespace weylgeom
