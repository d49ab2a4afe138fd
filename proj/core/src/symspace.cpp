#include "weylgeom/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weylgeom/error.hpp"

namespace weylgeom {

namespace {

double rel_tol(double norm) { return 1e-10 * std::max(1.0, norm); }

Matrix inverse_checked(const Matrix& g) {
  Eigen::FullPivLU<Matrix> lu(g);
  if (!lu.isInvertible()) throw Error(Errc::SingularInput, "matrix is singular");
  return lu.inverse();
}

// |det g|^{-1/n}, computed through the LU factorization.
double det_normalizer(const Matrix& g) {
  const double det = g.determinant();
  if (!(std::fabs(det) > 0) || !std::isfinite(det)) throw Error(Errc::SingularInput, "matrix has zero or non-finite determinant");
  return std::pow(std::fabs(det), -1.0 / static_cast<double>(g.rows()));
}

Vector log_sigma_centered(const linalg::Svd& svd) {
  Vector v = svd.log_sigma;
  v.array() -= v.mean();
  return v;
}

// Lexicographic order on factor entries; used to evaluate d(x, y) and
// d(y, x) from the same decomposition.
bool canonical_first(const SymPoint& x, const SymPoint& y) {
  const Matrix px = x.matrix(), py = y.matrix();
  for (Eigen::Index i = 0; i < px.size(); ++i) {
    if (px.data()[i] < py.data()[i]) return true;
    if (px.data()[i] > py.data()[i]) return false;
  }
  return true;
}

linalg::Svd relative_svd(const SymPoint& x, const SymPoint& y) {
  const MatrixL m = x.inverse_factor().cast<long double>() * y.factor().cast<long double>();
  return linalg::jacobi_svd(m);
}

}  // namespace

// --- SymPoint --------------------------------------------------------------

SymPoint SymPoint::from_matrix(const Matrix& p) {
  if (p.rows() != p.cols() || p.rows() == 0) throw Error(Errc::InvalidArgument, "point must be a nonempty square matrix");
  const double scale = p.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale) || linalg::symmetry_defect(p) > 1e-12 * std::max(1.0, scale))
    throw Error(Errc::NotPositiveDefinite, "matrix is not symmetric");
  Eigen::LLT<Matrix> llt(p);
  if (llt.info() != Eigen::Success) throw Error(Errc::NotPositiveDefinite, "matrix is not positive definite");
  Matrix l = llt.matrixL();
  for (Eigen::Index i = 0; i < l.rows(); ++i)
    if (!(l(i, i) > 0)) throw Error(Errc::NotPositiveDefinite, "matrix is not positive definite");
  double log_det = 0;
  for (Eigen::Index i = 0; i < l.rows(); ++i) log_det += std::log(l(i, i));
  l *= std::exp(-log_det / static_cast<double>(l.rows()));
  Matrix linv = l.triangularView<Eigen::Lower>().solve(Matrix::Identity(l.rows(), l.cols()));
  return SymPoint(std::move(l), std::move(linv));
}

SymPoint SymPoint::from_group(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw Error(Errc::InvalidArgument, "group element must be square");
  const double s = det_normalizer(g);
  return SymPoint(g * s, inverse_checked(g) / s);
}

SymPoint SymPoint::from_group(const Matrix& g, const Matrix& g_inverse) {
  if (g.rows() != g.cols() || g_inverse.rows() != g.rows() || g_inverse.cols() != g.cols())
    throw Error(Errc::InvalidArgument, "group element and inverse must be square of equal size");
  const double s = det_normalizer(g);
  return SymPoint(g * s, g_inverse / s);
}

SymPoint SymPoint::origin(int n) {
  if (n < 1) throw Error(Errc::InvalidArgument, "dimension must be positive");
  return SymPoint(Matrix::Identity(n, n), Matrix::Identity(n, n));
}

SymPoint SymPoint::from_flat(const Vector& v) {
  Vector c = v.array() - v.mean();
  return SymPoint(Matrix(c.array().exp().matrix().asDiagonal()), Matrix((-c).array().exp().matrix().asDiagonal()));
}

SymPoint SymPoint::act(const Matrix& g) const {
  if (g.rows() != dim() || g.cols() != dim()) throw Error(Errc::InvalidArgument, "dimension mismatch in group action");
  const double s = det_normalizer(g);
  return SymPoint(g * factor_ * s, inverse_factor_ * inverse_checked(g) / s);
}

// --- DeltaVector -----------------------------------------------------------

DeltaVector::DeltaVector(Vector v) : v_(std::move(v)) {
  const double tol = rel_tol(v_.norm());
  for (Eigen::Index i = 0; i + 1 < v_.size(); ++i)
    if (v_(i) < v_(i + 1) - tol) throw Error(Errc::InvalidArgument, "Delta vector must be descending");
  if (std::fabs(v_.sum()) > tol) throw Error(Errc::InvalidArgument, "Delta vector must have zero sum");
}

DeltaVector DeltaVector::normalized(Vector v) {
  std::sort(v.data(), v.data() + v.size(), std::greater<>());
  v.array() -= v.mean();
  return DeltaVector(std::move(v));
}

Vector DeltaVector::gaps() const {
  Vector g(std::max<Eigen::Index>(0, v_.size() - 1));
  for (Eigen::Index i = 0; i + 1 < v_.size(); ++i) g(i) = v_(i) - v_(i + 1);
  return g;
}

double DeltaVector::min_gap() const {
  const Vector g = gaps();
  return g.size() ? g.minCoeff() : 0.0;
}

DeltaVector DeltaVector::iota() const {
  Vector r(v_.size());
  for (Eigen::Index i = 0; i < v_.size(); ++i) r(i) = -v_(v_.size() - 1 - i);
  return DeltaVector(std::move(r));
}

// --- RegularityCone --------------------------------------------------------

RegularityCone::RegularityCone(double lower_margin, std::vector<Constraint> constraints)
    : margin_(lower_margin), constraints_(std::move(constraints)) {
  if (!(lower_margin > 0)) throw Error(Errc::InvalidArgument, "regularity margin must be positive");
}

double RegularityCone::margin_of(const DeltaVector& v) const {
  const double n = v.norm();
  if (!(n > 0)) return -margin_;
  return v.min_gap() / n - margin_;
}

bool RegularityCone::contains(const DeltaVector& v) const {
  if (margin_of(v) < -1e-12) return false;
  const double n = v.norm();
  const Vector u = v.values() / n;
  const Vector ui = v.iota().values() / n;
  for (const auto& c : constraints_) {
    if (c.a.size() != u.size()) throw Error(Errc::InvalidArgument, "constraint dimension mismatch");
    if (c.a.dot(u) < c.b - 1e-12 || c.a.dot(ui) < c.b - 1e-12) return false;
  }
  return true;
}

// --- FinslerFunctional -----------------------------------------------------

FinslerFunctional FinslerFunctional::standard(int n) {
  Vector c(n);
  for (int i = 0; i < n; ++i) c(i) = n + 1 - 2 * (i + 1);
  return FinslerFunctional(std::move(c));
}

FinslerFunctional::FinslerFunctional(Vector c) : c_(std::move(c)) {
  const Eigen::Index n = c_.size();
  if (n < 1) throw Error(Errc::InvalidArgument, "Finsler coefficients must be nonempty");
  for (Eigen::Index i = 0; i + 1 < n; ++i)
    if (!(c_(i) > c_(i + 1))) throw Error(Errc::InvalidArgument, "Finsler coefficients must be strictly decreasing");
  const double pair = c_(0) + c_(n - 1);
  for (Eigen::Index i = 0; i < n; ++i)
    if (std::fabs(c_(i) + c_(n - 1 - i) - pair) > 1e-12 * std::max(1.0, c_.cwiseAbs().maxCoeff()))
      throw Error(Errc::InvalidArgument, "Finsler coefficients must satisfy c_j + c_{n+1-j} = const");
}

// --- distances -------------------------------------------------------------

CartanDecomposition cartan(const Matrix& g) {
  if (g.rows() != g.cols() || g.rows() == 0) throw Error(Errc::InvalidArgument, "cartan expects a square matrix");
  if (!g.allFinite()) throw Error(Errc::SingularInput, "matrix has non-finite entries");
  auto svd = linalg::jacobi_svd(g);
  if (svd.log_sigma(0) - svd.log_sigma(svd.log_sigma.size() - 1) > std::log(1e15))
    throw Error(Errc::SingularInput, "matrix is singular to machine precision");
  if (std::fabs(svd.log_sigma.sum()) > 1e-8)
    throw Error(Errc::InvalidArgument, "cartan expects |det g| = 1");
  linalg::canonicalize_signs(svd);
  return {svd.U, svd.sigma, svd.V};
}

DeltaVector delta_distance(const SymPoint& x, const SymPoint& y) {
  if (x.dim() != y.dim()) throw Error(Errc::InvalidArgument, "points have different dimensions");
  if (canonical_first(x, y)) return DeltaVector::normalized(log_sigma_centered(relative_svd(x, y)));
  return DeltaVector::normalized(log_sigma_centered(relative_svd(y, x))).iota();
}

double finsler_distance(const SymPoint& x, const SymPoint& y, const FinslerFunctional& phi) {
  if (phi.coefficients().size() != x.dim()) throw Error(Errc::InvalidArgument, "Finsler functional has wrong dimension");
  return phi(delta_distance(x, y));
}

double finsler_distance(const SymPoint& x, const SymPoint& y) {
  return finsler_distance(x, y, FinslerFunctional::standard(x.dim()));
}

double riemannian_distance(const SymPoint& x, const SymPoint& y) { return 2.0 * delta_distance(x, y).norm(); }

SymPoint geodesic_point(const SymPoint& x, const SymPoint& y, double t) {
  const auto svd = relative_svd(x, y);
  const Vector ls = log_sigma_centered(svd);
  const Vector s = (t * ls).array().exp();
  const Vector sinv = (-t * ls).array().exp();
  return SymPoint::from_group(x.factor() * svd.U * s.asDiagonal(),
                              sinv.asDiagonal() * svd.U.transpose() * x.inverse_factor());
}

SymPoint midpoint(const SymPoint& x, const SymPoint& y) { return geodesic_point(x, y, 0.5); }

double tangent_inner(const SymPoint& x, const Matrix& a, const Matrix& b) {
  const Matrix& fi = x.inverse_factor();
  const Matrix ta = fi * a * fi.transpose();
  const Matrix tb = fi * b * fi.transpose();
  return (ta * tb).trace();
}

Matrix log_map(const SymPoint& x, const SymPoint& y) {
  const auto svd = relative_svd(x, y);
  const Vector ls = 2.0 * log_sigma_centered(svd);
  const Matrix k = x.factor() * svd.U;
  return k * ls.asDiagonal() * k.transpose();
}

// --- regularity ------------------------------------------------------------

RegularityReport sequence_regularity(std::span<const Matrix> gs, const RegularityCone& cone, double threshold) {
  if (gs.size() < 2) throw Error(Errc::InvalidArgument, "sequence_regularity needs at least two matrices");
  RegularityReport report;
  for (const auto& g : gs) {
    const auto svd = linalg::jacobi_svd(g);
    std::vector<double> m;
    for (Eigen::Index l = 0; l + 1 < svd.log_sigma.size(); ++l) m.push_back(svd.log_sigma(l) - svd.log_sigma(l + 1));
    report.margins.push_back(std::move(m));
    report.in_cone.push_back(cone.contains(DeltaVector::normalized(svd.log_sigma)));
  }
  const std::size_t n_margins = report.margins.front().size();
  bool regular = n_margins > 0;
  for (std::size_t l = 0; l < n_margins && regular; ++l) {
    for (std::size_t k = 1; k < report.margins.size(); ++k)
      if (report.margins[k][l] < report.margins[k - 1][l] - 1e-12) regular = false;
    if (report.margins.back()[l] < threshold || !(report.margins.back()[l] > report.margins.front()[l]))
      regular = false;
  }
  report.regular = regular;
  return report;
}

bool theta_regular_segment(const SymPoint& x, const SymPoint& y, const RegularityCone& cone) {
  const auto v = delta_distance(x, y);
  if (v.norm() < 1e-12) throw Error(Errc::DegenerateSegment, "segment endpoints coincide");
  return cone.contains(v);
}

// --- horofunctions ---------------------------------------------------------

HoroEstimate horofunction_ray_estimate(const Matrix& h, const DeltaVector& direction, const SymPoint& x,
                                       std::span<const double> times, const FinslerFunctional& phi,
                                       HoroOptions options) {
  const int n = x.dim();
  if (h.rows() != n || h.cols() != n || direction.size() != n || phi.coefficients().size() != n)
    throw Error(Errc::InvalidArgument, "dimension mismatch in horofunction estimate");
  if (n > 1 && !(direction.min_gap() > 1e-12))
    throw Error(Errc::NonRegularDirection, "ray direction must lie in the open chamber");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1])) throw Error(Errc::InvalidArgument, "times must be increasing");

  const MatrixL base_o = h.cast<long double>();
  const MatrixL base_x = x.inverse_factor().cast<long double>() * base_o;
  HoroEstimate out;
  for (double t : times) {
    MatrixL mo = base_o, mx = base_x;
    for (int j = 0; j < n; ++j) {
      const long double s = std::exp(static_cast<long double>(t) * direction[j]);
      mo.col(j) *= s;
      mx.col(j) *= s;
    }
    const double dx = phi(DeltaVector::normalized(log_sigma_centered(linalg::jacobi_svd(mx))));
    const double d0 = phi(DeltaVector::normalized(log_sigma_centered(linalg::jacobi_svd(mo))));
    out.times.push_back(t);
    out.values.push_back(dx - d0);
  }
  if (!out.values.empty()) out.final_value = out.values.back();
  const std::size_t m = out.values.size();
  if (m >= 2) {
    out.converged = std::fabs(out.values[m - 1] - out.values[m - 2]) < options.tolerance;
    // Successive differences must not grow.
    for (std::size_t i = 2; i < m && out.converged; ++i)
      if (std::fabs(out.values[i] - out.values[i - 1]) > std::fabs(out.values[i - 1] - out.values[i - 2]) + options.tolerance)
        out.converged = false;
  }
  return out;
}

HoroEstimate horofunction_estimate(const SymPoint& p, const DeltaVector& direction, const SymPoint& x,
                                   std::span<const double> times, const FinslerFunctional& phi,
                                   const std::optional<Matrix>& frame, HoroOptions options) {
  Matrix h = p.factor();
  if (frame) {
    if ((frame->transpose() * *frame - Matrix::Identity(p.dim(), p.dim())).norm() > 1e-10)
      throw Error(Errc::InvalidArgument, "frame must be orthogonal");
    h = h * *frame;
  }
  return horofunction_ray_estimate(h, direction, x, times, phi, options);
}

// --- MatrixProduct ---------------------------------------------------------

MatrixProduct::MatrixProduct(int n)
    : q_(Matrix::Identity(n, n)), d_(Vector::Zero(n)), t_(Matrix::Identity(n, n)) {}

void MatrixProduct::left_multiply(const Matrix& a) {
  const Eigen::Index n = q_.rows();
  if (a.rows() != n || a.cols() != n) throw Error(Errc::InvalidArgument, "dimension mismatch in product");
  const Matrix x = a * q_;
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  Vector key(n);
  for (Eigen::Index j = 0; j < n; ++j) key(j) = std::log(x.col(j).norm()) + d_(j);
  std::stable_sort(perm.begin(), perm.end(), [&](auto i, auto j) { return key(i) > key(j); });

  Matrix xp(n, n), tp(n, n);
  Vector dp(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto j = perm[static_cast<std::size_t>(k)];
    xp.col(k) = x.col(j);
    tp.row(k) = t_.row(j);
    dp(k) = d_(j);
  }
  Eigen::HouseholderQR<Matrix> qr(xp);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (r(i, i) < 0) {
      q.col(i) *= -1;
      r.row(i) *= -1;
    }
    if (!(r(i, i) > 0)) throw Error(Errc::SingularInput, "product became singular");
  }
  Matrix u = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i; j < n; ++j) u(i, j) = r(i, j) / r(i, i) * std::exp(dp(j) - dp(i));
  for (Eigen::Index i = 0; i < n; ++i) d_(i) = dp(i) + std::log(r(i, i));
  q_ = std::move(q);
  t_ = u * tp;
}

linalg::Svd MatrixProduct::svd() const {
  const Eigen::Index n = q_.rows();
  const double dmax = d_.maxCoeff();
  MatrixL mt = t_.transpose().cast<long double>();
  for (Eigen::Index j = 0; j < n; ++j) mt.col(j) *= std::exp(static_cast<long double>(d_(j) - dmax));
  auto s = linalg::jacobi_svd(mt);
  s.log_sigma.array() += dmax;
  return s;
}

Vector MatrixProduct::log_singular_values() const { return svd().log_sigma; }

Matrix MatrixProduct::left_singular_vectors() const { return q_ * svd().V; }

Matrix MatrixProduct::to_matrix() const { return q_ * d_.array().exp().matrix().asDiagonal() * t_; }

}  // namespace weylgeom
