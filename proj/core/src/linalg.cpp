#include "weylgeom/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "weylgeom/error.hpp"

namespace weylgeom::linalg {

Svd jacobi_svd(const MatrixL& input) {
  const Eigen::Index n = input.cols();
  if (input.rows() != n) throw Error(Errc::InvalidArgument, "jacobi_svd expects a square matrix");
  MatrixL a = input;
  MatrixL v = MatrixL::Identity(n, n);
  // Scale up front so squared column norms cannot overflow.
  long double scale = 0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) scale = std::max(scale, std::fabs(a(i, j)));
  if (!(scale > 0) || !std::isfinite(static_cast<double>(scale)))
    throw Error(Errc::SingularInput, "matrix is zero or not finite");
  a /= scale;

  const long double tol = 64 * std::numeric_limits<long double>::epsilon();
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        const long double alpha = a.col(p).squaredNorm();
        const long double beta = a.col(q).squaredNorm();
        const long double gamma = a.col(p).dot(a.col(q));
        if (gamma == 0 || std::fabs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const long double zeta = (beta - alpha) / (2 * gamma);
        const long double t = (zeta >= 0 ? 1.0L : -1.0L) / (std::fabs(zeta) + std::sqrt(1 + zeta * zeta));
        const long double c = 1 / std::sqrt(1 + t * t);
        const long double s = c * t;
        for (Eigen::Index i = 0; i < n; ++i) {
          const long double ap = a(i, p), aq = a(i, q);
          a(i, p) = c * ap - s * aq;
          a(i, q) = s * ap + c * aq;
          const long double vp = v(i, p), vq = v(i, q);
          v(i, p) = c * vp - s * vq;
          v(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  VectorL norms(n);
  for (Eigen::Index j = 0; j < n; ++j) norms(j) = a.col(j).norm();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto x, auto y) { return norms(x) > norms(y); });

  Svd out;
  out.U.resize(n, n);
  out.V.resize(n, n);
  out.sigma.resize(n);
  out.log_sigma.resize(n);
  const long double log_scale = std::log(scale);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    if (!(norms(j) > 0)) throw Error(Errc::SingularInput, "matrix is singular");
    out.log_sigma(k) = static_cast<double>(std::log(norms(j)) + log_scale);
    out.sigma(k) = static_cast<double>(norms(j) * scale);
    out.U.col(k) = (a.col(j) / norms(j)).cast<double>();
    out.V.col(k) = v.col(j).cast<double>();
  }
  return out;
}

Svd jacobi_svd(const Matrix& a) { return jacobi_svd(MatrixL(a.cast<long double>())); }

void canonicalize_signs(Svd& svd) {
  for (Eigen::Index k = 0; k < svd.U.cols(); ++k) {
    for (Eigen::Index i = 0; i < svd.U.rows(); ++i) {
      if (std::fabs(svd.U(i, k)) > 1e-12) {
        if (svd.U(i, k) < 0) {
          svd.U.col(k) *= -1;
          svd.V.col(k) *= -1;
        }
        break;
      }
    }
  }
}

Matrix orthonormalize(const Matrix& a, Vector* r_diag) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  if (r_diag) r_diag->resize(a.cols());
  for (Eigen::Index i = 0; i < a.cols(); ++i) {
    if (r(i, i) < 0) q.col(i) *= -1;
    if (r_diag) (*r_diag)(i) = std::fabs(r(i, i));
  }
  return q;
}

Matrix spd_power(const Matrix& p, double exponent) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(p);
  Vector ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    if (!(ev(i) > 0)) throw Error(Errc::NotPositiveDefinite, "matrix is not positive definite");
    ev(i) = std::pow(ev(i), exponent);
  }
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

double symmetry_defect(const Matrix& m) { return (m - m.transpose()).cwiseAbs().maxCoeff(); }

}  // namespace weylgeom::linalg
