#pragma once

#include <Eigen/Dense>

namespace weylgeom {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using MatrixL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
using VectorL = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

namespace linalg {

struct Svd {
  Matrix U;          // left singular vectors (columns)
  Vector sigma;      // descending
  Vector log_sigma;  // log of sigma, computed without under/overflow
  Matrix V;          // right singular vectors
};

// One-sided (Hestenes) Jacobi SVD of a square matrix in long double.
// Relatively accurate for column-graded inputs A = B * diag(d) with B
// well conditioned, which is how products with exponentially separated
// singular values are fed in.
Svd jacobi_svd(const MatrixL& a);
Svd jacobi_svd(const Matrix& a);

// Flip column signs so the first entry with |x| > 1e-12 in each column of U
// is positive; V's columns follow so that U S V^T is unchanged.
void canonicalize_signs(Svd& svd);

// Q of the QR decomposition with R_ii > 0 (Householder). Q spans the same
// nested column spaces as a.
Matrix orthonormalize(const Matrix& a, Vector* r_diag = nullptr);

// Symmetric matrix power via eigendecomposition (positive definite input).
Matrix spd_power(const Matrix& p, double exponent);

double symmetry_defect(const Matrix& m);

}  // namespace linalg
}  // namespace weylgeom
