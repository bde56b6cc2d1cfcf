#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace rmx {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;
using Complex = std::complex<double>;

namespace linalg {

/// Thin SVD with singular values in descending order.
struct SvdResult {
  Matrix u;
  Vector sigma;
  Matrix v_t;
};

struct SymEigResult {
  Vector eigenvalues;   // ascending
  Matrix eigenvectors;  // orthonormal columns
};

SvdResult svd(const Matrix& m);

/// Moore-Penrose inverse via SVD with cutoff 1e-12 * sigma_max.
Matrix pseudo_inverse(const Matrix& m);

/// Eigendecomposition of a symmetric matrix. Input must be symmetric to
/// 1e-10 relative; it is symmetrized before factoring to absorb
/// floating-point drift.
SymEigResult sym_eig(const Matrix& m);

/// All eigenvalues (with multiplicity) of a square real matrix.
std::vector<Complex> eigenvalues_general(const Matrix& m);

/// Largest singular value.
double operator_norm(const Matrix& m);

/// max_k |lambda_k|.
double spectral_radius(const Matrix& m);

}  // namespace linalg
}  // namespace rmx
