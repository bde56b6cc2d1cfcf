#include "rmx/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <stdexcept>

namespace rmx::linalg {

namespace {

void require_finite(const Matrix& m, const char* who) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

void require_square(const Matrix& m, const char* who) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(who) + ": matrix must be square");
  }
}

}  // namespace

SvdResult svd(const Matrix& m) {
  require_finite(m, "svd");
  Eigen::JacobiSVD<Matrix> dec(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("svd: decomposition did not converge");
  }
  return {dec.matrixU(), dec.singularValues(), dec.matrixV().transpose()};
}

Matrix pseudo_inverse(const Matrix& m) {
  require_finite(m, "pseudo_inverse");
  const SvdResult s = svd(m);
  const double smax = s.sigma.size() > 0 ? s.sigma(0) : 0.0;
  const double cutoff = 1e-12 * smax;
  Vector inv = Vector::Zero(s.sigma.size());
  for (Index i = 0; i < s.sigma.size(); ++i) {
    if (s.sigma(i) > cutoff && s.sigma(i) > 0.0) inv(i) = 1.0 / s.sigma(i);
  }
  return s.v_t.transpose() * inv.asDiagonal() * s.u.transpose();
}

SymEigResult sym_eig(const Matrix& m) {
  require_finite(m, "sym_eig");
  require_square(m, "sym_eig");
  const double scale = std::max(1.0, m.norm());
  if ((m - m.transpose()).norm() > 1e-10 * scale) {
    throw std::invalid_argument("sym_eig: input is not symmetric to 1e-10 relative");
  }
  const Matrix sym = 0.5 * (m + m.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> dec(sym);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("sym_eig: iteration did not converge");
  }
  return {dec.eigenvalues(), dec.eigenvectors()};
}

std::vector<Complex> eigenvalues_general(const Matrix& m) {
  require_finite(m, "eigenvalues_general");
  require_square(m, "eigenvalues_general");
  Eigen::EigenSolver<Matrix> dec(m, /*computeEigenvectors=*/false);
  if (dec.info() != Eigen::Success) {
    throw std::runtime_error("eigenvalues_general: QR iteration did not converge");
  }
  std::vector<Complex> out(static_cast<std::size_t>(m.rows()));
  for (Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = dec.eigenvalues()(i);
  return out;
}

double operator_norm(const Matrix& m) {
  require_finite(m, "operator_norm");
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> dec(m);
  return dec.singularValues()(0);
}

double spectral_radius(const Matrix& m) {
  double r = 0.0;
  for (const Complex& ev : eigenvalues_general(m)) r = std::max(r, std::abs(ev));
  return r;
}

}  // namespace rmx::linalg
