#include "rmx/spectral.hpp"

#include <stdexcept>

namespace rmx {

Matrix assemble_mg(const IntrinsicBlocks& blocks, double tau) {
  if (tau <= 0.0) throw std::invalid_argument("assemble_mg: tau must be positive");
  const Index d1 = blocks.c.rows();
  const Index d2 = blocks.a.rows();
  Matrix m(d1 + d2, d1 + d2);
  m.topLeftCorner(d1, d1) = -blocks.c;
  m.topRightCorner(d1, d2) = -blocks.b;
  m.bottomLeftCorner(d2, d1) = tau * blocks.b.transpose();
  m.bottomRightCorner(d2, d2) = -tau * blocks.a;
  return m;
}

Matrix assemble_ms(const IntrinsicBlocks& blocks, double tau, double theta) {
  if (theta < 0.0) throw std::invalid_argument("assemble_ms: theta must be >= 0");
  const Index d1 = blocks.c.rows();
  const Index d2 = blocks.a.rows();
  Matrix m = assemble_mg(blocks, tau);
  m.topLeftCorner(d1, d1) -= theta * (blocks.b * blocks.b.transpose());
  m.topRightCorner(d1, d2) += theta * (blocks.b * blocks.a);
  return m;
}

double gamma_dot(const Matrix& m) {
  const auto evs = linalg::eigenvalues_general(m);
  double worst = -std::numeric_limits<double>::infinity();  // max Re/|l|^2
  double max_re = -std::numeric_limits<double>::infinity();
  for (const Complex& ev : evs) {
    max_re = std::max(max_re, ev.real());
    worst = std::max(worst, ev.real() / std::norm(ev));
  }
  if (!(max_re < -1e-12)) {
    throw std::invalid_argument("gamma_dot: matrix is not Hurwitz stable, no valid step size");
  }
  return -2.0 * worst;
}

SpectralReport spectral_report(const Matrix& m, std::optional<double> gamma) {
  SpectralReport report;
  report.eigenvalues = linalg::eigenvalues_general(m);
  double max_re = -std::numeric_limits<double>::infinity();
  double worst = -std::numeric_limits<double>::infinity();
  for (const Complex& ev : report.eigenvalues) {
    max_re = std::max(max_re, ev.real());
    worst = std::max(worst, ev.real() / std::norm(ev));
  }
  report.hurwitz = max_re < -1e-12;
  if (report.hurwitz) report.gamma_dot = -2.0 * worst;
  if (gamma) {
    double rho = 0.0;
    for (const Complex& ev : report.eigenvalues) rho = std::max(rho, std::abs(1.0 + *gamma * ev));
    report.rho_at_gamma = rho;
  }
  return report;
}

namespace {

struct BlockSpectra {
  double lmin_a, lmax_a, na, nb, nc, lmin_schur;
};

BlockSpectra block_spectra(const IntrinsicBlocks& blocks) {
  const auto ea = linalg::sym_eig(blocks.a);
  BlockSpectra s{};
  s.lmin_a = ea.eigenvalues(0);
  s.lmax_a = ea.eigenvalues(ea.eigenvalues.size() - 1);
  s.na = linalg::operator_norm(blocks.a);
  s.nb = blocks.b.size() > 0 ? linalg::operator_norm(blocks.b) : 0.0;
  s.nc = linalg::operator_norm(blocks.c);
  if (s.lmin_a > 0.0) {
    const Matrix schur =
        blocks.c + blocks.b * blocks.a.ldlt().solve(Matrix(blocks.b.transpose()));
    s.lmin_schur = linalg::sym_eig(0.5 * (schur + schur.transpose())).eigenvalues(0);
  } else {
    s.lmin_schur = std::numeric_limits<double>::quiet_NaN();
  }
  return s;
}

}  // namespace

ConvergenceCertificate gda_certificate(const IntrinsicBlocks& blocks) {
  const BlockSpectra s = block_spectra(blocks);
  if (s.lmin_a <= 1e-10) {
    throw std::invalid_argument("gda_certificate: block a is not positive definite");
  }
  ConvergenceCertificate cert;
  cert.tau_threshold = s.nc / s.lmin_a;
  cert.l_const = std::max({s.na, s.nb, s.nc});
  cert.mu_const = std::min(cert.l_const, s.lmin_schur);
  cert.recommended_tau = 2.0 * cert.l_const / s.lmin_a;
  cert.recommended_gamma = 1.0 / (4.0 * cert.recommended_tau * cert.l_const);
  cert.rate_bound = 1.0 - cert.mu_const / (16.0 * cert.recommended_tau * cert.l_const);
  cert.valid = cert.mu_const > 0.0;
  cert.status = cert.valid ? "ok" : "not_dse";
  return cert;
}

ConvergenceCertificate dne_certificate(const IntrinsicBlocks& blocks) {
  const BlockSpectra s = block_spectra(blocks);
  if (s.lmin_a <= 1e-10) {
    throw std::invalid_argument("dne_certificate: block a is not positive definite");
  }
  const double lmin_c = linalg::sym_eig(blocks.c).eigenvalues(0);
  if (lmin_c <= 1e-10) {
    throw std::invalid_argument("dne_certificate: block c is not positive definite, not a DNE");
  }
  ConvergenceCertificate cert;
  cert.tau_threshold = 0.0;  // any tau > 0 works at a DNE
  cert.l_const = std::max({s.na, s.nb, s.nc});
  cert.mu_const = std::min(s.lmin_a, lmin_c);
  cert.recommended_tau = 1.0;
  cert.recommended_gamma = cert.mu_const / (2.0 * cert.l_const * cert.l_const);
  cert.rate_bound =
      1.0 - cert.mu_const * cert.mu_const / (4.0 * cert.l_const * cert.l_const);
  cert.valid = true;
  cert.status = "ok";
  return cert;
}

ConvergenceCertificate sga_certificate(const IntrinsicBlocks& blocks, double theta) {
  const BlockSpectra s = block_spectra(blocks);
  if (s.lmin_a <= 1e-10) {
    throw std::invalid_argument("sga_certificate: block a is not positive definite");
  }
  if (theta < 0.0 || theta > 1.0 / s.lmax_a) {
    throw std::invalid_argument("sga_certificate: theta outside [0, 1/lambda_max(a)]");
  }
  const Matrix c_adj = blocks.c + theta * (blocks.b * blocks.b.transpose());
  const double nc_adj = linalg::operator_norm(c_adj);
  ConvergenceCertificate cert;
  cert.tau_threshold = std::min(s.nc, nc_adj) / s.lmin_a;
  cert.l_const = std::max({s.na, s.nb, nc_adj});
  cert.mu_const = std::min(cert.l_const, s.lmin_schur);
  cert.recommended_tau = 2.0 * cert.l_const / s.lmin_a;
  cert.recommended_gamma = 1.0 / (4.0 * cert.recommended_tau * cert.l_const);
  cert.rate_bound = 1.0 - cert.mu_const / (16.0 * cert.recommended_tau * cert.l_const);
  cert.valid = cert.mu_const > 0.0;
  cert.status = cert.valid ? "ok" : "not_dse";
  return cert;
}

const char* to_string(EquilibriumClass c) {
  switch (c) {
    case EquilibriumClass::NotCritical:
      return "NotCritical";
    case EquilibriumClass::DNE:
      return "DNE";
    case EquilibriumClass::DSE_not_DNE:
      return "DSE_not_DNE";
    case EquilibriumClass::CriticalOther:
      return "CriticalOther";
  }
  return "?";
}

Classification classify_equilibrium(const Game& g, const GamePoint& p, double grad_tol,
                                    double pd_tol, const BlockOptions& opts) {
  Classification out;
  const RiemannianGrads grads = riemannian_grads(g, p);
  out.grad_norm_x = grads.delta.ambient.norm();
  out.grad_norm_y = grads.eta.ambient.norm();
  if (std::max(out.grad_norm_x, out.grad_norm_y) >= grad_tol) {
    out.cls = EquilibriumClass::NotCritical;
    return out;
  }
  const IntrinsicBlocks blocks = intrinsic_blocks(g, p, grad_tol, opts);
  out.lambda_min_a = linalg::sym_eig(blocks.a).eigenvalues(0);
  out.lambda_min_c = linalg::sym_eig(blocks.c).eigenvalues(0);
  if (out.lambda_min_a > pd_tol) {
    const Matrix schur =
        blocks.c + blocks.b * blocks.a.ldlt().solve(Matrix(blocks.b.transpose()));
    out.lambda_min_schur = linalg::sym_eig(0.5 * (schur + schur.transpose())).eigenvalues(0);
    if (out.lambda_min_c > pd_tol) {
      out.cls = EquilibriumClass::DNE;
      return out;
    }
    if (out.lambda_min_schur > pd_tol) {
      out.cls = EquilibriumClass::DSE_not_DNE;
      return out;
    }
  }
  out.cls = EquilibriumClass::CriticalOther;
  return out;
}

}  // namespace rmx
