#pragma once

#include "rmx/geometry.hpp"

#include <limits>
#include <optional>
#include <string>

namespace rmx {

/// Linearized dynamics matrix of tau-GDA at a critical point:
///   [[-C, -B], [tau B^T, -tau A]].
Matrix assemble_mg(const IntrinsicBlocks& blocks, double tau);

/// Linearized dynamics matrix of Asymptotic tau-SGA:
///   assemble_mg + theta * [[-B B^T, B A], [0, 0]].
Matrix assemble_ms(const IntrinsicBlocks& blocks, double tau, double theta);

/// Largest step size below which I + gamma*M is a spectral contraction for a
/// Hurwitz-stable M: -2 max_k Re(lambda_k) / |lambda_k|^2.
double gamma_dot(const Matrix& m);

struct SpectralReport {
  std::vector<Complex> eigenvalues;
  bool hurwitz = false;
  std::optional<double> gamma_dot;     // present iff hurwitz
  std::optional<double> rho_at_gamma;  // present when a gamma was supplied
};

SpectralReport spectral_report(const Matrix& m, std::optional<double> gamma = std::nullopt);

struct ConvergenceCertificate {
  double tau_threshold = 0.0;
  double l_const = 0.0;
  double mu_const = 0.0;
  double recommended_tau = 0.0;
  double recommended_gamma = 0.0;
  double rate_bound = 1.0;
  bool valid = false;   // mu_const > 0 and the rate bound applies
  std::string status;   // "ok" or a reason the certificate is void
};

/// tau-GDA certificate at a DSE candidate (requires the a block p.d.).
ConvergenceCertificate gda_certificate(const IntrinsicBlocks& blocks);

/// tau-GDA certificate at a DNE (requires a and c blocks p.d.).
ConvergenceCertificate dne_certificate(const IntrinsicBlocks& blocks);

/// Asymptotic tau-SGA certificate; theta must lie in [0, 1/lambda_max(a)].
ConvergenceCertificate sga_certificate(const IntrinsicBlocks& blocks, double theta);

enum class EquilibriumClass { NotCritical, DNE, DSE_not_DNE, CriticalOther };

const char* to_string(EquilibriumClass c);

struct Classification {
  EquilibriumClass cls = EquilibriumClass::NotCritical;
  double grad_norm_x = 0.0;
  double grad_norm_y = 0.0;
  // NaN when the point is not critical (blocks undefined there).
  double lambda_min_a = std::numeric_limits<double>::quiet_NaN();
  double lambda_min_c = std::numeric_limits<double>::quiet_NaN();
  double lambda_min_schur = std::numeric_limits<double>::quiet_NaN();
};

Classification classify_equilibrium(const Game& g, const GamePoint& p, double grad_tol = 1e-6,
                                    double pd_tol = 1e-8, const BlockOptions& opts = {});

}  // namespace rmx
