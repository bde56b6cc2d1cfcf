#pragma once

#include "rmx/game.hpp"

namespace rmx {

struct RiemannianGrads {
  TangentVector delta;  // grad_x f, tangent at x
  TangentVector eta;    // grad_y f, tangent at y
};

RiemannianGrads riemannian_grads(const Game& g, const GamePoint& p);

enum class CrossMethod { Auto, Analytic, FiniteDifference };

/// Cross-gradient-vector product: derivative of the x-gradient field along a
/// tangent direction eta at y, projected back to T_x. The finite-difference
/// path differentiates t -> grad_x f(x, retract(y, t*eta)) centrally with
/// step fd_step / (1 + |eta|); games with closed forms provide the analytic
/// fast path.
TangentVector cross_grad_apply_y(const Game& g, const GamePoint& p, const TangentVector& eta,
                                 CrossMethod method = CrossMethod::Auto, double fd_step = 1e-5);

/// Mirror image: derivative of the y-gradient field along delta at x.
TangentVector cross_grad_apply_x(const Game& g, const GamePoint& p, const TangentVector& delta,
                                 CrossMethod method = CrossMethod::Auto, double fd_step = 1e-5);

/// Matrix representations, in orthonormal tangent bases at a critical point,
/// of a = -Hess_y f, b = grad^2_{yx} f (mapping T_y -> T_x), c = Hess_x f.
/// a and c are symmetrized; the pre-symmetrization residuals are kept as a
/// finite-difference quality diagnostic.
struct IntrinsicBlocks {
  Matrix a;  // d2 x d2
  Matrix b;  // d1 x d2
  Matrix c;  // d1 x d1
  Matrix basis_x;
  Matrix basis_y;
  double sym_residual_a = 0.0;
  double sym_residual_c = 0.0;
};

struct BlockOptions {
  double fd_step = 1e-5;
  CrossMethod cross_method = CrossMethod::Auto;
  const std::vector<Index>* order_x = nullptr;
  const std::vector<Index>* order_y = nullptr;
};

/// Only defined at (near-)critical points: away from them the coordinate
/// identity behind these matrices acquires connection correction terms.
IntrinsicBlocks intrinsic_blocks(const Game& g, const GamePoint& p, double crit_tol = 1e-6,
                                 const BlockOptions& opts = {});

}  // namespace rmx
