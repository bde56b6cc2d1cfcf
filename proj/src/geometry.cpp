#include "rmx/geometry.hpp"

#include <stdexcept>

namespace rmx {

RiemannianGrads riemannian_grads(const Game& g, const GamePoint& p) {
  return {project_tangent(p.x, g.ambient_grad_x(p)), project_tangent(p.y, g.ambient_grad_y(p))};
}

namespace {

bool use_analytic(const Game& g, CrossMethod method, const char* who) {
  switch (method) {
    case CrossMethod::Auto:
      return g.has_analytic_cross();
    case CrossMethod::Analytic:
      if (!g.has_analytic_cross()) {
        throw std::invalid_argument(std::string(who) + ": game has no analytic cross products");
      }
      return true;
    case CrossMethod::FiniteDifference:
      return false;
  }
  return false;
}

}  // namespace

TangentVector cross_grad_apply_y(const Game& g, const GamePoint& p, const TangentVector& eta,
                                 CrossMethod method, double fd_step) {
  if (eta.base.manifold != p.y.manifold) {
    throw std::invalid_argument("cross_grad_apply_y: eta is not a tangent at y");
  }
  if (use_analytic(g, method, "cross_grad_apply_y")) {
    return project_tangent(p.x, g.analytic_cross_y(p, eta.ambient));
  }
  const double scale = eta.ambient.norm();
  if (scale == 0.0) return project_tangent(p.x, Vector::Zero(p.x.manifold.ambient_dim()));
  const double h = fd_step / (1.0 + scale);
  const TangentVector step_fwd{p.y, h * eta.ambient};
  const TangentVector step_bwd{p.y, -h * eta.ambient};
  const GamePoint fwd{p.x, retract(p.y, step_fwd)};
  const GamePoint bwd{p.x, retract(p.y, step_bwd)};
  const Vector dplus = riemannian_grads(g, fwd).delta.ambient;
  const Vector dminus = riemannian_grads(g, bwd).delta.ambient;
  return project_tangent(p.x, (dplus - dminus) / (2.0 * h));
}

TangentVector cross_grad_apply_x(const Game& g, const GamePoint& p, const TangentVector& delta,
                                 CrossMethod method, double fd_step) {
  if (delta.base.manifold != p.x.manifold) {
    throw std::invalid_argument("cross_grad_apply_x: delta is not a tangent at x");
  }
  if (use_analytic(g, method, "cross_grad_apply_x")) {
    return project_tangent(p.y, g.analytic_cross_x(p, delta.ambient));
  }
  const double scale = delta.ambient.norm();
  if (scale == 0.0) return project_tangent(p.y, Vector::Zero(p.y.manifold.ambient_dim()));
  const double h = fd_step / (1.0 + scale);
  const TangentVector step_fwd{p.x, h * delta.ambient};
  const TangentVector step_bwd{p.x, -h * delta.ambient};
  const GamePoint fwd{retract(p.x, step_fwd), p.y};
  const GamePoint bwd{retract(p.x, step_bwd), p.y};
  const Vector eplus = riemannian_grads(g, fwd).eta.ambient;
  const Vector eminus = riemannian_grads(g, bwd).eta.ambient;
  return project_tangent(p.y, (eplus - eminus) / (2.0 * h));
}

IntrinsicBlocks intrinsic_blocks(const Game& g, const GamePoint& p, double crit_tol,
                                 const BlockOptions& opts) {
  const RiemannianGrads grads = riemannian_grads(g, p);
  const double gx = grads.delta.ambient.norm();
  const double gy = grads.eta.ambient.norm();
  if (std::max(gx, gy) >= crit_tol) {
    throw std::invalid_argument("intrinsic_blocks: undefined away from a critical point");
  }

  IntrinsicBlocks blocks;
  blocks.basis_x = opts.order_x ? tangent_basis(p.x, *opts.order_x) : tangent_basis(p.x);
  blocks.basis_y = opts.order_y ? tangent_basis(p.y, *opts.order_y) : tangent_basis(p.y);
  const Index d1 = blocks.basis_x.cols();
  const Index d2 = blocks.basis_y.cols();
  const double h = opts.fd_step;

  // a = -Hess_y f: central difference of the y-gradient field along each
  // basis direction, read off in the same basis.
  Matrix a_raw(d2, d2);
  for (Index j = 0; j < d2; ++j) {
    const TangentVector fwd{p.y, h * blocks.basis_y.col(j)};
    const TangentVector bwd{p.y, -h * blocks.basis_y.col(j)};
    const Vector eplus = riemannian_grads(g, {p.x, retract(p.y, fwd)}).eta.ambient;
    const Vector eminus = riemannian_grads(g, {p.x, retract(p.y, bwd)}).eta.ambient;
    a_raw.col(j) = blocks.basis_y.transpose() * ((eminus - eplus) / (2.0 * h));
  }
  blocks.sym_residual_a = (a_raw - a_raw.transpose()).norm();
  blocks.a = 0.5 * (a_raw + a_raw.transpose());

  // c = Hess_x f along the x factor.
  Matrix c_raw(d1, d1);
  for (Index j = 0; j < d1; ++j) {
    const TangentVector fwd{p.x, h * blocks.basis_x.col(j)};
    const TangentVector bwd{p.x, -h * blocks.basis_x.col(j)};
    const Vector dplus = riemannian_grads(g, {retract(p.x, fwd), p.y}).delta.ambient;
    const Vector dminus = riemannian_grads(g, {retract(p.x, bwd), p.y}).delta.ambient;
    c_raw.col(j) = blocks.basis_x.transpose() * ((dplus - dminus) / (2.0 * h));
  }
  blocks.sym_residual_c = (c_raw - c_raw.transpose()).norm();
  blocks.c = 0.5 * (c_raw + c_raw.transpose());

  // b = grad^2_{yx} f in coordinates, column per y-basis direction.
  Matrix b(d1, d2);
  for (Index j = 0; j < d2; ++j) {
    const TangentVector ej{p.y, blocks.basis_y.col(j)};
    const TangentVector image = cross_grad_apply_y(g, p, ej, opts.cross_method, opts.fd_step);
    b.col(j) = blocks.basis_x.transpose() * image.ambient;
  }
  blocks.b = b;
  return blocks;
}

}  // namespace rmx
