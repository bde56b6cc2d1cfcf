#include "rmx/game.hpp"

#include "rmx/linalg.hpp"

#include <stdexcept>

namespace rmx {

GamePoint Game::make_point(const Vector& x_ambient, const Vector& y_ambient) const {
  return {rmx::make_point(m1_, x_ambient), rmx::make_point(m2_, y_ambient)};
}

LinearSphereGame::LinearSphereGame(ExampleVariant variant, Matrix a, Vector b, double kappa)
    : Game(Manifold::euclidean(a.cols()), Manifold::sphere(a.rows())),
      variant_(variant),
      a_(std::move(a)),
      b_(std::move(b)),
      kappa_(kappa) {
  if (a_.rows() != b_.size()) {
    throw std::invalid_argument("LinearSphereGame: A and b have incompatible shapes");
  }
  if (variant_ == ExampleVariant::Example2 && kappa_ < 0.0) {
    throw std::invalid_argument("LinearSphereGame: kappa must be >= 0");
  }
  a_pinv_ = linalg::pseudo_inverse(a_);
}

double LinearSphereGame::value(const GamePoint& p) const {
  const Vector& x = p.x.ambient;
  const Vector& y = p.y.ambient;
  switch (variant_) {
    case ExampleVariant::Example1:
      return y.dot(a_ * x - b_);
    case ExampleVariant::Example2:
      return y.dot(a_ * x - b_) - 0.5 * kappa_ * (a_ * x).squaredNorm();
    case ExampleVariant::Example3:
      return 0.5 * (a_ * x + y - b_).squaredNorm();
  }
  throw std::logic_error("LinearSphereGame::value: unknown variant");
}

Vector LinearSphereGame::ambient_grad_x(const GamePoint& p) const {
  const Vector& x = p.x.ambient;
  const Vector& y = p.y.ambient;
  switch (variant_) {
    case ExampleVariant::Example1:
      return a_.transpose() * y;
    case ExampleVariant::Example2:
      return a_.transpose() * y - kappa_ * (a_.transpose() * (a_ * x));
    case ExampleVariant::Example3:
      return a_.transpose() * (a_ * x + y - b_);
  }
  throw std::logic_error("LinearSphereGame::ambient_grad_x: unknown variant");
}

Vector LinearSphereGame::ambient_grad_y(const GamePoint& p) const {
  const Vector& x = p.x.ambient;
  const Vector& y = p.y.ambient;
  switch (variant_) {
    case ExampleVariant::Example1:
    case ExampleVariant::Example2:
      return a_ * x - b_;
    case ExampleVariant::Example3:
      return a_ * x + y - b_;
  }
  throw std::logic_error("LinearSphereGame::ambient_grad_y: unknown variant");
}

Vector LinearSphereGame::analytic_cross_y(const GamePoint&, const Vector& eta) const {
  // Derivative of the x-gradient field along y is A^T eta for all variants.
  return a_.transpose() * eta;
}

Vector LinearSphereGame::analytic_cross_x(const GamePoint& p, const Vector& delta) const {
  // Derivative of the Riemannian y-gradient field along x: (I - yy^T) A delta.
  const Vector v = a_ * delta;
  return v - p.y.ambient.dot(v) * p.y.ambient;
}

GamePoint LinearSphereGame::least_squares_point() const {
  const Vector x = a_pinv_ * b_;
  const Vector r = a_ * x - b_;
  const double nr = r.norm();
  if (nr < 1e-14) {
    throw std::runtime_error("least_squares_point: residual vanishes, b in Range(A)");
  }
  return make_point(x, r / nr);
}

namespace {

void require_equilibrium_assumptions(const LinearSphereGame& g, const Matrix& a_pinv) {
  const Vector residual = g.b() - g.a() * (a_pinv * g.b());
  if (residual.norm() <= 1e-8) {
    throw std::invalid_argument("equilibrium: no DSE, residual vanishes (b in Range(A))");
  }
  const auto s = linalg::svd(g.a());
  if (s.sigma(s.sigma.size() - 1) <= 1e-10) {
    throw std::invalid_argument("equilibrium: Ker(A) != {0} within tolerance");
  }
}

GamePoint residual_equilibrium(const LinearSphereGame& g, const Vector& x) {
  const Vector r = g.a() * x - g.b();
  return g.make_point(x, r / r.norm());
}

}  // namespace

GamePoint equilibrium_example1(const LinearSphereGame& g) {
  if (g.variant() != ExampleVariant::Example1) {
    throw std::invalid_argument("equilibrium_example1: wrong variant");
  }
  const Matrix a_pinv = linalg::pseudo_inverse(g.a());
  require_equilibrium_assumptions(g, a_pinv);
  return residual_equilibrium(g, a_pinv * g.b());
}

GamePoint equilibrium_example2(const LinearSphereGame& g, double newton_tol) {
  if (g.variant() != ExampleVariant::Example2) {
    throw std::invalid_argument("equilibrium_example2: wrong variant");
  }
  const Matrix a_pinv = linalg::pseudo_inverse(g.a());
  require_equilibrium_assumptions(g, a_pinv);

  const Vector ls = g.a() * (a_pinv * g.b());  // A A+ b
  const double kappa = g.kappa();
  const auto f_of_c = [&](double c) {
    return c * (1.0 - kappa * (c * ls - g.b()).norm()) - 1.0;
  };
  const auto df_of_c = [&](double c) {
    const Vector r = c * ls - g.b();
    const double nr = r.norm();
    return (1.0 - kappa * nr) - c * kappa * ls.dot(r) / nr;
  };

  double c = 1.0;
  bool converged = false;
  for (int it = 0; it < 100; ++it) {
    const double f = f_of_c(c);
    if (std::abs(f) < newton_tol) {
      converged = true;
      break;
    }
    const double df = df_of_c(c);
    if (!std::isfinite(df) || std::abs(df) < 1e-14) break;
    c -= f / df;
    if (!std::isfinite(c)) break;
  }
  if (!converged || std::abs(c - 1.0) > 0.5) {
    throw std::runtime_error("equilibrium_example2: kappa outside the DSE regime (Newton failed)");
  }
  return residual_equilibrium(g, c * (a_pinv * g.b()));
}

GamePoint equilibrium_example3(const LinearSphereGame& g) {
  if (g.variant() != ExampleVariant::Example3) {
    throw std::invalid_argument("equilibrium_example3: wrong variant");
  }
  const Matrix a_pinv = linalg::pseudo_inverse(g.a());
  require_equilibrium_assumptions(g, a_pinv);
  return residual_equilibrium(g, a_pinv * g.b());
}

GamePoint closed_form_equilibrium(const LinearSphereGame& g) {
  switch (g.variant()) {
    case ExampleVariant::Example1:
      return equilibrium_example1(g);
    case ExampleVariant::Example2:
      return equilibrium_example2(g);
    case ExampleVariant::Example3:
      return equilibrium_example3(g);
  }
  throw std::logic_error("closed_form_equilibrium: unknown variant");
}

}  // namespace rmx
