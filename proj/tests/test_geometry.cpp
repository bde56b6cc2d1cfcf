#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmx/geometry.hpp"

using namespace rmx;

namespace {

Matrix fig1_a() {
  Matrix a(3, 1);
  a << 1, 1, 1;
  return a;
}

Vector fig1_b() {
  Vector b(3);
  b << 1, 1, 0.99;
  return b;
}

/// Euclidean two-player quadratic, used where closed-form checks on flat
/// factors are clearer: f = x^T x / 2 - y^T y / 2.
class QuadraticGame final : public Game {
 public:
  QuadraticGame(Index dx, Index dy) : Game(Manifold::euclidean(dx), Manifold::euclidean(dy)) {}
  double value(const GamePoint& p) const override {
    return 0.5 * p.x.ambient.squaredNorm() - 0.5 * p.y.ambient.squaredNorm();
  }
  Vector ambient_grad_x(const GamePoint& p) const override { return p.x.ambient; }
  Vector ambient_grad_y(const GamePoint& p) const override { return -p.y.ambient; }
};

}  // namespace

TEST_CASE("riemannian gradients") {
  const LinearSphereGame g(ExampleVariant::Example1, fig1_a(), fig1_b());
  const GamePoint eq = equilibrium_example1(g);
  const RiemannianGrads at_eq = riemannian_grads(g, eq);
  CHECK(at_eq.delta.ambient.norm() < 1e-10);
  CHECK(at_eq.eta.ambient.norm() < 1e-10);

  const QuadraticGame q(2, 3);
  RngStream rng(31, 0);
  const GamePoint p{random_point(q.m1(), rng), random_point(q.m2(), rng)};
  const RiemannianGrads flat = riemannian_grads(q, p);
  CHECK((flat.delta.ambient - q.ambient_grad_x(p)).norm() == 0.0);
  CHECK((flat.eta.ambient - q.ambient_grad_y(p)).norm() == 0.0);

  const GamePoint rp{random_point(g.m1(), rng), random_point(g.m2(), rng)};
  const Vector r = fig1_a() * rp.x.ambient - fig1_b();
  const Vector expected = r - rp.y.ambient.dot(r) * rp.y.ambient;
  CHECK((riemannian_grads(g, rp).eta.ambient - expected).norm() < 1e-14);
}

TEST_CASE("cross products vanish on zero input and are linear") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  const GamePoint eq = equilibrium_example2(g);
  const TangentVector zero{eq.y, Vector::Zero(3)};
  CHECK(cross_grad_apply_y(g, eq, zero, CrossMethod::FiniteDifference).ambient.norm() == 0.0);

  RngStream rng(32, 0);
  const TangentVector eta = random_tangent(eq.y, rng);
  const TangentVector eta2{eq.y, 2.0 * eta.ambient};
  const Vector one = cross_grad_apply_y(g, eq, eta, CrossMethod::FiniteDifference).ambient;
  const Vector two = cross_grad_apply_y(g, eq, eta2, CrossMethod::FiniteDifference).ambient;
  CHECK((two - 2.0 * one).norm() <= 1e-6 * std::max(1.0, one.norm()));
}

TEST_CASE("cross-gradient adjointness") {
  RngStream rng(33, 0);
  for (ExampleVariant variant :
       {ExampleVariant::Example1, ExampleVariant::Example2, ExampleVariant::Example3}) {
    const double kappa = variant == ExampleVariant::Example2 ? 0.1 : 0.0;
    const LinearSphereGame g(variant, fig1_a(), fig1_b(), kappa);

    // at the equilibrium, tight tolerance
    GamePoint eq = variant == ExampleVariant::Example1   ? equilibrium_example1(g)
                   : variant == ExampleVariant::Example2 ? equilibrium_example2(g)
                                                         : equilibrium_example3(g);
    for (int trial = 0; trial < 100; ++trial) {
      const TangentVector eta = random_tangent(eq.y, rng);
      const TangentVector delta = random_tangent(eq.x, rng);
      const TangentVector be = cross_grad_apply_y(g, eq, eta, CrossMethod::FiniteDifference);
      const TangentVector bd = cross_grad_apply_x(g, eq, delta, CrossMethod::FiniteDifference);
      const double lhs = metric_inner(eq.x, be, delta);
      const double rhs = metric_inner(eq.y, {eq.y, bd.ambient}, eta);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-6));
    }

    // away from it, looser
    for (int trial = 0; trial < 100; ++trial) {
      const GamePoint p{random_point(g.m1(), rng), random_point(g.m2(), rng)};
      const TangentVector eta = random_tangent(p.y, rng);
      const TangentVector delta = random_tangent(p.x, rng);
      const double lhs =
          metric_inner(p.x, cross_grad_apply_y(g, p, eta, CrossMethod::FiniteDifference), delta);
      const double rhs =
          metric_inner(p.y, cross_grad_apply_x(g, p, delta, CrossMethod::FiniteDifference), eta);
      CHECK(lhs == doctest::Approx(rhs).epsilon(1e-4));
    }
  }
}

TEST_CASE("example 1 cross product closed form and injectivity") {
  const LinearSphereGame g(ExampleVariant::Example1, fig1_a(), fig1_b());
  const GamePoint eq = equilibrium_example1(g);
  Vector delta(1);
  delta << 1.0;
  const TangentVector d{eq.x, delta};
  const Vector image = cross_grad_apply_x(g, eq, d).ambient;
  const Vector adelta = fig1_a() * delta;
  const Vector expected = adelta - eq.y.ambient.dot(adelta) * eq.y.ambient;
  CHECK((image - expected).norm() < 1e-12);
  CHECK(image.norm() > 1e-8);  // injection from T_x to T_y
}

TEST_CASE("analytic cross products agree with finite differences") {
  RngStream rng(34, 0);
  for (ExampleVariant variant :
       {ExampleVariant::Example1, ExampleVariant::Example2, ExampleVariant::Example3}) {
    const double kappa = variant == ExampleVariant::Example2 ? 0.07 : 0.0;
    Matrix a(4, 2);
    a << 1, 0.2, -0.5, 1.1, 0.7, -0.3, 0.25, 0.5;
    Vector b(4);
    b << 0.4, -1.2, 0.9, 0.2;
    const LinearSphereGame g(variant, a, b, kappa);
    for (int trial = 0; trial < 100; ++trial) {
      const GamePoint p{random_point(g.m1(), rng), random_point(g.m2(), rng)};
      const TangentVector eta = random_tangent(p.y, rng);
      const TangentVector delta = random_tangent(p.x, rng);
      const Vector fy = cross_grad_apply_y(g, p, eta, CrossMethod::FiniteDifference).ambient;
      const Vector ay = cross_grad_apply_y(g, p, eta, CrossMethod::Analytic).ambient;
      CHECK((fy - ay).norm() <= 1e-5 * std::max(1.0, ay.norm()));
      const Vector fx = cross_grad_apply_x(g, p, delta, CrossMethod::FiniteDifference).ambient;
      const Vector ax = cross_grad_apply_x(g, p, delta, CrossMethod::Analytic).ambient;
      CHECK((fx - ax).norm() <= 1e-5 * std::max(1.0, ax.norm()));
    }
  }
}

TEST_CASE("intrinsic blocks at the three equilibria") {
  const double nr1 = std::sqrt(6.0) / 300.0;

  const LinearSphereGame g1(ExampleVariant::Example1, fig1_a(), fig1_b());
  const IntrinsicBlocks b1 = intrinsic_blocks(g1, equilibrium_example1(g1));
  REQUIRE(b1.a.rows() == 2);
  REQUIRE(b1.c.rows() == 1);
  CHECK((b1.a - nr1 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
  CHECK(std::abs(b1.c(0, 0)) < 1e-8);
  CHECK(b1.sym_residual_a < 1e-6);
  CHECK(b1.sym_residual_c < 1e-6);

  const LinearSphereGame g2(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  const GamePoint eq2 = equilibrium_example2(g2);
  const IntrinsicBlocks b2 = intrinsic_blocks(g2, eq2);
  CHECK(b2.c(0, 0) == doctest::Approx(-0.3).epsilon(1e-7));  // -kappa A^T A
  CHECK(linalg::operator_norm(b2.c) == doctest::Approx(0.3).epsilon(1e-7));
  const double nr2 = (fig1_a() * eq2.x.ambient - fig1_b()).norm();
  CHECK((b2.a - nr2 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);

  const LinearSphereGame g3(ExampleVariant::Example3, fig1_a(), fig1_b());
  const IntrinsicBlocks b3 = intrinsic_blocks(g3, equilibrium_example3(g3));
  CHECK(b3.c(0, 0) == doctest::Approx(3.0).epsilon(1e-7));  // A^T A
  CHECK((b3.a - nr1 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("intrinsic blocks refuse non-critical points") {
  const LinearSphereGame g(ExampleVariant::Example1, fig1_a(), fig1_b());
  RngStream rng(35, 0);
  const GamePoint p{random_point(g.m1(), rng), random_point(g.m2(), rng)};
  CHECK_THROWS_AS(intrinsic_blocks(g, p), std::invalid_argument);
}

TEST_CASE("block spectra are invariant under basis reordering") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  const GamePoint eq = equilibrium_example2(g);
  const IntrinsicBlocks natural = intrinsic_blocks(g, eq);

  BlockOptions opts;
  const std::vector<Index> order_y = {2, 0, 1};
  opts.order_y = &order_y;
  const IntrinsicBlocks permuted = intrinsic_blocks(g, eq, 1e-6, opts);

  const Vector ev_nat = linalg::sym_eig(natural.a).eigenvalues;
  const Vector ev_perm = linalg::sym_eig(permuted.a).eigenvalues;
  CHECK((ev_nat - ev_perm).cwiseAbs().maxCoeff() < 1e-8);
  // b changes basis but its singular values cannot
  CHECK(linalg::operator_norm(natural.b) ==
        doctest::Approx(linalg::operator_norm(permuted.b)).epsilon(1e-8));
}
