#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "rmx/solver.hpp"
#include "rmx/spectral.hpp"

#include "test_support.hpp"

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

/// f = x^2/2 - y^2/2 on R x R: x descends, y ascends, both contract to 0.
class SaddleGame final : public Game {
 public:
  SaddleGame() : Game(Manifold::euclidean(1), Manifold::euclidean(1)) {}
  double value(const GamePoint& p) const override {
    return 0.5 * p.x.ambient.squaredNorm() - 0.5 * p.y.ambient.squaredNorm();
  }
  Vector ambient_grad_x(const GamePoint& p) const override { return p.x.ambient; }
  Vector ambient_grad_y(const GamePoint& p) const override { return -p.y.ambient; }
};

/// f = -x^2/2: gradient descent on x runs away, for divergence handling.
class RunawayGame final : public Game {
 public:
  RunawayGame() : Game(Manifold::euclidean(1), Manifold::euclidean(1)) {}
  double value(const GamePoint& p) const override { return -0.5 * p.x.ambient.squaredNorm(); }
  Vector ambient_grad_x(const GamePoint& p) const override { return -p.x.ambient; }
  Vector ambient_grad_y(const GamePoint&) const override { return Vector::Zero(1); }
};

double orthogonality_residual(const LinearSphereGame& g, const GamePoint& p, double tau) {
  const RiemannianGrads grads = riemannian_grads(g, p);
  const TangentVector bx = cross_grad_apply_y(g, p, grads.eta);
  const TangentVector by = cross_grad_apply_x(g, p, grads.delta);
  return std::abs(tau * metric_inner(p.x, bx, grads.delta) -
                  tau * metric_inner(p.y, by, grads.eta));
}

}  // namespace

TEST_CASE("gda step hand check on the saddle") {
  const SaddleGame g;
  const GamePoint p = g.make_point(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0));
  const GamePoint next = step_gda(g, p, 1.0, 0.1);
  CHECK(next.x.ambient(0) == doctest::Approx(0.9));
  CHECK(next.y.ambient(0) == doctest::Approx(0.9));
}

TEST_CASE("steps fix critical points and stay on the sphere") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  const GamePoint eq = equilibrium_example2(g, 1e-14);
  for (auto step : {+[](const LinearSphereGame& game, const GamePoint& p) {
                      return step_gda(game, p, 10.0, 1e-3);
                    },
                    +[](const LinearSphereGame& game, const GamePoint& p) {
                      return step_sga(game, p, 10.0, 1e-3, 0.15);
                    },
                    +[](const LinearSphereGame& game, const GamePoint& p) {
                      return step_asymp_sga(game, p, 10.0, 1e-3, 0.15);
                    }}) {
    const GamePoint next = step(g, eq);
    CHECK(distance_surrogate(next.x, eq.x) + distance_surrogate(next.y, eq.y) < 1e-12);
    CHECK(std::abs(next.y.ambient.norm() - 1.0) < 1e-10);
  }

  RngStream rng(51, 0);
  const GamePoint p{random_point(g.m1(), rng), random_point(g.m2(), rng)};
  CHECK(std::abs(step_gda(g, p, 5.0, 0.01).y.ambient.norm() - 1.0) < 1e-10);
}

TEST_CASE("sga reduces to gda at theta zero") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  RngStream rng(52, 0);
  const GamePoint p{random_point(g.m1(), rng), random_point(g.m2(), rng)};
  const GamePoint gda = step_gda(g, p, 7.0, 1e-3);
  const GamePoint sga = step_sga(g, p, 7.0, 1e-3, 0.0);
  const GamePoint asymp = step_asymp_sga(g, p, 7.0, 1e-3, 0.0);
  CHECK((gda.x.ambient - sga.x.ambient).norm() == 0.0);
  CHECK((gda.y.ambient - sga.y.ambient).norm() == 0.0);
  CHECK((gda.x.ambient - asymp.x.ambient).norm() == 0.0);
  CHECK((gda.y.ambient - asymp.y.ambient).norm() == 0.0);
}

TEST_CASE("correction is metric-orthogonal to the gda direction") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  RngStream rng(53, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const GamePoint p{random_point(g.m1(), rng), random_point(g.m2(), rng)};
    CHECK(orthogonality_residual(g, p, 10.0) < 1e-6);
  }
}

TEST_CASE("asymptotic variant approaches full sga as tau grows") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  const GamePoint start = g.least_squares_point();

  const GamePoint s50 = step_sga(g, start, 50.0, 0.001 / 50.0, 0.15);
  const GamePoint a50 = step_asymp_sga(g, start, 50.0, 0.001 / 50.0, 0.15);
  CHECK((s50.x.ambient - a50.x.ambient).norm() +
            (s50.y.ambient - a50.y.ambient).norm() <
        1e-6);

  std::vector<double> taus = {10.0, 50.0, 250.0};
  std::vector<double> gaps;
  for (double tau : taus) {
    const double gamma = 0.001 / tau;  // matched discriminator rate
    const GamePoint s = step_sga(g, start, tau, gamma, 0.15);
    const GamePoint a = step_asymp_sga(g, start, tau, gamma, 0.15);
    gaps.push_back((s.x.ambient - a.x.ambient).norm() + (s.y.ambient - a.y.ambient).norm());
  }
  // log-log slope; O(1/tau) requires <= -1, measured around -2
  const double slope = (std::log(gaps[2]) - std::log(gaps[0])) /
                       (std::log(taus[2]) - std::log(taus[0]));
  CHECK(slope < -0.9);
}

TEST_CASE("run records, truncates on divergence, and is deterministic") {
  const SaddleGame saddle;
  SolverConfig cfg;
  cfg.tau = 1.0;
  cfg.gamma = 0.1;
  cfg.max_iters = 0;
  const GamePoint start = saddle.make_point(Vector::Constant(1, 1.0), Vector::Constant(1, 1.0));
  const Trajectory empty = run(saddle, start, cfg);
  REQUIRE(empty.rows.size() == 1);  // initial row only
  CHECK(empty.rows[0].t == 0);

  cfg.max_iters = 100;
  cfg.record_every = 10;
  const Trajectory traj = run(saddle, start, cfg, start);
  REQUIRE(traj.rows.size() == 11);  // t = 0,10,...,90 plus the final t=100
  CHECK(traj.rows.back().t == 100);
  CHECK_FALSE(traj.diverged);

  const RunawayGame runaway;
  SolverConfig blow;
  blow.gamma = 1.0;
  blow.max_iters = 100000;
  blow.record_every = 100;
  const Trajectory boom =
      run(runaway, runaway.make_point(Vector::Constant(1, 1.0), Vector::Constant(1, 0.0)), blow);
  CHECK(boom.diverged);
  CHECK(boom.steps_completed < blow.max_iters);
  for (const TrajectoryRow& row : boom.rows) CHECK(std::isfinite(row.f));

  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  SolverConfig scfg;
  scfg.mode = SolverMode::SGA;
  scfg.tau = 10.0;
  scfg.gamma = 1e-4;
  scfg.theta = 0.15;
  scfg.max_iters = 500;
  scfg.record_every = 50;
  const GamePoint s0 = g.least_squares_point();
  const Trajectory t1 = run(g, s0, scfg, equilibrium_example2(g));
  const Trajectory t2 = run(g, s0, scfg, equilibrium_example2(g));
  REQUIRE(t1.rows.size() == t2.rows.size());
  for (std::size_t i = 0; i < t1.rows.size(); ++i) {
    CHECK(t1.rows[i].point.x.ambient == t2.rows[i].point.x.ambient);
    CHECK(t1.rows[i].point.y.ambient == t2.rows[i].point.y.ambient);
    CHECK(std::abs(t1.rows[i].point.y.ambient.norm() - 1.0) < 1e-10);
    REQUIRE(t1.rows[i].dist.has_value());
  }
}

TEST_CASE("orthogonality holds along a full sga run") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  SolverConfig cfg;
  cfg.mode = SolverMode::SGA;
  cfg.tau = 10.0;
  cfg.gamma = 1e-4;
  cfg.theta = 0.15;
  cfg.max_iters = 2000;
  cfg.record_every = 1;
  const Trajectory traj = run(g, g.least_squares_point(), cfg);
  for (const TrajectoryRow& row : traj.rows) {
    CHECK(orthogonality_residual(g, row.point, cfg.tau) < 1e-6);
  }
}

TEST_CASE("estimate_rate on synthetic decay") {
  Trajectory synth;
  for (int t = 0; t <= 100; ++t) {
    TrajectoryRow row;
    row.t = static_cast<std::size_t>(t);
    row.dist = std::pow(0.9, t);
    synth.rows.push_back(row);
  }
  const RateFit fit = estimate_rate(synth, 0.5);
  CHECK(fit.rate == doctest::Approx(0.9).epsilon(1e-6));
  CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-9));

  // a contracting linear map measured through the solver
  Trajectory halving;
  double x = 1.0;
  for (int t = 0; t <= 60; ++t) {
    TrajectoryRow row;
    row.t = static_cast<std::size_t>(t);
    row.dist = x;
    halving.rows.push_back(row);
    x *= 0.5;
  }
  CHECK(estimate_rate(halving, 0.4).rate == doctest::Approx(0.5).epsilon(1e-9));

  Trajectory too_fast;
  for (int t = 0; t <= 30; ++t) {
    TrajectoryRow row;
    row.t = static_cast<std::size_t>(t);
    row.dist = t < 10 ? std::pow(0.1, t) : 1e-16;
    too_fast.rows.push_back(row);
  }
  CHECK_THROWS_AS(estimate_rate(too_fast, 0.5), std::runtime_error);

  Trajectory no_dist;
  TrajectoryRow row;
  row.t = 0;
  no_dist.rows.push_back(row);
  CHECK_THROWS_AS(estimate_rate(no_dist, 0.5), std::invalid_argument);
}

TEST_CASE("fitted gda rate tracks the spectral prediction") {
  const LinearSphereGame g(ExampleVariant::Example2, fig1_a(), fig1_b(), 0.1);
  const GamePoint eq = equilibrium_example2(g, 1e-14);
  const IntrinsicBlocks blocks = intrinsic_blocks(g, eq);
  const ConvergenceCertificate cert = gda_certificate(blocks);

  SolverConfig cfg;
  cfg.tau = cert.recommended_tau;
  cfg.gamma = cert.recommended_gamma;
  cfg.max_iters = 400000;
  cfg.record_every = 1000;

  RngStream rng(54, 0);
  TangentVector tx = random_tangent(eq.x, rng);
  TangentVector ty = random_tangent(eq.y, rng);
  const double n = std::sqrt(tx.ambient.squaredNorm() + ty.ambient.squaredNorm());
  tx.ambient *= 1e-3 / n;
  ty.ambient *= 1e-3 / n;
  const GamePoint start{retract(eq.x, tx), retract(eq.y, ty)};

  const Trajectory traj = run(g, start, cfg, eq);
  const RateFit fit = estimate_rate(traj, 0.3);
  const double rho = rmx::testing::rho_of_i_plus(assemble_mg(blocks, cfg.tau), cfg.gamma);
  CHECK(std::abs(fit.rate - rho) <= 0.03);
  CHECK(rho <= cert.rate_bound + 1e-9);
}
