#pragma once

#include "rmx/manifold.hpp"

#include <memory>
#include <optional>

namespace rmx {

struct GamePoint {
  ManifoldPoint x;
  ManifoldPoint y;
};

/// A two-player zero-sum game min_x max_y f(x, y) on M1 x M2. Gradients are
/// exposed in ambient coordinates; Riemannian gradients are obtained
/// downstream by tangent projection (valid under the embedded metric).
class Game {
 public:
  virtual ~Game() = default;

  const Manifold& m1() const { return m1_; }
  const Manifold& m2() const { return m2_; }

  virtual double value(const GamePoint& p) const = 0;
  virtual Vector ambient_grad_x(const GamePoint& p) const = 0;
  virtual Vector ambient_grad_y(const GamePoint& p) const = 0;

  /// Closed-form cross-gradient-vector products, when the game has them.
  /// cross_y is the derivative of the x-gradient field along eta (a tangent
  /// at y); cross_x the derivative of the y-gradient field along delta.
  /// Results are ambient and still need tangent projection.
  virtual bool has_analytic_cross() const { return false; }
  virtual Vector analytic_cross_y(const GamePoint&, const Vector& /*eta*/) const {
    throw std::logic_error("analytic_cross_y: not provided by this game");
  }
  virtual Vector analytic_cross_x(const GamePoint&, const Vector& /*delta*/) const {
    throw std::logic_error("analytic_cross_x: not provided by this game");
  }

  /// Stochastic games return frozen minibatch views; draw indices are mapped
  /// to independent counter-based streams.
  virtual bool is_stochastic() const { return false; }
  virtual std::shared_ptr<const Game> sample_minibatch(std::uint64_t /*seed*/,
                                                       std::uint64_t /*draw*/) const {
    throw std::logic_error("sample_minibatch: game is deterministic");
  }

  GamePoint make_point(const Vector& x_ambient, const Vector& y_ambient) const;

 protected:
  Game(Manifold m1, Manifold m2) : m1_(std::move(m1)), m2_(std::move(m2)) {}

 private:
  Manifold m1_;
  Manifold m2_;
};

enum class ExampleVariant { Example1, Example2, Example3 };

/// The linear-on-the-sphere family: M1 = R^{d1}, M2 = S^{d2} in R^{d2+1}.
///   Example1: f(x,y) = <y, Ax - b>
///   Example2: f(x,y) = <y, Ax - b> - kappa/2 ||Ax||^2
///   Example3: f(x,y) = 1/2 ||Ax + y - b||^2
class LinearSphereGame final : public Game {
 public:
  LinearSphereGame(ExampleVariant variant, Matrix a, Vector b, double kappa = 0.0);

  double value(const GamePoint& p) const override;
  Vector ambient_grad_x(const GamePoint& p) const override;
  Vector ambient_grad_y(const GamePoint& p) const override;

  bool has_analytic_cross() const override { return true; }
  Vector analytic_cross_y(const GamePoint& p, const Vector& eta) const override;
  Vector analytic_cross_x(const GamePoint& p, const Vector& delta) const override;

  ExampleVariant variant() const { return variant_; }
  const Matrix& a() const { return a_; }
  const Vector& b() const { return b_; }
  double kappa() const { return kappa_; }

  /// x = A+ b, y = normalized residual: the Example-1 closed form, also used
  /// as the reference initial point for the sweep experiments.
  GamePoint least_squares_point() const;

 private:
  ExampleVariant variant_;
  Matrix a_;
  Vector b_;
  double kappa_;
  Matrix a_pinv_;
};

GamePoint equilibrium_example1(const LinearSphereGame& g);
GamePoint equilibrium_example2(const LinearSphereGame& g, double newton_tol = 1e-12);
GamePoint equilibrium_example3(const LinearSphereGame& g);

/// Dispatch on the game variant (Example2 uses the default Newton tolerance).
GamePoint closed_form_equilibrium(const LinearSphereGame& g);

}  // namespace rmx
