#pragma once

#include "rmx/linalg.hpp"
#include "rmx/rng.hpp"

#include <memory>
#include <vector>

namespace rmx {

/// Embedded Riemannian manifolds with the metric inherited from the ambient
/// Euclidean space. Points and tangent vectors are stored as flat ambient
/// vectors; Stiefel matrices (n x k with orthonormal columns) are flattened
/// column-major.
class Manifold {
 public:
  enum class Kind { Euclidean, Sphere, Stiefel, Product };

  Manifold() = default;  // empty Euclidean placeholder, for containers

  static Manifold euclidean(Index n);
  /// Unit sphere embedded in R^{ambient_dim}.
  static Manifold sphere(Index ambient_dim);
  /// Orthonormal k-frames in R^n, k <= n.
  static Manifold stiefel(Index k, Index n);
  static Manifold product(std::vector<Manifold> factors);

  Kind kind() const { return kind_; }
  Index ambient_dim() const { return ambient_dim_; }
  /// Intrinsic dimension.
  Index dim() const { return dim_; }

  Index stiefel_k() const { return k_; }
  Index stiefel_n() const { return n_; }
  const std::vector<Manifold>& factors() const { return factors_; }

  bool operator==(const Manifold& other) const;
  bool operator!=(const Manifold& other) const { return !(*this == other); }

  std::string describe() const;

 private:
  Kind kind_ = Kind::Euclidean;
  Index ambient_dim_ = 0;
  Index dim_ = 0;
  Index k_ = 0, n_ = 0;  // Stiefel only
  std::vector<Manifold> factors_;
};

struct ManifoldPoint {
  Manifold manifold;
  Vector ambient;
};

struct TangentVector {
  ManifoldPoint base;
  Vector ambient;
};

/// Validating constructor: enforces the point invariants (unit norm on the
/// sphere to 1e-10, X^T X = I on Stiefel to 1e-8).
ManifoldPoint make_point(const Manifold& m, const Vector& ambient);

/// True when `ambient` satisfies the point invariants of `m`.
bool point_on_manifold(const Manifold& m, const Vector& ambient);

/// Orthogonal projection of an ambient vector onto T_p.
TangentVector project_tangent(const ManifoldPoint& p, const Vector& v);

/// First-order retraction: Euclidean addition, sphere normalization, Stiefel
/// polar factor of the thin SVD. retract(p, 0) == p exactly.
ManifoldPoint retract(const ManifoldPoint& p, const TangentVector& t);

/// Ambient (embedded) inner product of two tangent vectors at p.
double metric_inner(const ManifoldPoint& p, const TangentVector& u, const TangentVector& v);

/// Columns form a deterministic orthonormal basis of T_p, built by projecting
/// ambient canonical vectors in order and Gram-Schmidt orthogonalization.
Matrix tangent_basis(const ManifoldPoint& p);

/// Same construction with a permuted ambient seed order (used to verify that
/// derived spectral quantities are basis independent).
Matrix tangent_basis(const ManifoldPoint& p, const std::vector<Index>& ambient_order);

/// Cheap stand-in for geodesic distance: Euclidean norm, sphere arc length,
/// Stiefel ambient Frobenius distance, factor sum on products.
double distance_surrogate(const ManifoldPoint& p, const ManifoldPoint& q);

ManifoldPoint random_point(const Manifold& m, RngStream& rng);
TangentVector random_tangent(const ManifoldPoint& p, RngStream& rng);

}  // namespace rmx
