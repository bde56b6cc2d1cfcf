#include "rmx/manifold.hpp"

#include <Eigen/SVD>

#include <numeric>
#include <stdexcept>

namespace rmx {

namespace {

Eigen::Map<const Matrix> as_stiefel(const Manifold& m, const Vector& ambient) {
  return {ambient.data(), m.stiefel_n(), m.stiefel_k()};
}

void require_dim(const Manifold& m, const Vector& v, const char* who) {
  if (v.size() != m.ambient_dim()) {
    throw std::invalid_argument(std::string(who) + ": ambient dimension mismatch");
  }
  if (!v.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": non-finite entries");
  }
}

}  // namespace

Manifold Manifold::euclidean(Index n) {
  if (n <= 0) throw std::invalid_argument("Manifold::euclidean: dimension must be positive");
  Manifold m;
  m.kind_ = Kind::Euclidean;
  m.ambient_dim_ = n;
  m.dim_ = n;
  return m;
}

Manifold Manifold::sphere(Index ambient_dim) {
  if (ambient_dim < 2) throw std::invalid_argument("Manifold::sphere: ambient dim must be >= 2");
  Manifold m;
  m.kind_ = Kind::Sphere;
  m.ambient_dim_ = ambient_dim;
  m.dim_ = ambient_dim - 1;
  return m;
}

Manifold Manifold::stiefel(Index k, Index n) {
  if (k <= 0 || n <= 0 || k > n) {
    throw std::invalid_argument("Manifold::stiefel: need 0 < k <= n");
  }
  Manifold m;
  m.kind_ = Kind::Stiefel;
  m.k_ = k;
  m.n_ = n;
  m.ambient_dim_ = n * k;
  m.dim_ = n * k - k * (k + 1) / 2;
  return m;
}

Manifold Manifold::product(std::vector<Manifold> factors) {
  if (factors.empty()) throw std::invalid_argument("Manifold::product: empty factor list");
  Manifold m;
  m.kind_ = Kind::Product;
  m.factors_ = std::move(factors);
  for (const Manifold& f : m.factors_) {
    m.ambient_dim_ += f.ambient_dim();
    m.dim_ += f.dim();
  }
  return m;
}

bool Manifold::operator==(const Manifold& other) const {
  if (kind_ != other.kind_ || ambient_dim_ != other.ambient_dim_) return false;
  if (kind_ == Kind::Stiefel && (k_ != other.k_ || n_ != other.n_)) return false;
  if (kind_ == Kind::Product) {
    if (factors_.size() != other.factors_.size()) return false;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
      if (factors_[i] != other.factors_[i]) return false;
    }
  }
  return true;
}

std::string Manifold::describe() const {
  switch (kind_) {
    case Kind::Euclidean:
      return "euclidean(" + std::to_string(ambient_dim_) + ")";
    case Kind::Sphere:
      return "sphere(" + std::to_string(ambient_dim_) + ")";
    case Kind::Stiefel:
      return "stiefel(" + std::to_string(k_) + "," + std::to_string(n_) + ")";
    case Kind::Product: {
      std::string s = "product(";
      for (std::size_t i = 0; i < factors_.size(); ++i) {
        if (i > 0) s += ",";
        s += factors_[i].describe();
      }
      return s + ")";
    }
  }
  return "?";
}

bool point_on_manifold(const Manifold& m, const Vector& ambient) {
  if (ambient.size() != m.ambient_dim() || !ambient.allFinite()) return false;
  switch (m.kind()) {
    case Manifold::Kind::Euclidean:
      return true;
    case Manifold::Kind::Sphere:
      return std::abs(ambient.norm() - 1.0) <= 1e-10;
    case Manifold::Kind::Stiefel: {
      const auto x = as_stiefel(m, ambient);
      const Matrix gram = x.transpose() * x;
      return (gram - Matrix::Identity(m.stiefel_k(), m.stiefel_k())).norm() <= 1e-8;
    }
    case Manifold::Kind::Product: {
      Index off = 0;
      for (const Manifold& f : m.factors()) {
        if (!point_on_manifold(f, ambient.segment(off, f.ambient_dim()))) return false;
        off += f.ambient_dim();
      }
      return true;
    }
  }
  return false;
}

ManifoldPoint make_point(const Manifold& m, const Vector& ambient) {
  require_dim(m, ambient, "make_point");
  if (!point_on_manifold(m, ambient)) {
    throw std::invalid_argument("make_point: invariants violated for " + m.describe());
  }
  return {m, ambient};
}

TangentVector project_tangent(const ManifoldPoint& p, const Vector& v) {
  require_dim(p.manifold, v, "project_tangent");
  switch (p.manifold.kind()) {
    case Manifold::Kind::Euclidean:
      return {p, v};
    case Manifold::Kind::Sphere:
      return {p, v - p.ambient.dot(v) * p.ambient};
    case Manifold::Kind::Stiefel: {
      const auto x = as_stiefel(p.manifold, p.ambient);
      const Eigen::Map<const Matrix> vm(v.data(), p.manifold.stiefel_n(), p.manifold.stiefel_k());
      const Matrix xtv = x.transpose() * vm;
      const Matrix proj = vm - x * (0.5 * (xtv + xtv.transpose()));
      return {p, Eigen::Map<const Vector>(proj.data(), proj.size())};
    }
    case Manifold::Kind::Product: {
      Vector out(v.size());
      Index off = 0;
      for (const Manifold& f : p.manifold.factors()) {
        const ManifoldPoint fp{f, p.ambient.segment(off, f.ambient_dim())};
        out.segment(off, f.ambient_dim()) =
            project_tangent(fp, v.segment(off, f.ambient_dim())).ambient;
        off += f.ambient_dim();
      }
      return {p, out};
    }
  }
  throw std::logic_error("project_tangent: unknown manifold kind");
}

ManifoldPoint retract(const ManifoldPoint& p, const TangentVector& t) {
  if (t.base.manifold != p.manifold) {
    throw std::invalid_argument("retract: tangent vector is based on a different manifold");
  }
  if (t.ambient.isZero(0.0)) return p;  // retraction axiom, exactly
  switch (p.manifold.kind()) {
    case Manifold::Kind::Euclidean:
      return {p.manifold, p.ambient + t.ambient};
    case Manifold::Kind::Sphere: {
      const Vector moved = p.ambient + t.ambient;
      const double n = moved.norm();
      if (n < 1e-12) throw std::runtime_error("retract: sphere step reaches the antipodal degeneracy");
      return {p.manifold, moved / n};
    }
    case Manifold::Kind::Stiefel: {
      const Index nrows = p.manifold.stiefel_n(), kcols = p.manifold.stiefel_k();
      const Eigen::Map<const Matrix> x(p.ambient.data(), nrows, kcols);
      const Eigen::Map<const Matrix> v(t.ambient.data(), nrows, kcols);
      const Matrix moved = x + v;
      Eigen::JacobiSVD<Matrix> dec(moved, Eigen::ComputeThinU | Eigen::ComputeThinV);
      if (dec.singularValues()(kcols - 1) < 1e-12 * std::max(1.0, dec.singularValues()(0))) {
        throw std::runtime_error("retract: Stiefel step is rank deficient");
      }
      const Matrix polar = dec.matrixU() * dec.matrixV().transpose();
      return {p.manifold, Eigen::Map<const Vector>(polar.data(), polar.size())};
    }
    case Manifold::Kind::Product: {
      Vector out(p.ambient.size());
      Index off = 0;
      for (const Manifold& f : p.manifold.factors()) {
        const ManifoldPoint fp{f, p.ambient.segment(off, f.ambient_dim())};
        const TangentVector ft{fp, t.ambient.segment(off, f.ambient_dim())};
        out.segment(off, f.ambient_dim()) = retract(fp, ft).ambient;
        off += f.ambient_dim();
      }
      return {p.manifold, out};
    }
  }
  throw std::logic_error("retract: unknown manifold kind");
}

double metric_inner(const ManifoldPoint& p, const TangentVector& u, const TangentVector& v) {
  if (u.base.manifold != p.manifold || v.base.manifold != p.manifold ||
      u.base.ambient != p.ambient || v.base.ambient != p.ambient) {
    throw std::invalid_argument("metric_inner: tangent vectors not based at the given point");
  }
  return u.ambient.dot(v.ambient);
}

namespace {

Matrix basis_by_gram_schmidt(const ManifoldPoint& p, const std::vector<Index>& order) {
  const Index adim = p.manifold.ambient_dim();
  const Index mdim = p.manifold.dim();
  Matrix basis(adim, mdim);
  Index found = 0;
  for (Index idx : order) {
    if (found == mdim) break;
    Vector cand = Vector::Zero(adim);
    cand(idx) = 1.0;
    cand = project_tangent(p, cand).ambient;
    for (Index j = 0; j < found; ++j) cand -= basis.col(j).dot(cand) * basis.col(j);
    const double n = cand.norm();
    if (n < 1e-8) continue;
    basis.col(found++) = cand / n;
  }
  if (found != mdim) {
    throw std::runtime_error("tangent_basis: Gram-Schmidt did not complete a full basis");
  }
  return basis;
}

}  // namespace

Matrix tangent_basis(const ManifoldPoint& p) {
  std::vector<Index> order(static_cast<std::size_t>(p.manifold.ambient_dim()));
  std::iota(order.begin(), order.end(), Index{0});
  return tangent_basis(p, order);
}

Matrix tangent_basis(const ManifoldPoint& p, const std::vector<Index>& ambient_order) {
  if (p.manifold.kind() == Manifold::Kind::Euclidean) {
    // Canonical columns in the requested order.
    const Index n = p.manifold.ambient_dim();
    Matrix basis = Matrix::Zero(n, n);
    Index col = 0;
    for (Index idx : ambient_order) {
      if (col == n) break;
      basis(idx, col++) = 1.0;
    }
    if (col != n) throw std::invalid_argument("tangent_basis: ambient order incomplete");
    return basis;
  }
  if (p.manifold.kind() == Manifold::Kind::Product) {
    // Factor-wise block construction; the order permutes indices within the
    // slice of each factor.
    const Index adim = p.manifold.ambient_dim();
    Matrix basis = Matrix::Zero(adim, p.manifold.dim());
    Index aoff = 0, doff = 0;
    for (const Manifold& f : p.manifold.factors()) {
      std::vector<Index> sub;
      for (Index idx : ambient_order) {
        if (idx >= aoff && idx < aoff + f.ambient_dim()) sub.push_back(idx - aoff);
      }
      const ManifoldPoint fp{f, p.ambient.segment(aoff, f.ambient_dim())};
      basis.block(aoff, doff, f.ambient_dim(), f.dim()) = tangent_basis(fp, sub);
      aoff += f.ambient_dim();
      doff += f.dim();
    }
    return basis;
  }
  return basis_by_gram_schmidt(p, ambient_order);
}

double distance_surrogate(const ManifoldPoint& p, const ManifoldPoint& q) {
  if (p.manifold != q.manifold) {
    throw std::invalid_argument("distance_surrogate: points live on different manifolds");
  }
  if (p.ambient == q.ambient) return 0.0;
  switch (p.manifold.kind()) {
    case Manifold::Kind::Euclidean:
    case Manifold::Kind::Stiefel:
      return (p.ambient - q.ambient).norm();
    case Manifold::Kind::Sphere: {
      const double c = std::clamp(p.ambient.dot(q.ambient), -1.0, 1.0);
      return std::acos(c);
    }
    case Manifold::Kind::Product: {
      double total = 0.0;
      Index off = 0;
      for (const Manifold& f : p.manifold.factors()) {
        const ManifoldPoint fp{f, p.ambient.segment(off, f.ambient_dim())};
        const ManifoldPoint fq{f, q.ambient.segment(off, f.ambient_dim())};
        total += distance_surrogate(fp, fq);
        off += f.ambient_dim();
      }
      return total;
    }
  }
  throw std::logic_error("distance_surrogate: unknown manifold kind");
}

ManifoldPoint random_point(const Manifold& m, RngStream& rng) {
  switch (m.kind()) {
    case Manifold::Kind::Euclidean: {
      Vector v(m.ambient_dim());
      for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
      return {m, v};
    }
    case Manifold::Kind::Sphere: {
      Vector v(m.ambient_dim());
      do {
        for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
      } while (v.norm() < 1e-8);
      return {m, v.normalized()};
    }
    case Manifold::Kind::Stiefel: {
      Matrix g(m.stiefel_n(), m.stiefel_k());
      for (Index j = 0; j < g.cols(); ++j)
        for (Index i = 0; i < g.rows(); ++i) g(i, j) = rng.normal();
      Eigen::JacobiSVD<Matrix> dec(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const Matrix polar = dec.matrixU() * dec.matrixV().transpose();
      return {m, Eigen::Map<const Vector>(polar.data(), polar.size())};
    }
    case Manifold::Kind::Product: {
      Vector v(m.ambient_dim());
      Index off = 0;
      for (const Manifold& f : m.factors()) {
        v.segment(off, f.ambient_dim()) = random_point(f, rng).ambient;
        off += f.ambient_dim();
      }
      return {m, v};
    }
  }
  throw std::logic_error("random_point: unknown manifold kind");
}

TangentVector random_tangent(const ManifoldPoint& p, RngStream& rng) {
  Vector v(p.manifold.ambient_dim());
  for (Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  return project_tangent(p, v);
}

}  // namespace rmx
