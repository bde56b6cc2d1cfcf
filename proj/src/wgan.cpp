#include "rmx/wgan.hpp"

#include <cmath>
#include <stdexcept>

namespace rmx::wgan {

namespace {

inline double smooth_abs(double a, double eps) { return std::sqrt(a * a + eps * eps); }
inline double smooth_abs_prime(double a, double eps) { return a / std::sqrt(a * a + eps * eps); }

Matrix apply_sigma(const Matrix& m, double eps) {
  return m.unaryExpr([eps](double a) { return smooth_abs(a, eps); });
}

Matrix apply_sigma_prime(const Matrix& m, double eps) {
  return m.unaryExpr([eps](double a) { return smooth_abs_prime(a, eps); });
}

constexpr std::uint64_t kReferenceSeed = 0x9E3779B97F4A7C15ull;
constexpr Index kReferenceBatch = 8192;

}  // namespace

void GaussianWganSpec::validate() const {
  if (d <= 0 || p <= 0 || k <= 0 || p > d) {
    throw std::invalid_argument("GaussianWganSpec: need positive dims with p <= d");
  }
  if (sigma_diag.size() != d || (sigma_diag.array() <= 0.0).any()) {
    throw std::invalid_argument("GaussianWganSpec: sigma_diag must be d positive reals");
  }
  if (eps <= 0.0) throw std::invalid_argument("GaussianWganSpec: eps must be positive");
}

Manifold wgan_m1(const GaussianWganSpec& spec) { return Manifold::euclidean(spec.d * spec.p); }

Manifold wgan_m2(const GaussianWganSpec& spec) {
  return Manifold::product({Manifold::stiefel(spec.k, spec.d), Manifold::stiefel(1, spec.k)});
}

GamePoint pack(const GaussianWganSpec& spec, const WganPoint& pt) {
  Vector x(spec.d * spec.p);
  Eigen::Map<Matrix>(x.data(), spec.d, spec.p) = pt.a_x;
  Vector y(spec.d * spec.k + spec.k);
  Eigen::Map<Matrix>(y.data(), spec.d, spec.k) = pt.w.transpose();
  y.tail(spec.k) = pt.v;
  return {make_point(wgan_m1(spec), x), make_point(wgan_m2(spec), y)};
}

WganPoint unpack(const GaussianWganSpec& spec, const GamePoint& p) {
  WganPoint pt;
  pt.a_x = Eigen::Map<const Matrix>(p.x.ambient.data(), spec.d, spec.p);
  pt.w = Eigen::Map<const Matrix>(p.y.ambient.data(), spec.d, spec.k).transpose();
  pt.v = p.y.ambient.tail(spec.k);
  return pt;
}

double discriminator(const GaussianWganSpec& spec, const Matrix& w, const Vector& v,
                     const Vector& phi) {
  if (w.rows() != spec.k || w.cols() != spec.d || v.size() != spec.k || phi.size() != spec.d) {
    throw std::invalid_argument("discriminator: dimension mismatch");
  }
  const Vector wphi = w * phi;
  return v.dot(wphi.unaryExpr([&](double a) { return smooth_abs(a, spec.eps); }));
}

MinibatchGrads minibatch_value_and_grads(const GaussianWganSpec& spec, const WganPoint& pt,
                                         const Matrix& data_batch, const Matrix& z_batch) {
  if (data_batch.rows() == 0 || z_batch.rows() == 0) {
    throw std::invalid_argument("minibatch_value_and_grads: empty batch");
  }
  if (data_batch.cols() != spec.d || z_batch.cols() != spec.p) {
    throw std::invalid_argument("minibatch_value_and_grads: batch dimension mismatch");
  }
  const double n = static_cast<double>(data_batch.rows());
  const double m = static_cast<double>(z_batch.rows());

  const Matrix fake = z_batch * pt.a_x.transpose();       // m x d
  const Matrix wd = data_batch * pt.w.transpose();        // n x k
  const Matrix wf = fake * pt.w.transpose();              // m x k
  const Matrix s_wd = apply_sigma(wd, spec.eps);
  const Matrix s_wf = apply_sigma(wf, spec.eps);
  const Matrix ds_wd = apply_sigma_prime(wd, spec.eps);
  const Matrix ds_wf = apply_sigma_prime(wf, spec.eps);

  MinibatchGrads out;
  out.grad_v = s_wd.colwise().mean().transpose() - s_wf.colwise().mean().transpose();
  out.f_hat = pt.v.dot(out.grad_v);

  // d/dW of <v, sigma(W phi)> is (v .* sigma'(W phi)) phi^T, averaged per batch.
  const Matrix vd = ds_wd.array().rowwise() * pt.v.transpose().array();  // n x k
  const Matrix vf = ds_wf.array().rowwise() * pt.v.transpose().array();  // m x k
  out.grad_w = vd.transpose() * data_batch / n - vf.transpose() * fake / m;

  // d/dA of -mean D(Az): chain through phi = Az.
  out.grad_a = -(pt.w.transpose() * (vf.transpose() * z_batch)) / m;
  return out;
}

double angle(const GaussianWganSpec& spec, const WganPoint& pt, const Matrix& data_batch,
             const Matrix& z_batch) {
  const MinibatchGrads g = minibatch_value_and_grads(spec, pt, data_batch, z_batch);
  const double norm = g.grad_v.norm();
  if (norm <= 1e-12) {
    throw std::runtime_error("angle: feature-mean difference is degenerate");
  }
  return pt.v.dot(g.grad_v) / norm;
}

double covariance_error(const GaussianWganSpec& spec, const Matrix& a_x) {
  const Matrix diff =
      Matrix(spec.sigma_diag.asDiagonal()) - a_x * a_x.transpose();
  return linalg::operator_norm(diff);
}

namespace {

/// Exact O(n^3) assignment solve with row/column potentials.
double assignment_cost(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      int j1 = -1;
      double delta = inf;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  double total = 0.0;
  for (int j = 1; j <= n; ++j) total += cost(match[j] - 1, j - 1);
  return total;
}

}  // namespace

double emd(const Matrix& sample_p, const Matrix& sample_q) {
  if (sample_p.rows() != sample_q.rows() || sample_p.cols() != sample_q.cols()) {
    throw std::invalid_argument("emd: sample clouds must have matching shapes");
  }
  const Index n = sample_p.rows();
  if (n == 0) throw std::invalid_argument("emd: empty samples");
  if (n > 512) throw std::invalid_argument("emd: more than 512 samples, subsample first");
  Matrix cost(n, n);
  for (Index i = 0; i < n; ++i) {
    cost.row(i) = (sample_q.rowwise() - sample_p.row(i)).rowwise().norm().transpose();
  }
  return assignment_cost(cost) / static_cast<double>(n);
}

Matrix sample_data(const GaussianWganSpec& spec, Index n, RngStream& rng) {
  Matrix out(n, spec.d);
  const Vector stddev = spec.sigma_diag.cwiseSqrt();
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < spec.d; ++j) out(i, j) = stddev(j) * rng.normal();
  }
  return out;
}

Matrix sample_latent(const GaussianWganSpec& spec, Index n, RngStream& rng) {
  Matrix out(n, spec.p);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < spec.p; ++j) out(i, j) = rng.normal();
  }
  return out;
}

GaussianWganGame::GaussianWganGame(GaussianWganSpec spec, Index batch_size)
    : Game(wgan_m1(spec), wgan_m2(spec)), spec_(std::move(spec)), batch_size_(batch_size) {
  spec_.validate();
  if (batch_size_ <= 0) throw std::invalid_argument("GaussianWganGame: batch_size must be > 0");
  RngStream rng(kReferenceSeed, 0);
  ref_data_ = sample_data(spec_, kReferenceBatch, rng);
  ref_z_ = sample_latent(spec_, kReferenceBatch, rng);
}

std::shared_ptr<const Game> GaussianWganGame::sample_minibatch(std::uint64_t seed,
                                                               std::uint64_t draw) const {
  RngStream rng(seed, draw + 1);  // stream 0 is reserved for initialization
  Matrix data = sample_data(spec_, batch_size_, rng);
  Matrix z = sample_latent(spec_, batch_size_, rng);
  return std::make_shared<WganBatchGame>(spec_, std::move(data), std::move(z));
}

double GaussianWganGame::value(const GamePoint& p) const {
  return minibatch_value_and_grads(spec_, unpack(spec_, p), ref_data_, ref_z_).f_hat;
}

Vector GaussianWganGame::ambient_grad_x(const GamePoint& p) const {
  const MinibatchGrads g = minibatch_value_and_grads(spec_, unpack(spec_, p), ref_data_, ref_z_);
  return Eigen::Map<const Vector>(g.grad_a.data(), g.grad_a.size());
}

Vector GaussianWganGame::ambient_grad_y(const GamePoint& p) const {
  const MinibatchGrads g = minibatch_value_and_grads(spec_, unpack(spec_, p), ref_data_, ref_z_);
  Vector out(spec_.d * spec_.k + spec_.k);
  Eigen::Map<Matrix>(out.data(), spec_.d, spec_.k) = g.grad_w.transpose();
  out.tail(spec_.k) = g.grad_v;
  return out;
}

WganBatchGame::WganBatchGame(GaussianWganSpec spec, Matrix data_batch, Matrix z_batch)
    : Game(wgan_m1(spec), wgan_m2(spec)),
      spec_(std::move(spec)),
      data_(std::move(data_batch)),
      z_(std::move(z_batch)) {}

double WganBatchGame::value(const GamePoint& p) const {
  return minibatch_value_and_grads(spec_, unpack(spec_, p), data_, z_).f_hat;
}

Vector WganBatchGame::ambient_grad_x(const GamePoint& p) const {
  const MinibatchGrads g = minibatch_value_and_grads(spec_, unpack(spec_, p), data_, z_);
  return Eigen::Map<const Vector>(g.grad_a.data(), g.grad_a.size());
}

Vector WganBatchGame::ambient_grad_y(const GamePoint& p) const {
  const MinibatchGrads g = minibatch_value_and_grads(spec_, unpack(spec_, p), data_, z_);
  Vector out(spec_.d * spec_.k + spec_.k);
  Eigen::Map<Matrix>(out.data(), spec_.d, spec_.k) = g.grad_w.transpose();
  out.tail(spec_.k) = g.grad_v;
  return out;
}

WganPoint random_init(const GaussianWganSpec& spec, std::uint64_t seed, double init_scale) {
  spec.validate();
  RngStream rng(seed, 0);
  WganPoint pt;
  pt.a_x = Matrix(spec.d, spec.p);
  for (Index j = 0; j < spec.p; ++j) {
    for (Index i = 0; i < spec.d; ++i) pt.a_x(i, j) = init_scale * rng.normal();
  }
  const Manifold st_w = Manifold::stiefel(spec.k, spec.d);
  const ManifoldPoint xw = random_point(st_w, rng);
  pt.w = Eigen::Map<const Matrix>(xw.ambient.data(), spec.d, spec.k).transpose();
  const ManifoldPoint xv = random_point(Manifold::stiefel(1, spec.k), rng);
  pt.v = xv.ambient;
  return pt;
}

PretrainResult init_pretrain(const GaussianWganSpec& spec, std::uint64_t seed, std::size_t iters,
                             double tau, double gamma, Index batch_size, double init_scale) {
  const WganPoint start = random_init(spec, seed, init_scale);
  PretrainResult out{start, false};
  if (iters == 0) return out;

  GaussianWganGame game(spec, batch_size);
  SolverConfig cfg;
  cfg.mode = SolverMode::GDA;
  cfg.tau = tau;
  cfg.gamma = gamma;
  cfg.max_iters = iters;
  cfg.seed = seed;
  cfg.record_every = std::max<std::size_t>(1, iters / 20);
  const Trajectory traj = run(game, pack(spec, start), cfg);
  out.diverged = traj.diverged;
  for (const TrajectoryRow& row : traj.rows) {
    if (std::abs(row.f) > 1e6) out.diverged = true;
  }
  if (!traj.rows.empty()) out.point = unpack(spec, traj.rows.back().point);
  return out;
}

}  // namespace rmx::wgan
