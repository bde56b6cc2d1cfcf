#pragma once

#include "rmx/game.hpp"
#include "rmx/solver.hpp"

namespace rmx::wgan {

/// Gaussian-data orthogonal Wasserstein GAN: linear generator A_x (d x p),
/// discriminator D(phi) = <v, sigma(W phi)> with W in St(k, d) (orthonormal
/// rows) and unit v, sigma the smooth absolute value sqrt(a^2 + eps^2).
struct GaussianWganSpec {
  Vector sigma_diag = (Vector(5) << 1.0, 4.0, 9.0, 16.0, 0.01).finished();
  Index d = 5;
  Index p = 4;
  Index k = 5;
  double eps = 1e-6;

  void validate() const;
};

struct WganPoint {
  Matrix a_x;  // d x p, Euclidean
  Matrix w;    // k x d, orthonormal rows
  Vector v;    // k, unit norm
};

/// Pack into a GamePoint on Euclidean(d*p) x (Stiefel(k,d) x Stiefel(1,k)).
/// The Stiefel factor stores W^T (columns orthonormal).
GamePoint pack(const GaussianWganSpec& spec, const WganPoint& pt);
WganPoint unpack(const GaussianWganSpec& spec, const GamePoint& p);

Manifold wgan_m1(const GaussianWganSpec& spec);
Manifold wgan_m2(const GaussianWganSpec& spec);

double discriminator(const GaussianWganSpec& spec, const Matrix& w, const Vector& v,
                     const Vector& phi);

struct MinibatchGrads {
  double f_hat = 0.0;
  Matrix grad_a;  // d x p
  Matrix grad_w;  // k x d
  Vector grad_v;  // k (equals the empirical feature-mean difference)
};

/// Exact gradients of the minibatch estimate of
/// f = mean D(data rows) - mean D(A z rows); rows are samples.
MinibatchGrads minibatch_value_and_grads(const GaussianWganSpec& spec, const WganPoint& pt,
                                         const Matrix& data_batch, const Matrix& z_batch);

/// Cosine between v and the empirical feature-mean difference delta_hat.
double angle(const GaussianWganSpec& spec, const WganPoint& pt, const Matrix& data_batch,
             const Matrix& z_batch);

/// Operator norm of Sigma - A A^T.
double covariance_error(const GaussianWganSpec& spec, const Matrix& a_x);

/// Exact 1-Wasserstein distance between two equal-size empirical point
/// clouds (rows), via optimal assignment. n <= 512.
double emd(const Matrix& sample_p, const Matrix& sample_q);

/// Draw a data batch (rows ~ N(0, Sigma)) and a latent batch (rows ~ N(0,I)).
Matrix sample_data(const GaussianWganSpec& spec, Index n, RngStream& rng);
Matrix sample_latent(const GaussianWganSpec& spec, Index n, RngStream& rng);

/// The stochastic game: minibatch draws map to counter-based streams, so a
/// (seed, draw index) pair fully determines the batch.
class GaussianWganGame final : public Game {
 public:
  GaussianWganGame(GaussianWganSpec spec, Index batch_size);

  bool is_stochastic() const override { return true; }
  std::shared_ptr<const Game> sample_minibatch(std::uint64_t seed,
                                               std::uint64_t draw) const override;

  /// Deterministic surrogate used where the Game interface requires exact
  /// values: a fixed large reference batch.
  double value(const GamePoint& p) const override;
  Vector ambient_grad_x(const GamePoint& p) const override;
  Vector ambient_grad_y(const GamePoint& p) const override;

  const GaussianWganSpec& spec() const { return spec_; }
  Index batch_size() const { return batch_size_; }

 private:
  GaussianWganSpec spec_;
  Index batch_size_;
  Matrix ref_data_;
  Matrix ref_z_;
};

/// A frozen minibatch view; deterministic, so the finite-difference cross
/// products of the solver apply directly.
class WganBatchGame final : public Game {
 public:
  WganBatchGame(GaussianWganSpec spec, Matrix data_batch, Matrix z_batch);

  double value(const GamePoint& p) const override;
  Vector ambient_grad_x(const GamePoint& p) const override;
  Vector ambient_grad_y(const GamePoint& p) const override;

  const Matrix& data_batch() const { return data_; }
  const Matrix& z_batch() const { return z_; }

 private:
  GaussianWganSpec spec_;
  Matrix data_;
  Matrix z_;
};

/// Random init (standard-normal A entries scaled by init_scale, Stiefel
/// factors by polar projection of standard-normal matrices) followed by
/// `iters` steps of stochastic tau-GDA. Deterministic given the seed.
struct PretrainResult {
  WganPoint point;
  bool diverged = false;
};

PretrainResult init_pretrain(const GaussianWganSpec& spec, std::uint64_t seed, std::size_t iters,
                             double tau, double gamma, Index batch_size,
                             double init_scale = 0.1);

WganPoint random_init(const GaussianWganSpec& spec, std::uint64_t seed, double init_scale = 0.1);

}  // namespace rmx::wgan
