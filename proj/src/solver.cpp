#include "rmx/solver.hpp"

#include <cmath>
#include <stdexcept>

namespace rmx {

const char* to_string(SolverMode m) {
  switch (m) {
    case SolverMode::GDA:
      return "gda";
    case SolverMode::SGA:
      return "sga";
    case SolverMode::AsympSGA:
      return "asymp_sga";
  }
  return "?";
}

namespace {

struct StepTangents {
  TangentVector xi1;  // at x
  TangentVector xi2;  // at y
};

/// grads_game supplies delta and eta; corr_game supplies the cross-gradient
/// operator (a second, independent minibatch in stochastic SGA).
StepTangents compute_tangents(const Game& grads_game, const Game& corr_game, const GamePoint& p,
                              SolverMode mode, double tau, double gamma, double theta,
                              CrossMethod method) {
  const RiemannianGrads grads = riemannian_grads(grads_game, p);
  StepTangents out{{p.x, -gamma * grads.delta.ambient}, {p.y, tau * gamma * grads.eta.ambient}};
  if (mode == SolverMode::GDA || theta == 0.0) return out;
  // mu * (tau+1)*tau/2 = theta and mu * (tau+1)/2 = theta/tau.
  const TangentVector corr_x = cross_grad_apply_y(corr_game, p, grads.eta, method);
  out.xi1.ambient = -gamma * (grads.delta.ambient + theta * corr_x.ambient);
  if (mode == SolverMode::SGA) {
    const TangentVector corr_y = cross_grad_apply_x(corr_game, p, grads.delta, method);
    out.xi2.ambient = gamma * (tau * grads.eta.ambient - (theta / tau) * corr_y.ambient);
  }
  return out;
}

GamePoint apply_tangents(const GamePoint& p, const StepTangents& t) {
  return {retract(p.x, t.xi1), retract(p.y, t.xi2)};
}

}  // namespace

GamePoint step_gda(const Game& g, const GamePoint& p, double tau, double gamma) {
  return apply_tangents(
      p, compute_tangents(g, g, p, SolverMode::GDA, tau, gamma, 0.0, CrossMethod::Auto));
}

GamePoint step_sga(const Game& g, const GamePoint& p, double tau, double gamma, double theta,
                   CrossMethod method) {
  return apply_tangents(p, compute_tangents(g, g, p, SolverMode::SGA, tau, gamma, theta, method));
}

GamePoint step_asymp_sga(const Game& g, const GamePoint& p, double tau, double gamma, double theta,
                         CrossMethod method) {
  return apply_tangents(p,
                        compute_tangents(g, g, p, SolverMode::AsympSGA, tau, gamma, theta, method));
}

Trajectory run(const Game& g, const GamePoint& start, const SolverConfig& cfg,
               const std::optional<GamePoint>& reference, const RecordHook& hook) {
  if (cfg.tau <= 0.0 || cfg.gamma <= 0.0 || !std::isfinite(cfg.tau * cfg.gamma)) {
    throw std::invalid_argument("run: tau and gamma must be positive and finite");
  }
  const std::size_t record_every = std::max<std::size_t>(1, cfg.record_every);
  const bool stochastic = g.is_stochastic();

  Trajectory traj;
  GamePoint p = start;

  const auto record = [&](std::size_t t, const Game& step_game) -> bool {
    const RiemannianGrads grads = riemannian_grads(step_game, p);
    TrajectoryRow row;
    row.t = t;
    row.point = p;
    row.f = step_game.value(p);
    row.grad_norm_x = grads.delta.ambient.norm();
    row.grad_norm_y = grads.eta.ambient.norm();
    if (reference) {
      row.dist = distance_surrogate(p.x, reference->x) + distance_surrogate(p.y, reference->y);
    }
    const bool finite = std::isfinite(row.f) && std::isfinite(row.grad_norm_x) &&
                        std::isfinite(row.grad_norm_y) && p.x.ambient.allFinite() &&
                        p.y.ambient.allFinite();
    if (!finite) return false;  // truncate instead of keeping a non-finite row
    traj.rows.push_back(std::move(row));
    if (hook) hook(t, p, step_game);
    return true;
  };

  for (std::size_t t = 0; t < cfg.max_iters; ++t) {
    std::shared_ptr<const Game> view_a;
    std::shared_ptr<const Game> view_b;
    const bool wants_correction = cfg.mode != SolverMode::GDA && cfg.theta != 0.0;
    if (stochastic) {
      // Paired draws (2k, 2k+1) keep the correction estimate independent of
      // the gradient estimate. Plain GDA consumes one draw per step.
      if (wants_correction) {
        view_a = g.sample_minibatch(cfg.seed, 2 * t);
        view_b = g.sample_minibatch(cfg.seed, 2 * t + 1);
      } else {
        view_a = g.sample_minibatch(cfg.seed, t);
      }
    }
    const Game& grads_game = view_a ? *view_a : g;
    const Game& corr_game = view_b ? *view_b : grads_game;

    if (t % record_every == 0) {
      if (!record(t, grads_game)) {
        traj.diverged = true;
        return traj;
      }
    }

    StepTangents tangents;
    try {
      tangents = compute_tangents(grads_game, corr_game, p, cfg.mode, cfg.tau, cfg.gamma,
                                  cfg.theta, cfg.cross_method);
      p = apply_tangents(p, tangents);
    } catch (const std::runtime_error&) {
      traj.diverged = true;  // retraction degeneracy from a wild step
      return traj;
    }
    if (!p.x.ambient.allFinite() || !p.y.ambient.allFinite()) {
      traj.diverged = true;
      return traj;
    }
    traj.steps_completed = t + 1;
  }

  // Final state; in stochastic mode it is evaluated on one more fresh draw.
  std::shared_ptr<const Game> view_final;
  if (stochastic) view_final = g.sample_minibatch(cfg.seed, 2 * cfg.max_iters);
  if (!record(cfg.max_iters, view_final ? *view_final : g)) traj.diverged = true;
  return traj;
}

RateFit estimate_rate(const Trajectory& traj, double tail_fraction) {
  if (tail_fraction <= 0.0 || tail_fraction > 1.0) {
    throw std::invalid_argument("estimate_rate: tail_fraction must lie in (0, 1]");
  }
  std::vector<std::pair<double, double>> pts;  // (t, log dist)
  for (const TrajectoryRow& row : traj.rows) {
    if (!row.dist) throw std::invalid_argument("estimate_rate: trajectory has no distances");
    if (*row.dist > 1e-14) pts.emplace_back(static_cast<double>(row.t), std::log(*row.dist));
  }
  if (pts.size() < 20) {
    throw std::runtime_error("estimate_rate: converged too fast to fit (need 20 points)");
  }
  const std::size_t n_tail =
      std::max<std::size_t>(2, static_cast<std::size_t>(std::ceil(tail_fraction * pts.size())));
  const std::size_t begin = pts.size() - n_tail;

  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  const double n = static_cast<double>(n_tail);
  for (std::size_t i = begin; i < pts.size(); ++i) {
    sx += pts[i].first;
    sy += pts[i].second;
    sxx += pts[i].first * pts[i].first;
    sxy += pts[i].first * pts[i].second;
    syy += pts[i].second * pts[i].second;
  }
  const double var_x = sxx - sx * sx / n;
  const double var_y = syy - sy * sy / n;
  const double cov = sxy - sx * sy / n;
  if (var_x <= 0.0) throw std::runtime_error("estimate_rate: degenerate time axis");
  const double slope = cov / var_x;
  RateFit fit;
  fit.rate = std::exp(slope);
  fit.r_squared = var_y > 0.0 ? (cov * cov) / (var_x * var_y) : 1.0;
  return fit;
}

}  // namespace rmx
