#pragma once

#include "rmx/geometry.hpp"

#include <functional>
#include <optional>

namespace rmx {

enum class SolverMode { GDA, SGA, AsympSGA };

const char* to_string(SolverMode m);

struct SolverConfig {
  SolverMode mode = SolverMode::GDA;
  double tau = 1.0;
  double gamma = 1e-3;
  /// SGA correction strength; the update-rule parameter is derived as
  /// mu = theta * 2 / (tau * (tau + 1)). Ignored in GDA mode.
  double theta = 0.0;
  std::size_t max_iters = 1000;
  std::uint64_t seed = 0;  // stochastic runs
  std::size_t record_every = 1;
  CrossMethod cross_method = CrossMethod::Auto;
};

struct TrajectoryRow {
  std::size_t t = 0;
  GamePoint point;
  double f = 0.0;
  double grad_norm_x = 0.0;
  double grad_norm_y = 0.0;
  std::optional<double> dist;
};

struct Trajectory {
  std::vector<TrajectoryRow> rows;
  std::size_t steps_completed = 0;
  bool diverged = false;
};

/// One simultaneous tau-GDA step: both tangents are computed at the old
/// point, x descends and y ascends with learning-rate ratio tau.
GamePoint step_gda(const Game& g, const GamePoint& p, double tau, double gamma);

/// tau-SGA step: the GDA direction plus the cross-gradient correction, with
/// delta and eta treated as fixed vectors inside the products.
GamePoint step_sga(const Game& g, const GamePoint& p, double tau, double gamma, double theta,
                   CrossMethod method = CrossMethod::Auto);

/// Asymptotic tau-SGA: corrected x update, plain GDA y update.
GamePoint step_asymp_sga(const Game& g, const GamePoint& p, double tau, double gamma, double theta,
                         CrossMethod method = CrossMethod::Auto);

/// Called at every recorded iteration with the current point and the game
/// used for that step (the minibatch view in stochastic mode).
using RecordHook = std::function<void(std::size_t t, const GamePoint& p, const Game& step_game)>;

/// Iterate the configured update rule, recording every record_every steps
/// (plus the initial and final states). Non-finite values truncate the run
/// and set the divergence flag instead of aborting, so sweep experiments
/// still emit partial output.
Trajectory run(const Game& g, const GamePoint& start, const SolverConfig& cfg,
               const std::optional<GamePoint>& reference = std::nullopt,
               const RecordHook& hook = nullptr);

struct RateFit {
  double rate = 0.0;
  double r_squared = 0.0;
};

/// Least-squares slope of log(distance) over the trailing tail_fraction of
/// recorded points; rate = exp(slope).
RateFit estimate_rate(const Trajectory& traj, double tail_fraction);

}  // namespace rmx
