#pragma once

#include "rmx/solver.hpp"
#include "rmx/spectral.hpp"
#include "rmx/wgan.hpp"

#include <nlohmann/json_fwd.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <variant>

namespace rmx {

/// Exit codes shared by the command drivers and the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitNumericalError = 2;

struct StartSpec {
  enum class Kind { LeastSquares, Equilibrium, NearEquilibrium, Explicit } kind =
      Kind::LeastSquares;
  double offset = 0.0;        // NearEquilibrium
  std::uint64_t seed = 0;     // NearEquilibrium
  Vector x, y;                // Explicit
};

struct GameSpec {
  enum class Variant { Example1, Example2, Example3, WganGaussian } variant = Variant::Example1;
  Matrix a;
  Vector b;
  double kappa = 0.0;
  wgan::GaussianWganSpec wgan;
  Index batch_size = 256;
};

struct RunConfig {
  GameSpec game;
  SolverConfig solver;
  /// gamma may be given as a literal or as the expression "c/tau".
  bool gamma_over_tau = false;
  double gamma_numerator = 0.0;
  StartSpec start;
  bool reference_equilibrium = true;
  std::optional<Vector> reference_x, reference_y;
  double newton_tol = 1e-12;
  std::vector<double> tau_grid;
  std::vector<double> theta_grid;
  std::size_t metrics_every = 1000;   // wgan
  Index emd_samples = 0;              // wgan; 0 disables the column
  std::size_t pretrain_iters = 0;     // wgan
  std::string output = "trajectory.csv";
};

RunConfig parse_config(const nlohmann::json& j);
nlohmann::json serialize_config(const RunConfig& cfg);
RunConfig load_config_file(const std::filesystem::path& path);

/// Effective step size after resolving the "c/tau" expression form.
double effective_gamma(const RunConfig& cfg);

/// Short content hash of the canonical config serialization; names the sweep
/// output files so concurrent runs cannot race.
std::string config_hash(const RunConfig& cfg);

struct CommandResult {
  int exit_code = kExitOk;
  std::string message;
};

CommandResult cmd_verify_equilibrium(const RunConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_spectral_report(const RunConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir);
CommandResult cmd_wgan(const RunConfig& cfg, const std::filesystem::path& out_dir);

}  // namespace rmx
