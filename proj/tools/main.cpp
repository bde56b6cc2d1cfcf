#include "rmx/experiment.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> tau;
  std::optional<std::string> gamma;
  std::optional<double> theta;
  std::optional<std::size_t> iters;
};

void apply_overrides(rmx::RunConfig& cfg, const Overrides& ov) {
  if (ov.seed) cfg.solver.seed = *ov.seed;
  if (ov.tau) cfg.solver.tau = *ov.tau;
  if (ov.theta) cfg.solver.theta = *ov.theta;
  if (ov.iters) cfg.solver.max_iters = *ov.iters;
  if (ov.gamma) {
    const std::string& s = *ov.gamma;
    const auto slash = s.find('/');
    if (slash != std::string::npos && s.substr(slash + 1) == "tau") {
      cfg.gamma_over_tau = true;
      cfg.gamma_numerator = std::stod(s.substr(0, slash));
    } else {
      cfg.gamma_over_tau = false;
      cfg.solver.gamma = std::stod(s);
    }
  }
  cfg.solver.gamma = rmx::effective_gamma(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Riemannian min-max experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = ".";
  Overrides ov;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file")->required();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", ov.seed, "override solver seed");
    sub->add_option("--tau", ov.tau, "override learning-rate ratio");
    sub->add_option("--gamma", ov.gamma, "override step size (number or 'c/tau')");
    sub->add_option("--theta", ov.theta, "override correction strength");
    sub->add_option("--iters", ov.iters, "override iteration count");
  };

  CLI::App* verify = app.add_subcommand("verify-equilibrium",
                                        "classify the closed-form or supplied point");
  CLI::App* spectral = app.add_subcommand("spectral-report",
                                          "Hurwitz flags, step-size caps and certificates");
  CLI::App* runcmd = app.add_subcommand("run", "iterate a solver, emit a trajectory CSV");
  CLI::App* sweep = app.add_subcommand("sweep", "run over a tau/theta grid in parallel");
  CLI::App* wgan = app.add_subcommand("wgan", "train the Gaussian WGAN, emit metrics CSV");
  for (CLI::App* sub : {verify, spectral, runcmd, sweep, wgan}) add_common(sub);

  CLI11_PARSE(app, argc, argv);

  rmx::RunConfig cfg;
  try {
    cfg = rmx::load_config_file(config_path);
    apply_overrides(cfg, ov);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return rmx::kExitConfigError;
  }

  rmx::CommandResult result;
  if (verify->parsed()) {
    result = rmx::cmd_verify_equilibrium(cfg, out_dir);
  } else if (spectral->parsed()) {
    result = rmx::cmd_spectral_report(cfg, out_dir);
  } else if (runcmd->parsed()) {
    result = rmx::cmd_run(cfg, out_dir);
  } else if (sweep->parsed()) {
    result = rmx::cmd_sweep(cfg, out_dir);
  } else if (wgan->parsed()) {
    result = rmx::cmd_wgan(cfg, out_dir);
  }

  if (result.exit_code != rmx::kExitOk) {
    std::cerr << "error: " << result.message << "\n";
  } else {
    std::cout << "ok\n";
  }
  return result.exit_code;
}
