#include "rmx/experiment.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <future>
#include <iomanip>
#include <sstream>

namespace rmx {

using nlohmann::json;

namespace {

Matrix json_to_matrix(const json& j) {
  if (!j.is_array() || j.empty()) throw std::invalid_argument("config: expected a matrix");
  const std::size_t rows = j.size();
  const std::size_t cols = j.at(0).size();
  Matrix m(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (j.at(i).size() != cols) throw std::invalid_argument("config: ragged matrix");
    for (std::size_t c = 0; c < cols; ++c) m(static_cast<Index>(i), static_cast<Index>(c)) = j.at(i).at(c).get<double>();
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Index c = 0; c < m.cols(); ++c) row.push_back(m(i, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector json_to_vector(const json& j) {
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Index>(i)) = j.at(i).get<double>();
  return v;
}

json vector_to_json(const Vector& v) {
  json out = json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

SolverMode parse_mode(const std::string& s) {
  if (s == "gda") return SolverMode::GDA;
  if (s == "sga") return SolverMode::SGA;
  if (s == "asymp_sga") return SolverMode::AsympSGA;
  throw std::invalid_argument("config: unknown solver mode '" + s + "'");
}

void parse_gamma(const json& j, RunConfig& cfg) {
  if (j.is_number()) {
    cfg.solver.gamma = j.get<double>();
    cfg.gamma_over_tau = false;
    return;
  }
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    const auto slash = s.find('/');
    if (slash == std::string::npos || s.substr(slash + 1) != "tau") {
      throw std::invalid_argument("config: gamma expression must be a number or 'c/tau'");
    }
    std::size_t used = 0;
    const double c = std::stod(s.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument("config: bad gamma numerator");
    cfg.gamma_over_tau = true;
    cfg.gamma_numerator = c;
    cfg.solver.gamma = c / cfg.solver.tau;
    return;
  }
  throw std::invalid_argument("config: gamma must be a number or 'c/tau' string");
}

std::shared_ptr<Game> build_game(const RunConfig& cfg) {
  switch (cfg.game.variant) {
    case GameSpec::Variant::Example1:
      return std::make_shared<LinearSphereGame>(ExampleVariant::Example1, cfg.game.a, cfg.game.b);
    case GameSpec::Variant::Example2:
      return std::make_shared<LinearSphereGame>(ExampleVariant::Example2, cfg.game.a, cfg.game.b,
                                                cfg.game.kappa);
    case GameSpec::Variant::Example3:
      return std::make_shared<LinearSphereGame>(ExampleVariant::Example3, cfg.game.a, cfg.game.b);
    case GameSpec::Variant::WganGaussian:
      return std::make_shared<wgan::GaussianWganGame>(cfg.game.wgan, cfg.game.batch_size);
  }
  throw std::logic_error("build_game: unknown variant");
}

GamePoint resolve_equilibrium(const RunConfig& cfg, const LinearSphereGame& game) {
  if (game.variant() == ExampleVariant::Example2) {
    return equilibrium_example2(game, cfg.newton_tol);
  }
  return closed_form_equilibrium(game);
}

GamePoint resolve_start(const RunConfig& cfg, const LinearSphereGame& game) {
  switch (cfg.start.kind) {
    case StartSpec::Kind::LeastSquares:
      return game.least_squares_point();
    case StartSpec::Kind::Equilibrium:
      return resolve_equilibrium(cfg, game);
    case StartSpec::Kind::NearEquilibrium: {
      const GamePoint eq = resolve_equilibrium(cfg, game);
      RngStream rng(cfg.start.seed, 0);
      TangentVector tx = random_tangent(eq.x, rng);
      TangentVector ty = random_tangent(eq.y, rng);
      const double n = std::sqrt(tx.ambient.squaredNorm() + ty.ambient.squaredNorm());
      if (n < 1e-14) return eq;
      tx.ambient *= cfg.start.offset / n;
      ty.ambient *= cfg.start.offset / n;
      return {retract(eq.x, tx), retract(eq.y, ty)};
    }
    case StartSpec::Kind::Explicit:
      return game.make_point(cfg.start.x, cfg.start.y);
  }
  throw std::logic_error("resolve_start: unknown kind");
}

std::optional<GamePoint> resolve_reference(const RunConfig& cfg, const LinearSphereGame& game) {
  if (cfg.reference_x && cfg.reference_y) {
    return game.make_point(*cfg.reference_x, *cfg.reference_y);
  }
  if (cfg.reference_equilibrium) return resolve_equilibrium(cfg, game);
  return std::nullopt;
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream csv;
  csv << "t,f,grad_norm_x,grad_norm_y,dist\n";
  csv << std::setprecision(17);
  for (const TrajectoryRow& row : traj.rows) {
    csv << row.t << ',' << row.f << ',' << row.grad_norm_x << ',' << row.grad_norm_y << ',';
    if (row.dist) csv << *row.dist;
    csv << '\n';
  }
  return csv.str();
}

json certificate_to_json(const ConvergenceCertificate& cert) {
  return {{"tau_threshold", cert.tau_threshold}, {"l_const", cert.l_const},
          {"mu_const", cert.mu_const},           {"recommended_tau", cert.recommended_tau},
          {"recommended_gamma", cert.recommended_gamma}, {"rate_bound", cert.rate_bound},
          {"valid", cert.valid},                 {"status", cert.status}};
}

json eigs_to_json(const std::vector<Complex>& evs) {
  json out = json::array();
  for (const Complex& ev : evs) out.push_back({{"re", ev.real()}, {"im", ev.imag()}});
  return out;
}

}  // namespace

RunConfig parse_config(const json& j) {
  RunConfig cfg;
  const json& game = j.at("game");
  const std::string variant = game.at("variant").get<std::string>();
  if (variant == "example1") {
    cfg.game.variant = GameSpec::Variant::Example1;
  } else if (variant == "example2") {
    cfg.game.variant = GameSpec::Variant::Example2;
  } else if (variant == "example3") {
    cfg.game.variant = GameSpec::Variant::Example3;
  } else if (variant == "wgan_gaussian") {
    cfg.game.variant = GameSpec::Variant::WganGaussian;
  } else {
    throw std::invalid_argument("config: unknown game variant '" + variant + "'");
  }
  if (cfg.game.variant == GameSpec::Variant::WganGaussian) {
    wgan::GaussianWganSpec& w = cfg.game.wgan;
    if (game.contains("sigma_diag")) w.sigma_diag = json_to_vector(game.at("sigma_diag"));
    w.d = game.value("d", w.d);
    w.p = game.value("p", w.p);
    w.k = game.value("k", w.k);
    w.eps = game.value("eps", w.eps);
    w.validate();
    cfg.game.batch_size = game.value("batch_size", cfg.game.batch_size);
  } else {
    cfg.game.a = json_to_matrix(game.at("a"));
    cfg.game.b = json_to_vector(game.at("b"));
    cfg.game.kappa = game.value("kappa", 0.0);
  }

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("mode")) cfg.solver.mode = parse_mode(s.at("mode").get<std::string>());
    cfg.solver.tau = s.value("tau", cfg.solver.tau);
    if (cfg.solver.tau <= 0) throw std::invalid_argument("config: tau must be positive");
    if (s.contains("gamma")) parse_gamma(s.at("gamma"), cfg);
    cfg.solver.theta = s.value("theta", cfg.solver.theta);
    if (cfg.solver.theta < 0) throw std::invalid_argument("config: theta must be >= 0");
    cfg.solver.max_iters = s.value("max_iters", cfg.solver.max_iters);
    cfg.solver.seed = s.value("seed", cfg.solver.seed);
    cfg.solver.record_every = s.value("record_every", cfg.solver.record_every);
  }

  if (j.contains("start")) {
    const json& st = j.at("start");
    if (st.is_string()) {
      const std::string s = st.get<std::string>();
      if (s == "lstsq") {
        cfg.start.kind = StartSpec::Kind::LeastSquares;
      } else if (s == "equilibrium") {
        cfg.start.kind = StartSpec::Kind::Equilibrium;
      } else {
        throw std::invalid_argument("config: unknown start '" + s + "'");
      }
    } else if (st.contains("near_equilibrium")) {
      cfg.start.kind = StartSpec::Kind::NearEquilibrium;
      cfg.start.offset = st.at("near_equilibrium").get<double>();
      cfg.start.seed = st.value("seed", 0);
    } else {
      cfg.start.kind = StartSpec::Kind::Explicit;
      cfg.start.x = json_to_vector(st.at("x"));
      cfg.start.y = json_to_vector(st.at("y"));
    }
  }

  if (j.contains("reference")) {
    const json& ref = j.at("reference");
    if (ref.is_string()) {
      const std::string s = ref.get<std::string>();
      if (s == "equilibrium") {
        cfg.reference_equilibrium = true;
      } else if (s == "none") {
        cfg.reference_equilibrium = false;
      } else {
        throw std::invalid_argument("config: unknown reference '" + s + "'");
      }
    } else {
      cfg.reference_x = json_to_vector(ref.at("x"));
      cfg.reference_y = json_to_vector(ref.at("y"));
    }
  }

  cfg.newton_tol = j.value("newton_tol", cfg.newton_tol);
  if (j.contains("sweep")) {
    const json& sw = j.at("sweep");
    if (sw.contains("tau")) {
      for (const auto& t : sw.at("tau")) cfg.tau_grid.push_back(t.get<double>());
    }
    if (sw.contains("theta")) {
      for (const auto& t : sw.at("theta")) cfg.theta_grid.push_back(t.get<double>());
    }
  }
  cfg.metrics_every = j.value("metrics_every", cfg.metrics_every);
  cfg.emd_samples = j.value("emd_samples", cfg.emd_samples);
  if (cfg.emd_samples > 512) throw std::invalid_argument("config: emd_samples must be <= 512");
  cfg.pretrain_iters = j.value("pretrain_iters", cfg.pretrain_iters);
  cfg.output = j.value("output", cfg.output);
  return cfg;
}

json serialize_config(const RunConfig& cfg) {
  json game;
  switch (cfg.game.variant) {
    case GameSpec::Variant::Example1:
      game["variant"] = "example1";
      break;
    case GameSpec::Variant::Example2:
      game["variant"] = "example2";
      break;
    case GameSpec::Variant::Example3:
      game["variant"] = "example3";
      break;
    case GameSpec::Variant::WganGaussian:
      game["variant"] = "wgan_gaussian";
      break;
  }
  if (cfg.game.variant == GameSpec::Variant::WganGaussian) {
    game["sigma_diag"] = vector_to_json(cfg.game.wgan.sigma_diag);
    game["d"] = cfg.game.wgan.d;
    game["p"] = cfg.game.wgan.p;
    game["k"] = cfg.game.wgan.k;
    game["eps"] = cfg.game.wgan.eps;
    game["batch_size"] = cfg.game.batch_size;
  } else {
    game["a"] = matrix_to_json(cfg.game.a);
    game["b"] = vector_to_json(cfg.game.b);
    game["kappa"] = cfg.game.kappa;
  }

  json solver = {{"mode", to_string(cfg.solver.mode)},
                 {"tau", cfg.solver.tau},
                 {"theta", cfg.solver.theta},
                 {"max_iters", cfg.solver.max_iters},
                 {"seed", cfg.solver.seed},
                 {"record_every", cfg.solver.record_every}};
  if (cfg.gamma_over_tau) {
    std::ostringstream expr;
    expr << std::setprecision(17) << cfg.gamma_numerator << "/tau";
    solver["gamma"] = expr.str();
  } else {
    solver["gamma"] = cfg.solver.gamma;
  }

  json start;
  switch (cfg.start.kind) {
    case StartSpec::Kind::LeastSquares:
      start = "lstsq";
      break;
    case StartSpec::Kind::Equilibrium:
      start = "equilibrium";
      break;
    case StartSpec::Kind::NearEquilibrium:
      start = {{"near_equilibrium", cfg.start.offset}, {"seed", cfg.start.seed}};
      break;
    case StartSpec::Kind::Explicit:
      start = {{"x", vector_to_json(cfg.start.x)}, {"y", vector_to_json(cfg.start.y)}};
      break;
  }

  json ref;
  if (cfg.reference_x && cfg.reference_y) {
    ref = {{"x", vector_to_json(*cfg.reference_x)}, {"y", vector_to_json(*cfg.reference_y)}};
  } else {
    ref = cfg.reference_equilibrium ? "equilibrium" : "none";
  }

  json out = {{"game", game},       {"solver", solver},
              {"start", start},     {"reference", ref},
              {"newton_tol", cfg.newton_tol}, {"metrics_every", cfg.metrics_every},
              {"emd_samples", cfg.emd_samples}, {"pretrain_iters", cfg.pretrain_iters},
              {"output", cfg.output}};
  if (!cfg.tau_grid.empty() || !cfg.theta_grid.empty()) {
    json sweep;
    if (!cfg.tau_grid.empty()) sweep["tau"] = cfg.tau_grid;
    if (!cfg.theta_grid.empty()) sweep["theta"] = cfg.theta_grid;
    out["sweep"] = sweep;
  }
  return out;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open config file: " + path.string());
  json j;
  in >> j;
  return parse_config(j);
}

double effective_gamma(const RunConfig& cfg) {
  return cfg.gamma_over_tau ? cfg.gamma_numerator / cfg.solver.tau : cfg.solver.gamma;
}

std::string config_hash(const RunConfig& cfg) {
  const std::string canon = serialize_config(cfg).dump();
  // FNV-1a, enough to keep sweep output names collision-free.
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : canon) {
    h ^= c;
    h *= 1099511628211ull;
  }
  std::ostringstream hex;
  hex << std::hex << std::setw(16) << std::setfill('0') << h;
  return hex.str();
}

namespace {

CommandResult guard(const std::function<void()>& body) {
  try {
    body();
    return {kExitOk, "ok"};
  } catch (const std::invalid_argument& e) {
    return {kExitConfigError, e.what()};
  } catch (const std::exception& e) {
    return {kExitNumericalError, e.what()};
  }
}

}  // namespace

CommandResult cmd_verify_equilibrium(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  return guard([&] {
    if (cfg.game.variant == GameSpec::Variant::WganGaussian) {
      throw std::invalid_argument("verify-equilibrium: no closed-form equilibrium for the WGAN");
    }
    const auto game = std::dynamic_pointer_cast<LinearSphereGame>(build_game(cfg));
    GamePoint point = cfg.start.kind == StartSpec::Kind::Explicit
                          ? game->make_point(cfg.start.x, cfg.start.y)
                          : resolve_equilibrium(cfg, *game);
    const Classification cls = classify_equilibrium(*game, point);
    json report = {{"class", to_string(cls.cls)},
                   {"grad_norm_x", cls.grad_norm_x},
                   {"grad_norm_y", cls.grad_norm_y},
                   {"x", vector_to_json(point.x.ambient)},
                   {"y", vector_to_json(point.y.ambient)},
                   {"f", game->value(point)}};
    if (cls.cls != EquilibriumClass::NotCritical) {
      report["lambda_min_a"] = cls.lambda_min_a;
      report["lambda_min_c"] = cls.lambda_min_c;
      report["lambda_min_schur"] = cls.lambda_min_schur;
      const IntrinsicBlocks blocks = intrinsic_blocks(*game, point);
      report["a_block_eigenvalues"] = vector_to_json(linalg::sym_eig(blocks.a).eigenvalues);
      report["c_block_eigenvalues"] = vector_to_json(linalg::sym_eig(blocks.c).eigenvalues);
    }
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / "equilibrium_report.json", report.dump(2) + "\n");
  });
}

CommandResult cmd_spectral_report(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  return guard([&] {
    if (cfg.game.variant == GameSpec::Variant::WganGaussian) {
      throw std::invalid_argument("spectral-report: requires a closed-form critical point");
    }
    const auto game = std::dynamic_pointer_cast<LinearSphereGame>(build_game(cfg));
    const GamePoint eq = resolve_equilibrium(cfg, *game);
    const IntrinsicBlocks blocks = intrinsic_blocks(*game, eq);
    const double theta = cfg.solver.theta;

    json report;
    report["theta"] = theta;
    report["gda_certificate"] = certificate_to_json(gda_certificate(blocks));
    report["sga_certificate"] = certificate_to_json(sga_certificate(blocks, theta));
    try {
      report["dne_certificate"] = certificate_to_json(dne_certificate(blocks));
    } catch (const std::invalid_argument&) {
      report["dne_certificate"] = nullptr;
    }

    std::vector<double> taus = cfg.tau_grid;
    if (taus.empty()) taus.push_back(cfg.solver.tau);
    json rows = json::array();
    for (double tau : taus) {
      const double gamma = cfg.gamma_over_tau ? cfg.gamma_numerator / tau : cfg.solver.gamma;
      const SpectralReport mg = spectral_report(assemble_mg(blocks, tau), gamma);
      const SpectralReport ms = spectral_report(assemble_ms(blocks, tau, theta), gamma);
      json row = {{"tau", tau}, {"gamma", gamma}};
      row["mg"] = {{"hurwitz", mg.hurwitz}, {"eigenvalues", eigs_to_json(mg.eigenvalues)}};
      if (mg.gamma_dot) row["mg"]["gamma_dot"] = *mg.gamma_dot;
      if (mg.rho_at_gamma) row["mg"]["rho_at_gamma"] = *mg.rho_at_gamma;
      row["ms"] = {{"hurwitz", ms.hurwitz}, {"eigenvalues", eigs_to_json(ms.eigenvalues)}};
      if (ms.gamma_dot) row["ms"]["gamma_dot"] = *ms.gamma_dot;
      if (ms.rho_at_gamma) row["ms"]["rho_at_gamma"] = *ms.rho_at_gamma;
      rows.push_back(std::move(row));
    }
    report["grid"] = rows;
    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / "spectral_report.json", report.dump(2) + "\n");
  });
}

namespace {

void run_one_trajectory(const RunConfig& cfg, const std::filesystem::path& out_dir,
                        const std::string& csv_name) {
  const auto game_base = build_game(cfg);
  const auto game = std::dynamic_pointer_cast<LinearSphereGame>(game_base);
  if (!game) throw std::invalid_argument("run: the run command expects an example game");

  RunConfig eff = cfg;
  eff.solver.gamma = effective_gamma(cfg);
  const GamePoint start = resolve_start(eff, *game);
  const std::optional<GamePoint> reference = resolve_reference(eff, *game);
  const Trajectory traj = run(*game, start, eff.solver, reference);

  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir / csv_name, trajectory_csv(traj));

  json summary = {{"diverged", traj.diverged},
                  {"steps_completed", traj.steps_completed},
                  {"rows", traj.rows.size()},
                  {"tau", eff.solver.tau},
                  {"gamma", eff.solver.gamma},
                  {"theta", eff.solver.theta},
                  {"mode", to_string(eff.solver.mode)}};
  if (!traj.rows.empty()) {
    summary["final_f"] = traj.rows.back().f;
    if (traj.rows.back().dist) summary["final_dist"] = *traj.rows.back().dist;
  }
  if (reference) {
    try {
      const RateFit fit = estimate_rate(traj, 0.3);
      summary["fitted_rate"] = fit.rate;
      summary["fit_r_squared"] = fit.r_squared;
    } catch (const std::exception& e) {
      summary["fitted_rate"] = nullptr;
      summary["fit_note"] = e.what();
    }
  }
  const std::string stem = std::filesystem::path(csv_name).stem().string();
  write_text_file(out_dir / (stem + "_summary.json"), summary.dump(2) + "\n");
}

}  // namespace

CommandResult cmd_run(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  return guard([&] { run_one_trajectory(cfg, out_dir, cfg.output); });
}

CommandResult cmd_sweep(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  return guard([&] {
    std::vector<double> taus = cfg.tau_grid.empty() ? std::vector<double>{cfg.solver.tau}
                                                    : cfg.tau_grid;
    std::vector<double> thetas = cfg.theta_grid.empty() ? std::vector<double>{cfg.solver.theta}
                                                        : cfg.theta_grid;
    std::vector<std::future<void>> jobs;
    std::vector<std::string> names;
    for (double tau : taus) {
      for (double theta : thetas) {
        RunConfig sub = cfg;
        sub.solver.tau = tau;
        sub.solver.theta = theta;
        sub.solver.gamma = effective_gamma(sub);
        sub.tau_grid.clear();
        sub.theta_grid.clear();
        const std::string name = "traj_" + config_hash(sub) + ".csv";
        sub.output = name;
        names.push_back(name);
        jobs.push_back(std::async(std::launch::async,
                                  [sub, out_dir, name] { run_one_trajectory(sub, out_dir, name); }));
      }
    }
    for (auto& job : jobs) job.get();
    json index = json::array();
    std::size_t i = 0;
    for (double tau : taus) {
      for (double theta : thetas) {
        index.push_back({{"tau", tau}, {"theta", theta}, {"file", names[i++]}});
      }
    }
    write_text_file(out_dir / "sweep_index.json", index.dump(2) + "\n");
  });
}

CommandResult cmd_wgan(const RunConfig& cfg, const std::filesystem::path& out_dir) {
  return guard([&] {
    if (cfg.game.variant != GameSpec::Variant::WganGaussian) {
      throw std::invalid_argument("wgan: config must select the wgan_gaussian game");
    }
    const wgan::GaussianWganSpec& spec = cfg.game.wgan;
    wgan::WganPoint start =
        cfg.pretrain_iters > 0
            ? wgan::init_pretrain(spec, cfg.solver.seed, cfg.pretrain_iters, 100.0, 2e-4,
                                  cfg.game.batch_size)
                  .point
            : wgan::random_init(spec, cfg.solver.seed);

    wgan::GaussianWganGame game(spec, cfg.game.batch_size);
    RunConfig eff = cfg;
    eff.solver.gamma = effective_gamma(cfg);
    eff.solver.record_every = std::max<std::size_t>(1, cfg.metrics_every);

    std::ostringstream metrics;
    metrics << "t,f,angle,cov_err";
    if (cfg.emd_samples > 0) metrics << ",emd";
    metrics << "\n";
    metrics << std::setprecision(17);

    RngStream emd_rng(cfg.solver.seed, 0x7fffffffffffffffull);
    const RecordHook hook = [&](std::size_t t, const GamePoint& p, const Game& step_game) {
      const auto* batch = dynamic_cast<const wgan::WganBatchGame*>(&step_game);
      const wgan::WganPoint pt = wgan::unpack(spec, p);
      double f = step_game.value(p);
      double ang = std::numeric_limits<double>::quiet_NaN();
      if (batch) {
        try {
          ang = wgan::angle(spec, pt, batch->data_batch(), batch->z_batch());
        } catch (const std::runtime_error&) {
          // degenerate feature-mean difference; leave the column NaN-free below
        }
      }
      metrics << t << ',' << f << ',';
      if (std::isfinite(ang)) metrics << ang;
      metrics << ',' << wgan::covariance_error(spec, pt.a_x);
      if (cfg.emd_samples > 0) {
        Matrix data = wgan::sample_data(spec, cfg.emd_samples, emd_rng);
        Matrix z = wgan::sample_latent(spec, cfg.emd_samples, emd_rng);
        metrics << ',' << wgan::emd(data, z * pt.a_x.transpose());
      }
      metrics << '\n';
    };

    const Trajectory traj = run(game, wgan::pack(spec, start), eff.solver, std::nullopt, hook);

    std::filesystem::create_directories(out_dir);
    write_text_file(out_dir / cfg.output, metrics.str());

    const wgan::WganPoint last =
        traj.rows.empty() ? start : wgan::unpack(spec, traj.rows.back().point);
    json checkpoint = {{"spec",
                        {{"sigma_diag", vector_to_json(spec.sigma_diag)},
                         {"d", spec.d},
                         {"p", spec.p},
                         {"k", spec.k},
                         {"eps", spec.eps}}},
                       {"a_x", matrix_to_json(last.a_x)},
                       {"w", matrix_to_json(last.w)},
                       {"v", vector_to_json(last.v)},
                       {"diverged", traj.diverged}};
    const std::string stem = std::filesystem::path(cfg.output).stem().string();
    write_text_file(out_dir / (stem + "_checkpoint.json"), checkpoint.dump(2) + "\n");
  });
}

}  // namespace rmx
