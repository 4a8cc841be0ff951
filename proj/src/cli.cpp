#include "sarcv/cli.hpp"

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "sarcv/estimator.hpp"
#include "sarcv/harness.hpp"
#include "sarcv/io.hpp"
#include "sarcv/simulate.hpp"

namespace sarcv {

namespace {

namespace fs = std::filesystem;

struct GlobalOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

io::CliConfig load_config(const GlobalOptions& opt) {
  io::CliConfig cfg;
  if (!opt.config_path.empty()) cfg = io::parse_config_file(opt.config_path);
  if (opt.seed) cfg.study.seed = *opt.seed;
  if (opt.threads) cfg.study.threads = *opt.threads;
  return cfg;
}

fs::path ensure_out_dir(const GlobalOptions& opt) {
  fs::path dir(opt.out_dir);
  fs::create_directories(dir);
  return dir;
}

int run_simulate(const GlobalOptions& opt) {
  const io::CliConfig cfg = load_config(opt);
  const fs::path dir = ensure_out_dir(opt);

  const SimulationProducts sim = run_single_simulation(cfg.study, cfg.sim_n);
  io::write_trajectory_csv(dir / "trajectory.csv", sim.trajectory);
  io::write_operator_path_csv(dir / "qv.csv", sim.qv);
  io::write_text(dir / "meta.json", io::resolved_config_json(cfg));
  std::cout << "wrote " << (dir / "trajectory.csv").string() << " ("
            << sim.trajectory.obs_times.size() << " rows), qv.csv, meta.json\n";
  return 0;
}

int run_estimate(const GlobalOptions& opt, const std::string& traj_path, const std::string& qv_path) {
  const io::CliConfig cfg = load_config(opt);
  const Scenario sc = build_scenario(cfg.study);
  const fs::path dir = ensure_out_dir(opt);

  const Trajectory traj = io::read_trajectory_csv(traj_path);
  const OperatorPath est = sarcv_path(traj, sc.semigroup, traj.delta_n);
  io::write_operator_path_csv(dir / "sarcv.csv", est);

  std::cout << "{\n  \"observations\": " << (traj.obs_times.size() - 1);
  if (!qv_path.empty()) {
    const OperatorPath qv = io::read_operator_path_csv(qv_path);
    const double err = sup_hs_error(est, qv);
    require_numeric(std::isfinite(err), "estimate: sup error not finite");
    std::cout << ",\n  \"sup_hs_error\": " << io::format_double(err);
  }
  std::cout << "\n}\n";
  return 0;
}

int run_converge(const GlobalOptions& opt) {
  const io::CliConfig cfg = load_config(opt);
  const fs::path dir = ensure_out_dir(opt);
  const StudyResult result = convergence_study(cfg.study);
  io::write_study_csv(dir / "study.csv", result);
  io::write_text(dir / "summary.json", io::study_summary_json(cfg.study, result));
  io::write_timing_csv(dir / "timing.csv", result);
  if (result.slope.defined) {
    std::cout << "slope " << io::format_double(result.slope.slope) << " (stderr "
              << io::format_double(result.slope.stderr_slope) << ")\n";
  } else {
    std::cout << "slope undefined (degenerate errors)\n";
  }
  return 0;
}

int run_check(const GlobalOptions& opt, long samples, int pairs) {
  const io::CliConfig cfg = load_config(opt);
  const StudyConfig& s = cfg.study;

  const Index alg_dim = std::min<Index>(s.dim, 16);
  const AlgebraReport alg = operator_algebra_check(std::max<Index>(alg_dim, 4), pairs, s.seed);
  std::cout << "operator algebra: " << alg.pairs << " pairs, " << alg.violations
            << " violations -> " << (alg.pass ? "pass" : "FAIL") << "\n";

  Vector ev(2);
  ev << 0.5, 0.25;
  const SpectralQ q = SpectralQ::from_list(std::move(ev));
  const MomentReport rep = moment_check(q, 0.1, samples, derive_seed(s.seed, 0x6d6full));
  std::cout << io::moment_report_json(rep) << "\n";

  const bool ok = alg.pass && rep.pass_sq && rep.pass_fourth;
  if (!ok) throw numeric_error("check: property suite failed");
  return 0;
}

int run_bn(const GlobalOptions& opt) {
  const io::CliConfig cfg = load_config(opt);
  const fs::path dir = ensure_out_dir(opt);
  const BnSweepResult result = bn_sweep(cfg.study, cfg.deltas);
  io::write_bn_csv(dir / "bn.csv", result);
  io::write_text(dir / "bn_summary.json", io::bn_summary_json(cfg.study, result));
  if (result.slope.defined) {
    std::cout << "bn slope " << io::format_double(result.slope.slope) << "\n";
  } else {
    std::cout << "bn slope undefined\n";
  }
  return 0;
}

}  // namespace

int cli_run(const std::vector<std::string>& args) {
  CLI::App app{"Simulation and estimation laboratory for operator-valued volatility "
               "of Hilbert-space-valued evolution equations"};
  app.require_subcommand(1);

  GlobalOptions opt;
  app.add_option("--config", opt.config_path, "JSON configuration file");
  app.add_option("--out", opt.out_dir, "output directory");
  std::uint64_t seed_value = 0;
  auto* seed_opt = app.add_option("--seed", seed_value, "override the config seed");
  int threads_value = 0;
  auto* threads_opt =
      app.add_option("--threads", threads_value, "worker threads (affects wall time only)");

  auto* sim = app.add_subcommand("simulate", "emit a trajectory CSV (plus its covariation target)");
  std::string traj_path, qv_path;
  auto* est = app.add_subcommand("estimate", "read a trajectory CSV and emit the estimator path");
  est->add_option("--trajectory", traj_path, "trajectory CSV produced by `simulate`")->required();
  est->add_option("--qv", qv_path, "covariation target CSV to compare against");
  auto* conv = app.add_subcommand("converge", "run a Monte Carlo convergence study");
  long check_samples = 1000000;
  int check_pairs = 1000;
  auto* chk = app.add_subcommand("check", "moment check and operator-algebra property suite");
  chk->add_option("--samples", check_samples, "Monte Carlo samples for the moment check");
  chk->add_option("--pairs", check_pairs, "random operator pairs");
  auto* bn = app.add_subcommand("bn", "rate-sequence sweep over delta_n");

  std::vector<std::string> argv_vec = args;
  std::vector<const char*> argv;
  argv.push_back("sarcv");
  for (const std::string& a : argv_vec) argv.push_back(a.c_str());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
    if (*seed_opt) opt.seed = seed_value;
    if (*threads_opt) opt.threads = threads_value;
    if (sim->parsed()) return run_simulate(opt);
    if (est->parsed()) return run_estimate(opt, traj_path, qv_path);
    if (conv->parsed()) return run_converge(opt);
    if (chk->parsed()) return run_check(opt, check_samples, check_pairs);
    if (bn->parsed()) return run_bn(opt);
    return 1;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {  // --help
      std::cout << app.help();
      return 0;
    }
    std::cerr << "argument error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 1;
  } catch (const numeric_error& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace sarcv
