#include "sarcv/harness.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>

#include "sarcv/io.hpp"

namespace sarcv {

namespace {

constexpr std::uint64_t kVolStream = 0x766f6cull;    // vol path draws
constexpr std::uint64_t kNoiseStream = 0x775full;    // Wiener draws
constexpr std::uint64_t kBnStream = 0x626eull;       // rate-sequence vol draws

bool needs_frame(const StudyConfig& cfg) {
  const bool curve_vol = cfg.vol.kind == VolConfig::Kind::RoughExp ||
                         cfg.vol.kind == VolConfig::Kind::ForwardKernel ||
                         cfg.vol.kind == VolConfig::Kind::CurveModes;
  return cfg.semigroup.kind == SemigroupConfig::Kind::Shift || curve_vol;
}

GridFunction gaussian_bump(const FilipovicSpace& space, double amplitude, double center,
                           double width) {
  return sample_on_grid(space, [&](double x) {
    const double z = (x - center) / width;
    return amplitude * std::exp(-0.5 * z * z);
  });
}

GridFunction load_grid_function(const std::string& path, const FilipovicSpace& space) {
  const io::GridFunctionCsv csv = io::read_grid_function_csv(path);
  require(csv.nodes.size() == space.node_count() &&
              (csv.nodes - space.nodes()).cwiseAbs().maxCoeff() <= 1e-9 * (1.0 + space.x_max()),
          "grid function CSV '" + path + "' is not on the configured grid");
  return GridFunction{csv.values};
}

Matrix load_kernel_matrix(const std::string& path, const FilipovicSpace& space) {
  const Matrix p = io::read_matrix_csv(path);
  require(p.rows() == space.node_count() && p.cols() == space.node_count(),
          "kernel CSV '" + path + "' must be nodes x nodes for the configured grid");
  return p;
}

}  // namespace

Matrix build_matrix(const MatrixSpec& spec, Index dim, const std::string& what) {
  switch (spec.kind) {
    case MatrixSpec::Kind::Identity:
      return Matrix::Identity(dim, dim);
    case MatrixSpec::Kind::ScaledIdentity:
      return spec.scale * Matrix::Identity(dim, dim);
    case MatrixSpec::Kind::Diagonal: {
      require(static_cast<Index>(spec.diagonal.size()) == dim,
              what + ": diagonal length must equal the dimension");
      Matrix m = Matrix::Zero(dim, dim);
      for (Index i = 0; i < dim; ++i) m(i, i) = spec.diagonal[static_cast<size_t>(i)];
      return m;
    }
    case MatrixSpec::Kind::TridiagSkewUnit: {
      // Skew tridiagonal, normalised to unit operator norm.
      require(dim >= 2, what + ": tridiag_skew_unit needs dim >= 2");
      Matrix m = Matrix::Zero(dim, dim);
      for (Index i = 0; i + 1 < dim; ++i) {
        m(i, i + 1) = 1.0;
        m(i + 1, i) = -1.0;
      }
      return m / op_norm(m);
    }
    case MatrixSpec::Kind::Explicit: {
      require(static_cast<Index>(spec.rows.size()) == dim, what + ": row count mismatch");
      Matrix m(dim, dim);
      for (Index i = 0; i < dim; ++i) {
        require(static_cast<Index>(spec.rows[static_cast<size_t>(i)].size()) == dim,
                what + ": column count mismatch");
        for (Index j = 0; j < dim; ++j) m(i, j) = spec.rows[static_cast<size_t>(i)][static_cast<size_t>(j)];
      }
      return m;
    }
  }
  throw std::invalid_argument(what + ": unknown matrix kind");
}

Index scenario_dim(const StudyConfig& cfg) {
  return needs_frame(cfg) ? cfg.space.cells + 1 : cfg.dim;
}

Scenario build_scenario(const StudyConfig& cfg) {
  Scenario sc{make_identity_semigroup(1), ConstantVol{Matrix::Identity(1, 1)},
              SpectralQ::unit(1), Vector::Zero(1), std::nullopt, cfg.hjm_drift};

  const Index dim = scenario_dim(cfg);
  if (needs_frame(cfg)) {
    sc.frame = FilipovicFrame::uniform(cfg.space.beta, cfg.space.x_max, cfg.space.cells);
  }

  switch (cfg.q.kind) {
    case QConfig::Kind::Geometric:
      sc.q = SpectralQ::geometric(dim, cfg.q.ratio, cfg.q.first, cfg.q.rank);
      break;
    case QConfig::Kind::ExplicitList: {
      Vector ev(static_cast<Index>(cfg.q.values.size()));
      for (Index i = 0; i < ev.size(); ++i) ev(i) = cfg.q.values[static_cast<size_t>(i)];
      sc.q = SpectralQ::from_list(std::move(ev), dim);
      break;
    }
    case QConfig::Kind::Unit:
      sc.q = SpectralQ::unit(dim);
      break;
  }

  switch (cfg.semigroup.kind) {
    case SemigroupConfig::Kind::Identity:
      sc.semigroup = make_identity_semigroup(dim);
      break;
    case SemigroupConfig::Kind::MatrixExp:
      sc.semigroup = make_matrix_exp_semigroup(build_matrix(cfg.semigroup.generator, dim, "generator"));
      break;
    case SemigroupConfig::Kind::Shift:
      sc.semigroup = make_shift_semigroup(*sc.frame);
      break;
  }

  switch (cfg.vol.kind) {
    case VolConfig::Kind::Constant:
      sc.vol = ConstantVol{build_matrix(cfg.vol.sigma, dim, "sigma")};
      break;
    case VolConfig::Kind::Bns: {
      BnsOuVol m;
      m.kappa = cfg.vol.kappa;
      m.sigma0 = build_matrix(cfg.vol.sigma0, dim, "sigma0");
      m.rate = cfg.vol.rate;
      m.jump_scale = cfg.vol.jump_scale;
      sc.vol = std::move(m);
      break;
    }
    case VolConfig::Kind::RoughExp: {
      require(sc.frame.has_value(), "rough_exp volatility needs the curve space");
      Vector amps(static_cast<Index>(cfg.vol.amplitudes.size()));
      for (Index i = 0; i < amps.size(); ++i) amps(i) = cfg.vol.amplitudes[static_cast<size_t>(i)];
      sc.vol = RoughExpVol{cfg.vol.alpha, std::move(amps), *sc.frame};
      break;
    }
    case VolConfig::Kind::ForwardKernel: {
      require(sc.frame.has_value(), "forward_kernel volatility needs the curve space");
      require(cfg.q.kind == QConfig::Kind::Unit,
              "forward_kernel volatility absorbs Q^{1/2}; use q.kind = unit");
      const FilipovicSpace& space = sc.frame->space;
      const Index nodes = space.node_count();
      GridFunction f = cfg.vol.f_csv.empty()
                           ? sample_on_grid(space,
                                            [&](double x) {
                                              const double z = (x - cfg.vol.f.center) / cfg.vol.f.width;
                                              return cfg.vol.f.amplitude * x * std::exp(-0.5 * z * z);
                                            })
                           : load_grid_function(cfg.vol.f_csv, space);
      Matrix p;
      if (cfg.vol.p_csv.empty()) {
        p.resize(nodes, nodes);
        for (Index i = 0; i < nodes; ++i) {
          for (Index j = 0; j < nodes; ++j) {
            const double zy = (space.nodes()(i) - cfg.vol.p.center) / cfg.vol.p.width;
            const double zz = (space.nodes()(j) - cfg.vol.p.center) / cfg.vol.p.width;
            p(i, j) = cfg.vol.p.amplitude * std::exp(-0.5 * (zy * zy + zz * zz));
          }
        }
      } else {
        p = load_kernel_matrix(cfg.vol.p_csv, space);
      }
      sc.vol = ConstantVol{build_filipovic_volatility(*sc.frame, f, p, cfg.vol.c)};
      break;
    }
    case VolConfig::Kind::CurveModes: {
      require(sc.frame.has_value(), "curve_modes volatility needs the curve space");
      require(!cfg.vol.mode_amplitudes.empty() &&
                  cfg.vol.mode_amplitudes.size() == cfg.vol.mode_centers.size(),
              "curve_modes: amplitudes and centers must match and be nonempty");
      Matrix sigma = Matrix::Zero(dim, dim);
      for (size_t j = 0; j < cfg.vol.mode_amplitudes.size(); ++j) {
        require(static_cast<Index>(j) < dim, "curve_modes: more modes than dimensions");
        const GridFunction bump = gaussian_bump(sc.frame->space, cfg.vol.mode_amplitudes[j],
                                                cfg.vol.mode_centers[j], cfg.vol.mode_width);
        sigma.col(static_cast<Index>(j)) = sc.frame->map.to_ortho(bump);
      }
      sc.vol = ConstantVol{std::move(sigma)};
      break;
    }
  }

  switch (cfg.h0.kind) {
    case H0Config::Kind::Zero:
      sc.h0 = Vector::Zero(dim);
      break;
    case H0Config::Kind::FlatDecay: {
      require(sc.frame.has_value(), "h0 flat_decay needs the curve space");
      const GridFunction h = sample_on_grid(sc.frame->space, [&](double x) {
        return cfg.h0.level + cfg.h0.slope * std::exp(-x);
      });
      sc.h0 = sc.frame->map.to_ortho(h);
      break;
    }
  }

  if (cfg.hjm_drift) {
    require(sc.frame.has_value(), "hjm_drift needs the curve space");
  }
  return sc;
}

// ---------------------------------------------------------------------------

void parallel_for_index(Index count, int threads, const std::function<void(Index)>& body) {
  if (threads <= 0) threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  if (threads == 1 || count <= 1) {
    for (Index i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<Index> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (;;) {
      const Index i = next.fetch_add(1);
      if (i >= count) return;
      try {
        body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  const int n_workers = static_cast<int>(std::min<Index>(threads, count));
  pool.reserve(static_cast<size_t>(n_workers));
  for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

Matrix aggregate_increments(const Eigen::Ref<const Matrix>& fine, Index factor) {
  require(factor >= 1, "aggregate_increments: factor must be >= 1");
  require(fine.cols() % factor == 0, "aggregate_increments: factor must divide the step count");
  const Index coarse = fine.cols() / factor;
  Matrix out(fine.rows(), coarse);
  for (Index i = 0; i < coarse; ++i) {
    out.col(i) = fine.middleCols(i * factor, factor).rowwise().sum();
  }
  return out;
}

SlopeFit slope_fit(const std::vector<std::pair<double, double>>& pairs) {
  require(pairs.size() >= 3, "slope_fit: need at least 3 pairs");
  const Index n = static_cast<Index>(pairs.size());
  Vector x(n), y(n);
  for (Index i = 0; i < n; ++i) {
    require(pairs[static_cast<size_t>(i)].first > 0.0 && pairs[static_cast<size_t>(i)].second > 0.0,
            "slope_fit: values must be positive");
    x(i) = std::log(pairs[static_cast<size_t>(i)].first);
    y(i) = std::log(pairs[static_cast<size_t>(i)].second);
  }
  const double xbar = x.mean();
  const double ybar = y.mean();
  const double sxx = (x.array() - xbar).square().sum();
  require(sxx > 0.0, "slope_fit: degenerate abscissae");
  const double sxy = ((x.array() - xbar) * (y.array() - ybar)).sum();
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = ybar - fit.slope * xbar;
  const double rss = (y.array() - fit.intercept - fit.slope * x.array()).square().sum();
  fit.stderr_slope = (n > 2) ? std::sqrt(rss / double(n - 2) / sxx) : 0.0;
  fit.defined = true;
  return fit;
}

namespace {

bool deterministic_vol(const VolModel& model) {
  return std::holds_alternative<ConstantVol>(model);
}

// Replication paths for the rate-sequence estimate, thinned for tractability.
std::vector<VolPath> bn_vol_paths(const Scenario& sc, const StudyConfig& cfg) {
  if (deterministic_vol(sc.vol)) {
    const Matrix& sigma = std::get<ConstantVol>(sc.vol).sigma;
    Vector times(2);
    times << 0.0, cfg.t_max;
    return {VolPath::constant_path(times, sigma)};
  }
  const Index nodes = std::max<Index>(2, cfg.bn_max_nodes);
  const Vector times = Vector::LinSpaced(nodes, 0.0, cfg.t_max);
  const int reps = std::max(1, std::min(cfg.bn_replications, cfg.replications));
  std::vector<VolPath> out;
  out.reserve(static_cast<size_t>(reps));
  for (int k = 0; k < reps; ++k) {
    out.push_back(simulate_vol_path(sc.vol, times, derive_seed(cfg.seed ^ kBnStream, k)));
  }
  return out;
}

}  // namespace

StudyResult convergence_study(const StudyConfig& cfg) {
  require(!cfg.n_list.empty(), "convergence_study: empty n list");
  for (size_t j = 0; j + 1 < cfg.n_list.size(); ++j) {
    require(cfg.n_list[j] < cfg.n_list[j + 1], "convergence_study: n list must be strictly increasing");
  }
  require(cfg.n_list.front() >= 1, "convergence_study: n must be positive");
  require(cfg.replications >= 2, "convergence_study: need at least 2 replications");
  require(cfg.refine >= 1, "convergence_study: refine must be >= 1");
  const int n_max = cfg.n_list.back();
  for (int n : cfg.n_list) {
    require(n_max % n == 0, "convergence_study: every n must divide max(n); matched noise "
                            "aggregates finest-grid increments");
  }

  const Scenario sc = build_scenario(cfg);
  const Index n_cells = static_cast<Index>(cfg.n_list.size());
  const Index reps = cfg.replications;
  const double delta_f = cfg.t_max / double(n_max * cfg.refine);
  const Index fine_steps = static_cast<Index>(n_max) * cfg.refine;
  const Vector finest_times = Vector::LinSpaced(fine_steps + 1, 0.0, cfg.t_max);
  const Vector finest_obs = Vector::LinSpaced(n_max + 1, 0.0, cfg.t_max);

  StudyResult res;
  res.per_rep_errors.resize(reps, n_cells);
  Matrix per_rep_off;  // drift-off errors when comparing
  Matrix seconds(reps, n_cells);
  if (sc.use_hjm_drift) per_rep_off.resize(reps, n_cells);

  const auto rep_body = [&](Index r) {
    const VolPath vol =
        simulate_vol_path(sc.vol, finest_times, derive_seed(cfg.seed ^ kVolStream, r));
    std::optional<DriftPath> drift;
    if (sc.use_hjm_drift) drift = hjm_drift_path(vol, sc.q, *sc.frame, fine_steps);
    const WienerIncrements w =
        sample_wiener_increments(sc.q, delta_f, fine_steps, derive_seed(cfg.seed ^ kNoiseStream, r));
    const OperatorPath qv = true_qv(vol, sc.q, finest_obs);

    for (Index j = 0; j < n_cells; ++j) {
      const auto started = std::chrono::steady_clock::now();
      const int n = cfg.n_list[static_cast<size_t>(j)];
      const Index factor = n_max / n;
      const double delta_n = cfg.t_max / double(n);
      const Matrix incs = aggregate_increments(w.draws, factor);
      const Trajectory traj = simulate_mild_path_with(
          sc.semigroup, vol, drift ? &*drift : nullptr, sc.h0, delta_n, cfg.t_max, cfg.refine, incs);
      const OperatorPath est = sarcv_path(traj, sc.semigroup, delta_n);
      res.per_rep_errors(r, j) = sup_hs_error_strided(est, qv, factor);
      if (sc.use_hjm_drift) {
        const Trajectory off = simulate_mild_path_with(sc.semigroup, vol, nullptr, sc.h0, delta_n,
                                                       cfg.t_max, cfg.refine, incs);
        const OperatorPath est_off = sarcv_path(off, sc.semigroup, delta_n);
        per_rep_off(r, j) = sup_hs_error_strided(est_off, qv, factor);
      }
      seconds(r, j) = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    }
  };
  parallel_for_index(reps, cfg.threads, rep_body);

  // Rate sequence per n (outside the replication loop; deterministic order).
  std::vector<double> bn(n_cells, 0.0);
  if (!is_identity(sc.semigroup)) {
    const std::vector<VolPath> bn_vols = bn_vol_paths(sc, cfg);
    for (Index j = 0; j < n_cells; ++j) {
      const double delta_n = cfg.t_max / double(cfg.n_list[static_cast<size_t>(j)]);
      bn[static_cast<size_t>(j)] = estimate_bn(sc.semigroup, std::span<const VolPath>(bn_vols),
                                               sc.q, delta_n, cfg.t_max, cfg.bn_subgrid);
    }
  }

  // Reduce in fixed order.
  res.cells.resize(static_cast<size_t>(n_cells));
  std::vector<std::pair<double, double>> fit_pairs;
  bool all_positive = true;
  for (Index j = 0; j < n_cells; ++j) {
    StudyCell& cell = res.cells[static_cast<size_t>(j)];
    cell.n = cfg.n_list[static_cast<size_t>(j)];
    cell.delta_n = cfg.t_max / double(cell.n);
    double sum = 0.0, sumsq = 0.0;
    for (Index r = 0; r < reps; ++r) {
      sum += res.per_rep_errors(r, j);
      sumsq += res.per_rep_errors(r, j) * res.per_rep_errors(r, j);
    }
    cell.mean_err = sum / double(reps);
    const double var = std::max(0.0, sumsq / double(reps) - cell.mean_err * cell.mean_err);
    cell.stderr_err = std::sqrt(var / double(reps));
    cell.bn_hat = bn[static_cast<size_t>(j)];
    cell.seconds = seconds.col(j).sum();
    if (cell.mean_err > 0.0) {
      fit_pairs.emplace_back(cell.delta_n, cell.mean_err);
    } else {
      all_positive = false;
    }
  }
  if (all_positive && fit_pairs.size() >= 3) {
    res.slope = slope_fit(fit_pairs);
  }

  res.monotone_fraction.resize(static_cast<size_t>(std::max<Index>(0, n_cells - 1)), 0.0);
  for (Index j = 0; j + 1 < n_cells; ++j) {
    Index improved = 0;
    for (Index r = 0; r < reps; ++r) {
      if (res.per_rep_errors(r, j + 1) <= res.per_rep_errors(r, j)) ++improved;
    }
    res.monotone_fraction[static_cast<size_t>(j)] = double(improved) / double(reps);
  }

  double env_min = std::numeric_limits<double>::infinity();
  double env_max = 0.0;
  for (const StudyCell& cell : res.cells) {
    if (cell.mean_err <= 0.0) continue;
    const double envelope = std::pow(cell.delta_n, cfg.alpha_rate) + std::sqrt(cell.bn_hat);
    const double ratio = cell.mean_err / envelope;
    env_min = std::min(env_min, ratio);
    env_max = std::max(env_max, ratio);
  }
  res.envelope_ratio = (env_max > 0.0 && std::isfinite(env_min)) ? env_max / env_min
                                                                 : std::numeric_limits<double>::quiet_NaN();

  if (sc.use_hjm_drift) {
    res.has_drift_diff = true;
    res.drift_diff_mean.resize(static_cast<size_t>(n_cells));
    res.drift_diff_stderr.resize(static_cast<size_t>(n_cells));
    std::vector<std::pair<double, double>> diff_pairs;
    bool diff_positive = true;
    for (Index j = 0; j < n_cells; ++j) {
      double sum = 0.0, sumsq = 0.0;
      for (Index r = 0; r < reps; ++r) {
        const double diff = std::abs(res.per_rep_errors(r, j) - per_rep_off(r, j));
        sum += diff;
        sumsq += diff * diff;
      }
      const double mean = sum / double(reps);
      const double var = std::max(0.0, sumsq / double(reps) - mean * mean);
      res.drift_diff_mean[static_cast<size_t>(j)] = mean;
      res.drift_diff_stderr[static_cast<size_t>(j)] = std::sqrt(var / double(reps));
      if (mean > 0.0) {
        diff_pairs.emplace_back(cfg.t_max / double(cfg.n_list[static_cast<size_t>(j)]), mean);
      } else {
        diff_positive = false;
      }
    }
    if (diff_positive && diff_pairs.size() >= 3) res.drift_slope = slope_fit(diff_pairs);
  }
  return res;
}

SimulationProducts run_single_simulation(const StudyConfig& cfg, int n) {
  require(n >= 1, "run_single_simulation: n must be positive");
  const Scenario sc = build_scenario(cfg);
  const double delta_n = cfg.t_max / double(n);
  const Index fine_steps = static_cast<Index>(n) * cfg.refine;
  const Vector fine_times = Vector::LinSpaced(fine_steps + 1, 0.0, cfg.t_max);
  const VolPath vol = simulate_vol_path(sc.vol, fine_times, derive_seed(cfg.seed ^ kVolStream, 0));
  std::optional<DriftPath> drift;
  if (sc.use_hjm_drift) drift = hjm_drift_path(vol, sc.q, *sc.frame, fine_steps);
  SimulationProducts out;
  out.trajectory =
      simulate_mild_path(sc.semigroup, vol, sc.q, drift ? &*drift : nullptr, sc.h0, delta_n,
                         cfg.t_max, cfg.refine, derive_seed(cfg.seed ^ kNoiseStream, 0));
  out.qv = true_qv(vol, sc.q, out.trajectory.obs_times);
  return out;
}

BnSweepResult bn_sweep(const StudyConfig& cfg, const std::vector<double>& deltas) {
  require(!deltas.empty(), "bn_sweep: empty delta list");
  const Scenario sc = build_scenario(cfg);
  const std::vector<VolPath> vols =
      is_identity(sc.semigroup) ? std::vector<VolPath>{} : bn_vol_paths(sc, cfg);
  BnSweepResult out;
  out.delta_n = deltas;
  out.bn_hat.resize(deltas.size(), 0.0);
  out.bn_hat_refined.resize(deltas.size(), 0.0);
  std::vector<std::pair<double, double>> pairs;
  for (size_t i = 0; i < deltas.size(); ++i) {
    require(deltas[i] > 0.0 && deltas[i] <= cfg.t_max, "bn_sweep: deltas must lie in (0, T]");
    if (!is_identity(sc.semigroup)) {
      out.bn_hat[i] = estimate_bn(sc.semigroup, std::span<const VolPath>(vols), sc.q, deltas[i],
                                  cfg.t_max, cfg.bn_subgrid);
      out.bn_hat_refined[i] = estimate_bn(sc.semigroup, std::span<const VolPath>(vols), sc.q,
                                          deltas[i], cfg.t_max, 2 * cfg.bn_subgrid - 1);
    }
    if (out.bn_hat[i] > 0.0) pairs.emplace_back(deltas[i], out.bn_hat[i]);
  }
  if (pairs.size() >= 3 && pairs.size() == deltas.size()) out.slope = slope_fit(pairs);
  return out;
}

MomentReport moment_check(const SpectralQ& q, double delta, long samples, std::uint64_t seed) {
  require(delta > 0.0, "moment_check: step must be positive");
  require(samples >= 10000, "moment_check: need at least 1e4 samples");
  RandomStream rng(seed);
  const Matrix map = std::sqrt(delta) * q.kl_map();
  double a1 = 0.0, a2 = 0.0, a4 = 0.0;
  for (long i = 0; i < samples; ++i) {
    const double x = (map * rng.normal_vector(q.rank())).squaredNorm();
    const double x2 = x * x;
    a1 += x;
    a2 += x2;
    a4 += x2 * x2;
  }
  const double inv = 1.0 / double(samples);
  MomentReport rep;
  rep.delta = delta;
  rep.samples = samples;
  rep.mean_sq = a1 * inv;
  rep.mean_fourth = a2 * inv;
  rep.se_sq = std::sqrt(std::max(0.0, a2 * inv - rep.mean_sq * rep.mean_sq) * inv);
  rep.se_fourth = std::sqrt(std::max(0.0, a4 * inv - rep.mean_fourth * rep.mean_fourth) * inv);
  rep.theo_sq = delta * q.trace();
  rep.theo_fourth = fourth_moment_theoretical(q, delta);
  rep.pass_sq = std::abs(rep.mean_sq - rep.theo_sq) <= 3.0 * rep.se_sq;
  rep.pass_fourth = std::abs(rep.mean_fourth - rep.theo_fourth) <= 3.0 * rep.se_fourth;
  return rep;
}

AlgebraReport operator_algebra_check(Index dim, int pairs, std::uint64_t seed) {
  require(dim >= 2, "operator_algebra_check: dim must be >= 2");
  require(pairs >= 1, "operator_algebra_check: need at least one pair");
  RandomStream rng(seed);
  const auto rand_dim = [&]() { return 2 + static_cast<Index>(rng.uniform() * double(dim - 1)); };
  AlgebraReport rep;
  rep.dim = dim;
  rep.pairs = pairs;
  for (int i = 0; i < pairs; ++i) {
    const Index du = rand_dim(), dv = rand_dim(), dh = rand_dim();
    Matrix k(dv, du), l(dh, dv);
    for (Index a = 0; a < k.rows(); ++a) {
      for (Index b = 0; b < k.cols(); ++b) k(a, b) = rng.normal();
    }
    for (Index a = 0; a < l.rows(); ++a) {
      for (Index b = 0; b < l.cols(); ++b) l(a, b) = rng.normal();
    }
    const double hs_k = hs_norm(k), hs_l = hs_norm(l);
    const double op_l = op_norm(l), op_k = op_norm(k);
    const double hs_lk = hs_norm(compose(l, k));
    const double tol = 1e-10 * (1.0 + hs_l * hs_k);
    const bool ok = hs_lk <= op_l * hs_k + tol && op_l * hs_k <= hs_l * hs_k + tol &&
                    op_l <= hs_l + tol && op_k <= hs_k + tol;
    if (!ok) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

}  // namespace sarcv
