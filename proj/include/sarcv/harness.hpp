#pragma once

// Monte Carlo studies: error-vs-frequency curves for the covariation
// estimator on matched noise, rate-sequence sweeps, moment checks and the
// operator-algebra property suite. Replications run in parallel with derived
// seeds and a fixed reduction order, so results are bit-identical for any
// thread count.

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sarcv/common.hpp"
#include "sarcv/estimator.hpp"
#include "sarcv/noise.hpp"
#include "sarcv/semigroup.hpp"
#include "sarcv/simulate.hpp"
#include "sarcv/volatility.hpp"

namespace sarcv {

// ---------------------------------------------------------------------------
// Declarative configuration (mirrors the JSON schema, defaults expanded here)
// ---------------------------------------------------------------------------

struct QConfig {
  enum class Kind { Geometric, ExplicitList, Unit };
  Kind kind = Kind::Geometric;
  double ratio = 0.5;
  double first = 0.5;
  Index rank = -1;  // -1: ambient dimension
  std::vector<double> values;
};

struct MatrixSpec {
  enum class Kind { Identity, ScaledIdentity, Diagonal, TridiagSkewUnit, Explicit };
  Kind kind = Kind::Identity;
  double scale = 1.0;
  std::vector<double> diagonal;
  std::vector<std::vector<double>> rows;
};

struct SemigroupConfig {
  enum class Kind { Identity, MatrixExp, Shift };
  Kind kind = Kind::Identity;
  MatrixSpec generator;  // MatrixExp
};

// Discretised forward-curve space, shared by the shift semigroup and the
// curve-valued volatility models.
struct SpaceConfig {
  double beta = 0.5;
  double x_max = 5.0;
  Index cells = 64;
};

struct BumpSpec {
  double amplitude = 1.0;
  double center = 1.0;
  double width = 0.5;
};

struct VolConfig {
  enum class Kind { Constant, Bns, RoughExp, ForwardKernel, CurveModes };
  Kind kind = Kind::Constant;
  // Constant
  MatrixSpec sigma;
  // Bns
  double kappa = 0.5;
  MatrixSpec sigma0;
  double rate = 1.0;
  double jump_scale = 0.1;
  // RoughExp
  double alpha = 0.3;
  std::vector<double> amplitudes;
  // ForwardKernel: sigma Q^{1/2} built from (c, f, p); requires unit Q
  double c = 0.0;
  BumpSpec f;        // f(x) = amplitude · x · exp(-0.5((x-center)/width)²), so f(0)=0
  BumpSpec p;        // p(y,z) = amplitude · exp(-((y-center)²+(z-center)²)/(2 width²))
  std::string f_csv; // grid-function CSV overriding the analytic f
  std::string p_csv; // matrix CSV (nodes x nodes) overriding the analytic p
  // CurveModes: sigma e_j = amplitude_j · gaussian bump at center_j
  std::vector<double> mode_amplitudes;
  std::vector<double> mode_centers;
  double mode_width = 0.4;
};

struct H0Config {
  enum class Kind { Zero, FlatDecay };
  Kind kind = Kind::Zero;
  double level = 0.0;
  double slope = 0.0;
};

struct StudyConfig {
  Index dim = 10;
  double t_max = 1.0;
  QConfig q;
  SemigroupConfig semigroup;
  SpaceConfig space;
  VolConfig vol;
  bool hjm_drift = false;
  H0Config h0;
  std::vector<int> n_list{16, 32, 64, 128, 256, 512, 1024};
  int replications = 100;
  int refine = 8;
  std::uint64_t seed = 20240915;
  Index bn_subgrid = 16;
  Index bn_max_nodes = 33;
  int bn_replications = 16;
  double alpha_rate = 0.5;
  std::array<double, 2> slope_band{0.40, 0.60};
  int threads = 0;  // 0: hardware concurrency
};

// Constructed model objects for one study.
struct Scenario {
  Semigroup semigroup;
  VolModel vol;
  SpectralQ q;
  Vector h0;
  std::optional<FilipovicFrame> frame;
  bool use_hjm_drift = false;
};

Matrix build_matrix(const MatrixSpec& spec, Index dim, const std::string& what);
Scenario build_scenario(const StudyConfig& cfg);
Index scenario_dim(const StudyConfig& cfg);

// ---------------------------------------------------------------------------
// Results
// ---------------------------------------------------------------------------

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double stderr_slope = 0.0;
  bool defined = false;
};

// Ordinary least squares of log(value) on log(delta); pairs are (delta, value).
SlopeFit slope_fit(const std::vector<std::pair<double, double>>& pairs);

struct StudyCell {
  int n = 0;
  double delta_n = 0.0;
  double mean_err = 0.0;
  double stderr_err = 0.0;
  double bn_hat = 0.0;
  double seconds = 0.0;  // wall time, reported separately from the data files
};

struct StudyResult {
  std::vector<StudyCell> cells;
  SlopeFit slope;
  std::vector<double> monotone_fraction;  // share of replications improving at the next n
  double envelope_ratio = 0.0;            // max/min of mean_err / (delta^alpha + sqrt(bn_hat))
  Matrix per_rep_errors;                  // replications x n_list
  // Filled when the study runs with the no-arbitrage drift: per-n mean of
  // |err(drift on) - err(drift off)| on matched noise, and its slope.
  bool has_drift_diff = false;
  std::vector<double> drift_diff_mean;
  std::vector<double> drift_diff_stderr;
  SlopeFit drift_slope;
};

StudyResult convergence_study(const StudyConfig& cfg);

// One simulated trajectory at observation count n, together with its
// covariation target on the same observation grid. The `simulate` and
// `estimate` commands and the in-process pipeline share this path.
struct SimulationProducts {
  Trajectory trajectory;
  OperatorPath qv;
};
SimulationProducts run_single_simulation(const StudyConfig& cfg, int n);

// Rate-sequence sweep: bn_hat over a list of delta_n values. A finite inner
// subgrid approaches the sup from below, so each estimate is recomputed on
// the nested refinement with 2s-1 points and the delta reported alongside.
struct BnSweepResult {
  std::vector<double> delta_n;
  std::vector<double> bn_hat;
  std::vector<double> bn_hat_refined;  // nested 2s-1 point subgrid, >= bn_hat
  SlopeFit slope;
};
BnSweepResult bn_sweep(const StudyConfig& cfg, const std::vector<double>& deltas);

// ---------------------------------------------------------------------------
// Checks
// ---------------------------------------------------------------------------

struct MomentReport {
  double delta = 0.0;
  long samples = 0;
  double mean_sq = 0.0, se_sq = 0.0, theo_sq = 0.0;
  double mean_fourth = 0.0, se_fourth = 0.0, theo_fourth = 0.0;
  bool pass_sq = false, pass_fourth = false;  // at 3 standard errors
};
MomentReport moment_check(const SpectralQ& q, double delta, long samples, std::uint64_t seed);

struct AlgebraReport {
  Index dim = 0;
  int pairs = 0;
  int violations = 0;
  bool pass = false;
};
// ‖LK‖_HS <= ‖L‖_op ‖K‖_HS <= ‖L‖_HS ‖K‖_HS and ‖·‖_op <= ‖·‖_HS on random pairs.
AlgebraReport operator_algebra_check(Index dim, int pairs, std::uint64_t seed);

// Deterministic parallel map over [0, count): each index writes its own slot.
void parallel_for_index(Index count, int threads, const std::function<void(Index)>& body);

// Columns of `fine` summed in consecutive blocks of `factor`.
Matrix aggregate_increments(const Eigen::Ref<const Matrix>& fine, Index factor);

}  // namespace sarcv
