#pragma once

// Simulation of the mild solution
//   Y_{t_i} = S(delta_n) Y_{t_{i-1}} + sum_{j=1}^{R} S(t_i - s_{j-1}) [alpha_{s_{j-1}} delta + sigma_{s_{j-1}} dW_j]
// on R fine substeps per observation interval, with left-point evaluation of
// sigma and alpha and the semigroup weighted by the distance from the left
// substep endpoint. The semigroup factors S(j·delta) are evaluated directly
// (not composed), so the flow term of an adjusted increment cancels exactly
// against the estimator's S(delta_n).

#include <vector>

#include "sarcv/common.hpp"
#include "sarcv/noise.hpp"
#include "sarcv/paths.hpp"
#include "sarcv/semigroup.hpp"
#include "sarcv/spaces.hpp"

namespace sarcv {

inline Index observation_count(double t_max, double delta_n) {
  require(delta_n > 0.0 && t_max >= delta_n, "need 0 < delta_n <= T");
  return static_cast<Index>(std::floor(t_max / delta_n + 1e-9));
}

// Left-point lookup of a path value on a grid of spacing `spacing` that must
// subdivide the caller's substep spacing.
inline Index path_index(const Vector& times, double t, const char* what) {
  require(times.size() >= 2, std::string(what) + ": path too short");
  const double spacing = times(1) - times(0);
  const Index idx = aligned_index(t - times(0), spacing, what);
  require(idx >= 0 && idx < times.size(), std::string(what) + ": time outside path");
  return idx;
}

inline Trajectory simulate_mild_path_with(const Semigroup& s, const VolPath& vol,
                                          const DriftPath* drift, const Vector& h0,
                                          double delta_n, double t_max, int refine,
                                          const Eigen::Ref<const Matrix>& increments) {
  require(refine >= 1, "simulate_mild_path: refine must be >= 1");
  const Index d = state_dim(s);
  require(h0.size() == d, "simulate_mild_path: initial value dimension mismatch");
  const Index n_obs = observation_count(t_max, delta_n);
  const double delta = delta_n / refine;
  const Index n_fine = n_obs * refine;
  require(increments.cols() == n_fine && increments.rows() == d,
          "simulate_mild_path: increment matrix must be dim x (n_obs*refine)");

  // vol grid must contain every substep left endpoint
  require(vol.node_count() >= 2 || vol.constant,
          "simulate_mild_path: vol grid incompatible with (delta_n, refine)");
  const auto vol_at = [&](double t) -> const Matrix& {
    return vol.op_at(vol.constant ? 0 : path_index(vol.times, t, "simulate_mild_path(vol)"));
  };
  const auto drift_at = [&](double t) -> Vector {
    return drift->values.col(path_index(drift->times, t, "simulate_mild_path(drift)"));
  };

  std::vector<Matrix> weights;  // S(j·delta), j = 1..refine
  const bool trivial_flow = is_identity(s);
  if (!trivial_flow) {
    weights.reserve(refine);
    for (int j = 1; j <= refine; ++j) weights.push_back(semigroup_matrix(s, j * delta));
  }

  Trajectory traj;
  traj.obs_times = Vector::LinSpaced(n_obs + 1, 0.0, n_obs * delta_n);
  traj.states.resize(d, n_obs + 1);
  traj.delta_n = delta_n;
  traj.refine = refine;
  traj.states.col(0) = h0;

  Vector y = h0;
  for (Index i = 1; i <= n_obs; ++i) {
    Vector acc = trivial_flow ? y : Vector(weights[refine - 1] * y);
    for (int j = 1; j <= refine; ++j) {
      const double left = (i - 1) * delta_n + (j - 1) * delta;
      Vector term = vol_at(left) * increments.col((i - 1) * refine + (j - 1));
      if (drift) term += delta * drift_at(left);
      // weight S(t_i - s_{j-1}) = S((refine - j + 1)·delta)
      acc += trivial_flow ? term : Vector(weights[refine - j] * term);
    }
    y = std::move(acc);
    traj.states.col(i) = y;
  }
  return traj;
}

inline Trajectory simulate_mild_path(const Semigroup& s, const VolPath& vol, const SpectralQ& q,
                                     const DriftPath* drift, const Vector& h0, double delta_n,
                                     double t_max, int refine, std::uint64_t seed) {
  const Index n_obs = observation_count(t_max, delta_n);
  const double delta = delta_n / refine;
  const WienerIncrements w = sample_wiener_increments(q, delta, n_obs * refine, seed);
  Trajectory traj = simulate_mild_path_with(s, vol, drift, h0, delta_n, t_max, refine, w.draws);
  traj.seed = seed;
  return traj;
}

// Keep every `factor`-th observation; matched-noise studies read one finest
// trajectory at several frequencies.
inline Trajectory subsample(const Trajectory& traj, Index factor) {
  require(factor >= 1, "subsample: factor must be >= 1");
  const Index n = traj.obs_times.size() - 1;
  require(n % factor == 0, "subsample: factor must divide the observation count");
  Trajectory out;
  const Index m = n / factor;
  out.obs_times.resize(m + 1);
  out.states.resize(traj.states.rows(), m + 1);
  for (Index i = 0; i <= m; ++i) {
    out.obs_times(i) = traj.obs_times(i * factor);
    out.states.col(i) = traj.states.col(i * factor);
  }
  out.delta_n = traj.delta_n * factor;
  out.refine = traj.refine;
  out.seed = traj.seed;
  return out;
}

// No-arbitrage drift alpha_t = sum_j sigma_t^j Sigma_t^j with
// sigma_t^j = sqrt(lambda_j) sigma_t(e_j) and Sigma_t^j the running integral
// of sigma^j (left-point quadrature on the vol grid). The volatility must map
// into curves vanishing at the grid end.
inline std::vector<GridFunction> hjm_drift(const VolPath& vol, const SpectralQ& q,
                                           const FilipovicFrame& frame, Index up_to) {
  require(vol.node_count() >= 1, "hjm_drift: empty vol path");
  require(up_to >= 0 && up_to < vol.node_count(), "hjm_drift: index out of range");
  const Index nodes = frame.map.dim();
  require(q.dim() == nodes, "hjm_drift: Q dimension mismatch");

  const Index modes = q.rank();
  // sigma^j at each needed node, as grid functions (computed once when the
  // volatility is constant in time).
  std::vector<std::vector<Vector>> sig(modes);
  for (Index j = 0; j < modes; ++j) {
    const Index distinct = vol.constant ? 1 : up_to + 1;
    sig[j].resize(distinct);
    const double root = std::sqrt(q.eigenvalues()(j));
    const Vector basis = q.eigenvectors().col(j);
    for (Index k = 0; k < distinct; ++k) {
      const Vector ortho = root * (vol.op_at(k) * basis);
      Vector g = frame.map.from_ortho(ortho).values;
      const double scale = g.cwiseAbs().maxCoeff();
      require(std::abs(g(nodes - 1)) <= 1e-6 * (1.0 + scale),
              "hjm_drift: volatility does not vanish at the grid end");
      sig[j][k] = std::move(g);
    }
  }
  const auto sig_at = [&](Index j, Index k) -> const Vector& {
    return sig[static_cast<size_t>(j)][vol.constant ? 0 : static_cast<size_t>(k)];
  };

  std::vector<GridFunction> alpha(up_to + 1);
  std::vector<Vector> running(modes, Vector::Zero(nodes));
  for (Index k = 0; k <= up_to; ++k) {
    if (k > 0) {
      const double dt = vol.times(k) - vol.times(k - 1);
      for (Index j = 0; j < modes; ++j) running[static_cast<size_t>(j)] += dt * sig_at(j, k - 1);
    }
    Vector a = Vector::Zero(nodes);
    for (Index j = 0; j < modes; ++j) {
      a += sig_at(j, k).cwiseProduct(running[static_cast<size_t>(j)]);
    }
    alpha[static_cast<size_t>(k)] = GridFunction{std::move(a)};
  }
  return alpha;
}

// Same drift in orthonormal coordinates, ready for the simulator.
inline DriftPath hjm_drift_path(const VolPath& vol, const SpectralQ& q,
                                const FilipovicFrame& frame, Index up_to) {
  const std::vector<GridFunction> alpha = hjm_drift(vol, q, frame, up_to);
  DriftPath out;
  out.times = vol.times.head(up_to + 1);
  out.values.resize(frame.map.dim(), up_to + 1);
  for (Index k = 0; k <= up_to; ++k) out.values.col(k) = frame.map.to_ortho(alpha[k]);
  return out;
}

}  // namespace sarcv
