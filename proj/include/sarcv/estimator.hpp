#pragma once

// The covariation estimator and its target:
//   - adjusted increments Y_{t_i} - S(delta_n) Y_{t_{i-1}},
//   - their running sum of tensor squares (the estimator path),
//   - the integrated covariance ∫ sigma_s Q sigma_s^* ds by left-point
//     quadrature on the fine grid,
//   - the sup-over-time Hilbert-Schmidt error between the two.

#include <vector>

#include "sarcv/common.hpp"
#include "sarcv/noise.hpp"
#include "sarcv/operators.hpp"
#include "sarcv/paths.hpp"
#include "sarcv/semigroup.hpp"

namespace sarcv {

inline void require_obs_grid(const Trajectory& traj, double delta_n) {
  require(traj.obs_times.size() >= 2, "trajectory has no increments");
  require(nearly_equal(traj.delta_n, delta_n, 1e-12), "trajectory not on the delta_n grid");
}

inline std::vector<Vector> adjusted_increments(const Trajectory& traj, const Semigroup& s,
                                               double delta_n) {
  require_obs_grid(traj, delta_n);
  require(traj.states.rows() == state_dim(s), "adjusted_increments: dimension mismatch");
  const Index n = traj.obs_times.size() - 1;
  std::vector<Vector> incs;
  incs.reserve(n);
  if (is_identity(s)) {
    for (Index i = 1; i <= n; ++i) {
      incs.emplace_back(traj.states.col(i) - traj.states.col(i - 1));
    }
    return incs;
  }
  const Matrix flow = semigroup_matrix(s, delta_n);
  for (Index i = 1; i <= n; ++i) {
    incs.emplace_back(traj.states.col(i) - flow * traj.states.col(i - 1));
  }
  return incs;
}

// Running sum of tensor squares of the adjusted increments, one operator per
// observation time (zero at t_0).
inline OperatorPath sarcv_path(const Trajectory& traj, const Semigroup& s, double delta_n) {
  const std::vector<Vector> incs = adjusted_increments(traj, s, delta_n);
  const Index d = traj.states.rows();
  OperatorPath path;
  path.times = traj.obs_times;
  path.ops.reserve(incs.size() + 1);
  Matrix acc = Matrix::Zero(d, d);
  path.ops.push_back(acc);
  for (const Vector& inc : incs) {
    acc += tensor_square(inc);
    path.ops.push_back(acc);
  }
  return path;
}

// ∫_0^{t} sigma_s Q sigma_s^* ds accumulated on the vol path's grid and
// snapshotted at the requested observation times (which must lie on it).
inline OperatorPath true_qv(const VolPath& vol, const SpectralQ& q, const Vector& obs_times) {
  require(vol.node_count() >= 2, "true_qv: empty path");
  require(obs_times.size() >= 1, "true_qv: no observation times");
  const double spacing = vol.times(1) - vol.times(0);
  const Matrix kl = q.kl_map();
  const Index d = vol.op_at(0).rows();

  OperatorPath path;
  path.times = obs_times;
  path.ops.reserve(obs_times.size());
  if (vol.constant) {
    const Matrix w = vol.op_at(0) * kl;
    const Matrix integrand = w * w.transpose();
    for (Index i = 0; i < obs_times.size(); ++i) {
      require(obs_times(i) <= vol.times(vol.node_count() - 1) * (1.0 + 1e-12),
              "true_qv: observation time beyond vol path");
      path.ops.push_back(obs_times(i) * integrand);
    }
    return path;
  }
  Matrix acc = Matrix::Zero(d, d);
  Index fine = 0;  // number of cells already accumulated
  Matrix w;
  for (Index i = 0; i < obs_times.size(); ++i) {
    const Index upto = aligned_index(obs_times(i) - vol.times(0), spacing, "true_qv");
    require(upto < vol.node_count(), "true_qv: observation time beyond vol path");
    for (; fine < upto; ++fine) {
      w = vol.op_at(fine) * kl;  // sigma Q sigma^* = (sigma Q^{1/2})(sigma Q^{1/2})^*
      acc += spacing * (w * w.transpose());
    }
    path.ops.push_back(acc);
  }
  return path;
}

inline double sup_hs_error(const OperatorPath& est, const OperatorPath& target) {
  require(est.times.size() == target.times.size(), "sup_hs_error: grid mismatch");
  for (Index i = 0; i < est.times.size(); ++i) {
    require(nearly_equal(est.times(i), target.times(i), 1e-9), "sup_hs_error: grid mismatch");
  }
  double sup = 0.0;
  for (size_t i = 0; i < est.ops.size(); ++i) {
    sup = std::max(sup, (est.ops[i] - target.ops[i]).norm());
  }
  return sup;
}

// sup error of the estimator against a target path sampled every `stride`
// entries (matched-noise studies share one finest-grid target).
inline double sup_hs_error_strided(const OperatorPath& est, const OperatorPath& target,
                                   Index stride) {
  require(stride >= 1, "sup_hs_error_strided: bad stride");
  require((target.times.size() - 1) == (est.times.size() - 1) * stride,
          "sup_hs_error_strided: grid mismatch");
  double sup = 0.0;
  for (Index i = 0; i < est.times.size(); ++i) {
    require(nearly_equal(est.times(i), target.times(i * stride), 1e-9),
            "sup_hs_error_strided: grid mismatch");
    sup = std::max(sup, (est.ops[static_cast<size_t>(i)] -
                         target.ops[static_cast<size_t>(i * stride)]).norm());
  }
  return sup;
}

}  // namespace sarcv
