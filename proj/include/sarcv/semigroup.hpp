#pragma once

// C0-semigroup backends and the numerical rate sequence of the estimator:
//   - Identity: S(t) = I (martingale case),
//   - MatrixExp: S(t) = exp(tA) for a bounded generator (uniformly continuous),
//   - ShiftFilipovic: S(t)h(x) = h(x+t) on the discretised forward-curve space,
//     with linear interpolation between nodes and constant extension past the
//     last node.

#include <span>
#include <variant>

#include "sarcv/common.hpp"
#include "sarcv/noise.hpp"
#include "sarcv/operators.hpp"
#include "sarcv/paths.hpp"
#include "sarcv/spaces.hpp"

namespace sarcv {

struct IdentitySemigroup {
  Index dim;
};

struct MatrixExpSemigroup {
  Matrix generator;
};

struct ShiftSemigroup {
  FilipovicFrame frame;
};

using Semigroup = std::variant<IdentitySemigroup, MatrixExpSemigroup, ShiftSemigroup>;

inline Semigroup make_identity_semigroup(Index dim) {
  require(dim >= 1, "identity semigroup: dim must be positive");
  return IdentitySemigroup{dim};
}

inline Semigroup make_matrix_exp_semigroup(Matrix generator) {
  require(generator.rows() == generator.cols() && generator.rows() >= 1,
          "matrix-exp semigroup: square generator required");
  require_finite(generator, "matrix-exp semigroup");
  return MatrixExpSemigroup{std::move(generator)};
}

inline Semigroup make_shift_semigroup(FilipovicFrame frame) {
  return ShiftSemigroup{std::move(frame)};
}

inline Index state_dim(const Semigroup& s) {
  return std::visit(
      [](const auto& v) -> Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentitySemigroup>) return v.dim;
        if constexpr (std::is_same_v<T, MatrixExpSemigroup>) return v.generator.rows();
        if constexpr (std::is_same_v<T, ShiftSemigroup>) return v.frame.map.dim();
      },
      s);
}

inline bool is_identity(const Semigroup& s) {
  return std::holds_alternative<IdentitySemigroup>(s);
}

// Nodal matrix of h ↦ h(· + t): linear interpolation, constant extension.
inline Matrix shift_nodal_matrix(const FilipovicSpace& space, double t) {
  const Index n = space.node_count();
  Matrix m = Matrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    const double y = space.nodes()(i) + t;
    if (y >= space.x_max()) {
      m(i, n - 1) = 1.0;
      continue;
    }
    Index cell = 0;
    while (space.nodes()(cell + 1) < y) ++cell;
    const double theta = (y - space.nodes()(cell)) / space.cell_widths()(cell);
    m(i, cell) = 1.0 - theta;
    m(i, cell + 1) += theta;
  }
  return m;
}

// Matrix of S(t) in orthonormal coordinates.
inline Matrix semigroup_matrix(const Semigroup& s, double t) {
  require(t >= 0.0, "semigroup: negative time");
  return std::visit(
      [&](const auto& v) -> Matrix {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, IdentitySemigroup>) {
          return Matrix::Identity(v.dim, v.dim);
        } else if constexpr (std::is_same_v<T, MatrixExpSemigroup>) {
          return matrix_exp(v.generator, t);
        } else {
          if (t == 0.0) return Matrix::Identity(v.frame.map.dim(), v.frame.map.dim());
          return v.frame.map.op_to_ortho(shift_nodal_matrix(v.frame.space, t));
        }
      },
      s);
}

inline Vector apply(const Semigroup& s, double t, const Vector& v) {
  require(t >= 0.0, "apply: negative time");
  require(v.size() == state_dim(s), "apply: dimension mismatch");
  if (is_identity(s) || t == 0.0) return v;
  return semigroup_matrix(s, t) * v;
}

inline Matrix apply_to_operator(const Semigroup& s, double t, const Eigen::Ref<const Matrix>& k) {
  require(t >= 0.0, "apply_to_operator: negative time");
  require(k.rows() == state_dim(s), "apply_to_operator: shape mismatch");
  if (is_identity(s) || t == 0.0) return k;
  return semigroup_matrix(s, t) * k;
}

// M(t) = sup_{x in [0,t]} ‖S(x)‖_op, evaluated on an equispaced subgrid.
inline double growth_bound(const Semigroup& s, double t, Index points = 64) {
  require(t >= 0.0 && points >= 2, "growth_bound: bad parameters");
  if (is_identity(s)) return 1.0;
  double m = 0.0;
  for (Index i = 0; i < points; ++i) {
    const double x = t * double(i) / double(points - 1);
    m = std::max(m, op_norm(semigroup_matrix(s, x)));
  }
  return m;
}

// sup over the given x-points of ‖(I - S(x))·B_r‖²_op, averaged over the
// replications at each time node, then sup over nodes. B_r = sigma_r Q^{1/2}.
inline double bn_over_points(const Semigroup& s, std::span<const VolPath> replications,
                             const SpectralQ& q, std::span<const double> xs, double t_max) {
  require(!replications.empty(), "estimate_bn: empty vol path");
  const Index nodes = replications.front().node_count();
  require(nodes >= 1, "estimate_bn: empty vol path");
  bool all_constant = true;
  for (const VolPath& p : replications) {
    require(p.node_count() == nodes, "estimate_bn: replication grids differ");
    all_constant = all_constant && p.constant;
  }
  if (is_identity(s)) return 0.0;

  const Matrix qhalf = q.sqrt_matrix();
  std::vector<Matrix> defects;  // I - S(x)
  defects.reserve(xs.size());
  const Index d = state_dim(s);
  for (double x : xs) defects.push_back(Matrix::Identity(d, d) - semigroup_matrix(s, x));

  double outer = 0.0;
  for (Index r = 0; r < nodes; ++r) {
    if (replications.front().times(r) > t_max * (1.0 + 1e-12)) break;
    double mean = 0.0;
    for (const VolPath& p : replications) {
      const Matrix b = p.op_at(r) * qhalf;
      double inner = 0.0;
      for (const Matrix& dx : defects) {
        inner = std::max(inner, op_norm(dx * b));
      }
      mean += inner * inner;
    }
    mean /= double(replications.size());
    outer = std::max(outer, mean);
    if (all_constant) break;  // every node is the same operator
  }
  return outer;
}

inline std::vector<double> equispaced(double lo, double hi, Index count) {
  std::vector<double> xs(count);
  for (Index i = 0; i < count; ++i) xs[i] = lo + (hi - lo) * double(i) / double(count - 1);
  return xs;
}

// Estimated rate sequence: sup over the vol path's time nodes of the mean
// (over replications) of sup_{x in [0, delta_n]} ‖(I-S(x)) sigma_r Q^{1/2}‖²_op.
inline double estimate_bn(const Semigroup& s, std::span<const VolPath> replications,
                          const SpectralQ& q, double delta_n, double t_max, Index subgrid) {
  require(delta_n > 0.0 && delta_n <= t_max, "estimate_bn: need 0 < delta_n <= T");
  require(subgrid >= 2, "estimate_bn: subgrid must have at least 2 points");
  const std::vector<double> xs = equispaced(0.0, delta_n, subgrid);
  return bn_over_points(s, replications, q, xs, t_max);
}

inline double estimate_bn(const Semigroup& s, const VolPath& vol, const SpectralQ& q,
                          double delta_n, double t_max, Index subgrid) {
  return estimate_bn(s, std::span<const VolPath>(&vol, 1), q, delta_n, t_max, subgrid);
}

// Closed-form bound for uniformly continuous semigroups:
// delta_n ‖A‖ e^{‖A‖ delta_n} sqrt(C2) Tr(Q).
inline double bn_bound_uniform(const Eigen::Ref<const Matrix>& a, double delta_n, double c2,
                               double trace_q) {
  require(a.rows() == a.cols(), "bn_bound_uniform: square generator required");
  require(delta_n >= 0.0 && c2 >= 0.0 && trace_q >= 0.0, "bn_bound_uniform: bad parameters");
  const double na = op_norm(a);
  return delta_n * na * std::exp(na * delta_n) * std::sqrt(c2) * trace_q;
}

}  // namespace sarcv
