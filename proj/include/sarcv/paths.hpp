#pragma once

// Time-indexed data carriers shared across the simulation and estimation
// layers. All states and operators are stored in orthonormal coordinates.

#include <vector>

#include "sarcv/common.hpp"

namespace sarcv {

// Volatility operators sigma_{t_j} on a fine simulation grid. A constant path
// stores the operator once; op_at hides the difference.
struct VolPath {
  Vector times;
  std::vector<Matrix> ops;
  bool constant = false;

  Index node_count() const { return times.size(); }
  const Matrix& op_at(Index i) const { return constant ? ops[0] : ops[static_cast<size_t>(i)]; }

  static VolPath constant_path(Vector times, Matrix op) {
    VolPath p;
    p.times = std::move(times);
    p.ops.push_back(std::move(op));
    p.constant = true;
    return p;
  }
};

// Drift values alpha_{t_j} on the same kind of grid, one column per node.
struct DriftPath {
  Vector times;
  Matrix values;  // dim x nodes
};

// States Y_{t_i} at observation times t_i = i·delta_n.
struct Trajectory {
  Vector obs_times;
  Matrix states;  // dim x (n+1)
  double delta_n = 0.0;
  int refine = 1;
  std::uint64_t seed = 0;
};

// One operator per time; SARCV partial sums and quadratic covariation paths.
struct OperatorPath {
  Vector times;
  std::vector<Matrix> ops;
};

// Index of time t on the grid of spacing `spacing`, requiring alignment.
inline Index aligned_index(double t, double spacing, const char* what) {
  const double raw = t / spacing;
  const double rounded = std::round(raw);
  require(std::abs(raw - rounded) <= 1e-9 * (1.0 + std::abs(raw)), std::string(what) + ": grid mismatch");
  return static_cast<Index>(rounded);
}

}  // namespace sarcv
