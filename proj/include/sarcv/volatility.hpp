#pragma once

// Stochastic volatility models:
//   - ConstantVol: a fixed operator,
//   - BnsOuVol: operator-valued Ornstein-Uhlenbeck dynamics driven by a
//     compound-Poisson subordinator on the PSD cone, sampled exactly at jump
//     times; sigma_t = Sigma_t^{1/2},
//   - RoughExpVol: multiplication by exp(Y_t) on the forward-curve grid, Y a
//     sum of fractional-Brownian modes simulated exactly via Cholesky.
// Plus the kernel representation of a forward-curve volatility operator
// sigma Q^{1/2} h = c h(0) + h(0) f(x) + ∫ q(x,z) h'(z) dz with
// q(x,z) = ∫_0^x p(y,z) e^{beta z / 2 - y} dy.

#include <optional>
#include <variant>
#include <vector>

#include "sarcv/common.hpp"
#include "sarcv/noise.hpp"
#include "sarcv/operators.hpp"
#include "sarcv/paths.hpp"
#include "sarcv/rng.hpp"
#include "sarcv/spaces.hpp"

namespace sarcv {

struct ConstantVol {
  Matrix sigma;
};

struct BnsOuVol {
  double kappa = 0.0;                    // drift -kappa·I on vectorised operators
  std::optional<Matrix> general_drift;   // dim² x dim², overrides kappa when set
  Matrix sigma0;                         // symmetric PSD initial value
  double rate = 0.0;                     // subordinator jump intensity
  double jump_scale = 1.0;               // mean jump size (trace units)
};

struct RoughExpVol {
  double alpha = 0.5;   // Holder exponent of the driver, in (0,1)
  Vector amplitudes;    // one per mode
  FilipovicFrame frame;
};

using VolModel = std::variant<ConstantVol, BnsOuVol, RoughExpVol>;

inline double bns_drift_norm(const BnsOuVol& m) {
  return m.general_drift ? op_norm(*m.general_drift) : m.kappa;
}

// fBm covariance 0.5 (t^{2H} + s^{2H} - |t-s|^{2H}) on the given times.
inline Matrix fbm_covariance(const Vector& times, double hurst) {
  require(hurst > 0.0 && hurst < 1.0, "fbm_covariance: Hurst exponent in (0,1) required");
  const Index n = times.size();
  Matrix c(n, n);
  const double h2 = 2.0 * hurst;
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j <= i; ++j) {
      const double v = 0.5 * (std::pow(times(i), h2) + std::pow(times(j), h2) -
                              std::pow(std::abs(times(i) - times(j)), h2));
      c(i, j) = v;
      c(j, i) = v;
    }
  }
  return c;
}

// One exact fBm path per mode on the (strictly positive part of the) grid.
// Dense Cholesky: intended for desk-scale grids (≲ 2048 nodes).
inline Matrix sample_fbm_modes(const Vector& times, double hurst, Index modes,
                               std::uint64_t seed) {
  require(modes >= 1, "sample_fbm_modes: need at least one mode");
  require(times.size() >= 1, "sample_fbm_modes: empty grid");
  require(times.size() <= 4096, "sample_fbm_modes: grid too large for dense Cholesky");
  Index first_positive = 0;
  while (first_positive < times.size() && times(first_positive) <= 0.0) ++first_positive;
  const Index n = times.size() - first_positive;
  Matrix paths = Matrix::Zero(times.size(), modes);
  if (n == 0) return paths;
  const Matrix cov = fbm_covariance(times.segment(first_positive, n), hurst);
  Eigen::LLT<Matrix> llt(cov + 1e-14 * Matrix::Identity(n, n));
  require_numeric(llt.info() == Eigen::Success, "sample_fbm_modes: covariance Cholesky failed");
  const Matrix l = llt.matrixL();
  RandomStream rng(seed);
  for (Index k = 0; k < modes; ++k) {
    paths.col(k).segment(first_positive, n) = l * rng.normal_vector(n);
  }
  return paths;
}

// Exact OU path on the PSD cone from given jumps:
//   Sigma_t = S(t) Sigma_0 + sum_{u_j <= t} S(t-u_j) J_j,  S(t) = exp(tB);
// the compound-Poisson driver makes the stochastic convolution a finite sum.
// A drift that pushes a sample off the PSD cone (beyond the clamp tolerance)
// is reported as a numeric_error, not clamped.
inline std::vector<SymPsdOperator> bns_path_from_jumps(const BnsOuVol& model,
                                                       const OperatorJumps& jumps,
                                                       const Vector& times) {
  require(times.size() >= 1, "bns_exact_path: empty time grid");
  const Index d = model.sigma0.rows();
  require(model.sigma0.cols() == d, "bns_exact_path: Sigma0 must be square");
  SymPsdOperator sigma0(model.sigma0);  // validates PSD
  if (model.general_drift) {
    require(model.general_drift->rows() == d * d && model.general_drift->cols() == d * d,
            "bns_exact_path: drift must act on vectorised operators (dim² x dim²)");
  } else {
    require(model.kappa >= 0.0, "bns_exact_path: kappa must be nonnegative");
  }
  require(times(0) >= 0.0, "bns_exact_path: times must be nonnegative");

  const auto decay = [&](double dt, const Matrix& x) -> Matrix {
    if (!model.general_drift) return std::exp(-model.kappa * dt) * x;
    const Matrix e = matrix_exp(*model.general_drift, dt);
    const Matrix y = e * x.reshaped(d * d, 1);
    return y.reshaped(d, d);
  };

  std::vector<SymPsdOperator> path;
  path.reserve(times.size());
  for (Index i = 0; i < times.size(); ++i) {
    const double t = times(i);
    Matrix acc = decay(t, sigma0.matrix());
    for (size_t j = 0; j < jumps.times.size() && jumps.times[j] <= t; ++j) {
      acc += decay(t - jumps.times[j], jumps.jumps[j]);
    }
    acc = 0.5 * (acc + acc.transpose());
    try {
      path.emplace_back(std::move(acc));
    } catch (const numeric_error&) {
      throw numeric_error("bns_exact_path: drift maps a PSD sample outside the cone at t=" +
                          std::to_string(t));
    }
  }
  return path;
}

inline std::vector<SymPsdOperator> bns_exact_path(const BnsOuVol& model, const Vector& times,
                                                  std::uint64_t seed) {
  require(times.size() >= 1, "bns_exact_path: empty time grid");
  const double t_end = times(times.size() - 1);
  require(t_end >= 0.0, "bns_exact_path: times must be nonnegative");
  const OperatorJumps jumps =
      sample_psd_jumps(model.rate, model.jump_scale, model.sigma0.rows(), t_end, seed);
  return bns_path_from_jumps(model, jumps, times);
}

// sigma_t per node: constant, Sigma_t^{1/2}, or multiplication by exp(Y_t).
inline VolPath simulate_vol_path(const VolModel& model, const Vector& times,
                                 std::uint64_t seed) {
  require(times.size() >= 1, "simulate_vol_path: empty grid");
  for (Index i = 0; i + 1 < times.size(); ++i) {
    require(times(i) < times(i + 1), "simulate_vol_path: times must be strictly increasing");
  }
  return std::visit(
      [&](const auto& m) -> VolPath {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, ConstantVol>) {
          require_finite(m.sigma, "simulate_vol_path");
          return VolPath::constant_path(times, m.sigma);
        } else if constexpr (std::is_same_v<T, BnsOuVol>) {
          VolPath p;
          p.times = times;
          const std::vector<SymPsdOperator> sigmas = bns_exact_path(m, times, seed);
          p.ops.reserve(sigmas.size());
          for (const SymPsdOperator& s : sigmas) p.ops.push_back(psd_sqrt(s).matrix());
          return p;
        } else {
          require(m.alpha > 0.0 && m.alpha < 1.0, "simulate_vol_path: alpha in (0,1) required");
          const Index modes = m.amplitudes.size();
          require(modes >= 1, "simulate_vol_path: rough model needs at least one mode");
          const Index nodes = m.frame.map.dim();
          // Driver Y_t = sum_k a_k B^alpha_k(t) phi_k with phi_k the first
          // orthonormal modes of the discretised space.
          const Matrix w = sample_fbm_modes(times, m.alpha, modes, seed);
          Matrix phis(nodes, modes);
          for (Index k = 0; k < modes; ++k) {
            phis.col(k) = m.frame.map.from_ortho(Vector::Unit(nodes, k)).values;
          }
          VolPath p;
          p.times = times;
          p.ops.reserve(times.size());
          for (Index i = 0; i < times.size(); ++i) {
            const Vector y = phis * (m.amplitudes.cwiseProduct(w.row(i).transpose()));
            const Matrix mult = y.array().exp().matrix().asDiagonal();
            p.ops.push_back(m.frame.map.op_to_ortho(mult));
          }
          return p;
        }
      },
      model);
}

// Kernel volatility operator in orthonormal coordinates. f is a grid function
// with f(0)=0; p holds nodal kernel samples p(x_i, z_j); g of the underlying
// representation is fixed to 0. q is built from p by cumulative midpoint
// quadrature in y, the z-integral of q(x,z) h'(z) by midpoint quadrature.
inline Matrix build_filipovic_volatility(const FilipovicFrame& frame, const GridFunction& f,
                                         const Matrix& p, double c) {
  const FilipovicSpace& space = frame.space;
  const Index nodes = space.node_count();
  const Index cells = space.cell_count();
  require(f.values.size() == nodes, "build_filipovic_volatility: f grid mismatch");
  require(p.rows() == nodes && p.cols() == nodes, "build_filipovic_volatility: p must be nodal (grid x grid)");
  require(std::abs(f.values(0)) <= 1e-12, "build_filipovic_volatility: f(0) != 0");
  require_finite(p, "build_filipovic_volatility");

  // q(x_i, zbar_l) by cumulative quadrature in y over the cells below x_i.
  Matrix q = Matrix::Zero(nodes, cells);
  for (Index l = 0; l < cells; ++l) {
    const double zbar = 0.5 * (space.nodes()(l) + space.nodes()(l + 1));
    const double zfac = std::exp(0.5 * space.beta() * zbar);
    double acc = 0.0;
    for (Index i = 1; i < nodes; ++i) {
      const double ybar = 0.5 * (space.nodes()(i - 1) + space.nodes()(i));
      const double pmid = 0.25 * (p(i - 1, l) + p(i, l) + p(i - 1, l + 1) + p(i, l + 1));
      acc += pmid * zfac * std::exp(-ybar) * space.cell_widths()(i - 1);
      q(i, l) = acc;
    }
  }

  Matrix nodal = Matrix::Zero(nodes, nodes);
  nodal.col(0) = c * Vector::Ones(nodes) + f.values;                       // (c·1 + f)·h(0)
  nodal += q * space.cell_widths().asDiagonal() * space.derivative_matrix();  // ∫ q h'
  return frame.map.op_to_ortho(nodal);
}

// Mean-square Lipschitz constant of the OU path (statement form), with the
// ambient trace passed explicitly.
inline double bns_ltilde(const BnsOuVol& model, double t_max, double trace_q) {
  const double nb = bns_drift_norm(model);
  const double u = nb * std::exp(nb * t_max);
  const double trl = std::sqrt(subordinator_trace_q(model.rate, model.jump_scale));
  const double s0 = model.sigma0.norm();
  return std::sqrt(3.0) * (u * s0 + std::exp(nb * t_max) * trl * (1.0 + u)) * trace_q;
}

// Fourth-moment surrogate C2(T) = e^{‖B‖T} (‖Sigma0‖_HS + Tr(Q_L)^{1/2} T^{1/2}).
inline double bns_c2(const BnsOuVol& model, double t_max) {
  const double nb = bns_drift_norm(model);
  const double trl = std::sqrt(subordinator_trace_q(model.rate, model.jump_scale));
  return std::exp(nb * t_max) * (model.sigma0.norm() + trl * std::sqrt(t_max));
}

}  // namespace sarcv
