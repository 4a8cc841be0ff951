#pragma once

// Driving noise: Q-Wiener increments by Karhunen-Loeve synthesis, and a
// square-integrable Levy subordinator on the PSD cone (compound Poisson with
// rank-one exponential jumps, simulable exactly).

#include <vector>

#include "sarcv/common.hpp"
#include "sarcv/operators.hpp"
#include "sarcv/rng.hpp"

namespace sarcv {

// Covariance operator of the driving noise as eigenpairs; trace class by
// finiteness of the representation.
class SpectralQ {
 public:
  SpectralQ(Vector eigenvalues, Matrix eigenvectors)
      : eigenvalues_(std::move(eigenvalues)), eigenvectors_(std::move(eigenvectors)) {
    require(eigenvalues_.size() >= 1, "SpectralQ: need at least one eigenvalue");
    require(eigenvectors_.cols() == eigenvalues_.size() &&
                eigenvectors_.rows() >= eigenvectors_.cols(),
            "SpectralQ: eigenvector shape mismatch");
    require_finite(eigenvalues_, "SpectralQ");
    require_finite(eigenvectors_, "SpectralQ");
    for (Index k = 0; k < eigenvalues_.size(); ++k) {
      require(eigenvalues_(k) > 0.0, "SpectralQ: eigenvalues must be strictly positive");
      if (k > 0) {
        require(eigenvalues_(k) <= eigenvalues_(k - 1),
                "SpectralQ: eigenvalues must be sorted decreasing");
      }
    }
    const Matrix gram = eigenvectors_.transpose() * eigenvectors_;
    require((gram - Matrix::Identity(rank(), rank())).norm() <= 1e-10 * std::sqrt(double(rank())),
            "SpectralQ: eigenvector columns must be orthonormal");
  }

  // lambda_k = first * ratio^k on the coordinate basis.
  static SpectralQ geometric(Index dim, double ratio, double first = 0.5, Index rank = -1) {
    require(dim >= 1 && ratio > 0.0 && ratio < 1.0 && first > 0.0, "SpectralQ::geometric");
    if (rank < 0) rank = dim;
    require(rank >= 1 && rank <= dim, "SpectralQ::geometric: rank out of range");
    Vector ev(rank);
    double v = first;
    for (Index k = 0; k < rank; ++k, v *= ratio) ev(k) = v;
    return SpectralQ(std::move(ev), Matrix::Identity(dim, rank));
  }

  // All eigenvalues 1 (identity on the truncation); used when the volatility
  // operator already absorbs Q^{1/2}.
  static SpectralQ unit(Index dim) {
    require(dim >= 1, "SpectralQ::unit");
    return SpectralQ(Vector::Ones(dim), Matrix::Identity(dim, dim));
  }

  static SpectralQ from_list(Vector eigenvalues, Index dim = -1) {
    const Index k = eigenvalues.size();
    if (dim < 0) dim = k;
    return SpectralQ(std::move(eigenvalues), Matrix::Identity(dim, k));
  }

  const Vector& eigenvalues() const { return eigenvalues_; }
  const Matrix& eigenvectors() const { return eigenvectors_; }
  Index dim() const { return eigenvectors_.rows(); }
  Index rank() const { return eigenvalues_.size(); }

  double trace() const { return eigenvalues_.sum(); }
  double trace2() const { return eigenvalues_.squaredNorm(); }

  // Q as a dim x dim symmetric PSD matrix.
  Matrix matrix() const {
    return eigenvectors_ * eigenvalues_.asDiagonal() * eigenvectors_.transpose();
  }
  // Q^{1/2}, dim x dim.
  Matrix sqrt_matrix() const {
    return eigenvectors_ * eigenvalues_.cwiseSqrt().asDiagonal() * eigenvectors_.transpose();
  }
  // KL synthesis map V diag(sqrt(lambda)), dim x rank: applied to iid N(0,1).
  Matrix kl_map() const {
    return eigenvectors_ * eigenvalues_.cwiseSqrt().asDiagonal();
  }

 private:
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

struct WienerIncrements {
  double step = 0.0;
  Matrix draws;  // dim x steps, column i is the increment over ((i-1)Δ, iΔ]
};

// ΔW_i = Σ_k sqrt(lambda_k Δ) xi_{ik} e_k, deterministic given the seed.
inline WienerIncrements sample_wiener_increments(const SpectralQ& q, double delta,
                                                 Index steps, std::uint64_t seed) {
  require(delta > 0.0, "sample_wiener_increments: step must be positive");
  require(steps >= 1, "sample_wiener_increments: need at least one step");
  RandomStream rng(seed);
  const Matrix map = std::sqrt(delta) * q.kl_map();
  Matrix draws(q.dim(), steps);
  for (Index i = 0; i < steps; ++i) {
    draws.col(i) = map * rng.normal_vector(q.rank());
  }
  return WienerIncrements{delta, std::move(draws)};
}

// E ‖ΔW‖^4 = Δ² (Tr(Q)² + 2 Tr_2(Q)).
inline double fourth_moment_theoretical(const SpectralQ& q, double delta) {
  require(delta > 0.0, "fourth_moment_theoretical: step must be positive");
  const double tr = q.trace();
  return delta * delta * (tr * tr + 2.0 * q.trace2());
}

// Jump times and rank-one PSD jumps of the compound Poisson subordinator on
// [0, t_max]: N ~ Poisson(rate·t_max), jump = gamma·v vᵀ with gamma exponential
// of mean jump_scale and v uniform on the unit sphere.
struct OperatorJumps {
  std::vector<double> times;
  std::vector<Matrix> jumps;
};

inline OperatorJumps sample_psd_jumps(double rate, double jump_scale, Index dim,
                                      double t_max, std::uint64_t seed) {
  require(rate >= 0.0, "sample_psd_jumps: negative rate");
  require(jump_scale > 0.0, "sample_psd_jumps: jump scale must be positive");
  require(dim >= 1 && t_max >= 0.0, "sample_psd_jumps: bad parameters");
  RandomStream rng(seed);
  OperatorJumps out;
  if (rate == 0.0 || t_max == 0.0) return out;
  const int n = rng.poisson(rate * t_max);
  std::vector<std::pair<double, Index>> order(n);
  out.jumps.resize(n);
  for (int j = 0; j < n; ++j) {
    order[j] = {t_max * rng.uniform(), j};
    const double gamma = rng.exponential(jump_scale);
    const Vector v = rng.unit_sphere(dim);
    out.jumps[j] = gamma * (v * v.transpose());
  }
  std::sort(order.begin(), order.end());
  std::vector<Matrix> sorted(n);
  out.times.resize(n);
  for (int j = 0; j < n; ++j) {
    out.times[j] = order[j].first;
    sorted[j] = std::move(out.jumps[order[j].second]);
  }
  out.jumps = std::move(sorted);
  return out;
}

struct SubordinatorIncrements {
  double step = 0.0;
  std::vector<SymPsdOperator> draws;  // one accumulated jump sum per step
};

inline SubordinatorIncrements sample_subordinator_increments(double rate, double jump_scale,
                                                             Index dim, double delta,
                                                             Index steps, std::uint64_t seed) {
  require(rate >= 0.0, "sample_subordinator_increments: negative rate");
  require(jump_scale > 0.0, "sample_subordinator_increments: jump scale must be positive");
  require(dim >= 1 && delta > 0.0 && steps >= 1, "sample_subordinator_increments: bad parameters");
  RandomStream rng(seed);
  SubordinatorIncrements out;
  out.step = delta;
  out.draws.reserve(steps);
  for (Index i = 0; i < steps; ++i) {
    Matrix acc = Matrix::Zero(dim, dim);
    const int n = rng.poisson(rate * delta);
    for (int j = 0; j < n; ++j) {
      const double gamma = rng.exponential(jump_scale);
      const Vector v = rng.unit_sphere(dim);
      acc += gamma * (v * v.transpose());
    }
    out.draws.emplace_back(std::move(acc));
  }
  return out;
}

// Trace of the covariance operator of the subordinator's martingale part:
// rate · E[gamma²] · ‖v vᵀ‖²_HS = 2 · rate · jump_scale².
inline double subordinator_trace_q(double rate, double jump_scale) {
  return 2.0 * rate * jump_scale * jump_scale;
}

}  // namespace sarcv
