#pragma once

// Finite-rank realisation of the trace-class / Hilbert-Schmidt operator
// algebra. Operators are stored as dense matrices in fixed orthonormal
// coordinates, so the HS inner product is the Frobenius inner product and
// all norms/traces below are exact on the truncation.

#include <unsupported/Eigen/MatrixFunctions>

#include "sarcv/common.hpp"

namespace sarcv {

// ‖K‖_HS: Frobenius norm of the coordinate matrix (Parseval).
template <typename Derived>
double hs_norm(const Eigen::MatrixBase<Derived>& k) {
  return k.norm();
}

// ⟨K, L⟩_HS = Σ_k ⟨K e_k, L e_k⟩, column by column.
template <typename DA, typename DB>
double hs_inner(const Eigen::MatrixBase<DA>& k, const Eigen::MatrixBase<DB>& l) {
  require(k.rows() == l.rows() && k.cols() == l.cols(), "hs_inner: shape mismatch");
  return k.cwiseProduct(l).sum();
}

// Rank-one operator z ↦ ⟨x, z⟩ x. Its HS norm equals ‖x‖².
template <typename Derived>
Matrix tensor_square(const Eigen::MatrixBase<Derived>& x) {
  require(x.size() >= 1, "tensor_square: zero-dimension input");
  require_finite(x, "tensor_square");
  return x * x.transpose();
}

// Largest singular value. Full SVD up to dimension 64, fixed-budget power
// iteration on KᵀK above that.
inline double op_norm(const Eigen::Ref<const Matrix>& k) {
  require(k.size() >= 1, "op_norm: empty matrix");
  require_finite(k, "op_norm");
  const Index small = std::min(k.rows(), k.cols());
  if (small <= 64) {
    return Eigen::JacobiSVD<Matrix>(k).singularValues()(0);
  }
  // Power iteration, 500 iterations, tolerance 1e-12; deterministic start.
  Vector v = Vector::Ones(k.cols()).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 500; ++it) {
    Vector w = k.transpose() * (k * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    v = w / norm;
    if (std::abs(norm - lambda) <= 1e-12 * norm) {
      lambda = norm;
      break;
    }
    lambda = norm;
  }
  return std::sqrt(lambda);
}

// Operator composition L∘K as a checked matrix product.
inline Matrix compose(const Eigen::Ref<const Matrix>& l, const Eigen::Ref<const Matrix>& k) {
  require(l.cols() == k.rows(), "compose: inner dimensions mismatch");
  return l * k;
}

// Symmetric positive-semidefinite operator. Construction validates symmetry,
// eigen-clamps roundoff negatives in (-eps, 0) with eps = 1e-12·max|λ|, and
// rejects anything more negative. The eigendecomposition is kept.
class SymPsdOperator {
 public:
  explicit SymPsdOperator(Matrix m) {
    require(m.rows() == m.cols() && m.rows() >= 1, "SymPsdOperator: square matrix required");
    require_finite(m, "SymPsdOperator");
    const double asym = (m - m.transpose()).norm();
    require(asym <= 1e-10 * (1.0 + m.norm()), "SymPsdOperator: asymmetric input rejected");
    mat_ = 0.5 * (m + m.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(mat_);
    eigvals_ = es.eigenvalues();
    eigvecs_ = es.eigenvectors();
    const double eps = 1e-12 * eigvals_.cwiseAbs().maxCoeff();
    require_numeric(eigvals_.minCoeff() >= -eps,
                    "SymPsdOperator: eigenvalue below -1e-12*max|lambda|, not PSD");
    if (eigvals_.minCoeff() < 0.0) {
      eigvals_ = eigvals_.cwiseMax(0.0);
      mat_ = eigvecs_ * eigvals_.asDiagonal() * eigvecs_.transpose();
      mat_ = 0.5 * (mat_ + mat_.transpose());
    }
  }

  const Matrix& matrix() const { return mat_; }
  Index dim() const { return mat_.rows(); }
  // Ascending, clamped to [0, inf).
  const Vector& eigenvalues() const { return eigvals_; }
  const Matrix& eigenvectors() const { return eigvecs_; }

 private:
  Matrix mat_;
  Vector eigvals_;
  Matrix eigvecs_;
};

// Tr_p(Q) = Σ λ_i^p over the eigenbasis of the (symmetric PSD) argument.
inline double trace_p(const SymPsdOperator& q, int p) {
  require(p >= 1, "trace_p: p must be a positive integer");
  double acc = 0.0;
  for (Index i = 0; i < q.eigenvalues().size(); ++i) {
    acc += std::pow(q.eigenvalues()(i), p);
  }
  return acc;
}

// Unique PSD square root via the spectral decomposition.
inline SymPsdOperator psd_sqrt(const SymPsdOperator& q) {
  const Vector roots = q.eigenvalues().cwiseSqrt();
  Matrix r = q.eigenvectors() * roots.asDiagonal() * q.eigenvectors().transpose();
  return SymPsdOperator(0.5 * (r + r.transpose()));
}

// exp(tA); scaling-and-squaring with Pade behind the scenes.
inline Matrix matrix_exp(const Eigen::Ref<const Matrix>& a, double t) {
  require(a.rows() == a.cols(), "matrix_exp: non-square input");
  require_finite(a, "matrix_exp");
  require(std::isfinite(t), "matrix_exp: t must be finite");
  if (t == 0.0 || a.norm() == 0.0) return Matrix::Identity(a.rows(), a.cols());
  const Matrix ta = t * a;
  return ta.exp();
}

}  // namespace sarcv
