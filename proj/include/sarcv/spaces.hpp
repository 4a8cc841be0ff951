#pragma once

// Hilbert-space backends: plain coordinate space and the grid-discretised
// forward-curve space H_beta with inner product
//   <h, g> = h(0) g(0) + ∫ h'(x) g'(x) e^{beta x} dx.
// Curves are nodal values with piecewise-linear interpolation on
// [0, x_m], extended constantly beyond x_m. Derivatives are forward
// differences per cell, the weight is evaluated at cell midpoints, which
// keeps the Gram matrix tridiagonal plus a rank-one h(0)g(0) term.

#include <Eigen/Cholesky>

#include "sarcv/common.hpp"
#include "sarcv/operators.hpp"

namespace sarcv {

struct CoordSpace {
  Index dim;
};

struct GridFunction {
  Vector values;  // h(x_j), one per node
};

class FilipovicSpace {
 public:
  FilipovicSpace(double beta, Vector nodes) : beta_(beta), nodes_(std::move(nodes)) {
    require(beta_ > 0.0, "FilipovicSpace: beta must be positive");
    require(nodes_.size() >= 3, "FilipovicSpace: need at least 2 cells");
    require(nodes_(0) == 0.0, "FilipovicSpace: grid must start at 0");
    const Index cells = nodes_.size() - 1;
    widths_.resize(cells);
    weights_.resize(cells);
    for (Index j = 0; j < cells; ++j) {
      widths_(j) = nodes_(j + 1) - nodes_(j);
      require(widths_(j) > 0.0, "FilipovicSpace: grid must be strictly increasing");
      const double mid = 0.5 * (nodes_(j) + nodes_(j + 1));
      weights_(j) = std::exp(beta_ * mid) * widths_(j);
    }
  }

  static FilipovicSpace uniform(double beta, double x_max, Index cells) {
    require(x_max > 0.0 && cells >= 2, "FilipovicSpace::uniform: bad parameters");
    Vector nodes = Vector::LinSpaced(cells + 1, 0.0, x_max);
    nodes(0) = 0.0;  // LinSpaced endpoint exactness
    nodes(cells) = x_max;
    return FilipovicSpace(beta, std::move(nodes));
  }

  double beta() const { return beta_; }
  const Vector& nodes() const { return nodes_; }
  Index node_count() const { return nodes_.size(); }
  Index cell_count() const { return nodes_.size() - 1; }
  const Vector& cell_widths() const { return widths_; }
  const Vector& cell_weights() const { return weights_; }
  double x_max() const { return nodes_(nodes_.size() - 1); }

  // Cellwise forward-difference derivative matrix, cells x nodes.
  Matrix derivative_matrix() const {
    Matrix d = Matrix::Zero(cell_count(), node_count());
    for (Index j = 0; j < cell_count(); ++j) {
      d(j, j) = -1.0 / widths_(j);
      d(j, j + 1) = 1.0 / widths_(j);
    }
    return d;
  }

  // Gram matrix of the nodal hat functions under the quadrature inner product.
  Matrix gram_matrix() const {
    const Matrix d = derivative_matrix();
    Matrix g = d.transpose() * weights_.asDiagonal() * d;
    g(0, 0) += 1.0;
    return 0.5 * (g + g.transpose());
  }

 private:
  double beta_;
  Vector nodes_;
  Vector widths_;
  Vector weights_;
};

inline void require_same_grid(const FilipovicSpace& s, const GridFunction& h,
                              const GridFunction& g) {
  require(h.values.size() == s.node_count() && g.values.size() == s.node_count(),
          "grid mismatch");
}

inline double inner_beta(const FilipovicSpace& s, const GridFunction& h,
                         const GridFunction& g) {
  require_same_grid(s, h, g);
  double acc = h.values(0) * g.values(0);
  for (Index j = 0; j < s.cell_count(); ++j) {
    const double dh = (h.values(j + 1) - h.values(j)) / s.cell_widths()(j);
    const double dg = (g.values(j + 1) - g.values(j)) / s.cell_widths()(j);
    acc += dh * dg * s.cell_weights()(j);
  }
  return acc;
}

inline double norm_beta(const FilipovicSpace& s, const GridFunction& h) {
  return std::sqrt(inner_beta(s, h, h));
}

inline GridFunction pointwise_mul(const GridFunction& h, const GridFunction& g) {
  require(h.values.size() == g.values.size(), "pointwise_mul: grid mismatch");
  return GridFunction{h.values.cwiseProduct(g.values)};
}

// Orthonormalisation of the nodal basis: G = C Cᵀ (Cholesky), to_ortho = Cᵀ·v.
// Euclidean norms of orthonormal coordinates equal the H_beta norm.
class OrthoMap {
 public:
  explicit OrthoMap(const FilipovicSpace& space) {
    gram_ = space.gram_matrix();
    Eigen::SelfAdjointEigenSolver<Matrix> es(gram_);
    const double lmin = es.eigenvalues().minCoeff();
    const double lmax = es.eigenvalues().maxCoeff();
    require_numeric(lmin > 0.0 && lmax / lmin < 1e12,
                    "gram_cholesky: Gram matrix numerically singular (ill-posed grid)");
    condition_ = lmax / lmin;
    Eigen::LLT<Matrix> llt(gram_);
    require_numeric(llt.info() == Eigen::Success, "gram_cholesky: Cholesky failed");
    chol_lower_ = llt.matrixL();
    to_coeff_ = chol_lower_.transpose();
    from_coeff_ = to_coeff_.triangularView<Eigen::Upper>().solve(
        Matrix::Identity(gram_.rows(), gram_.cols()));
  }

  const Matrix& gram() const { return gram_; }
  const Matrix& cholesky_lower() const { return chol_lower_; }
  double condition() const { return condition_; }
  Index dim() const { return gram_.rows(); }

  Vector to_ortho(const GridFunction& h) const { return to_coeff_ * h.values; }
  GridFunction from_ortho(const Vector& u) const { return GridFunction{from_coeff_ * u}; }

  // Matrix of a nodal operator in orthonormal coordinates: Cᵀ K C^{-T}.
  Matrix op_to_ortho(const Eigen::Ref<const Matrix>& nodal) const {
    require(nodal.rows() == dim() && nodal.cols() == dim(), "op_to_ortho: shape mismatch");
    return to_coeff_ * nodal * from_coeff_;
  }

 private:
  Matrix gram_;
  Matrix chol_lower_;
  Matrix to_coeff_;
  Matrix from_coeff_;
  double condition_ = 0.0;
};

struct GramCholesky {
  SymPsdOperator gram;
  Matrix cholesky_lower;
};

inline GramCholesky gram_cholesky(const FilipovicSpace& space) {
  OrthoMap map(space);
  return GramCholesky{SymPsdOperator(map.gram()), map.cholesky_lower()};
}

// Space plus its orthonormal frame; what the shift semigroup, the kernel
// volatility and the HJM machinery consume.
struct FilipovicFrame {
  FilipovicSpace space;
  OrthoMap map;

  explicit FilipovicFrame(FilipovicSpace s) : space(std::move(s)), map(space) {}
  static FilipovicFrame uniform(double beta, double x_max, Index cells) {
    return FilipovicFrame(FilipovicSpace::uniform(beta, x_max, cells));
  }
};

// Samples a scalar function at the grid nodes.
template <typename F>
GridFunction sample_on_grid(const FilipovicSpace& s, F&& f) {
  Vector v(s.node_count());
  for (Index j = 0; j < s.node_count(); ++j) v(j) = f(s.nodes()(j));
  return GridFunction{std::move(v)};
}

}  // namespace sarcv
