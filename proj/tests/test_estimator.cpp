#include <doctest.h>

#include "sarcv/estimator.hpp"
#include "sarcv/harness.hpp"
#include "sarcv/rng.hpp"
#include "sarcv/simulate.hpp"

using namespace sarcv;

namespace {

Trajectory make_traj(const Matrix& states, double delta_n) {
  Trajectory t;
  t.states = states;
  t.obs_times = Vector::LinSpaced(states.cols(), 0.0, delta_n * double(states.cols() - 1));
  t.delta_n = delta_n;
  return t;
}

}  // namespace

TEST_SUITE_BEGIN("estimator");

TEST_CASE("identity adjustment is the plain increment") {
  RandomStream rng(83);
  Matrix states(3, 5);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 5; ++j) states(i, j) = rng.normal();
  }
  const Trajectory traj = make_traj(states, 0.25);
  const Semigroup s = make_identity_semigroup(3);
  const std::vector<Vector> incs = adjusted_increments(traj, s, 0.25);
  for (Index i = 1; i <= 4; ++i) {
    CHECK((incs[static_cast<size_t>(i - 1)] - (states.col(i) - states.col(i - 1))).norm() == 0.0);
  }
  CHECK_THROWS_AS((void)adjusted_increments(traj, s, 0.5), std::invalid_argument);
}

TEST_CASE("a noiseless trajectory has exactly zero adjusted increments") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -0.3;
  const Semigroup s = make_matrix_exp_semigroup(a);
  const SpectralQ q = SpectralQ::geometric(2, 0.5);
  Vector h0(2);
  h0 << 2.0, -1.0;
  const int n = 8;
  const Vector fine_times = Vector::LinSpaced(n + 1, 0.0, 1.0);
  const VolPath vol = VolPath::constant_path(fine_times, Matrix::Zero(2, 2));
  const Trajectory traj = simulate_mild_path(s, vol, q, nullptr, h0, 1.0 / n, 1.0, 1, 3);
  for (const Vector& inc : adjusted_increments(traj, s, 1.0 / n)) {
    CHECK(inc.norm() == 0.0);
  }
}

TEST_CASE("shift adjustment matches an independent shift-and-subtract") {
  const FilipovicFrame frame = FilipovicFrame::uniform(0.5, 5.0, 32);
  const Semigroup s = make_shift_semigroup(frame);
  const Index d = frame.map.dim();
  const SpectralQ q = SpectralQ::geometric(d, 0.5, 0.5, 4);
  const int n = 4;
  const Vector fine_times = Vector::LinSpaced(n * 2 + 1, 0.0, 1.0);
  const GridFunction bump = sample_on_grid(frame.space, [](double x) {
    const double z = (x - 1.2) / 0.5;
    return std::exp(-0.5 * z * z);
  });
  Matrix sigma = Matrix::Zero(d, d);
  sigma.col(0) = frame.map.to_ortho(bump);
  sigma.col(1) = 0.5 * frame.map.to_ortho(bump);
  const VolPath vol = VolPath::constant_path(fine_times, sigma);
  const Trajectory traj = simulate_mild_path(s, vol, q, nullptr, Vector::Zero(d), 1.0 / n, 1.0, 2, 11);

  const std::vector<Vector> incs = adjusted_increments(traj, s, 1.0 / n);
  // independent route: shift the previous curve nodally, then subtract
  const double delta_n = 1.0 / n;
  for (Index i = 1; i <= n; ++i) {
    const GridFunction prev = frame.map.from_ortho(traj.states.col(i - 1));
    Vector shifted(d);
    for (Index j = 0; j < d; ++j) {
      const double y = frame.space.nodes()(j) + delta_n;
      if (y >= frame.space.x_max()) {
        shifted(j) = prev.values(d - 1);
        continue;
      }
      Index cell = 0;
      while (frame.space.nodes()(cell + 1) < y) ++cell;
      const double theta = (y - frame.space.nodes()(cell)) / frame.space.cell_widths()(cell);
      shifted(j) = (1.0 - theta) * prev.values(cell) + theta * prev.values(cell + 1);
    }
    const GridFunction cur = frame.map.from_ortho(traj.states.col(i));
    const Vector oracle = frame.map.to_ortho(GridFunction{cur.values - shifted});
    CHECK((incs[static_cast<size_t>(i - 1)] - oracle).norm() <= 1e-10 * (1.0 + oracle.norm()));
  }
}

TEST_CASE("running covariation sums: degenerate and one-term cases") {
  const Semigroup s = make_identity_semigroup(2);
  Matrix states = Matrix::Zero(2, 4);
  const Trajectory zero_traj = make_traj(states, 0.25);
  const OperatorPath zero_path = sarcv_path(zero_traj, s, 0.25);
  for (const Matrix& op : zero_path.ops) CHECK(op.norm() == 0.0);

  Vector x(2);
  x << 0.3, -1.1;
  Matrix one_step(2, 2);
  one_step.col(0) = Vector::Zero(2);
  one_step.col(1) = x;
  const OperatorPath single = sarcv_path(make_traj(one_step, 1.0), s, 1.0);
  CHECK((single.ops[1] - tensor_square(x)).norm() <= 1e-15);
}

TEST_CASE("trace of the estimator equals the sum of squared increment norms") {
  RandomStream rng(89);
  Matrix states(4, 9);
  for (Index i = 0; i < 4; ++i) {
    for (Index j = 0; j < 9; ++j) states(i, j) = rng.normal();
  }
  const Trajectory traj = make_traj(states, 0.125);
  const Semigroup s = make_identity_semigroup(4);
  const OperatorPath path = sarcv_path(traj, s, 0.125);
  const std::vector<Vector> incs = adjusted_increments(traj, s, 0.125);
  double acc = 0.0;
  for (const Vector& inc : incs) acc += inc.squaredNorm();
  CHECK(path.ops.back().trace() == doctest::Approx(acc).epsilon(1e-12));
}

TEST_CASE("estimator partial sums are monotone in the PSD order") {
  RandomStream rng(97);
  Matrix states(3, 7);
  for (Index i = 0; i < 3; ++i) {
    for (Index j = 0; j < 7; ++j) states(i, j) = rng.normal();
  }
  const OperatorPath path = sarcv_path(make_traj(states, 0.1), make_identity_semigroup(3), 0.1);
  for (size_t i = 1; i < path.ops.size(); ++i) {
    const Matrix step = path.ops[i] - path.ops[i - 1];
    CHECK(SymPsdOperator(step).eigenvalues().minCoeff() >= 0.0);
  }
}

TEST_CASE("covariation target for constant volatility") {
  Vector ev(2);
  ev << 0.5, 0.25;
  const SpectralQ q = SpectralQ::from_list(ev);
  const Index fine = 128;
  const Vector fine_times = Vector::LinSpaced(fine + 1, 0.0, 1.0);
  const VolPath id_vol = VolPath::constant_path(fine_times, Matrix::Identity(2, 2));
  Vector obs(2);
  obs << 0.0, 1.0;
  const OperatorPath qv = true_qv(id_vol, q, obs);
  CHECK((qv.ops[1] - q.matrix()).norm() <= 1e-12);

  RandomStream rng(101);
  Matrix sigma(2, 2);
  for (Index i = 0; i < 2; ++i) {
    for (Index j = 0; j < 2; ++j) sigma(i, j) = rng.normal();
  }
  const VolPath gen_vol = VolPath::constant_path(fine_times, sigma);
  const OperatorPath qv2 = true_qv(gen_vol, q, obs);
  const Matrix expected = sigma * q.matrix() * sigma.transpose();
  CHECK((qv2.ops[1] - expected).norm() <= 1e-12 * (1.0 + expected.norm()));
}

TEST_CASE("covariation target for a time ramp") {
  // sigma_s = s·I, Q = I: integral at t=1 is 1/3·I up to O(delta)
  const Index fine = 512;
  const SpectralQ q = SpectralQ::unit(2);
  const Vector fine_times = Vector::LinSpaced(fine + 1, 0.0, 1.0);
  VolPath vol;
  vol.times = fine_times;
  for (Index k = 0; k <= fine; ++k) vol.ops.push_back(fine_times(k) * Matrix::Identity(2, 2));
  Vector obs(2);
  obs << 0.0, 1.0;
  const OperatorPath qv = true_qv(vol, q, obs);
  CHECK(std::abs(qv.ops[1](0, 0) - 1.0 / 3.0) <= 2.0 / double(fine));
}

TEST_CASE("sup error: trivial and loop-oracle cases") {
  OperatorPath a, b;
  a.times = Vector::LinSpaced(5, 0.0, 1.0);
  b.times = a.times;
  RandomStream rng(103);
  for (int i = 0; i < 5; ++i) {
    Matrix m(2, 2);
    for (Index r = 0; r < 2; ++r) {
      for (Index c = 0; c < 2; ++c) m(r, c) = rng.normal();
    }
    a.ops.push_back(m);
    b.ops.push_back(Matrix::Zero(2, 2));
  }
  CHECK(sup_hs_error(a, a) == 0.0);
  double oracle = 0.0;
  for (int i = 0; i < 5; ++i) oracle = std::max(oracle, a.ops[static_cast<size_t>(i)].norm());
  CHECK(sup_hs_error(a, b) == doctest::Approx(oracle).epsilon(1e-15));
  OperatorPath c = a;
  c.times = Vector::LinSpaced(5, 0.0, 2.0);
  CHECK_THROWS_AS((void)sup_hs_error(a, c), std::invalid_argument);
}

TEST_CASE("martingale centering of the estimator at the horizon") {
  // For the identity flow and constant sigma, E[estimator at T] = T·sigma Q sigma*.
  const Index d = 3;
  const Semigroup s = make_identity_semigroup(d);
  const SpectralQ q = SpectralQ::geometric(d, 0.5);
  Matrix sigma(d, d);
  sigma << 1.0, 0.2, 0.0, -0.3, 0.8, 0.1, 0.0, 0.4, 1.2;
  const int n = 32, reps = 600;
  const Vector fine_times = Vector::LinSpaced(n + 1, 0.0, 1.0);
  const VolPath vol = VolPath::constant_path(fine_times, sigma);
  Matrix mean = Matrix::Zero(d, d), second = Matrix::Zero(d, d);
  for (int r = 0; r < reps; ++r) {
    const Trajectory traj =
        simulate_mild_path(s, vol, q, nullptr, Vector::Zero(d), 1.0 / n, 1.0, 1, derive_seed(211, r));
    const Matrix last = sarcv_path(traj, s, 1.0 / n).ops.back();
    mean += last;
    second += last.cwiseProduct(last);
  }
  mean /= double(reps);
  second /= double(reps);
  const Matrix target = sigma * q.matrix() * sigma.transpose();
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) {
      const double se =
          std::sqrt(std::max(0.0, second(i, j) - mean(i, j) * mean(i, j)) / double(reps));
      CHECK(std::abs(mean(i, j) - target(i, j)) <= 3.5 * se + 1e-12);
    }
  }
}

TEST_SUITE_END();
