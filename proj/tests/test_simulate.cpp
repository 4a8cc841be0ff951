#include <doctest.h>

#include "sarcv/estimator.hpp"
#include "sarcv/harness.hpp"
#include "sarcv/rng.hpp"
#include "sarcv/simulate.hpp"

using namespace sarcv;

TEST_SUITE_BEGIN("simulate");

TEST_CASE("identity flow with unit volatility telescopes the increments") {
  const Index d = 3;
  const Semigroup s = make_identity_semigroup(d);
  const SpectralQ q = SpectralQ::geometric(d, 0.5);
  const int n = 8, refine = 4;
  const Vector fine_times = Vector::LinSpaced(n * refine + 1, 0.0, 1.0);
  const VolPath vol = VolPath::constant_path(fine_times, Matrix::Identity(d, d));
  const WienerIncrements w = sample_wiener_increments(q, 1.0 / (n * refine), n * refine, 77);
  const Trajectory traj =
      simulate_mild_path_with(s, vol, nullptr, Vector::Zero(d), 1.0 / n, 1.0, refine, w.draws);
  Vector acc = Vector::Zero(d);
  for (Index i = 1; i <= n; ++i) {
    for (int j = 0; j < refine; ++j) acc += w.draws.col((i - 1) * refine + j);
    CHECK((traj.states.col(i) - acc).norm() <= 1e-13 * (1.0 + acc.norm()));
  }
}

TEST_CASE("zero volatility gives the deterministic flow") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -1.0;
  a(1, 1) = -0.25;
  const Semigroup s = make_matrix_exp_semigroup(a);
  const SpectralQ q = SpectralQ::geometric(2, 0.5);
  Vector h0(2);
  h0 << 1.0, -2.0;
  const int n = 16;
  const Vector fine_times = Vector::LinSpaced(n * 2 + 1, 0.0, 1.0);
  const VolPath vol = VolPath::constant_path(fine_times, Matrix::Zero(2, 2));
  const Trajectory traj = simulate_mild_path(s, vol, q, nullptr, h0, 1.0 / n, 1.0, 2, 5);
  for (Index i = 0; i <= n; ++i) {
    const Vector expected = matrix_exp(a, traj.obs_times(i)) * h0;
    CHECK((traj.states.col(i) - expected).norm() <= 1e-10 * (1.0 + expected.norm()));
  }
}

TEST_CASE("constant drift against the scalar ODE solution") {
  Matrix a = Matrix::Zero(1, 1);
  a(0, 0) = -1.0;
  const Semigroup s = make_matrix_exp_semigroup(a);
  Vector drift_value(1);
  drift_value << 1.5;
  double errors[2];
  int idx = 0;
  for (int n : {64, 128}) {
    const Index fine = n;  // refine = 1
    const Vector fine_times = Vector::LinSpaced(fine + 1, 0.0, 1.0);
    const VolPath vol = VolPath::constant_path(fine_times, Matrix::Zero(1, 1));
    DriftPath drift;
    drift.times = fine_times;
    drift.values = drift_value.replicate(1, fine + 1);
    const Trajectory traj = simulate_mild_path_with(s, vol, &drift, Vector::Zero(1), 1.0 / n, 1.0,
                                                    1, Matrix::Zero(1, fine));
    const double exact = (1.0 - std::exp(-1.0)) * drift_value(0);
    errors[idx++] = std::abs(traj.states(0, n) - exact);
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(2.0).epsilon(0.5));
}

TEST_CASE("subsampling keeps every k-th observation") {
  const Semigroup s = make_identity_semigroup(2);
  const SpectralQ q = SpectralQ::geometric(2, 0.5);
  const Vector fine_times = Vector::LinSpaced(17, 0.0, 1.0);
  const VolPath vol = VolPath::constant_path(fine_times, Matrix::Identity(2, 2));
  const Trajectory traj = simulate_mild_path(s, vol, q, nullptr, Vector::Zero(2), 1.0 / 16, 1.0, 1, 9);
  const Trajectory half = subsample(traj, 4);
  CHECK(half.obs_times.size() == 5);
  CHECK(half.delta_n == doctest::Approx(0.25));
  for (Index i = 0; i <= 4; ++i) {
    CHECK((half.states.col(i) - traj.states.col(4 * i)).norm() == 0.0);
  }
  CHECK_THROWS_AS((void)subsample(traj, 3), std::invalid_argument);
}

TEST_CASE("incompatible vol grid is rejected") {
  const Semigroup s = make_identity_semigroup(2);
  const Vector coarse = Vector::LinSpaced(5, 0.0, 1.0);  // spacing 0.25
  const VolPath vol{coarse, {Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                             Matrix::Identity(2, 2), Matrix::Identity(2, 2),
                             Matrix::Identity(2, 2)}, false};
  CHECK_THROWS_AS((void)simulate_mild_path_with(s, vol, nullptr, Vector::Zero(2), 1.0 / 3, 1.0, 1,
                                                Matrix::Zero(2, 3)),
                  std::invalid_argument);
}

TEST_CASE("no-arbitrage drift vanishes with the volatility") {
  const FilipovicFrame frame = FilipovicFrame::uniform(0.5, 5.0, 16);
  const Index d = frame.map.dim();
  const SpectralQ q = SpectralQ::geometric(d, 0.5, 0.5, 2);
  const Vector times = Vector::LinSpaced(5, 0.0, 1.0);
  const VolPath vol = VolPath::constant_path(times, Matrix::Zero(d, d));
  const std::vector<GridFunction> alpha = hjm_drift(vol, q, frame, 4);
  for (const GridFunction& g : alpha) CHECK(g.values.norm() == 0.0);
}

TEST_CASE("single-mode constant volatility gives a linearly growing drift") {
  const FilipovicFrame frame = FilipovicFrame::uniform(0.5, 5.0, 32);
  const Index d = frame.map.dim();
  const GridFunction bump = sample_on_grid(frame.space, [](double x) {
    const double z = (x - 1.5) / 0.4;
    return 0.8 * std::exp(-0.5 * z * z);
  });
  Matrix sigma = Matrix::Zero(d, d);
  sigma.col(0) = frame.map.to_ortho(bump);
  const double lambda = 0.5;
  Vector ev(1);
  ev << lambda;
  const SpectralQ q = SpectralQ::from_list(ev, d);
  const Vector times = Vector::LinSpaced(9, 0.0, 1.0);
  const VolPath vol = VolPath::constant_path(times, sigma);
  const std::vector<GridFunction> alpha = hjm_drift(vol, q, frame, 8);
  for (Index k = 0; k <= 8; ++k) {
    // alpha_t = t · lambda · bump² pointwise
    const Vector expected = times(k) * lambda * bump.values.cwiseProduct(bump.values);
    CHECK((alpha[static_cast<size_t>(k)].values - expected).norm() <= 1e-10 * (1.0 + expected.norm()));
  }
}

TEST_CASE("the drift is additive over modes") {
  const FilipovicFrame frame = FilipovicFrame::uniform(0.5, 5.0, 24);
  const Index d = frame.map.dim();
  const GridFunction b1 = sample_on_grid(frame.space, [](double x) {
    const double z = (x - 1.0) / 0.4;
    return 0.6 * std::exp(-0.5 * z * z);
  });
  const GridFunction b2 = sample_on_grid(frame.space, [](double x) {
    const double z = (x - 2.0) / 0.5;
    return 0.4 * std::exp(-0.5 * z * z);
  });
  Matrix both = Matrix::Zero(d, d), first = Matrix::Zero(d, d), second = Matrix::Zero(d, d);
  both.col(0) = frame.map.to_ortho(b1);
  both.col(1) = frame.map.to_ortho(b2);
  first.col(0) = both.col(0);
  second.col(1) = both.col(1);
  Vector ev(2);
  ev << 0.5, 0.25;
  const SpectralQ q = SpectralQ::from_list(ev, d);
  const Vector times = Vector::LinSpaced(5, 0.0, 1.0);
  const std::vector<GridFunction> a_both = hjm_drift(VolPath::constant_path(times, both), q, frame, 4);
  const std::vector<GridFunction> a_1 = hjm_drift(VolPath::constant_path(times, first), q, frame, 4);
  const std::vector<GridFunction> a_2 = hjm_drift(VolPath::constant_path(times, second), q, frame, 4);
  for (size_t k = 0; k < a_both.size(); ++k) {
    CHECK((a_both[k].values - a_1[k].values - a_2[k].values).norm() <=
          1e-11 * (1.0 + a_both[k].values.norm()));
  }
}

TEST_CASE("volatility that does not vanish at the grid end is rejected") {
  const FilipovicFrame frame = FilipovicFrame::uniform(0.5, 5.0, 16);
  const Index d = frame.map.dim();
  Matrix sigma = Matrix::Zero(d, d);
  sigma.col(0) = frame.map.to_ortho(GridFunction{Vector::Ones(d)});  // constant curve
  const SpectralQ q = SpectralQ::geometric(d, 0.5, 0.5, 1);
  const Vector times = Vector::LinSpaced(3, 0.0, 1.0);
  CHECK_THROWS_AS((void)hjm_drift(VolPath::constant_path(times, sigma), q, frame, 2),
                  std::invalid_argument);
}

TEST_CASE("matched-noise refinement converges at first order for smooth deterministic vol") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 1) = 1.0;
  a(1, 0) = -1.0;
  const Semigroup s = make_matrix_exp_semigroup(a);
  const SpectralQ q = SpectralQ::geometric(2, 0.5);
  const int n = 8;
  const int r_fine = 16;
  const Index fine_steps = n * r_fine;
  const Vector fine_times = Vector::LinSpaced(fine_steps + 1, 0.0, 1.0);
  // sigma(t) = (1 + t) · I on the finest grid
  VolPath vol;
  vol.times = fine_times;
  vol.ops.reserve(fine_steps + 1);
  for (Index k = 0; k <= fine_steps; ++k) {
    vol.ops.push_back((1.0 + fine_times(k)) * Matrix::Identity(2, 2));
  }

  std::vector<std::pair<double, double>> pairs;
  const int reps = 12;
  for (int coarse_r : {2, 4, 8}) {
    double acc = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const WienerIncrements w =
          sample_wiener_increments(q, 1.0 / fine_steps, fine_steps, derive_seed(31337, rep));
      const Trajectory ref =
          simulate_mild_path_with(s, vol, nullptr, Vector::Zero(2), 1.0 / n, 1.0, r_fine, w.draws);
      const Matrix coarse_incs = aggregate_increments(w.draws, r_fine / coarse_r);
      const Trajectory approx = simulate_mild_path_with(s, vol, nullptr, Vector::Zero(2), 1.0 / n,
                                                        1.0, coarse_r, coarse_incs);
      double sup = 0.0;
      for (Index i = 0; i <= n; ++i) {
        sup = std::max(sup, (ref.states.col(i) - approx.states.col(i)).norm());
      }
      acc += sup;
    }
    pairs.emplace_back(1.0 / (n * coarse_r), acc / reps);
  }
  const SlopeFit fit = slope_fit(pairs);
  CHECK(fit.slope >= 0.6);
  CHECK(fit.slope <= 1.5);
}

TEST_CASE("matched-noise refinement under rough volatility tracks the Holder order") {
  // For an alpha-Holder volatility the refinement error is O(delta^min(alpha, 1/2)).
  const double alpha = 0.3;
  const FilipovicFrame frame = FilipovicFrame::uniform(0.5, 3.0, 8);
  const Index d = frame.map.dim();
  const SpectralQ q = SpectralQ::geometric(d, 0.5, 0.5, 3);
  const Semigroup s = make_identity_semigroup(d);
  Vector amps(2);
  amps << 0.6, 0.4;
  const RoughExpVol model{alpha, amps, frame};
  const int n = 8;
  const int r_fine = 16;
  const Index fine_steps = n * r_fine;
  const Vector fine_times = Vector::LinSpaced(fine_steps + 1, 0.0, 1.0);

  std::vector<std::pair<double, double>> pairs;
  const int reps = 16;
  for (int coarse_r : {2, 4, 8}) {
    double acc = 0.0;
    for (int rep = 0; rep < reps; ++rep) {
      const VolPath vol = simulate_vol_path(model, fine_times, derive_seed(606, rep));
      const WienerIncrements w =
          sample_wiener_increments(q, 1.0 / fine_steps, fine_steps, derive_seed(607, rep));
      const Trajectory ref =
          simulate_mild_path_with(s, vol, nullptr, Vector::Zero(d), 1.0 / n, 1.0, r_fine, w.draws);
      const Matrix coarse_incs = aggregate_increments(w.draws, r_fine / coarse_r);
      const Trajectory approx = simulate_mild_path_with(s, vol, nullptr, Vector::Zero(d), 1.0 / n,
                                                        1.0, coarse_r, coarse_incs);
      double sup = 0.0;
      for (Index i = 0; i <= n; ++i) {
        sup = std::max(sup, (ref.states.col(i) - approx.states.col(i)).norm());
      }
      acc += sup;
    }
    pairs.emplace_back(1.0 / (n * coarse_r), acc / reps);
  }
  const SlopeFit fit = slope_fit(pairs);
  CHECK(fit.slope >= 0.1);
  CHECK(fit.slope <= 0.8);
}

TEST_CASE("one-substep simulation reproduces its per-interval sums") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = -0.5;
  a(1, 1) = -1.0;
  const Semigroup s = make_matrix_exp_semigroup(a);
  const SpectralQ q = SpectralQ::geometric(2, 0.5);
  const int n = 6;
  const Vector fine_times = Vector::LinSpaced(n + 1, 0.0, 1.0);
  Matrix sigma(2, 2);
  sigma << 1.0, 0.2, -0.1, 0.8;
  const VolPath vol = VolPath::constant_path(fine_times, sigma);
  const WienerIncrements w = sample_wiener_increments(q, 1.0 / n, n, 4242);
  const Trajectory traj =
      simulate_mild_path_with(s, vol, nullptr, Vector::Zero(2), 1.0 / n, 1.0, 1, w.draws);
  const std::vector<Vector> incs = adjusted_increments(traj, s, 1.0 / n);
  const Matrix flow = semigroup_matrix(s, 1.0 / n);
  for (int i = 0; i < n; ++i) {
    const Vector expected = flow * (sigma * w.draws.col(i));
    CHECK((incs[static_cast<size_t>(i)] - expected).norm() <= 1e-13 * (1.0 + expected.norm()));
  }
}

TEST_SUITE_END();
