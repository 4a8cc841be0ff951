#include <doctest.h>

#include "sarcv/noise.hpp"

using namespace sarcv;

namespace {

SpectralQ two_mode_q() {
  Vector ev(2);
  ev << 0.5, 0.25;
  return SpectralQ::from_list(std::move(ev));
}

}  // namespace

TEST_SUITE_BEGIN("noise");

TEST_CASE("spectral validation") {
  Vector unsorted(2);
  unsorted << 0.25, 0.5;
  CHECK_THROWS_AS(SpectralQ::from_list(unsorted), std::invalid_argument);
  Vector zero(2);
  zero << 0.5, 0.0;
  CHECK_THROWS_AS(SpectralQ::from_list(zero), std::invalid_argument);
  Matrix skewed(2, 2);
  skewed << 1, 1, 0, 1;
  Vector ev(2);
  ev << 0.5, 0.25;
  CHECK_THROWS_AS(SpectralQ(ev, skewed), std::invalid_argument);
  const SpectralQ q = SpectralQ::geometric(5, 0.5);
  CHECK(q.trace() == doctest::Approx(0.5 * (1 - std::pow(0.5, 5)) / 0.5));
}

TEST_CASE("same seed gives identical draws") {
  const SpectralQ q = two_mode_q();
  const WienerIncrements a = sample_wiener_increments(q, 0.1, 50, 421);
  const WienerIncrements b = sample_wiener_increments(q, 0.1, 50, 421);
  CHECK((a.draws - b.draws).norm() == 0.0);
  const WienerIncrements c = sample_wiener_increments(q, 0.1, 50, 422);
  CHECK((a.draws - c.draws).norm() > 0.0);
}

TEST_CASE("coefficient variances match delta times the eigenvalues") {
  const SpectralQ q = two_mode_q();
  const Index n = 100000;
  const WienerIncrements w = sample_wiener_increments(q, 0.1, n, 11);
  for (Index k = 0; k < 2; ++k) {
    const double var = w.draws.row(k).squaredNorm() / double(n);
    CHECK(var == doctest::Approx(0.1 * q.eigenvalues()(k)).epsilon(0.03));
  }
  // independence of KL coefficients: covariance within 3 standard errors of 0
  const double cov = (w.draws.row(0).cwiseProduct(w.draws.row(1))).sum() / double(n);
  const double se = std::sqrt(0.1 * 0.5 * 0.1 * 0.25 / double(n));
  CHECK(std::abs(cov) <= 3.0 * se);
}

TEST_CASE("one-step second moment matches the isometry") {
  const SpectralQ q = two_mode_q();
  const Index n = 100000;
  const WienerIncrements w = sample_wiener_increments(q, 0.1, n, 13);
  double sum = 0.0, sumsq = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double v = w.draws.col(i).squaredNorm();
    sum += v;
    sumsq += v * v;
  }
  const double mean = sum / double(n);
  const double se = std::sqrt(std::max(0.0, sumsq / double(n) - mean * mean) / double(n));
  CHECK(std::abs(mean - 0.1 * q.trace()) <= 3.0 * se);
}

TEST_CASE("fourth moment closed form") {
  Vector one(1);
  one << 1.0;
  CHECK(fourth_moment_theoretical(SpectralQ::from_list(one), 1.0) == doctest::Approx(3.0));
  const SpectralQ q = two_mode_q();
  CHECK(fourth_moment_theoretical(q, 0.1) == doctest::Approx(0.011875).epsilon(1e-14));
  // doubling the step exactly quadruples the value
  CHECK(fourth_moment_theoretical(q, 0.2) == doctest::Approx(4.0 * 0.011875).epsilon(1e-14));
}

TEST_CASE("fourth moment confirmed by Monte Carlo") {
  const SpectralQ q = two_mode_q();
  const Index n = 200000;
  const WienerIncrements w = sample_wiener_increments(q, 0.1, n, 17);
  double acc = 0.0;
  for (Index i = 0; i < n; ++i) {
    const double v = w.draws.col(i).squaredNorm();
    acc += v * v;
  }
  CHECK(acc / double(n) == doctest::Approx(0.011875).epsilon(0.02));
}

TEST_CASE("subordinator with zero rate is identically zero") {
  const SubordinatorIncrements s = sample_subordinator_increments(0.0, 0.3, 4, 0.1, 20, 23);
  for (const SymPsdOperator& op : s.draws) CHECK(op.matrix().norm() == 0.0);
  CHECK_THROWS_AS((void)sample_subordinator_increments(-1.0, 0.3, 4, 0.1, 5, 1),
                  std::invalid_argument);
}

TEST_CASE("subordinator increments are PSD and accumulate monotonically") {
  const SubordinatorIncrements s = sample_subordinator_increments(5.0, 0.3, 4, 0.2, 200, 29);
  Matrix acc = Matrix::Zero(4, 4);
  double last_min = 0.0;
  for (const SymPsdOperator& op : s.draws) {
    CHECK(op.eigenvalues().minCoeff() >= 0.0);
    acc += op.matrix();
    const double mn = SymPsdOperator(acc).eigenvalues().minCoeff();
    CHECK(mn >= last_min - 1e-12);
    last_min = mn;
  }
}

TEST_CASE("subordinator mean trace matches the compound-Poisson formula") {
  const double rate = 5.0, delta = 0.2, scale = 0.3;
  const Index steps = 100000;
  const SubordinatorIncrements s = sample_subordinator_increments(rate, scale, 3, delta, steps, 31);
  double acc = 0.0;
  for (const SymPsdOperator& op : s.draws) acc += op.matrix().trace();
  CHECK(acc / double(steps) == doctest::Approx(rate * delta * scale).epsilon(0.03));
}

TEST_SUITE_END();
