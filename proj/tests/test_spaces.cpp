#include <doctest.h>

#include "sarcv/rng.hpp"
#include "sarcv/spaces.hpp"

using namespace sarcv;

TEST_SUITE_BEGIN("spaces");

TEST_CASE("inner product of constants is h(0)g(0)") {
  const FilipovicSpace s = FilipovicSpace::uniform(0.5, 5.0, 16);
  const GridFunction one{Vector::Ones(s.node_count())};
  CHECK(inner_beta(s, one, one) == doctest::Approx(1.0).epsilon(1e-14));
  const GridFunction ramp = sample_on_grid(s, [](double x) { return x; });
  CHECK(inner_beta(s, ramp, one) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("inner product against a fine-grid quadrature value") {
  // h(x) = x on [0,1]: <h,h> = (e^{0.1} - 1)/0.1
  const FilipovicSpace s = FilipovicSpace::uniform(0.1, 1.0, 1000);
  const GridFunction h = sample_on_grid(s, [](double x) { return x; });
  CHECK(inner_beta(s, h, h) == doctest::Approx((std::exp(0.1) - 1.0) / 0.1).epsilon(1e-4));
}

TEST_CASE("grid refinement improves the quadrature at second order") {
  // h(x) = e^{-x} on [0,1], beta = 1: <h,h> = 1 + ∫_0^1 e^{-2x} e^{x} dx = 1 + (1 - e^{-1}).
  const double decay_target = 1.0 + (1.0 - std::exp(-1.0));
  // h(x) = x on [0,1], beta = 1: <h,h> = ∫_0^1 e^{x} dx = e - 1.
  const double ramp_target = std::exp(1.0) - 1.0;
  double decay_err[2], ramp_err[2];
  int idx = 0;
  for (Index cells : {64, 128}) {
    const FilipovicSpace s = FilipovicSpace::uniform(1.0, 1.0, cells);
    const GridFunction decay = sample_on_grid(s, [](double x) { return std::exp(-x); });
    const GridFunction ramp = sample_on_grid(s, [](double x) { return x; });
    decay_err[idx] = std::abs(inner_beta(s, decay, decay) - decay_target);
    ramp_err[idx] = std::abs(inner_beta(s, ramp, ramp) - ramp_target);
    ++idx;
  }
  CHECK(decay_err[0] / decay_err[1] == doctest::Approx(4.0).epsilon(0.25));
  CHECK(ramp_err[0] / ramp_err[1] == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("orthonormal coordinates are an isometry") {
  const FilipovicSpace s = FilipovicSpace::uniform(0.5, 5.0, 32);
  const OrthoMap map(s);
  RandomStream rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    const GridFunction h{rng.normal_vector(s.node_count())};
    const double coords = map.to_ortho(h).squaredNorm();
    const double direct = inner_beta(s, h, h);
    CHECK(std::abs(coords - direct) <= 1e-10 * (1.0 + direct));
  }
}

TEST_CASE("round trip through orthonormal coordinates") {
  const FilipovicSpace s = FilipovicSpace::uniform(0.5, 5.0, 32);
  const OrthoMap map(s);
  RandomStream rng(5);
  const GridFunction h{rng.normal_vector(s.node_count())};
  const GridFunction back = map.from_ortho(map.to_ortho(h));
  CHECK((back.values - h.values).norm() <= 1e-10 * (1.0 + h.values.norm()));
}

TEST_CASE("gram_cholesky factors the Gram matrix") {
  const FilipovicSpace s = FilipovicSpace::uniform(0.5, 5.0, 24);
  const GramCholesky gc = gram_cholesky(s);
  const Matrix& c = gc.cholesky_lower;
  CHECK((c * c.transpose() - gc.gram.matrix()).norm() <= 1e-10 * gc.gram.matrix().norm());
  CHECK(gc.gram.eigenvalues().minCoeff() > 0.0);
}

TEST_CASE("ill-posed grids are reported") {
  Vector nodes(4);
  nodes << 0.0, 1e-14, 1.0, 2.0;
  const FilipovicSpace s(0.5, nodes);
  CHECK_THROWS_AS((void)gram_cholesky(s), numeric_error);
}

TEST_CASE("pointwise multiplication") {
  const Index n = 9;
  GridFunction one{Vector::Ones(n)};
  RandomStream rng(7);
  GridFunction g{rng.normal_vector(n)};
  CHECK((pointwise_mul(one, g).values - g.values).norm() == 0.0);
  Vector v(3);
  v << 1, 2, 3;
  Vector expected(3);
  expected << 1, 4, 9;
  CHECK((pointwise_mul(GridFunction{v}, GridFunction{v}).values - expected).norm() == 0.0);
  const GridFunction a{rng.normal_vector(n)}, b{rng.normal_vector(n)}, c{rng.normal_vector(n)};
  CHECK((pointwise_mul(a, b).values - pointwise_mul(b, a).values).norm() == 0.0);
  // associativity up to one rounding of the nodewise products
  CHECK((pointwise_mul(pointwise_mul(a, b), c).values -
         pointwise_mul(a, pointwise_mul(b, c)).values).norm() <= 1e-15);
  CHECK_THROWS_AS((void)pointwise_mul(a, GridFunction{Vector::Ones(n + 1)}), std::invalid_argument);
}

TEST_CASE("space validation") {
  CHECK_THROWS_AS(FilipovicSpace::uniform(-0.5, 5.0, 16), std::invalid_argument);
  Vector bad(3);
  bad << 0.0, 1.0, 1.0;
  CHECK_THROWS_AS(FilipovicSpace(0.5, bad), std::invalid_argument);
  Vector not_zero(3);
  not_zero << 0.5, 1.0, 2.0;
  CHECK_THROWS_AS(FilipovicSpace(0.5, not_zero), std::invalid_argument);
}

TEST_SUITE_END();
