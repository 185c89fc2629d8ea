#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ssde/decomposition.hpp"
#include "ssde/error.hpp"

using namespace ssde;

namespace {

SpaceTimeField random_field(const Grid& g, int codim, std::mt19937_64& rng) {
  std::lognormal_distribution<double> mag(0.0, 2.0);
  std::normal_distribution<double> dir(0.0, 1.0);
  RowMatrix v(g.time_steps() * g.node_count(), codim);
  for (Index i = 0; i < v.size(); ++i) v.data()[i] = mag(rng) * dir(rng);
  std::uniform_real_distribution<double> u(-2.0, 1.0);
  v *= std::pow(10.0, u(rng)) / v.cwiseAbs().maxCoeff();
  return SpaceTimeField(g, codim, v);
}

}  // namespace

TEST_SUITE("decomposition") {

TEST_CASE("critical epsilon solves the interpolation identity") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int tested = 0;
  while (tested < 500) {
    const int d = 1 + static_cast<int>(u(rng) * 3.0);
    const double p = d + 0.1 + 20.0 * u(rng);
    const double q = 1.05 + 20.0 * u(rng);
    if (1.0 / q + d / p >= 1.0) continue;
    const double eps = critical_epsilon(p, q, d);
    CHECK(eps > 0.0);
    CHECK(oracle::interpolation_identity(eps, p, q, d) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(eps == doctest::Approx(oracle::epsilon_by_bisection(p, q, d)).epsilon(1e-10));
    ++tested;
  }
}

TEST_CASE("critical epsilon at the edges") {
  CHECK(critical_epsilon(kInf, 2.0, 2) == doctest::Approx(1.0));  // (1 + eps)/2 = 1
  CHECK(critical_epsilon(4.0, kInf, 2) == doctest::Approx(2.0));  // (2 + eps)/4 = 1
  CHECK_THROWS_AS(critical_epsilon(kInf, kInf, 1), Error);
  try {
    (void)critical_epsilon(4.0, 2.0, 2);  // 1/2 + 2/4 = 1 exactly
    FAIL("boundary exponents must be rejected");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Precondition);
  }
}

TEST_CASE("threshold formula") {
  CHECK(threshold(0.0, 4.0, 1, 1.0) == 0.0);
  CHECK(threshold(2.0, 4.0, 1, 1.0) == doctest::Approx(std::pow(2.0, 2.0)));
  CHECK_THROWS_AS(threshold(1.0, 2.0, 1, 1.0), Error);
}

TEST_CASE("split is bit exact and respects both bounds on random fields") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int with_gt = 0, tried = 0;
  for (int trial = 0; trial < 40; ++trial) {
    const int d = trial % 2 + 1;
    const double p = 3.0 + 5.0 * u(rng);
    const double q = 2.0 + 6.0 * u(rng);
    if (1.0 / q + d / p >= 1.0) continue;
    const Grid g(d, 2.0, d == 1 ? 33 : 17, 1.0, 6);
    const SpaceTimeField f = random_field(g, 1 + trial % 2, rng);
    const DecompositionResult r = decompose(f, p, q);
    ++tried;
    if (r.f_gt.values().cwiseAbs().maxCoeff() > 0.0) ++with_gt;
    CHECK(combine(1.0, r.f_le, 1.0, r.f_gt).values() == f.values());
    CHECK(r.certified_gt_norm <= 1.0 + 1e-6);
    for (double n : r.gt_slice_norms) CHECK(n <= 1.0 + 1e-6);
    CHECK(r.certified_le_norm <= r.le_bound * (1.0 + 1e-9));
    // The mask is pointwise: every nonzero row sits wholly in one part.
    for (Index i = 0; i < f.values().rows(); ++i) {
      const bool in_le = r.f_le.values().row(i).norm() > 0.0;
      const bool in_gt = r.f_gt.values().row(i).norm() > 0.0;
      CHECK_FALSE((in_le && in_gt));
    }
  }
  CHECK(with_gt * 2 >= tried);
}

TEST_CASE("p = inf gives the trivial split, q = inf is rejected") {
  const Grid g(1, 1.0, 9, 1.0, 3);
  const auto f = SpaceTimeField::constant(g, Value::Constant(1, 5.0));
  const DecompositionResult r = decompose(f, kInf, 4.0);
  CHECK(r.f_le.values() == f.values());
  CHECK(r.f_gt.values().cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(decompose(f, 4.0, kInf), Error);
}

TEST_CASE("zero field splits into zeros") {
  const Grid g(2, 1.0, 9, 1.0, 3);
  const SpaceTimeField f(g, 2);
  const DecompositionResult r = decompose(f, 4.0, 4.0);
  CHECK(r.certified_gt_norm == 0.0);
  CHECK(r.certified_le_norm == 0.0);
}

TEST_CASE("signed zeros keep the sum exact for negative entries") {
  const Grid g(1, 1.0, 9, 1.0, 2);
  const auto f = SpaceTimeField::from_function(g, 1, [](double, const Point& x) {
    Value v(1);
    v[0] = -0.5 * std::exp(-50.0 * x[0] * x[0]) - 1e-3;
    return v;
  });
  const DecompositionResult r = decompose(f, 4.0, 4.0);
  CHECK(r.f_gt.values().cwiseAbs().maxCoeff() > 0.0);
  CHECK(combine(1.0, r.f_le, 1.0, r.f_gt).values() == f.values());
}

TEST_CASE("uniformly local mode reports the covering constant") {
  CHECK(covering_count(1) >= 2);
  CHECK(covering_count(2) >= covering_count(1));
  const Grid g(1, 4.0, 65, 1.0, 3);
  std::mt19937_64 rng(3);
  const SpaceTimeField f = random_field(g, 1, rng);
  const DecompositionResult r = decompose(f, 4.0, 4.0, true);
  CHECK(r.uniformly_local);
  CHECK(r.gt_bound >= 1.0);
  CHECK(r.certified_gt_norm <= r.gt_bound * (1.0 + 1e-6));
  CHECK(combine(1.0, r.f_le, 1.0, r.f_gt).values() == f.values());
}

}
