#include <doctest.h>

#include <random>

#include "manufactured.hpp"
#include "ssde/error.hpp"
#include "ssde/zvonkin.hpp"

using namespace ssde;

namespace {

double max_error(const SpaceTimeField& u, const SpaceTimeField& exact) {
  return (u.values() - exact.values()).cwiseAbs().maxCoeff();
}

SpaceTimeField bump_drift(const Grid& g, double c) {
  return SpaceTimeField::from_function(g, g.dim(), [c](double, const Point& x) {
    return Value(c * x * std::exp(-x.squaredNorm()));
  });
}

}  // namespace

TEST_SUITE("zvonkin") {

TEST_CASE("zero source gives the zero solution") {
  const Grid g(1, 2.0, 33, 1.0, 5);
  const auto a = SpaceTimeField::constant(g, Value::Constant(1, 1.0));
  const SpaceTimeField zero(g, 1);
  const ZvonkinSolution s = solve_backward_pde(a, zero, zero, 1.0);
  CHECK(s.u.values().cwiseAbs().maxCoeff() == 0.0);
  CHECK(s.c0c1_norm == 0.0);
}

TEST_CASE("manufactured solution in d = 1 converges") {
  double prev = 0.0;
  for (int m : {33, 65, 129}) {
    const Grid g(1, 1.0, m, 1.0, 9);
    const auto p = manufactured::build(g, 2.0);
    const ZvonkinSolution s = solve_backward_pde(p.a, p.g, p.f, 2.0);
    const double err = max_error(s.u, p.exact);
    CHECK(s.residual_linf <= 1e-10);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 0.9);
    prev = err;
  }
  CHECK(prev < 3e-3);
}

TEST_CASE("manufactured solution in d = 2 with a cross term") {
  double prev = 0.0;
  for (int m : {17, 33}) {
    const Grid g(2, 1.0, m, 1.0, 5);
    const auto p = manufactured::build(g, 1.0);
    const ZvonkinSolution s = solve_backward_pde(p.a, p.g, p.f, 1.0);
    const double err = max_error(s.u, p.exact);
    if (prev > 0.0) CHECK(std::log2(prev / err) >= 0.9);
    prev = err;
  }
  CHECK(prev < 2e-2);
}

TEST_CASE("gradient field matches the exact gradient at interior nodes") {
  const Grid g(1, 1.0, 129, 1.0, 5);
  const auto p = manufactured::build(g, 1.0);
  const ZvonkinSolution s = solve_backward_pde(p.a, p.g, p.f, 1.0);
  const double k = std::numbers::pi / 2.0;
  for (Index n = 10; n < 120; n += 11) {
    const double x = g.node_position(n)[0];
    CHECK(s.grad_u.at(0, n)[0] == doctest::Approx(k * std::cos(k * (x + 1.0))).epsilon(2e-3));
  }
}

TEST_CASE("non-positive diffusion is an ellipticity error naming the node") {
  const Grid g(1, 1.0, 17, 1.0, 3);
  const auto a = SpaceTimeField::from_function(g, 1, [](double, const Point& x) {
    Value v(1);
    v[0] = std::abs(x[0] - 0.25) < 1e-12 ? 0.0 : 1.0;
    return v;
  });
  const SpaceTimeField f = bump_drift(g, 1.0);
  try {
    (void)solve_backward_pde(a, f, f, 1.0);
    FAIL("expected an ellipticity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Ellipticity);
    CHECK(std::string(e.what()).find("node") != std::string::npos);
  }
}

TEST_CASE("calibration doubles lambda until the C1 norm is at most one half") {
  const Grid g(1, 4.0, 65, 1.0, 9);
  const auto a = SpaceTimeField::constant(g, Value::Constant(1, 1.0));
  const SpaceTimeField b2 = bump_drift(g, 6.0);
  const ZvonkinSolution s = calibrate_lambda(a, b2, 0.5);
  CHECK(s.c0c1_norm <= 0.5);
  REQUIRE(s.lambda_history.size() >= 2);
  for (std::size_t i = 1; i < s.lambda_history.size(); ++i) {
    CHECK(s.lambda_history[i].lambda == doctest::Approx(2.0 * s.lambda_history[i - 1].lambda));
    CHECK(s.lambda_history[i].c0c1_norm < s.lambda_history[i - 1].c0c1_norm);
  }
  CHECK(s.lambda_history[s.lambda_history.size() - 2].c0c1_norm > 0.5);
  CHECK(s.lambda_bar == s.lambda_history.back().lambda);
}

TEST_CASE("calibration cap raises a calibration error with the last state") {
  const Grid g(1, 4.0, 65, 1.0, 9);
  const auto a = SpaceTimeField::constant(g, Value::Constant(1, 1.0));
  const SpaceTimeField b2 = bump_drift(g, 40.0);
  try {
    (void)calibrate_lambda(a, b2, 0.01, 2);
    FAIL("expected a calibration error");
  } catch (const CalibrationError& e) {
    CHECK(e.achieved_norm() > 0.5);
    CHECK(e.last_lambda() == doctest::Approx(0.04));
  }
}

TEST_CASE("phi inverse round trip and failure modes") {
  const Grid g(2, 4.0, 65, 1.0, 9);
  const auto a = SpaceTimeField::constant(g, flatten(SmallMatrix::Identity(2, 2)));
  const ZvonkinSolution s = calibrate_lambda(a, bump_drift(g, 2.0));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  for (int i = 0; i < 200; ++i) {
    Point y(2);
    y << u(rng), u(rng);
    const InverseResult r = phi_inverse(s, 0.5, y);
    CHECK((phi(s, 0.5, r.x) - y).norm() < 1e-9);
  }
  Point outside(2);
  outside << 4.5, 0.0;
  CHECK_THROWS_AS(phi_inverse(s, 0.5, outside), Error);
  try {
    Point y(2);
    y << 1.0, 1.0;
    (void)phi_inverse(s, 0.5, y, 1e-30, 2);
    FAIL("expected a solver error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Solver);
  }
}

TEST_CASE("transform properties hold for a calibrated solution") {
  const Grid g(2, 4.0, 65, 1.0, 9);
  const auto a = SpaceTimeField::constant(g, flatten(SmallMatrix::Identity(2, 2)));
  const ZvonkinSolution s = calibrate_lambda(a, bump_drift(g, 3.0));
  const TransformPropertyReport r = verify_transform_properties(s, 2000);
  CHECK(r.passed);
  CHECK(r.phi_min_ratio >= 0.48);
  CHECK(r.phi_max_ratio <= 2.02);
  CHECK(r.max_roundtrip_error <= 1e-9);
  CHECK(r.inverse_failures == 0);
}

}
