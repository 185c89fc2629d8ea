#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <numbers>

#include "ssde/error.hpp"
#include "ssde/simulation.hpp"

using namespace ssde;

namespace {

CoefficientSet constant_coefficients(const Grid& g, const Point& drift, double sigma) {
  const int d = g.dim();
  return CoefficientSet{SpaceTimeField::constant(g, Value(drift)), SpaceTimeField(g, d),
                        SpaceTimeField::constant(g, flatten(sigma * SmallMatrix::Identity(d, d))), 1.0, ""};
}

CoefficientSet ou(const Grid& g) {
  return CoefficientSet{
      SpaceTimeField::from_function(g, 1, [](double, const Point& x) { return Value(-x); }), SpaceTimeField(g, 1),
      SpaceTimeField::constant(g, Value::Constant(1, std::sqrt(2.0))), 2.0, ""};
}

}  // namespace

TEST_SUITE("simulation") {

TEST_CASE("step count must divide the horizon") {
  const Grid g(1, 4.0, 33, 1.0, 5);
  CHECK(step_count(g, {.n_paths = 1, .dt = 0.01, .report_every = 10}) == 100);
  CHECK_THROWS_AS(step_count(g, {.n_paths = 1, .dt = 0.03, .report_every = 1}), Error);
  CHECK_THROWS_AS(step_count(g, {.n_paths = 1, .dt = 0.01, .report_every = 7}), Error);
  CHECK_THROWS_AS(step_count(g, {.n_paths = 0, .dt = 0.01, .report_every = 1}), Error);
}

TEST_CASE("deterministic drift without noise") {
  const Grid g(2, 4.0, 33, 1.0, 5);
  Point c(2);
  c << 0.5, -1.0;
  const auto coeffs = constant_coefficients(g, c, 0.0);
  Point x0(2);
  x0 << 0.25, 0.5;
  const PathEnsemble ens = euler_maruyama(coeffs, InitialLaw::point_mass(x0), {.n_paths = 3, .dt = 0.01, .report_every = 10});
  CHECK(ens.n_times() == 11);
  for (Index p = 0; p < 3; ++p) {
    const Point xT = ens.state(p, 10);
    CHECK(xT[0] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(xT[1] == doctest::Approx(-0.5).epsilon(1e-12));
  }
}

TEST_CASE("Ornstein-Uhlenbeck moments") {
  const Grid g(1, 8.0, 129, 1.0, 11);
  const PathEnsemble ens =
      euler_maruyama(ou(g), InitialLaw::point_mass(Point::Constant(1, 1.0)), {.n_paths = 20000, .dt = 1e-3, .report_every = 100, .seed = 3});
  double m = 0.0, v = 0.0;
  for (Index p = 0; p < ens.n_paths(); ++p) m += ens.state(p, 10)[0];
  m /= ens.n_paths();
  for (Index p = 0; p < ens.n_paths(); ++p) v += std::pow(ens.state(p, 10)[0] - m, 2);
  v /= ens.n_paths() - 1;
  const double mean = std::exp(-1.0), var = 1.0 - std::exp(-2.0);
  CHECK(std::abs(m - mean) < 4.0 * std::sqrt(var / ens.n_paths()) + 2e-3);
  CHECK(std::abs(v - var) < 0.03);
}

TEST_CASE("ensembles do not depend on the thread count and share random numbers across sizes") {
  const Grid g(2, 4.0, 33, 1.0, 5);
  Point c = Point::Zero(2);
  const auto coeffs = constant_coefficients(g, c, 1.0);
  const auto law = InitialLaw::gaussian(Point::Zero(2), 0.5);
  setenv("SSDE_THREADS", "1", 1);
  const PathEnsemble one = euler_maruyama(coeffs, law, {.n_paths = 64, .dt = 0.01, .report_every = 5, .seed = 9});
  setenv("SSDE_THREADS", "4", 1);
  const PathEnsemble four = euler_maruyama(coeffs, law, {.n_paths = 64, .dt = 0.01, .report_every = 5, .seed = 9});
  unsetenv("SSDE_THREADS");
  CHECK(one.paths == four.paths);
  const PathEnsemble half = euler_maruyama(coeffs, law, {.n_paths = 32, .dt = 0.01, .report_every = 5, .seed = 9});
  CHECK(half.paths == one.paths.topRows(32));
  const PathEnsemble other = euler_maruyama(coeffs, law, {.n_paths = 32, .dt = 0.01, .report_every = 5, .seed = 10});
  CHECK(other.paths != half.paths);
}

TEST_CASE("exits are recorded and later slots keep the first outside state") {
  const Grid g(1, 1.0, 17, 1.0, 5);
  const auto coeffs = constant_coefficients(g, Point::Constant(1, 3.0), 0.0);
  const PathEnsemble ens = euler_maruyama(coeffs, InitialLaw::point_mass(Point::Zero(1)), {.n_paths = 2, .dt = 0.01, .report_every = 10});
  CHECK(ens.exit_fraction() == 1.0);
  CHECK(ens.survivors() == 0);
  CHECK(ens.exit_step[0] == 34);  // 3 * 0.34 > 1 first at step 34
  CHECK(ens.alive_at(0, 3));
  CHECK_FALSE(ens.alive_at(0, 4));
  const double out = ens.state(0, 4)[0];
  CHECK(out > 1.0);
  for (int k = 4; k < ens.n_times(); ++k) CHECK(ens.state(0, k)[0] == out);
}

TEST_CASE("ensemble dump round trip") {
  const Grid g(2, 4.0, 33, 1.0, 5);
  const auto coeffs = constant_coefficients(g, Point::Zero(2), 1.0);
  const PathEnsemble ens = euler_maruyama(coeffs, InitialLaw::uniform(Point::Zero(2), 1.0), {.n_paths = 10, .dt = 0.01, .report_every = 10});
  const auto file = std::filesystem::temp_directory_path() / "ssde_test_ensemble.bin";
  save_ensemble(ens, file);
  const PathEnsemble back = load_ensemble(file);
  std::filesystem::remove(file);
  CHECK(back.paths == ens.paths);
  CHECK(back.times == ens.times);
  CHECK(back.exit_step == ens.exit_step);
  CHECK(back.seed == ens.seed);
}

TEST_CASE("initial laws") {
  const Grid g(1, 2.0, 33, 1.0, 5);
  CHECK(InitialLaw::point_mass(Point::Constant(1, -0.5)).first_moment(g) == 0.5);
  // Gaussian E|X| = s sqrt(2/pi) when truncation is negligible.
  CHECK(InitialLaw::gaussian(Point::Zero(1), 0.3).first_moment(g) ==
        doctest::Approx(0.3 * std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-8));
  CHECK(InitialLaw::uniform(Point::Zero(1), 1.0).first_moment(g) == doctest::Approx(0.5).epsilon(1e-10));
  const auto wide = InitialLaw::gaussian(Point::Zero(1), 5.0);
  for (Index p = 0; p < 500; ++p) CHECK(g.contains(wide.sample(4, p, g)));
  std::vector<Point> atoms{Point::Constant(1, 1.0), Point::Constant(1, -3.0)};
  const auto emp = InitialLaw::empirical(atoms);
  CHECK(emp.first_moment(g) == 2.0);
  const Point s = emp.sample(1, 0, g);
  CHECK((s[0] == 1.0 || s[0] == -3.0));
}

TEST_CASE("mollified sequence is the identity below one spacing") {
  const Grid g(1, 4.0, 33, 1.0, 3);
  const auto coeffs = ou(g);
  const CoefficientSet fine = mollified_sequence(coeffs, 10, 1.0);
  CHECK(fine.b1.values() == coeffs.b1.values());
  const CoefficientSet coarse = mollified_sequence(coeffs, 0, 1.0);
  CHECK(coarse.b1.values() != coeffs.b1.values());
  CHECK_THROWS_AS(mollified_sequence(coeffs, -1, 1.0), Error);
}

}
