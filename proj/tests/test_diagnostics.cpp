#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "ssde/diagnostics.hpp"
#include "ssde/error.hpp"

using namespace ssde;

namespace {

// One-dimensional ensemble with the given rows of states on equally spaced times in [0, 1].
PathEnsemble synthetic(const std::vector<std::vector<double>>& rows) {
  PathEnsemble e;
  e.dim = 1;
  e.report_every = 1;
  const int n = static_cast<int>(rows[0].size());
  e.dt = 1.0 / (n - 1);
  for (int k = 0; k < n; ++k) e.times.push_back(k * e.dt);
  e.paths = RowMatrix(static_cast<Index>(rows.size()), n);
  for (std::size_t p = 0; p < rows.size(); ++p)
    for (int k = 0; k < n; ++k) e.paths(static_cast<Index>(p), k) = rows[p][k];
  e.exit_step.assign(rows.size(), -1);
  return e;
}

CoefficientSet brownian(const Grid& g) {
  const int d = g.dim();
  return CoefficientSet{SpaceTimeField(g, d), SpaceTimeField(g, d),
                        SpaceTimeField::constant(g, flatten(SmallMatrix::Identity(d, d))), 1.0, ""};
}

}  // namespace

TEST_SUITE("diagnostics") {

TEST_CASE("W1 matches the sorted-sample oracle and handles unequal sizes") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> a(200), b(200);
    for (auto& v : a) v = n(rng);
    for (auto& v : b) v = 0.3 + 1.5 * n(rng);
    CHECK(wasserstein1(a, b) == doctest::Approx(oracle::w1_equal_size(a, b)).epsilon(1e-12));
  }
  CHECK(wasserstein1({0.0}, {2.0, 4.0}) == doctest::Approx(3.0));
  CHECK(wasserstein1({1.0, 2.0}, {1.0, 2.0}) == 0.0);
  CHECK_THROWS_AS(wasserstein1({}, {1.0}), Error);
}

TEST_CASE("energy distance is zero for equal samples and grows with a shift") {
  std::vector<Point> a, b, c;
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  for (int i = 0; i < 150; ++i) {
    Point x(2);
    x << n(rng), n(rng);
    a.push_back(x);
    b.push_back(x.array() + 0.5);
    c.push_back(x.array() + 2.0);
  }
  CHECK(energy_distance(a, a) == doctest::Approx(0.0).epsilon(1e-12));
  const double near = energy_distance(a, b);
  const double far = energy_distance(a, c);
  CHECK(near > 0.0);
  CHECK(far > near);
}

TEST_CASE("KS accepts the true law and rejects a shifted one") {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> n(0.0, 1.0);
  std::vector<double> x(5000);
  for (auto& v : x) v = n(rng);
  CHECK(ks_test(x, normal_cdf).p_value > 0.01);
  CHECK(ks_test(x, [](double y) { return normal_cdf(y - 0.2); }).p_value < 1e-6);
  // Statistic of a single sample at the median.
  CHECK(ks_test({0.0}, normal_cdf).statistic == doctest::Approx(0.5));
  CHECK(normal_cdf(0.0) == 0.5);
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-12));
}

TEST_CASE("marginal statistics") {
  const MarginalStats s = marginal_stats({1.0, 2.0, 3.0, 4.0});
  CHECK(s.n == 4);
  CHECK(s.mean == 2.5);
  CHECK(s.variance == doctest::Approx(5.0 / 3.0));
  CHECK(s.mean_se == doctest::Approx(std::sqrt(5.0 / 12.0)));
  CHECK(marginal_stats({7.0}).mean == 7.0);
}

TEST_CASE("Hoelder moment of a straight path") {
  // X_t = 0.25 + 0.5 t: sup |X| = 0.75 and [X]_gamma = 0.5 on [0, 1].
  std::vector<double> row;
  for (int k = 0; k <= 10; ++k) row.push_back(0.25 + 0.05 * k);
  PathEnsemble e = synthetic({row, row});
  e.exit_step[1] = 3;
  const MomentEstimate m = holder_moment_estimate(e, 0.3);
  CHECK(m.n_used == 1);
  CHECK(m.mean == doctest::Approx(1.25).epsilon(1e-12));
}

TEST_CASE("Hoelder moment seminorm agrees with brute force on a rough path") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 0.1);
  std::vector<double> row{0.0};
  for (int k = 1; k <= 40; ++k) row.push_back(row.back() + n(rng));
  const PathEnsemble e = synthetic({row});
  double sup = 0.0;
  for (double v : row) sup = std::max(sup, std::abs(v));
  const double expect = sup + oracle::holder_brute(e.times, row, 0.25);
  CHECK(holder_moment_estimate(e, 0.25).mean == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("uniform integrability table") {
  const PathEnsemble a = synthetic({{0.0, 1.0}, {0.0, 3.0}});
  const PathEnsemble b = synthetic({{0.0, 5.0}, {0.0, 0.5}});
  const IntegrabilityTable t = uniform_integrability_diagnostic({&a, &b}, {4.0, 0.75, 2.0});
  REQUIRE(t.rows.size() == 3);
  CHECK(t.rows[0].radius == 0.75);
  CHECK(t.rows[0].per_level[0] == doctest::Approx(2.0));
  CHECK(t.rows[0].per_level[1] == doctest::Approx(2.5));
  CHECK(t.rows[1].per_level[0] == doctest::Approx(1.5));
  CHECK(t.rows[2].per_level[0] == 0.0);
  CHECK(t.rows[2].sup == doctest::Approx(2.5));
  CHECK(t.nonincreasing);
  CHECK_THROWS_AS(uniform_integrability_diagnostic({&a}, {1.0, 2.0, 3.0}), Error);
}

TEST_CASE("law distances at probe times") {
  const PathEnsemble a = synthetic({{0.0, 0.0, 1.0}, {0.0, 0.0, 2.0}});
  const PathEnsemble b = synthetic({{0.0, 0.0, 1.5}, {0.0, 0.0, 2.5}});
  const auto d = convergence_in_law_diagnostic(a, b, {0.5, 1.0});
  REQUIRE(d.size() == 2);
  CHECK(d[0].w1[0] == 0.0);
  CHECK(d[1].w1[0] == doctest::Approx(0.5));
  CHECK(d[1].energy > 0.0);
  CHECK_THROWS_AS(convergence_in_law_diagnostic(a, b, {0.3}), Error);
}

TEST_CASE("weak identity holds path by path") {
  const Grid g(2, 6.0, 33, 1.0, 5);
  const WeakSolutionStats st =
      weak_solution_residual(brownian(g), InitialLaw::point_mass(Point::Zero(2)), {.n_paths = 200, .dt = 0.01, .report_every = 10});
  CHECK(st.paths == 200);
  CHECK(st.max_identity_residual <= 1e-12);
  CHECK(st.finite_integrals == st.survivors);
  CHECK(st.max_drift_integral == 0.0);
  CHECK(st.max_sigma_integral == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("drift ladder vanishes for equal coefficients") {
  const Grid g(1, 4.0, 33, 1.0, 5);
  const auto c = brownian(g);
  const PathEnsemble e = synthetic({{0.0, 0.5, 1.0}});
  const DriftResidual r = drift_residual_diagnostic(e, c, c, 2.0);
  CHECK(r.b1 == 0.0);
  CHECK(r.b2 == 0.0);
  CHECK_THROWS_AS(drift_residual_diagnostic(e, c, c, 0.0), Error);
}

}
