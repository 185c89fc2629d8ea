#include <doctest.h>

#include <random>
#include <sstream>

#include "ssde/coefficients.hpp"
#include "ssde/error.hpp"
#include "ssde/field_io.hpp"
#include "ssde/mollify.hpp"

using namespace ssde;

TEST_SUITE("grid_field") {

TEST_CASE("grid geometry and node numbering") {
  const Grid g(2, 2.0, 9, 1.0, 5);
  CHECK(g.spacing() == doctest::Approx(0.5));
  CHECK(g.time_step() == doctest::Approx(0.25));
  CHECK(g.node_count() == 81);
  // First axis runs fastest.
  CHECK(g.node_index({1, 0, 0}) == 1);
  CHECK(g.node_index({0, 1, 0}) == 9);
  const Point x = g.node_position(10);
  CHECK(x[0] == doctest::Approx(-1.5));
  CHECK(x[1] == doctest::Approx(-1.5));
  for (Index n = 0; n < g.node_count(); ++n) CHECK(g.node_index(g.multi_index(n)) == n);
}

TEST_CASE("grid rejects bad parameters") {
  CHECK_THROWS_AS(Grid(0, 1.0, 9, 1.0, 3), Error);
  CHECK_THROWS_AS(Grid(4, 1.0, 9, 1.0, 3), Error);
  CHECK_THROWS_AS(Grid(1, -1.0, 9, 1.0, 3), Error);
  CHECK_THROWS_AS(Grid(1, 1.0, 4, 1.0, 3), Error);
  CHECK_THROWS_AS(Grid(1, 1.0, 9, 0.0, 3), Error);
  CHECK_THROWS_AS(Grid(1, 1.0, 9, 1.0, 1), Error);
}

TEST_CASE("locate outside the box is a domain error") {
  const Grid g(1, 1.0, 9, 1.0, 3);
  try {
    (void)locate(g, 0.5, Point::Constant(1, 1.5));
    FAIL("expected a domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Domain);
  }
  CHECK_THROWS_AS((void)locate(g, 1.5, Point::Zero(1)), Error);
}

TEST_CASE("multilinear interpolation reproduces affine functions") {
  const Grid g(3, 1.0, 9, 1.0, 3);
  const auto f = SpaceTimeField::from_function(g, 1, [](double, const Point& x) {
    Value v(1);
    v[0] = 1.0 + 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2];
    return v;
  });
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int i = 0; i < 200; ++i) {
    Point x(3);
    x << u(rng), u(rng), u(rng);
    CHECK(f.evaluate(0.3, x)[0] == doctest::Approx(1.0 + 2.0 * x[0] - 3.0 * x[1] + 0.5 * x[2]).epsilon(1e-12));
  }
}

TEST_CASE("time interpolation is piecewise constant from the left") {
  const Grid g(1, 1.0, 9, 1.0, 3);
  const auto f = SpaceTimeField::from_function(g, 1, [](double t, const Point&) {
    Value v(1);
    v[0] = t;
    return v;
  });
  CHECK(f.evaluate(0.49, Point::Zero(1))[0] == 0.0);
  CHECK(f.evaluate(0.5, Point::Zero(1))[0] == 0.5);
  CHECK(f.evaluate(0.99, Point::Zero(1))[0] == 0.5);
  CHECK(f.evaluate(1.0, Point::Zero(1))[0] == 1.0);
}

TEST_CASE("non-finite values are rejected") {
  const Grid g(1, 1.0, 9, 1.0, 2);
  RowMatrix v = RowMatrix::Zero(18, 1);
  v(3, 0) = std::nan("");
  CHECK_THROWS_AS(SpaceTimeField(g, 1, v), Error);
}

TEST_CASE("CSV and binary round trips are bit exact") {
  const Grid g(2, 1.5, 9, 2.0, 4);
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1e3);
  RowMatrix v(4 * 81, 3);
  for (Index i = 0; i < v.size(); ++i) v.data()[i] = n(rng) * std::pow(10.0, static_cast<double>(i % 40) - 20.0);
  const SpaceTimeField f(g, 3, v);

  std::stringstream csv;
  write_field_csv(f, csv);
  const SpaceTimeField a = read_field_csv(csv);
  CHECK(a.grid() == g);
  CHECK(a.values() == f.values());

  std::stringstream bin;
  write_field_binary(f, bin);
  const SpaceTimeField b = read_field_binary(bin);
  CHECK(b.values() == f.values());
}

TEST_CASE("malformed CSV is an io error") {
  std::stringstream bad("time_index,node_index,c0\n0,0,1\n");
  CHECK_THROWS_AS(read_field_csv(bad), Error);
  std::stringstream truncated("SSDEFLD1");
  CHECK_THROWS_AS(read_field_binary(truncated), Error);
}

TEST_CASE("ellipticity check reports the offending node") {
  const Grid g(2, 1.0, 9, 1.0, 3);
  const Index bad_node = 40;
  const auto sigma = SpaceTimeField::from_function(g, 4, [&](double t, const Point& x) {
    SmallMatrix m = SmallMatrix::Identity(2, 2);
    if (t > 0.4 && x.norm() < 1e-12) m(1, 1) = 0.0;  // zero singular value at the center
    return flatten(m);
  });
  const EllipticityReport r = check_ellipticity(sigma, 2.0);
  CHECK_FALSE(r.ok);
  CHECK(r.worst_time_index == 1);
  CHECK(r.worst_node == bad_node);
  CHECK(r.min_singular_sq == doctest::Approx(0.0));
  try {
    require_elliptic(sigma, 2.0);
    FAIL("expected an ellipticity error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Ellipticity);
    CHECK(std::string(e.what()).find("node 40") != std::string::npos);
  }
  CHECK(check_ellipticity(SpaceTimeField::constant(g, flatten(SmallMatrix::Identity(2, 2))), 1.0).ok);
}

TEST_CASE("mollifier preserves constants, bounds and becomes the identity below one spacing") {
  const Grid g(2, 2.0, 33, 1.0, 2);
  const auto c = SpaceTimeField::constant(g, Value::Constant(1, 3.5));
  const SpaceTimeField mc = mollify(c, 0.5);
  CHECK((mc.values().array() - 3.5).abs().maxCoeff() < 1e-13);

  const auto f = SpaceTimeField::from_function(g, 1, [](double, const Point& x) {
    Value v(1);
    v[0] = std::sin(3.0 * x[0]) * std::cos(2.0 * x[1]);
    return v;
  });
  const SpaceTimeField mf = mollify(f, 0.4);
  CHECK(mf.values().cwiseAbs().maxCoeff() <= f.values().cwiseAbs().maxCoeff() + 1e-14);
  CHECK(mollify(f, 0.5 * g.spacing()).values() == f.values());
  CHECK_THROWS_AS(mollify(f, 0.0), Error);
  CHECK_THROWS_AS(mollify(f, 3.0), Error);
}

}
