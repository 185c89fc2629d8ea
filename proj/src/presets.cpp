#include <cmath>

#include "ssde/config.hpp"
#include "ssde/norms.hpp"

namespace ssde {

namespace {

// c x / max(|x|, h)^{1 + gamma}, cut off smoothly beyond |x| = 4.
SpaceTimeField powerlaw_drift(const Grid& grid, double strength, double gamma) {
  const double h = grid.spacing();
  return SpaceTimeField::from_function(grid, grid.dim(), [=](double, const Point& x) {
    const double r = x.norm();
    const double scale = strength * std::pow(std::max(r, h), -(1.0 + gamma)) * cutoff_profile(r / 2.0);
    return Value(scale * x);
  });
}

SpaceTimeField scalar_sigma(const Grid& grid, double s) {
  const int d = grid.dim();
  return SpaceTimeField::constant(grid, flatten(s * SmallMatrix::Identity(d, d)));
}

ExperimentConfig powerlaw_base() {
  ExperimentConfig c;
  c.dim = 2;
  c.half_width = 8.0;
  c.points_per_axis = 129;
  c.time_horizon = 1.0;
  c.time_steps = 33;
  c.exponent_p = 3.0;
  c.exponent_q = 8.0;
  c.ellipticity_K = 2.0;
  c.modulus = "lipschitz:0.25";
  c.initial_law = InitialLaw::Kind::Gaussian;
  c.initial_center = {0.0, 0.0};
  c.initial_scale = 0.5;
  c.level_min = 2;
  c.level_max = 6;
  c.mollifier_delta0 = 8.0;
  c.n_paths = 10000;
  c.seed = 2024;
  c.bins = 32;
  c.density_exponents = {{1.1, 2.0}, {1.2, 1.5}, {1.3, 1.2}};
  return c;
}

}  // namespace

std::vector<std::string> preset_names() {
  return {"brownian", "ou", "powerlaw-singular", "negative-control"};
}

ExperimentConfig preset_config(const std::string& name) {
  ExperimentConfig c;
  if (name == "brownian" || name == "ou") {
    c.dim = 1;
    c.half_width = 8.0;
    c.points_per_axis = 129;
    c.time_horizon = 1.0;
    c.time_steps = 11;
    c.exponent_p = 4.0;
    c.exponent_q = 4.0;
    c.ellipticity_K = name == "ou" ? 2.0 : 1.0;
    c.modulus = "constant";
    c.initial_law = InitialLaw::Kind::Point;
    c.initial_center = {0.0};
    c.bins = 64;
    c.density_exponents = {{1.5, 1.5}, {1.2, 3.0}, {3.0, 1.2}};
  } else if (name == "powerlaw-singular") {
    c = powerlaw_base();
  } else if (name == "negative-control") {
    c = powerlaw_base();
    c.force_lambda = 0.01;
    c.n_paths = 2000;
    c.level_min = 6;
    c.level_max = 6;
    c.transform_pairs = 2000;
  } else {
    fail(ErrorKind::Config, "unknown preset '" + name + "'");
  }
  c.preset = name;
  c.output_dir = "ssde-out/" + name;
  return c;
}

CoefficientSet preset_coefficients(const std::string& name, const Grid& grid) {
  const int d = grid.dim();
  CoefficientSet c{SpaceTimeField(grid, d), SpaceTimeField(grid, d), scalar_sigma(grid, 1.0), 1.0, "constant"};
  if (name == "brownian") return c;
  if (name == "ou") {
    c.b1 = SpaceTimeField::from_function(grid, d, [](double, const Point& x) { return Value(-x); });
    c.sigma = scalar_sigma(grid, std::sqrt(2.0));
    c.ellipticity_K = 2.0;
    return c;
  }
  if (name == "powerlaw-singular" || name == "negative-control") {
    c.b1 = SpaceTimeField::from_function(grid, d,
                                         [](double t, const Point& x) { return Value(-0.5 * (1.0 + t) * x); });
    c.b2 = powerlaw_drift(grid, name == "negative-control" ? 4.0 : 1.0, 0.5);
    c.sigma = SpaceTimeField::from_function(grid, d * d, [d](double, const Point& x) {
      return flatten((1.0 + 0.25 * std::cos(x[0])) * SmallMatrix::Identity(d, d));
    });
    c.ellipticity_K = 2.0;
    c.modulus_descriptor = "lipschitz:0.25";
    return c;
  }
  fail(ErrorKind::Config, "unknown preset '" + name + "'");
}

}  // namespace ssde
