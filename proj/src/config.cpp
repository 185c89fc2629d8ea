#include "ssde/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "ssde/decomposition.hpp"
#include "ssde/field_io.hpp"
#include "ssde/norms.hpp"

namespace ssde {

Grid ExperimentConfig::grid() const {
  return Grid(dim, half_width, points_per_axis, time_horizon, time_steps);
}

SimulationOptions ExperimentConfig::simulation() const {
  return SimulationOptions{.n_paths = n_paths, .dt = dt, .report_every = report_every, .seed = seed};
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* what) {
  fail(ErrorKind::Config, "key '" + key + "': cannot read '" + value + "' as " + what);
}

double to_real(const std::string& key, const std::string& v) {
  if (v == "inf" || v == "infinity") return kInf;
  try {
    const double x = io::parse_real(v);
    if (!std::isfinite(x)) bad_value(key, v, "a real number");
    return x;
  } catch (const Error&) {
    bad_value(key, v, "a real number");
  }
}

long long to_integer(const std::string& key, const std::string& v) {
  long long x = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad_value(key, v, "an integer");
  return x;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v, "a boolean");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(trim(item));
  return parts;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"preset", [](auto& c, auto&, auto& v) { c = preset_config(v); }},
      {"dim", [](auto& c, auto& k, auto& v) { c.dim = static_cast<int>(to_integer(k, v)); }},
      {"half_width", [](auto& c, auto& k, auto& v) { c.half_width = to_real(k, v); }},
      {"points_per_axis",
       [](auto& c, auto& k, auto& v) { c.points_per_axis = static_cast<int>(to_integer(k, v)); }},
      {"time_horizon", [](auto& c, auto& k, auto& v) { c.time_horizon = to_real(k, v); }},
      {"time_steps",
       [](auto& c, auto& k, auto& v) { c.time_steps = static_cast<int>(to_integer(k, v)); }},
      {"split",
       [](auto& c, auto& k, auto& v) {
         if (v == "direct") c.split = SplitMode::Direct;
         else if (v == "exponents") c.split = SplitMode::Exponents;
         else bad_value(k, v, "'direct' or 'exponents'");
       }},
      {"exponent_p", [](auto& c, auto& k, auto& v) { c.exponent_p = to_real(k, v); }},
      {"exponent_q", [](auto& c, auto& k, auto& v) { c.exponent_q = to_real(k, v); }},
      {"uniformly_local", [](auto& c, auto& k, auto& v) { c.uniformly_local = to_bool(k, v); }},
      {"b1_file", [](auto& c, auto&, auto& v) { c.b1_file = v; }},
      {"b2_file", [](auto& c, auto&, auto& v) { c.b2_file = v; }},
      {"sigma_file", [](auto& c, auto&, auto& v) { c.sigma_file = v; }},
      {"drift_file", [](auto& c, auto&, auto& v) { c.drift_file = v; }},
      {"ellipticity_K", [](auto& c, auto& k, auto& v) { c.ellipticity_K = to_real(k, v); }},
      {"modulus", [](auto& c, auto&, auto& v) { c.modulus = v; }},
      {"initial_law",
       [](auto& c, auto& k, auto& v) {
         if (v == "point") c.initial_law = InitialLaw::Kind::Point;
         else if (v == "gaussian") c.initial_law = InitialLaw::Kind::Gaussian;
         else if (v == "uniform") c.initial_law = InitialLaw::Kind::Uniform;
         else if (v == "empirical") c.initial_law = InitialLaw::Kind::Empirical;
         else bad_value(k, v, "an initial law kind");
       }},
      {"initial_center",
       [](auto& c, auto& k, auto& v) {
         c.initial_center.clear();
         for (const auto& part : split(v, ',')) c.initial_center.push_back(to_real(k, part));
       }},
      {"initial_scale", [](auto& c, auto& k, auto& v) { c.initial_scale = to_real(k, v); }},
      {"initial_file", [](auto& c, auto&, auto& v) { c.initial_file = v; }},
      {"levels",
       [](auto& c, auto& k, auto& v) {
         const auto dots = v.find("..");
         if (dots == std::string::npos) {
           c.level_min = c.level_max = static_cast<int>(to_integer(k, v));
         } else {
           c.level_min = static_cast<int>(to_integer(k, trim(v.substr(0, dots))));
           c.level_max = static_cast<int>(to_integer(k, trim(v.substr(dots + 2))));
         }
       }},
      {"mollifier_delta0", [](auto& c, auto& k, auto& v) { c.mollifier_delta0 = to_real(k, v); }},
      {"n_paths", [](auto& c, auto& k, auto& v) { c.n_paths = to_integer(k, v); }},
      {"dt", [](auto& c, auto& k, auto& v) { c.dt = to_real(k, v); }},
      {"report_every",
       [](auto& c, auto& k, auto& v) { c.report_every = static_cast<int>(to_integer(k, v)); }},
      {"seed",
       [](auto& c, auto& k, auto& v) { c.seed = static_cast<std::uint64_t>(to_integer(k, v)); }},
      {"lambda0", [](auto& c, auto& k, auto& v) { c.lambda0 = to_real(k, v); }},
      {"force_lambda",
       [](auto& c, auto& k, auto& v) {
         if (v == "none") c.force_lambda.reset();
         else c.force_lambda = to_real(k, v);
       }},
      {"transform_pairs", [](auto& c, auto& k, auto& v) { c.transform_pairs = to_integer(k, v); }},
      {"bins", [](auto& c, auto& k, auto& v) { c.bins = static_cast<int>(to_integer(k, v)); }},
      {"density_exponents",
       [](auto& c, auto& k, auto& v) {
         c.density_exponents.clear();
         for (const auto& item : split(v, ',')) {
           const auto parts = split(item, ':');
           if (parts.size() != 2) bad_value(k, item, "a p:q pair");
           c.density_exponents.emplace_back(to_real(k, parts[0]), to_real(k, parts[1]));
         }
       }},
      {"output_dir", [](auto& c, auto&, auto& v) { c.output_dir = v; }},
  };
  return table;
}

}  // namespace

void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  require(it != setters().end(), ErrorKind::Config, "unknown configuration key '" + key + "'");
  it->second(config, key, value);
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& [k, _] : setters()) keys.push_back(k);
  return keys;
}

ExperimentConfig parse_config(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> pairs;
  std::set<std::string> seen;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, ErrorKind::Config,
            "line " + std::to_string(number) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    require(setters().count(key) > 0, ErrorKind::Config,
            "line " + std::to_string(number) + ": unknown configuration key '" + key + "'");
    require(seen.insert(key).second, ErrorKind::Config,
            "line " + std::to_string(number) + ": duplicate key '" + key + "'");
    pairs.emplace_back(key, value);
  }
  ExperimentConfig config;
  // The preset supplies defaults, so it is applied before everything else.
  for (const auto& [k, v] : pairs)
    if (k == "preset") apply_setting(config, k, v);
  for (const auto& [k, v] : pairs)
    if (k != "preset") apply_setting(config, k, v);
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::Config, "cannot open configuration " + path.string());
  return parse_config(in);
}

namespace {

bool has_files(const ExperimentConfig& c) {
  return !c.sigma_file.empty() || !c.b1_file.empty() || !c.b2_file.empty() || !c.drift_file.empty();
}

SpaceTimeField load_on(const std::string& file, const Grid& grid, int codim) {
  SpaceTimeField f = load_field(file);
  require(f.grid() == grid, ErrorKind::Config, "field " + file + " does not match the configured grid");
  require(f.codim() == codim, ErrorKind::Config, "field " + file + " has the wrong number of components");
  return f;
}

}  // namespace

CoefficientSet build_coefficients(const ExperimentConfig& c) {
  const Grid grid = c.grid();
  const int d = c.dim;
  CoefficientSet coeffs{SpaceTimeField(grid, d), SpaceTimeField(grid, d), SpaceTimeField(grid, d * d),
                        c.ellipticity_K, c.modulus};
  if (!c.preset.empty() && !has_files(c)) {
    coeffs = preset_coefficients(c.preset, grid);
    coeffs.ellipticity_K = c.ellipticity_K;
    coeffs.modulus_descriptor = c.modulus;
  } else {
    require(!c.sigma_file.empty(), ErrorKind::Config, "sigma_file is required without a preset");
    coeffs.sigma = load_on(c.sigma_file, grid, d * d);
    if (!c.b1_file.empty()) coeffs.b1 = load_on(c.b1_file, grid, d);
    if (!c.b2_file.empty()) coeffs.b2 = load_on(c.b2_file, grid, d);
  }
  if (c.split == SplitMode::Exponents) {
    const SpaceTimeField drift = c.drift_file.empty() ? combine(1.0, coeffs.b1, 1.0, coeffs.b2)
                                                      : load_on(c.drift_file, grid, d);
    DecompositionResult r = decompose(drift, c.exponent_p, c.exponent_q, c.uniformly_local);
    coeffs.b1 = std::move(r.f_le);
    coeffs.b2 = std::move(r.f_gt);
  }
  return coeffs;
}

InitialLaw build_initial_law(const ExperimentConfig& c) {
  Point center = Point::Zero(c.dim);
  if (!c.initial_center.empty()) {
    require(static_cast<int>(c.initial_center.size()) == c.dim, ErrorKind::Config,
            "initial_center has the wrong number of coordinates");
    for (int a = 0; a < c.dim; ++a) center[a] = c.initial_center[a];
  }
  switch (c.initial_law) {
    case InitialLaw::Kind::Point: return InitialLaw::point_mass(center);
    case InitialLaw::Kind::Gaussian: return InitialLaw::gaussian(center, c.initial_scale);
    case InitialLaw::Kind::Uniform: return InitialLaw::uniform(center, c.initial_scale);
    case InitialLaw::Kind::Empirical: {
      std::ifstream in(c.initial_file);
      require(static_cast<bool>(in), ErrorKind::Config, "cannot open initial_file " + c.initial_file);
      std::vector<Point> atoms;
      std::string line;
      while (std::getline(in, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto parts = split(line, ',');
        require(static_cast<int>(parts.size()) == c.dim, ErrorKind::Config,
                "initial_file rows must have one value per dimension");
        Point x(c.dim);
        for (int a = 0; a < c.dim; ++a) x[a] = to_real("initial_file", parts[a]);
        atoms.push_back(x);
      }
      return InitialLaw::empirical(std::move(atoms));
    }
  }
  return InitialLaw::point_mass(center);
}

std::vector<ConfigIssue> validate(const ExperimentConfig& c) {
  std::vector<ConfigIssue> issues;
  auto issue = [&](std::string code, std::string message) {
    issues.push_back({std::move(code), std::move(message)});
  };
  auto guarded = [&](const std::string& code, const std::function<void()>& check) {
    try {
      check();
    } catch (const Error& e) {
      issue(code, e.what());
    }
  };

  bool grid_ok = true;
  guarded("grid.invalid", [&] { (void)c.grid(); });
  grid_ok = issues.empty();

  if (c.exponent_p < 1.0 || c.exponent_q < 1.0) {
    issue("exponents.range", "exponent_p and exponent_q must be set and >= 1");
  } else if (c.exponent_p == kInf && c.exponent_q == kInf) {
    issue("exponents.degenerate", "p = q = inf leaves epsilon undefined");
  } else if (1.0 / c.exponent_q + c.dim / c.exponent_p >= 1.0) {
    issue("exponents.weaker", "exponents must satisfy 1/q + d/p < 1 strictly (got " +
                                  io::format_real(1.0 / c.exponent_q + c.dim / c.exponent_p) + ")");
  } else if (c.split == SplitMode::Exponents && c.exponent_q == kInf) {
    issue("exponents.q_infinite", "q = inf cannot drive a split; use the direct split");
  }

  if (c.preset.empty() && c.sigma_file.empty()) issue("coefficients.missing", "no preset and no sigma_file");
  for (const auto* f : {&c.b1_file, &c.b2_file, &c.sigma_file, &c.drift_file}) {
    if (!f->empty() && !std::filesystem::exists(*f)) issue("files.missing", "file not found: " + *f);
  }
  if (c.ellipticity_K <= 0.0) issue("ellipticity.constant", "ellipticity_K must be positive");

  if (grid_ok && issues.empty()) {
    try {
      const CoefficientSet coeffs = build_coefficients(c);
      const EllipticityReport rep = check_ellipticity(coeffs.sigma, c.ellipticity_K);
      if (!rep.ok) {
        const Point x = coeffs.grid().node_position(rep.worst_node);
        std::string where;
        for (Index a = 0; a < x.size(); ++a) where += (a ? "," : "") + io::format_real(x[a]);
        issue("ellipticity.violated",
              "sigma violates K^-1|xi|^2 <= |sigma^T xi|^2 <= K|xi|^2 at time index " +
                  std::to_string(rep.worst_time_index) + ", node " + std::to_string(rep.worst_node) +
                  " (x = " + where + "), singular value range [" +
                  io::format_real(std::sqrt(rep.min_singular_sq)) + ", " +
                  io::format_real(std::sqrt(rep.max_singular_sq)) + "]");
      }
      for (int k = 0; k < coeffs.grid().time_steps(); ++k) {
        if (!std::isfinite(linear_growth_envelope(coeffs.grid(), coeffs.b1.slice(k)))) {
          issue("envelope.infinite", "b1 linear-growth envelope is not finite");
          break;
        }
      }
    } catch (const Error& e) {
      issue("coefficients.load", e.what());
    }
  }

  if (grid_ok) guarded("simulation.steps", [&] { (void)step_count(c.grid(), c.simulation()); });
  if (c.n_paths < 1) issue("simulation.paths", "n_paths must be positive");
  if (c.level_min < 0 || c.level_max < c.level_min) issue("levels.order", "levels must read n0..n1 with 0 <= n0 <= n1");
  if (!(c.mollifier_delta0 > 0.0) || c.mollifier_delta0 > c.half_width)
    issue("mollifier.scale", "mollifier_delta0 must lie in (0, half_width]");
  if (c.lambda0 <= 0.0) issue("lambda.initial", "lambda0 must be positive");
  if (c.force_lambda && *c.force_lambda < 0.0) issue("lambda.forced", "force_lambda must be >= 0");
  if (c.bins < 8) issue("density.bins", "bins must be at least 8");
  if (c.transform_pairs < 1) issue("transform.pairs", "transform_pairs must be positive");
  for (const auto& [p, q] : c.density_exponents) {
    if (!(p > 1.0 && q > 1.0 && p < kInf && q < kInf) || !(1.0 / q + c.dim / p > c.dim)) {
      issue("density.exponents", "density exponents (" + io::format_real(p) + ", " + io::format_real(q) +
                                     ") must lie in (1, inf) with 1/q + d/p > d");
    }
  }

  if (static_cast<int>(c.initial_center.size()) != c.dim && !c.initial_center.empty())
    issue("initial.center", "initial_center has the wrong number of coordinates");
  if ((c.initial_law == InitialLaw::Kind::Gaussian || c.initial_law == InitialLaw::Kind::Uniform) &&
      c.initial_scale <= 0.0)
    issue("initial.scale", "initial_scale must be positive");
  if (c.initial_law == InitialLaw::Kind::Empirical && !std::filesystem::exists(c.initial_file))
    issue("initial.file", "initial_file not found: " + c.initial_file);
  if (grid_ok && issues.empty()) {
    guarded("initial.moment", [&] {
      const InitialLaw law = build_initial_law(c);
      if (!std::isfinite(law.first_moment(c.grid()))) fail(ErrorKind::Config, "E|X_0| is not finite");
    });
  }
  return issues;
}

}  // namespace ssde
