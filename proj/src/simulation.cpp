#include "ssde/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>

#include "ssde/field_io.hpp"
#include "ssde/mollify.hpp"
#include "ssde/parallel.hpp"
#include "ssde/quadrature.hpp"

namespace ssde {

InitialLaw InitialLaw::point_mass(const Point& x) {
  return InitialLaw{.kind = Kind::Point, .center = x};
}

InitialLaw InitialLaw::gaussian(const Point& mean, double stddev) {
  require(stddev > 0.0, ErrorKind::Parameter, "Gaussian initial law needs a positive scale");
  return InitialLaw{.kind = Kind::Gaussian, .center = mean, .scale = stddev};
}

InitialLaw InitialLaw::uniform(const Point& center, double half_width) {
  require(half_width > 0.0, ErrorKind::Parameter, "uniform initial law needs a positive width");
  return InitialLaw{.kind = Kind::Uniform, .center = center, .scale = half_width};
}

InitialLaw InitialLaw::empirical(std::vector<Point> atoms) {
  require(!atoms.empty(), ErrorKind::Parameter, "empirical initial law needs samples");
  for (const Point& a : atoms) {
    require(a.size() == atoms.front().size() && a.allFinite(), ErrorKind::Data,
            "empirical initial samples must be finite and of one dimension");
  }
  return InitialLaw{.kind = Kind::Empirical, .center = atoms.front(), .samples = std::move(atoms)};
}

int InitialLaw::dim() const { return static_cast<int>(center.size()); }

std::string to_string(InitialLaw::Kind kind) {
  switch (kind) {
    case InitialLaw::Kind::Point: return "point";
    case InitialLaw::Kind::Gaussian: return "gaussian";
    case InitialLaw::Kind::Uniform: return "uniform";
    case InitialLaw::Kind::Empirical: return "empirical";
  }
  return "unknown";
}

Point InitialLaw::sample(std::uint64_t seed, Index path, const Grid& box) const {
  const int d = dim();
  PhiloxStream rng(seed, static_cast<std::uint64_t>(path));
  switch (kind) {
    case Kind::Point:
      return center;
    case Kind::Gaussian:
      for (int attempt = 0; attempt < 1000; ++attempt) {
        Point x(d);
        for (int a = 0; a < d; ++a) x[a] = center[a] + scale * rng.normal();
        if (box.contains(x)) return x;
      }
      fail(ErrorKind::Simulation, "Gaussian initial law has almost no mass in the box");
    case Kind::Uniform: {
      Point x(d);
      for (int a = 0; a < d; ++a) x[a] = center[a] + scale * (2.0 * rng.uniform() - 1.0);
      return x;
    }
    case Kind::Empirical: {
      const auto n = samples.size();
      const auto i = std::min(n - 1, static_cast<std::size_t>(rng.uniform() * n));
      return samples[i];
    }
  }
  return center;
}

double InitialLaw::expectation(const std::function<double(const Point&)>& fn, const Grid& box) const {
  const int d = dim();
  switch (kind) {
    case Kind::Point:
      return fn(center);
    case Kind::Empirical: {
      double s = 0.0;
      for (const Point& a : samples) s += fn(a);
      return s / static_cast<double>(samples.size());
    }
    case Kind::Uniform: {
      const Point lo = center.array() - scale;
      const Point hi = center.array() + scale;
      const double vol = std::pow(2.0 * scale, d);
      return integrate_box(lo, hi, fn) / vol;
    }
    case Kind::Gaussian: {
      // Ratio of integrals over the box, restricted to +-10 standard deviations.
      const double L = box.half_width();
      Point lo(d), hi(d);
      for (int a = 0; a < d; ++a) {
        lo[a] = std::max(-L, center[a] - 10.0 * scale);
        hi[a] = std::min(L, center[a] + 10.0 * scale);
      }
      const int panels = d == 3 ? 12 : 24;
      auto density = [&](const Point& x) {
        return std::exp(-0.5 * (x - center).squaredNorm() / (scale * scale));
      };
      const double mass = integrate_box(lo, hi, density, panels);
      const double moment =
          integrate_box(lo, hi, [&](const Point& x) { return fn(x) * density(x); }, panels);
      return moment / mass;
    }
  }
  return 0.0;
}

double InitialLaw::first_moment(const Grid& box) const {
  return expectation([](const Point& x) { return x.norm(); }, box);
}

int step_count(const Grid& grid, const SimulationOptions& o) {
  require(o.dt > 0.0 && o.report_every >= 1 && o.n_paths >= 1, ErrorKind::Parameter,
          "simulation needs dt > 0, report_every >= 1 and at least one path");
  const double ratio = grid.time_horizon() / o.dt;
  const auto steps = static_cast<int>(std::llround(ratio));
  require(steps >= 1 && std::abs(ratio - steps) <= 1e-9 * ratio, ErrorKind::Parameter,
          "dt must divide the time horizon");
  require(steps % o.report_every == 0, ErrorKind::Parameter,
          "report_every must divide the number of steps");
  return steps;
}

RowMatrix PathEnsemble::path_matrix(Index path) const {
  RowMatrix m(n_times(), dim);
  for (int k = 0; k < n_times(); ++k) m.row(k) = state(path, k).transpose();
  return m;
}

double PathEnsemble::exit_fraction() const {
  return n_paths() == 0 ? 0.0
                        : static_cast<double>(n_paths() - survivors()) / static_cast<double>(n_paths());
}

Index PathEnsemble::survivors() const {
  return std::count(exit_step.begin(), exit_step.end(), std::int64_t{-1});
}

PathEnsemble euler_maruyama(const CoefficientSet& coeffs, const InitialLaw& mu0,
                            const SimulationOptions& o, int level) {
  check_shapes(coeffs);
  const Grid& g = coeffs.grid();
  const int d = g.dim();
  require(mu0.dim() == d, ErrorKind::Parameter, "initial law dimension does not match the grid");
  const int steps = step_count(g, o);
  PathEnsemble ens{.dim = d, .level = level, .dt = o.dt, .report_every = o.report_every, .seed = o.seed};
  const int n_times = steps / o.report_every + 1;
  ens.times.resize(n_times);
  for (int j = 0; j < n_times; ++j) ens.times[j] = j * o.report_every * o.dt;
  ens.paths.resize(o.n_paths, static_cast<Index>(n_times) * d);
  ens.exit_step.assign(o.n_paths, -1);

  parallel_for(static_cast<std::size_t>(o.n_paths), [&](std::size_t begin, std::size_t end) {
    for (std::size_t p = begin; p < end; ++p) {
      const auto path = static_cast<Index>(p);
      const Point x0 = mu0.sample(o.seed, path, g);
      require(g.contains(x0), ErrorKind::Simulation, "initial state outside the box");
      ens.paths.row(path).head(d) = x0.transpose();
      Point last = x0;
      const std::int64_t exit = simulate_path(
          coeffs, x0, path, steps, o.dt, o.seed, [&](const EulerStep& s) {
            last = s.next;
            const int k = s.step + 1;
            if (k % o.report_every == 0) {
              ens.paths.row(path).segment(static_cast<Index>(k / o.report_every) * d, d) =
                  s.next.transpose();
            }
          });
      ens.exit_step[path] = exit;
      if (exit >= 0) {
        // Later report slots keep the first state outside the box.
        for (int j = static_cast<int>((exit + o.report_every - 1) / o.report_every); j < n_times; ++j) {
          ens.paths.row(path).segment(static_cast<Index>(j) * d, d) = last.transpose();
        }
      }
    }
  });
  return ens;
}

CoefficientSet mollified_sequence(const CoefficientSet& coeffs, int n, double delta0) {
  require(n >= 0, ErrorKind::Parameter, "mollification level must be >= 0");
  require(delta0 > 0.0, ErrorKind::Parameter, "mollification scale must be positive");
  const double delta = std::ldexp(delta0, -n);
  if (delta < coeffs.grid().spacing()) return coeffs;
  return CoefficientSet{mollify(coeffs.b1, delta), mollify(coeffs.b2, delta),
                        mollify(coeffs.sigma, delta), coeffs.ellipticity_K,
                        coeffs.modulus_descriptor};
}

namespace {
constexpr char kEnsembleMagic[8] = {'S', 'S', 'D', 'E', 'E', 'N', 'S', '1'};
}

void save_ensemble(const PathEnsemble& ens, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), ErrorKind::Io, "cannot open " + path.string());
  out.write(kEnsembleMagic, 8);
  io::put_u32(out, static_cast<std::uint32_t>(ens.dim));
  io::put_u32(out, static_cast<std::uint32_t>(ens.level));
  io::put_u32(out, static_cast<std::uint32_t>(ens.report_every));
  io::put_u32(out, static_cast<std::uint32_t>(ens.n_times()));
  io::put_u64(out, static_cast<std::uint64_t>(ens.n_paths()));
  io::put_u64(out, ens.seed);
  io::put_f64(out, ens.dt);
  for (double t : ens.times) io::put_f64(out, t);
  for (std::int64_t e : ens.exit_step) io::put_u64(out, static_cast<std::uint64_t>(e));
  for (Index p = 0; p < ens.n_paths(); ++p)
    for (Index c = 0; c < ens.paths.cols(); ++c) io::put_f64(out, ens.paths(p, c));
  require(static_cast<bool>(out), ErrorKind::Io, "failed writing " + path.string());
}

PathEnsemble load_ensemble(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(static_cast<bool>(in), ErrorKind::Io, "cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  require(in && std::equal(magic, magic + 8, kEnsembleMagic), ErrorKind::Data,
          "not an ensemble file: " + path.string());
  PathEnsemble ens;
  ens.dim = static_cast<int>(io::get_u32(in));
  ens.level = static_cast<int>(io::get_u32(in));
  ens.report_every = static_cast<int>(io::get_u32(in));
  const auto n_times = io::get_u32(in);
  const auto n_paths = static_cast<Index>(io::get_u64(in));
  ens.seed = io::get_u64(in);
  ens.dt = io::get_f64(in);
  require(ens.dim >= 1 && ens.dim <= kMaxDim && n_times >= 1, ErrorKind::Data,
          "corrupt ensemble header");
  ens.times.resize(n_times);
  for (auto& t : ens.times) t = io::get_f64(in);
  ens.exit_step.resize(n_paths);
  for (auto& e : ens.exit_step) e = static_cast<std::int64_t>(io::get_u64(in));
  ens.paths.resize(n_paths, static_cast<Index>(n_times) * ens.dim);
  for (Index p = 0; p < n_paths; ++p)
    for (Index c = 0; c < ens.paths.cols(); ++c) ens.paths(p, c) = io::get_f64(in);
  return ens;
}

}  // namespace ssde
