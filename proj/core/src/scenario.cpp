#include "imcf/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <sstream>

#include <boost/math/special_functions/gegenbauer.hpp>

#include "imcf/errors.hpp"

namespace imcf {

namespace {

const std::set<std::string, std::less<>> kKnownKeys = {
    "name", "n",        "m",             "surface", "s",      "mode",   "amplitude",
    "R",    "d",        "seed",          "max_mode", "max_amplitude", "backend", "N",
    "t_end", "cfl",     "max_dt",        "cadence", "h_min_floor", "output_dir"};

constexpr int kReferenceResolution = 128;
constexpr double kShrink = 0.8;
constexpr double kConvexityMargin = 0.5;
constexpr int kMaxShrinks = 80;

struct Entry {
  std::string value;
  int line = 0;
};

using Lines = std::map<std::string, int, std::less<>>;

[[noreturn]] void field_error(const Lines& lines, std::string_view key, const std::string& what) {
  std::ostringstream os;
  if (const auto it = lines.find(key); it != lines.end() && it->second > 0) {
    os << "line " << it->second << ": ";
  }
  os << "field '" << key << "': " << what;
  throw ConfigurationError(os.str());
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::map<std::string, Entry, std::less<>>& entries, const Lines& lines,
               std::string_view key) {
  const std::string& text = entries.find(key)->second.value;
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    field_error(lines, key, "invalid value '" + text + "'");
  }
  return value;
}

std::string number(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

void require_positive(const Lines& lines, std::string_view key, double value) {
  if (!std::isfinite(value) || !(value > 0.0)) {
    field_error(lines, key, "must be finite and > 0, got " + number(value));
  }
}

// Point on S^2 for the latlong backend.
std::array<double, 3> unit_point(const SphereGrid& grid, std::size_t node) {
  const double xi = grid.polar_angle(node);
  const double psi = grid.azimuth(node);
  return {std::sin(xi) * std::cos(psi), std::sin(xi) * std::sin(psi), std::cos(xi)};
}

std::vector<double> random_lambda(const Scenario& sc, const RandomPerturbation& p,
                                  const SphereGrid& grid) {
  std::vector<double> lambda(grid.size(), sc.surface.s);
  const bool axisymmetric = grid.backend() == SphereBackend::axisymmetric;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::array<double, 3> x = axisymmetric
                                        ? std::array<double, 3>{0.0, 0.0, std::cos(grid.polar_angle(i))}
                                        : unit_point(grid, i);
    for (std::size_t l = 0; l < p.coefficients.size(); ++l) {
      const auto& e = p.axes[l];
      const double c = axisymmetric ? x[2] : x[0] * e[0] + x[1] * e[1] + x[2] * e[2];
      lambda[i] += p.scale * p.coefficients[l] * zonal_harmonic(sc.n, static_cast<int>(l) + 1, c);
    }
  }
  return lambda;
}

StarGraph graph_from_lambda(const AmbientPtr& ambient, const GridPtr& grid,
                            const std::vector<double>& lambda) {
  std::vector<double> radii(lambda.size());
  for (std::size_t i = 0; i < lambda.size(); ++i) {
    if (!(lambda[i] > ambient->horizon_lambda())) {
      throw DomainError("initial surface reaches the horizon");
    }
    radii[i] = ambient->radius_of(lambda[i]);
  }
  return StarGraph(ambient, grid, std::move(radii));
}

double sphere_mean_curvature(const AmbientSpace& ambient, double s) {
  const int n = ambient.dimension();
  const double m = ambient.mass();
  return (n - 1) * std::sqrt(1.0 + s * s - m * std::pow(s, 2 - n)) / s;
}

// Largest lambda the initial surface can reach.
double lambda_bound(const Scenario& sc) {
  switch (sc.surface.kind) {
    case SurfaceKind::sphere:
      return sc.surface.s;
    case SurfaceKind::perturbed:
      return sc.surface.s + sc.surface.amplitude;
    case SurfaceKind::random:
      return sc.surface.s + sc.surface.max_amplitude;
    case SurfaceKind::offcenter:
      return std::sinh(sc.surface.R + sc.surface.d);
  }
  return sc.surface.s;
}

void validate_with_lines(const Scenario& sc, const Lines& lines) {
  if (sc.n < 3 || sc.n > 12) {
    field_error(lines, "n", "must be an integer in [3, 12], got " + std::to_string(sc.n));
  }
  if (!std::isfinite(sc.m) || sc.m < 0.0) {
    field_error(lines, "m", "must be finite and >= 0, got " + number(sc.m));
  }
  if (sc.resolution < 8) {
    field_error(lines, "N", "must be >= 8, got " + std::to_string(sc.resolution));
  }
  if (sc.backend == SphereBackend::latlong && sc.n != 3) {
    field_error(lines, "backend", "latlong requires n = 3");
  }
  require_positive(lines, "t_end", sc.flow.t_end);
  require_positive(lines, "cfl", sc.flow.cfl_factor);
  require_positive(lines, "max_dt", sc.flow.max_dt);
  require_positive(lines, "cadence", sc.flow.monitor_cadence);
  require_positive(lines, "h_min_floor", sc.flow.h_min_floor);
  if (sc.name.empty() || sc.name.find_first_of("/\\") != std::string::npos) {
    field_error(lines, "name", "must be non-empty and contain no path separators");
  }

  const SurfaceSpec& surf = sc.surface;
  if (surf.kind == SurfaceKind::offcenter) {
    if (sc.m != 0.0) {
      field_error(lines, "m", "surface = offcenter requires m = 0");
    }
    require_positive(lines, "R", surf.R);
    if (!std::isfinite(surf.d) || surf.d < 0.0 || !(surf.d < surf.R)) {
      field_error(lines, "d", "must satisfy 0 <= d < R, got " + number(surf.d));
    }
    return;
  }
  const double s0 = solve_horizon(sc.n, sc.m);
  if (!std::isfinite(surf.s) || !(surf.s > s0)) {
    field_error(lines, "s", "must exceed the horizon value " + number(s0) + ", got " +
                                number(surf.s));
  }
  if (surf.kind == SurfaceKind::perturbed) {
    if (surf.mode < 0 || surf.mode > 64) {
      field_error(lines, "mode", "must be in [0, 64], got " + std::to_string(surf.mode));
    }
    if (!std::isfinite(surf.amplitude) || surf.amplitude < 0.0) {
      field_error(lines, "amplitude", "must be finite and >= 0, got " + number(surf.amplitude));
    }
  }
  if (surf.kind == SurfaceKind::random) {
    if (surf.max_mode < 1 || surf.max_mode > 8) {
      field_error(lines, "max_mode", "must be in [1, 8], got " + std::to_string(surf.max_mode));
    }
    require_positive(lines, "max_amplitude", surf.max_amplitude);
  }
}

void check_initial_surface(const Scenario& sc, const Lines& lines) {
  const std::string_view key = sc.surface.kind == SurfaceKind::perturbed ? "amplitude" : "surface";
  try {
    const AmbientPtr ambient = build_ambient(sc);
    const GridPtr grid = build_grid(sc);
    const StarGraph graph = build_initial_surface(sc, ambient, grid);
    const MeanConvexity mc = mean_convexity_check(geometry(graph));
    if (!(mc.min_mean_curvature > sc.flow.h_min_floor)) {
      field_error(lines, key,
                  "initial surface is not mean convex (H_min = " + number(mc.min_mean_curvature) +
                      ")");
    }
  } catch (const DomainError& e) {
    field_error(lines, key, std::string("initial surface is not admissible: ") + e.what());
  }
}

}  // namespace

std::string to_string(SurfaceKind kind) {
  switch (kind) {
    case SurfaceKind::sphere:
      return "sphere";
    case SurfaceKind::perturbed:
      return "perturbed";
    case SurfaceKind::offcenter:
      return "offcenter";
    case SurfaceKind::random:
      return "random";
  }
  return "unknown";
}

std::string to_string(SphereBackend backend) {
  return backend == SphereBackend::axisymmetric ? "axisymmetric" : "latlong";
}

double zonal_harmonic(int n, int degree, double x) {
  const double alpha = 0.5 * (n - 2);
  return boost::math::gegenbauer(static_cast<unsigned>(degree), alpha, x) /
         boost::math::gegenbauer(static_cast<unsigned>(degree), alpha, 1.0);
}

AmbientPtr build_ambient(const Scenario& sc) {
  // Room for the initial surface plus the growth r ~ t / (n - 1); evolve() extends further.
  const double r_needed = std::asinh(lambda_bound(sc)) + sc.flow.t_end / (sc.n - 1) + 4.0;
  return make_ambient(sc.n, sc.m, std::max(12.0, r_needed));
}

GridPtr build_grid(const Scenario& sc) { return make_grid(sc.backend, sc.n, sc.resolution); }

RandomPerturbation random_perturbation(const Scenario& sc, const AmbientPtr& ambient) {
  std::mt19937_64 engine(sc.surface.seed);
  // Explicit 53-bit conversion keeps draws identical across standard libraries.
  const auto uniform = [&engine] { return static_cast<double>(engine() >> 11) * 0x1.0p-53; };

  RandomPerturbation p;
  const auto modes = static_cast<std::size_t>(sc.surface.max_mode);
  p.coefficients.resize(modes);
  p.axes.resize(modes);
  double total = 0.0;
  for (std::size_t l = 0; l < modes; ++l) {
    p.coefficients[l] = 2.0 * uniform() - 1.0;
    const double z = 2.0 * uniform() - 1.0;
    const double phi = 2.0 * std::numbers::pi * uniform();
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    p.axes[l] = {rho * std::cos(phi), rho * std::sin(phi), z};
    total += std::abs(p.coefficients[l]);
  }
  const double amplitude = sc.surface.max_amplitude * (0.5 + 0.5 * uniform());
  for (double& c : p.coefficients) {
    c *= total > 0.0 ? amplitude / total : 0.0;
  }

  const GridPtr reference = make_grid(sc.backend, sc.n, kReferenceResolution);
  const double threshold = kConvexityMargin * sphere_mean_curvature(*ambient, sc.surface.s);
  for (int attempt = 0; attempt < kMaxShrinks; ++attempt) {
    try {
      const StarGraph g = graph_from_lambda(ambient, reference, random_lambda(sc, p, *reference));
      if (mean_convexity_check(geometry(g)).min_mean_curvature >= threshold) {
        return p;
      }
    } catch (const DomainError&) {
      // Touches the horizon: shrink further.
    }
    p.scale *= kShrink;
  }
  throw ConfigurationError("random surface: no mean convex amplitude found for seed " +
                           std::to_string(sc.surface.seed));
}

StarGraph build_initial_surface(const Scenario& sc, const AmbientPtr& ambient,
                                const GridPtr& grid) {
  switch (sc.surface.kind) {
    case SurfaceKind::sphere:
      return coordinate_sphere(ambient, grid, sc.surface.s);
    case SurfaceKind::offcenter:
      return offcenter_sphere(ambient, sc.surface.R, sc.surface.d, grid);
    case SurfaceKind::perturbed: {
      std::vector<double> lambda(grid->size());
      for (std::size_t i = 0; i < lambda.size(); ++i) {
        lambda[i] = sc.surface.s + sc.surface.amplitude *
                                       zonal_harmonic(sc.n, sc.surface.mode,
                                                      std::cos(grid->polar_angle(i)));
      }
      return graph_from_lambda(ambient, grid, lambda);
    }
    case SurfaceKind::random: {
      const RandomPerturbation p = random_perturbation(sc, ambient);
      return graph_from_lambda(ambient, grid, random_lambda(sc, p, *grid));
    }
  }
  throw ConfigurationError("unknown surface kind");
}

void validate_scenario(const Scenario& scenario) {
  const Lines none;
  validate_with_lines(scenario, none);
  check_initial_surface(scenario, none);
}

Scenario parse_scenario(std::string_view text) {
  std::map<std::string, Entry, std::less<>> entries;
  Lines lines;
  int line_no = 0;
  while (!text.empty()) {
    ++line_no;
    const auto eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigurationError("line " + std::to_string(line_no) + ": expected key = value, got '" +
                               std::string(line) + "'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (!kKnownKeys.contains(key)) {
      throw ConfigurationError("line " + std::to_string(line_no) + ": unknown field '" + key + "'");
    }
    if (entries.contains(key)) {
      throw ConfigurationError("line " + std::to_string(line_no) + ": field '" + key +
                               "' given twice (first on line " + std::to_string(lines[key]) + ")");
    }
    if (value.empty()) {
      throw ConfigurationError("line " + std::to_string(line_no) + ": field '" + key +
                               "' has no value");
    }
    entries[key] = {value, line_no};
    lines[key] = line_no;
  }

  const auto has = [&](std::string_view key) { return entries.contains(key); };
  const auto require = [&](std::string_view key, std::string_view why) {
    if (!has(key)) {
      throw ConfigurationError("missing required field '" + std::string(key) + "'" +
                               std::string(why));
    }
  };
  for (const char* key : {"n", "m", "N", "t_end"}) {
    require(key, "");
  }

  Scenario sc;
  if (has("name")) sc.name = entries["name"].value;
  if (has("output_dir")) sc.output_dir = entries["output_dir"].value;
  sc.n = parse_number<int>(entries, lines, "n");
  sc.m = parse_number<double>(entries, lines, "m");
  sc.resolution = parse_number<int>(entries, lines, "N");
  sc.flow.t_end = parse_number<double>(entries, lines, "t_end");
  if (has("cfl")) sc.flow.cfl_factor = parse_number<double>(entries, lines, "cfl");
  if (has("max_dt")) sc.flow.max_dt = parse_number<double>(entries, lines, "max_dt");
  if (has("cadence")) sc.flow.monitor_cadence = parse_number<double>(entries, lines, "cadence");
  if (has("h_min_floor")) sc.flow.h_min_floor = parse_number<double>(entries, lines, "h_min_floor");

  if (has("backend")) {
    const std::string& b = entries["backend"].value;
    if (b == "axisymmetric") {
      sc.backend = SphereBackend::axisymmetric;
    } else if (b == "latlong") {
      sc.backend = SphereBackend::latlong;
    } else {
      field_error(lines, "backend", "expected axisymmetric or latlong, got '" + b + "'");
    }
  }

  if (has("surface")) {
    const std::string& kind = entries["surface"].value;
    if (kind == "sphere") {
      sc.surface.kind = SurfaceKind::sphere;
    } else if (kind == "perturbed") {
      sc.surface.kind = SurfaceKind::perturbed;
    } else if (kind == "offcenter") {
      sc.surface.kind = SurfaceKind::offcenter;
    } else if (kind == "random") {
      sc.surface.kind = SurfaceKind::random;
    } else {
      field_error(lines, "surface",
                  "expected sphere, perturbed, offcenter or random, got '" + kind + "'");
    }
  }
  const std::string for_kind = " for surface = " + to_string(sc.surface.kind);
  switch (sc.surface.kind) {
    case SurfaceKind::sphere:
      require("s", for_kind);
      break;
    case SurfaceKind::perturbed:
      require("s", for_kind);
      require("mode", for_kind);
      require("amplitude", for_kind);
      break;
    case SurfaceKind::offcenter:
      require("R", for_kind);
      require("d", for_kind);
      break;
    case SurfaceKind::random:
      require("s", for_kind);
      require("seed", for_kind);
      break;
  }
  if (has("s")) sc.surface.s = parse_number<double>(entries, lines, "s");
  if (has("mode")) sc.surface.mode = parse_number<int>(entries, lines, "mode");
  if (has("amplitude")) sc.surface.amplitude = parse_number<double>(entries, lines, "amplitude");
  if (has("R")) sc.surface.R = parse_number<double>(entries, lines, "R");
  if (has("d")) sc.surface.d = parse_number<double>(entries, lines, "d");
  if (has("seed")) sc.surface.seed = parse_number<std::uint64_t>(entries, lines, "seed");
  if (has("max_mode")) sc.surface.max_mode = parse_number<int>(entries, lines, "max_mode");
  if (has("max_amplitude")) {
    sc.surface.max_amplitude = parse_number<double>(entries, lines, "max_amplitude");
  }

  validate_with_lines(sc, lines);
  check_initial_surface(sc, lines);
  return sc;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigurationError("cannot open scenario file '" + path + "'");
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse_scenario(buffer.str());
  } catch (const ConfigurationError& e) {
    throw ConfigurationError(path + ": " + e.what());
  }
}

}  // namespace imcf
