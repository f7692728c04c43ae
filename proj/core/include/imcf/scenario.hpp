#pragma once

// Plain-text scenario files: one `key = value` per line, '#' starts a comment.
//
//   name = perturbed_l2
//   n = 3
//   m = 2
//   surface = perturbed
//   s = 2
//   mode = 2
//   amplitude = 0.2
//   N = 128
//   t_end = 4
//
// surface = sphere     needs s
// surface = perturbed  needs s, mode, amplitude    lambda = s + a Y_mode (zonal harmonic, Y(pole) = 1)
// surface = offcenter  needs R, d (m = 0 only)    hyperbolic geodesic sphere, centre at distance d
// surface = random     needs s, seed              seeded sum of harmonics of degree 1..max_mode

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "imcf/flow.hpp"

namespace imcf {

enum class SurfaceKind { sphere, perturbed, offcenter, random };

struct SurfaceSpec {
  SurfaceKind kind = SurfaceKind::sphere;
  double s = 2.0;
  int mode = 2;
  double amplitude = 0.1;
  double R = 1.0;
  double d = 0.5;
  std::uint64_t seed = 0;
  int max_mode = 4;
  double max_amplitude = 0.3;
};

struct Scenario {
  std::string name = "scenario";
  int n = 3;
  double m = 0.0;
  SurfaceSpec surface;
  SphereBackend backend = SphereBackend::axisymmetric;
  int resolution = 64;
  FlowConfig flow;
  std::string output_dir = "imcf-out";
};

/// Parses and validates, including mean convexity of the initial surface.  Errors are
/// ConfigurationError with a "line L: field 'k': ..." diagnostic.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::string& path);

/// Semantic checks that do not need a file (also run by parse_scenario).
void validate_scenario(const Scenario& scenario);

std::string to_string(SurfaceKind kind);
std::string to_string(SphereBackend backend);

/// Normalised zonal harmonic C_l^{(n-2)/2}(x) / C_l^{(n-2)/2}(1).
double zonal_harmonic(int n, int degree, double x);

/// Sum of harmonics of degree 1..max_mode on the surface s + sum a_l Y_l(<x, e_l>).
struct RandomPerturbation {
  std::vector<double> coefficients;  // a_1 .. a_max_mode
  std::vector<std::array<double, 3>> axes;
  double scale = 1.0;  // shrink factor applied to reach mean convexity
};

/// Draws the seeded perturbation and shrinks it by 0.8 until the surface is mean convex with
/// H_min >= 0.5 H(coordinate sphere), judged on a fixed N = 128 reference grid.
RandomPerturbation random_perturbation(const Scenario& scenario, const AmbientPtr& ambient);

AmbientPtr build_ambient(const Scenario& scenario);
GridPtr build_grid(const Scenario& scenario);
StarGraph build_initial_surface(const Scenario& scenario, const AmbientPtr& ambient,
                                const GridPtr& grid);

}  // namespace imcf
