#include "imcf/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss.hpp>

#include "imcf/errors.hpp"

namespace imcf {

namespace {

constexpr double kRadialPanel = 0.25;

double sum_weighted(const SphereGrid& grid, auto&& integrand) {
  const auto w = grid.weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i] * integrand(i);
  }
  return acc;
}

// int_{r_h}^{r} lambda'(t) lambda(t)^{n-1} dt by composite Gauss-Legendre.
double radial_weighted_volume(const AmbientSpace& space, double r) {
  const int n = space.dimension();
  const double lo = space.r_horizon();
  const int panels = std::max(1, static_cast<int>(std::ceil((r - lo) / kRadialPanel)));
  const double width = (r - lo) / panels;
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = lo + p * width;
    acc += boost::math::quadrature::gauss<double, 20>::integrate(
        [&](double t) {
          const Warp w = space.warp(t);
          return w.d1 * std::pow(w.lambda, n - 1);
        },
        a, a + width);
  }
  return acc;
}

}  // namespace

double Q_equality_value(int n) { return (n - 1) * std::pow(sphere_area(n), 1.0 / (n - 1)); }

double area(const StarGraph& graph, const GeometryFields& fields) {
  return sum_weighted(graph.grid(), [&](std::size_t i) { return fields.area_element[i]; });
}

double area(const StarGraph& graph) { return area(graph, geometry(graph)); }

double weighted_volume_closed_form(const StarGraph& graph) {
  const AmbientSpace& space = graph.ambient();
  const int n = space.dimension();
  const double s0n = std::pow(space.horizon_lambda(), n);
  return sum_weighted(graph.grid(), [&](std::size_t i) {
           return std::pow(space.lambda(graph.radii()[i]), n) - s0n;
         }) /
         n;
}

WeightedVolume weighted_volume(const StarGraph& graph) {
  WeightedVolume v;
  v.closed_form = weighted_volume_closed_form(graph);
  v.quadrature = sum_weighted(graph.grid(), [&](std::size_t i) {
    return radial_weighted_volume(graph.ambient(), graph.radii()[i]);
  });
  return v;
}

double weighted_H_integral(const StarGraph& graph, const GeometryFields& fields) {
  return sum_weighted(graph.grid(), [&](std::size_t i) {
    return fields.dlambda[i] * fields.mean_curvature[i] * fields.area_element[i];
  });
}

double weighted_H_integral(const StarGraph& graph) {
  return weighted_H_integral(graph, geometry(graph));
}

namespace {

double flux_identity_constant(const AmbientSpace& space) {
  const int n = space.dimension();
  return 0.5 * ((n - 2) * space.mass() + 2.0 * std::pow(space.horizon_lambda(), n)) *
         sphere_area(n);
}

}  // namespace

NormalFlux normal_flux(const StarGraph& graph, const GeometryFields& fields) {
  const int n = graph.ambient().dimension();
  NormalFlux result;
  result.flux = sum_weighted(graph.grid(), [&](std::size_t i) {
    return fields.flux_density[i] * fields.area_element[i];
  });
  result.residual =
      result.flux - n * weighted_volume_closed_form(graph) - flux_identity_constant(graph.ambient());
  return result;
}

NormalFlux normal_flux(const StarGraph& graph) { return normal_flux(graph, geometry(graph)); }

namespace {

double q_bracket(const AmbientSpace& space, double int_fH, double volume) {
  const int n = space.dimension();
  return int_fH - n * (n - 1) * volume +
         (n - 1) * std::pow(space.horizon_lambda(), n - 2) * sphere_area(n);
}

}  // namespace

double quantity_Q(const StarGraph& graph, const GeometryFields& fields) {
  const int n = graph.ambient().dimension();
  const double bracket =
      q_bracket(graph.ambient(), weighted_H_integral(graph, fields), weighted_volume_closed_form(graph));
  return std::pow(area(graph, fields), -static_cast<double>(n - 2) / (n - 1)) * bracket;
}

double quantity_Q(const StarGraph& graph) { return quantity_Q(graph, geometry(graph)); }

double minkowski_deficit(const StarGraph& graph, const GeometryFields& fields) {
  const AmbientSpace& space = graph.ambient();
  const int n = space.dimension();
  const double exponent = static_cast<double>(n - 2) / (n - 1);
  const double sphere = sphere_area(n);
  const double horizon_area = std::pow(space.horizon_lambda(), n - 1) * sphere;
  const double lhs =
      weighted_H_integral(graph, fields) - n * (n - 1) * weighted_volume_closed_form(graph);
  const double rhs = (n - 1) * std::pow(sphere, 1.0 / (n - 1)) *
                     (std::pow(area(graph, fields), exponent) - std::pow(horizon_area, exponent));
  return lhs - rhs;
}

double minkowski_deficit(const StarGraph& graph) {
  return minkowski_deficit(graph, geometry(graph));
}

double hyperbolic_deficit(const StarGraph& graph, const GeometryFields& fields) {
  const AmbientSpace& space = graph.ambient();
  if (space.mass() != 0.0) {
    throw DomainError("hyperbolic_deficit is defined for m = 0 only");
  }
  const int n = space.dimension();
  const double lhs = sum_weighted(graph.grid(), [&](std::size_t i) {
    return (fields.dlambda[i] * fields.mean_curvature[i] - (n - 1) * fields.flux_density[i]) *
           fields.area_element[i];
  });
  const double rhs = (n - 1) * std::pow(sphere_area(n), 1.0 / (n - 1)) *
                     std::pow(area(graph, fields), static_cast<double>(n - 2) / (n - 1));
  return lhs - rhs;
}

double hyperbolic_deficit(const StarGraph& graph) {
  return hyperbolic_deficit(graph, geometry(graph));
}

double brendle_gap(const StarGraph& graph, const GeometryFields& fields) {
  const AmbientSpace& space = graph.ambient();
  const int n = space.dimension();
  const MeanConvexity convexity = mean_convexity_check(fields);
  if (!convexity.mean_convex) {
    throw DomainError("brendle_gap requires a mean convex surface");
  }
  const double lhs = (n - 1) * sum_weighted(graph.grid(), [&](std::size_t i) {
                       return fields.dlambda[i] / fields.mean_curvature[i] * fields.area_element[i];
                     });
  const double rhs = n * weighted_volume_closed_form(graph) +
                     std::pow(space.horizon_lambda(), n) * sphere_area(n);
  return lhs - rhs;
}

double brendle_gap(const StarGraph& graph) { return brendle_gap(graph, geometry(graph)); }

double sobolev_gap(const ScalarField& u) {
  const SphereGrid& grid = u.grid();
  const int n = grid.dimension();
  for (double value : u.values()) {
    if (!(value > 0.0)) {
      throw DomainError("sobolev_gap requires a positive function");
    }
  }
  const SphereDerivatives d = derivatives(u);
  const double dirichlet = sum_weighted(
      grid, [&](std::size_t i) { return std::pow(u[i], n - 4) * d.grad_sq[i]; });
  const double lower = sum_weighted(grid, [&](std::size_t i) { return std::pow(u[i], n - 2); });
  const double upper = sum_weighted(grid, [&](std::size_t i) { return std::pow(u[i], n - 1); });
  return 0.5 * dirichlet + lower -
         std::pow(sphere_area(n), 1.0 / (n - 1)) *
             std::pow(upper, static_cast<double>(n - 2) / (n - 1));
}

FunctionalReport evaluate_functionals(const StarGraph& graph, const GeometryFields& fields,
                                      bool with_radial_quadrature) {
  const AmbientSpace& space = graph.ambient();
  const int n = space.dimension();
  FunctionalReport report;
  report.area = area(graph, fields);
  report.int_fH = weighted_H_integral(graph, fields);
  if (with_radial_quadrature) {
    report.volume = weighted_volume(graph);
  } else {
    report.volume.closed_form = weighted_volume_closed_form(graph);
    report.volume.quadrature = std::numeric_limits<double>::quiet_NaN();
  }
  report.flux = normal_flux(graph, fields);
  report.divergence_residual = report.flux.residual;
  report.divergence_residual_quadrature =
      with_radial_quadrature ? report.flux.flux - n * report.volume.quadrature -
                                   flux_identity_constant(space)
                             : std::numeric_limits<double>::quiet_NaN();
  report.Q = std::pow(report.area, -static_cast<double>(n - 2) / (n - 1)) *
             q_bracket(space, report.int_fH, report.volume.closed_form);
  report.minkowski_deficit = minkowski_deficit(graph, fields);
  report.hyperbolic_deficit = space.mass() == 0.0 ? hyperbolic_deficit(graph, fields)
                                                  : std::numeric_limits<double>::quiet_NaN();
  report.brendle_gap = mean_convexity_check(fields).mean_convex
                           ? brendle_gap(graph, fields)
                           : std::numeric_limits<double>::quiet_NaN();
  return report;
}

}  // namespace imcf
