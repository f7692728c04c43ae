#include "imcf/graph_geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <boost/math/tools/toms748_solve.hpp>

#include "imcf/errors.hpp"

namespace imcf {

StarGraph::StarGraph(AmbientPtr ambient, GridPtr grid, std::vector<double> radii)
    : ambient_(std::move(ambient)), grid_(std::move(grid)), radii_(std::move(radii)) {
  if (!ambient_ || !grid_) {
    throw ConfigurationError("star graph: null ambient space or grid");
  }
  if (ambient_->dimension() != grid_->dimension()) {
    throw ConfigurationError("star graph: grid and ambient dimensions differ");
  }
  if (radii_.size() != grid_->size()) {
    throw ConfigurationError("star graph: radius count does not match grid size");
  }
  const double horizon = ambient_->r_horizon();
  for (std::size_t i = 0; i < radii_.size(); ++i) {
    if (!std::isfinite(radii_[i]) || !(radii_[i] > horizon)) {
      std::ostringstream os;
      os << "star graph: r = " << radii_[i] << " at node " << i
         << " does not lie strictly outside the horizon r = " << horizon;
      throw DomainError(os.str());
    }
  }
}

double StarGraph::min_radius() const { return *std::min_element(radii_.begin(), radii_.end()); }

double StarGraph::max_radius() const { return *std::max_element(radii_.begin(), radii_.end()); }

StarGraph StarGraph::with_ambient(AmbientPtr ambient) const {
  return StarGraph(std::move(ambient), grid_, radii_);
}

SphereDerivatives phi_derivatives(const StarGraph& graph) {
  SphereDerivatives d = derivatives(graph.grid(), graph.radii());
  const AmbientSpace& space = graph.ambient();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const Warp w = space.warp(graph.radii()[i]);
    const double inv = 1.0 / w.lambda;
    const double q = w.d1 * inv * inv;
    const double g1 = d.grad1[i];
    const double g2 = d.grad2[i];
    d.hess11[i] = d.hess11[i] * inv - q * g1 * g1;
    d.hess12[i] = d.hess12[i] * inv - q * g1 * g2;
    d.hess22[i] = d.hess22[i] * inv - q * g2 * g2;
    d.grad1[i] = g1 * inv;
    d.grad2[i] = g2 * inv;
  }
  d.finalize();
  return d;
}

GeometryFields geometry(const StarGraph& graph) {
  const int n = graph.ambient().dimension();
  const std::size_t count = graph.size();
  const SphereDerivatives phi = phi_derivatives(graph);

  GeometryFields g;
  g.multiplicity = phi.multiplicity;
  for (auto* v : {&g.lambda, &g.dlambda, &g.d2lambda, &g.rho, &g.shape11, &g.shape12, &g.shape21,
                  &g.shape22, &g.kappa1, &g.kappa2, &g.mean_curvature, &g.norm_A_sq,
                  &g.area_element, &g.flux_density}) {
    v->resize(count);
  }
  const bool axisymmetric = graph.grid().backend() == SphereBackend::axisymmetric;
  const double k = phi.multiplicity;

  for (std::size_t i = 0; i < count; ++i) {
    const Warp w = graph.ambient().warp(graph.radii()[i]);
    const double p1 = phi.grad1[i];
    const double p2 = phi.grad2[i];
    const double P11 = phi.hess11[i];
    const double P12 = phi.hess12[i];
    const double P22 = phi.hess22[i];
    const double rho2 = 1.0 + p1 * p1 + p2 * p2;
    const double rho = std::sqrt(rho2);

    // sigma-tilde = I - p p^T / rho^2 applied to Hess phi.
    const double M11 = 1.0 - p1 * p1 / rho2;
    const double M12 = -p1 * p2 / rho2;
    const double M22 = 1.0 - p2 * p2 / rho2;
    const double A11 = M11 * P11 + M12 * P12;
    const double A12 = M11 * P12 + M12 * P22;
    const double A21 = M12 * P11 + M22 * P12;
    const double A22 = M12 * P12 + M22 * P22;

    const double scale = 1.0 / (w.lambda * rho);
    const double S11 = (w.d1 - A11) * scale;
    const double S12 = -A12 * scale;
    const double S21 = -A21 * scale;
    const double S22 = (w.d1 - A22) * scale;

    const double contraction =
        P11 + k * P22 - (p1 * p1 * P11 + 2.0 * p1 * p2 * P12 + p2 * p2 * P22) / rho2;

    g.lambda[i] = w.lambda;
    g.dlambda[i] = w.d1;
    g.d2lambda[i] = w.d2;
    g.rho[i] = rho;
    g.shape11[i] = S11;
    g.shape12[i] = S12;
    g.shape21[i] = S21;
    g.shape22[i] = S22;
    g.mean_curvature[i] = ((n - 1) * w.d1 - contraction) * scale;
    g.norm_A_sq[i] = S11 * S11 + 2.0 * S12 * S21 + k * S22 * S22;
    if (axisymmetric) {
      g.kappa1[i] = S11;
      g.kappa2[i] = S22;
    } else {
      const double mean = 0.5 * (S11 + S22);
      const double disc = std::sqrt(std::max(0.0, 0.25 * (S11 - S22) * (S11 - S22) + S12 * S21));
      g.kappa1[i] = mean + disc;
      g.kappa2[i] = mean - disc;
    }
    g.area_element[i] = std::pow(w.lambda, n - 1) * rho;
    g.flux_density[i] = w.d2 / rho;
  }
  return g;
}

StarGraph coordinate_sphere(AmbientPtr ambient, GridPtr grid, double s) {
  const double r = ambient->radius_of(s);
  const std::size_t count = grid->size();
  return StarGraph(std::move(ambient), std::move(grid), std::vector<double>(count, r));
}

StarGraph offcenter_sphere(AmbientPtr ambient, double radius, double distance, GridPtr grid) {
  if (ambient->mass() != 0.0) {
    throw DomainError("offcenter_sphere: geodesic spheres are only available for m = 0");
  }
  if (!(radius > 0.0) || !(distance >= 0.0)) {
    throw DomainError("offcenter_sphere: need R > 0 and d >= 0");
  }
  if (!(distance < radius)) {
    throw DomainError("offcenter_sphere: the origin must lie strictly inside the sphere (d < R)");
  }
  const double origin = ambient->r_horizon();
  const double cosh_d = std::cosh(distance);
  const double sinh_d = std::sinh(distance);
  const double cosh_R = std::cosh(radius);

  std::vector<double> radii(grid->size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    const double c = std::cos(grid->polar_angle(i));
    // Hyperbolic law of cosines: cosh R = cosh r cosh d - sinh r sinh d cos(xi).
    auto law = [&](double r) { return cosh_d * std::cosh(r) - sinh_d * c * std::sinh(r) - cosh_R; };
    const double lo = radius - distance;
    const double hi = radius + distance;
    const double flo = law(lo);
    const double fhi = law(hi);
    double r = 0.0;
    if (flo >= 0.0) {
      r = lo;
    } else if (fhi <= 0.0) {
      r = hi;
    } else {
      std::uintmax_t iterations = 200;
      const auto [a, b] = boost::math::tools::toms748_solve(
          law, lo, hi, flo, fhi, boost::math::tools::eps_tolerance<double>(50), iterations);
      r = 0.5 * (a + b);
      if (iterations >= 200) {
        throw ConfigurationError("offcenter_sphere: root finder did not converge");
      }
    }
    radii[i] = origin + r;
  }
  return StarGraph(std::move(ambient), std::move(grid), std::move(radii));
}

MeanConvexity mean_convexity_check(const GeometryFields& fields) {
  MeanConvexity result;
  result.min_mean_curvature =
      *std::min_element(fields.mean_curvature.begin(), fields.mean_curvature.end());
  result.mean_convex = result.min_mean_curvature > 0.0;
  return result;
}

}  // namespace imcf
