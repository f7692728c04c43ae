#pragma once

// Extrinsic geometry of a star-shaped hypersurface {(r(theta), theta)} in dr^2 + lambda(r)^2 g_S.
//
// Everything is expressed through phi = Phi(r) with Phi' = 1/lambda; phi itself is never formed,
// only its derivatives (grad phi = grad r / lambda, Hess phi = Hess r / lambda - lambda'/lambda^2
// dr (x) dr).  With rho = sqrt(1 + |grad phi|^2) the induced metric and second fundamental form are
//   g = lambda^2 (sigma + dphi dphi),  h = (lambda / rho) (lambda' (sigma + dphi dphi) - Hess phi),
// and the shape operator in the sigma-orthonormal frame is
//   S = (lambda' I - (I - p p^T / rho^2) Hess phi) / (lambda rho),  p = grad phi.
// The outward normal makes coordinate spheres have H > 0.

#include <memory>
#include <vector>

#include "imcf/ambient.hpp"
#include "imcf/sphere_calculus.hpp"

namespace imcf {

using AmbientPtr = std::shared_ptr<const AmbientSpace>;

class StarGraph {
 public:
  /// Throws DomainError when some r is not finite or does not lie strictly above the horizon.
  StarGraph(AmbientPtr ambient, GridPtr grid, std::vector<double> radii);

  const AmbientSpace& ambient() const { return *ambient_; }
  const AmbientPtr& ambient_ptr() const { return ambient_; }
  const SphereGrid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  const std::vector<double>& radii() const { return radii_; }
  std::size_t size() const { return radii_.size(); }

  double min_radius() const;
  double max_radius() const;

  /// Same radii over a different (typically extended) ambient space.
  StarGraph with_ambient(AmbientPtr ambient) const;

 private:
  AmbientPtr ambient_;
  GridPtr grid_;
  std::vector<double> radii_;
};

struct GeometryFields {
  int multiplicity = 1;  // frame directions carrying kappa2 / shape22
  std::vector<double> lambda;
  std::vector<double> dlambda;   // lambda' = f on the surface
  std::vector<double> d2lambda;  // lambda''
  std::vector<double> rho;
  std::vector<double> shape11, shape12, shape21, shape22;
  std::vector<double> kappa1;  // axisymmetric: polar direction; latlong: larger eigenvalue
  std::vector<double> kappa2;  // axisymmetric: azimuthal (multiplicity n - 2); latlong: smaller
  std::vector<double> mean_curvature;
  std::vector<double> norm_A_sq;
  std::vector<double> area_element;   // lambda^{n-1} rho per unit round measure
  std::vector<double> flux_density;   // <grad f, nu> = lambda'' / rho

  std::size_t size() const { return rho.size(); }
  double shape_trace(std::size_t i) const { return shape11[i] + multiplicity * shape22[i]; }
};

SphereDerivatives phi_derivatives(const StarGraph& graph);
GeometryFields geometry(const StarGraph& graph);

/// Coordinate sphere lambda = s.
StarGraph coordinate_sphere(AmbientPtr ambient, GridPtr grid, double s);

/// Geodesic sphere of radius R in hyperbolic space (m = 0) whose centre lies at distance d
/// from the origin in the direction xi = 0.  Throws DomainError if m > 0 or d >= R.
StarGraph offcenter_sphere(AmbientPtr ambient, double radius, double distance, GridPtr grid);

struct MeanConvexity {
  bool mean_convex = false;
  double min_mean_curvature = 0.0;
};

MeanConvexity mean_convexity_check(const GeometryFields& fields);

}  // namespace imcf
