#pragma once

// Scalar functionals of a star-shaped graph.  Every surface integral is a round-sphere quadrature
// with the area element lambda^{n-1} rho; constant terms use the closed form of |S^{n-1}|.

#include "imcf/graph_geometry.hpp"

namespace imcf {

struct WeightedVolume {
  double closed_form = 0.0;  // (1/n) int (lambda^n - s0^n) dvol_S
  double quadrature = 0.0;   // int int_{r_h}^{r} f lambda^{n-1} dr dvol_S
};

struct NormalFlux {
  double flux = 0.0;      // int <grad f, nu> dmu
  double residual = 0.0;  // flux - n int_Omega f - ((n-2) m + 2 s0^n) |S| / 2
};

struct FunctionalReport {
  double area = 0.0;
  double int_fH = 0.0;
  WeightedVolume volume;
  NormalFlux flux;
  double Q = 0.0;
  double minkowski_deficit = 0.0;
  double hyperbolic_deficit = 0.0;  // NaN unless m = 0
  double brendle_gap = 0.0;         // NaN unless mean convex
  double divergence_residual = 0.0;
  double divergence_residual_quadrature = 0.0;
};

double area(const StarGraph& graph, const GeometryFields& fields);
double area(const StarGraph& graph);

WeightedVolume weighted_volume(const StarGraph& graph);
double weighted_volume_closed_form(const StarGraph& graph);

double weighted_H_integral(const StarGraph& graph, const GeometryFields& fields);
double weighted_H_integral(const StarGraph& graph);

NormalFlux normal_flux(const StarGraph& graph, const GeometryFields& fields);
NormalFlux normal_flux(const StarGraph& graph);

double quantity_Q(const StarGraph& graph, const GeometryFields& fields);
double quantity_Q(const StarGraph& graph);

/// Value of Q on every coordinate sphere, for any mass: (n-1) |S^{n-1}|^{1/(n-1)}.
double Q_equality_value(int n);

double minkowski_deficit(const StarGraph& graph, const GeometryFields& fields);
double minkowski_deficit(const StarGraph& graph);

/// Throws DomainError for m > 0.
double hyperbolic_deficit(const StarGraph& graph, const GeometryFields& fields);
double hyperbolic_deficit(const StarGraph& graph);

/// (n-1) int f/H dmu - n int_Omega f - s0^n |S|.  Throws DomainError if H <= 0 somewhere.
double brendle_gap(const StarGraph& graph, const GeometryFields& fields);
double brendle_gap(const StarGraph& graph);

/// 1/2 int u^{n-4}|grad u|^2 + int u^{n-2} - |S|^{1/(n-1)} (int u^{n-1})^{(n-2)/(n-1)}.
/// Throws DomainError for a non-positive u.
double sobolev_gap(const ScalarField& u);

FunctionalReport evaluate_functionals(const StarGraph& graph, const GeometryFields& fields,
                                      bool with_radial_quadrature = false);

}  // namespace imcf
