#pragma once

// AdS-Schwarzschild background written as a warped product dr^2 + lambda(r)^2 g_{S^{n-1}}.
//
// For m > 0 the warping function is tabulated starting at the horizon, where
// lambda(r_horizon) = s0 and lambda'(r_horizon) = 0.  The ODE lambda' = sqrt(1 + lambda^2 - m lambda^{2-n})
// is not Lipschitz there, so the tabulation integrates dr/du with s = s0 + u^2, which is smooth.
// Between nodes lambda is a quintic Hermite interpolant; lambda' and lambda'' always come from
// closed forms in lambda.  For m = 0 everything is sinh/cosh.

#include <memory>
#include <span>
#include <vector>

namespace imcf {

/// |S^{n-1}| = 2 pi^{n/2} / Gamma(n/2).
double sphere_area(int n);

/// Positive root s0 of 1 + s^2 - m s^{2-n} = 0; zero when m = 0.
/// Throws ConfigurationError for n < 3, m < 0 or a root finder that fails to converge.
double solve_horizon(int n, double m);

/// lambda and its first three r-derivatives at one radius.
struct Warp {
  double lambda = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
};

struct ProfileNode {
  double r = 0.0;
  double u = 0.0;  // sqrt(lambda - s0)
  double lambda = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class LambdaProfile {
 public:
  /// Tabulates lambda on [r_horizon, r_max] (r_horizon = 0 in the construction gauge) so that the
  /// interpolant's relative error is below `tol`.  Step refinement is bounded; failure to reach
  /// `tol` throws ConstructionError.
  static LambdaProfile build(int n, double m, double r_max, double tol = 1e-12);

  int dimension() const { return n_; }
  double mass() const { return m_; }
  double horizon_lambda() const { return s0_; }
  double r_min() const;
  double r_max() const;
  bool closed_form() const { return m_ == 0.0; }
  double gauge_shift() const { return shift_; }
  double step() const { return step_; }
  std::span<const ProfileNode> nodes() const { return nodes_; }

  Warp evaluate(double r) const;
  double lambda(double r) const { return evaluate(r).lambda; }

  /// Inverse of lambda(r); computed by quadrature of dr/du from the nearest node.
  double radius_of(double lambda) const;

  /// Closed forms as functions of lambda.
  double lapse(double lambda) const;
  double second_derivative(double lambda) const;
  double third_derivative(double lambda) const;

  /// Translates the r-axis by c (lambda_new(r) = lambda_old(r - c)).
  void shift(double c);

  /// Same profile tabulated further out; nodes shared with *this are bit-identical.
  LambdaProfile extended(double new_r_max) const;

  /// r(u) - r(u_from) by Gauss-Legendre quadrature of dr/du.
  double integrate_radius(double u_from, double u_to) const;

 private:
  LambdaProfile(int n, double m);
  static LambdaProfile tabulate(int n, double m, double raw_r_max, double step);
  double lapse_squared_over_offset(double offset) const;
  double drdu(double u) const;
  double max_midpoint_error() const;

  int n_ = 3;
  double m_ = 0.0;
  double s0_ = 0.0;
  double shift_ = 0.0;
  double step_ = 0.0;
  std::vector<ProfileNode> nodes_;
};

/// Shift c such that lambda(r - c) follows sinh(r) + (m/2n) sinh^{1-n}(r) at the far end; applied
/// to `profile` in place.  Requires lambda(r_max) > 1e3, otherwise throws DomainError.
double calibrate_gauge(LambdaProfile& profile);

class AmbientSpace {
 public:
  AmbientSpace(int n, double m, double r_max = 12.0, double tol = 1e-12);
  explicit AmbientSpace(LambdaProfile profile);

  int dimension() const { return profile_.dimension(); }
  double mass() const { return profile_.mass(); }
  double horizon_lambda() const { return profile_.horizon_lambda(); }
  double r_horizon() const { return profile_.r_min(); }
  double r_max() const { return profile_.r_max(); }
  const LambdaProfile& profile() const { return profile_; }

  Warp warp(double r) const { return profile_.evaluate(r); }
  double lambda(double r) const { return profile_.lambda(r); }
  double radius_of(double lambda) const { return profile_.radius_of(lambda); }

  /// Same space with the tabulated range extended to at least `r_max`.
  std::shared_ptr<const AmbientSpace> extended(double r_max) const;

 private:
  LambdaProfile profile_;
};

std::shared_ptr<const AmbientSpace> make_ambient(int n, double m, double r_max = 12.0);

/// f = lambda'(r) and its radial derivative lambda''(r).
struct StaticPotential {
  double value = 0.0;
  double radial_derivative = 0.0;
};

StaticPotential static_potential(const AmbientSpace& space, double r);

/// Curvature of the warped product in the (d_r, d_theta) splitting.
///   R(d_i, d_j, d_k, d_l) = tangential_coefficient * (s_ik s_jl - s_il s_jk)
///   R(d_i, d_r, d_j, d_r) = mixed_coefficient * s_ij
/// Ricci values are with respect to unit vectors.
struct CurvatureComponents {
  double tangential_coefficient = 0.0;
  double mixed_coefficient = 0.0;
  double sectional_tangential = 0.0;
  double sectional_mixed = 0.0;
  double ricci_radial = 0.0;
  double ricci_tangential = 0.0;
  double scalar = 0.0;
};

CurvatureComponents curvature_components(const AmbientSpace& space, double r);
CurvatureComponents curvature_from_warp(int n, const Warp& w);

/// |Laplacian f - n f| and the max-norm of (Laplacian f) g - Hess f + f Ric.
struct StaticResidual {
  double trace = 0.0;
  double tensor = 0.0;
};

StaticResidual static_residual(const AmbientSpace& space, double r);
StaticResidual static_residual_from_warp(int n, const Warp& w);

}  // namespace imcf
