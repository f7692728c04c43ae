#include "imcf/ambient.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "imcf/errors.hpp"

namespace imcf {

namespace {

constexpr double kCoarsestStep = 1.0 / 32.0;
constexpr double kFinestStep = 1.0 / 2048.0;

void check_dimension(int n) {
  if (n < 3) {
    throw ConfigurationError("ambient dimension n must be >= 3, got " + std::to_string(n));
  }
}

void check_mass(double m) {
  if (!std::isfinite(m) || m < 0.0) {
    std::ostringstream os;
    os << "mass m must be finite and >= 0, got " << m;
    throw ConfigurationError(os.str());
  }
}

// Quintic Hermite interpolation on one cell, t in [0, 1].
double hermite5(double t, double width, const ProfileNode& a, const ProfileNode& b) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double t4 = t3 * t;
  const double t5 = t4 * t;
  const double h00 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
  const double h10 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
  const double h20 = 0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5;
  const double h01 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
  const double h11 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
  const double h21 = 0.5 * t3 - t4 + 0.5 * t5;
  return h00 * a.lambda + width * h10 * a.d1 + width * width * h20 * a.d2 + h01 * b.lambda +
         width * h11 * b.d1 + width * width * h21 * b.d2;
}

}  // namespace

double sphere_area(int n) {
  if (n < 1) {
    throw ConfigurationError("sphere_area needs n >= 1");
  }
  const double half = 0.5 * n;
  return 2.0 * std::pow(std::numbers::pi, half) / std::tgamma(half);
}

double solve_horizon(int n, double m) {
  check_dimension(n);
  check_mass(m);
  if (m == 0.0) {
    return 0.0;
  }
  // s^{n-2} (1 + s^2 - m s^{2-n}) = s^{n-2} + s^n - m is increasing in s.
  auto poly = [n, m](double s) { return std::pow(s, n - 2) + std::pow(s, n) - m; };
  const double upper = std::min(std::pow(m, 1.0 / (n - 2)), std::pow(m, 1.0 / n));
  if (!(poly(upper) >= 0.0)) {
    throw ConfigurationError("horizon root is not bracketed");
  }
  if (poly(upper) == 0.0) {
    return upper;
  }
  std::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      poly, 0.0, upper, -m, poly(upper), boost::math::tools::eps_tolerance<double>(52),
      iterations);
  if (iterations >= 200) {
    throw ConfigurationError("horizon root finder did not converge");
  }
  double s = 0.5 * (lo + hi);
  // Newton polish on the unscaled equation.
  for (int k = 0; k < 4; ++k) {
    const double g = 1.0 + s * s - m * std::pow(s, 2 - n);
    const double dg = 2.0 * s + (n - 2) * m * std::pow(s, 1 - n);
    const double next = s - g / dg;
    if (!(next > 0.0)) {
      break;
    }
    s = next;
  }
  const double residual = 1.0 + s * s - m * std::pow(s, 2 - n);
  if (!std::isfinite(s) || std::abs(residual) > 1e-12 * std::max(1.0, s * s)) {
    throw ConfigurationError("horizon root finder did not reach the required residual");
  }
  return s;
}

// ---------------------------------------------------------------------------------------------
// LambdaProfile

LambdaProfile::LambdaProfile(int n, double m) : n_(n), m_(m), s0_(solve_horizon(n, m)) {}

double LambdaProfile::lapse_squared_over_offset(double offset) const {
  // G(s0 + d) / d where G(s) = 1 + s^2 - m s^{2-n}, using m s0^{2-n} = 1 + s0^2.
  if (offset == 0.0) {
    return 2.0 * s0_ + (1.0 + s0_ * s0_) * (n_ - 2) / s0_;
  }
  const double x = offset / s0_;
  const double tail = std::expm1((2 - n_) * std::log1p(x));
  return 2.0 * s0_ + offset - (1.0 + s0_ * s0_) * tail / offset;
}

double LambdaProfile::drdu(double u) const { return 2.0 / std::sqrt(lapse_squared_over_offset(u * u)); }

double LambdaProfile::integrate_radius(double u_from, double u_to) const {
  if (u_from == u_to) {
    return 0.0;
  }
  return boost::math::quadrature::gauss<double, 20>::integrate(
      [this](double u) { return drdu(u); }, u_from, u_to);
}

double LambdaProfile::lapse(double lambda) const {
  if (closed_form()) {
    return std::sqrt(1.0 + lambda * lambda);
  }
  const double offset = std::max(0.0, lambda - s0_);
  return std::sqrt(offset * lapse_squared_over_offset(offset));
}

double LambdaProfile::second_derivative(double lambda) const {
  if (closed_form()) {
    return lambda;
  }
  return lambda + 0.5 * m_ * (n_ - 2) * std::pow(lambda, 1 - n_);
}

double LambdaProfile::third_derivative(double lambda) const {
  // d/dr [lambda + (m(n-2)/2) lambda^{1-n}] = lambda' (1 + (m(n-2)(1-n)/2) lambda^{-n})
  const double d1 = lapse(lambda);
  if (closed_form()) {
    return d1;
  }
  return d1 * (1.0 + 0.5 * m_ * (n_ - 2) * (1 - n_) * std::pow(lambda, -n_));
}

LambdaProfile LambdaProfile::tabulate(int n, double m, double raw_r_max, double step) {
  LambdaProfile p(n, m);
  p.step_ = step;
  if (p.closed_form()) {
    return p;
  }
  auto make_node = [&p](double r, double u) {
    ProfileNode node;
    node.r = r;
    node.u = u;
    node.lambda = p.s0_ + u * u;
    node.d1 = u * std::sqrt(p.lapse_squared_over_offset(u * u));
    node.d2 = p.second_derivative(node.lambda);
    return node;
  };
  p.nodes_.push_back(make_node(0.0, 0.0));
  while (p.nodes_.back().r < raw_r_max) {
    const ProfileNode& last = p.nodes_.back();
    const double local_scale = std::sqrt(last.lambda / last.d2);
    const double dr = step * std::min(1.0, local_scale);
    const double target = last.r + dr;
    double u = last.u + dr / p.drdu(last.u);
    bool converged = false;
    for (int it = 0; it < 60; ++it) {
      const double mismatch = last.r + p.integrate_radius(last.u, u) - target;
      const double du = mismatch / p.drdu(u);
      u -= du;
      if (std::abs(du) <= 1e-14 * std::max(1.0, u)) {
        converged = true;
        break;
      }
    }
    if (!converged || !std::isfinite(u)) {
      throw ConstructionError("lambda profile: Newton iteration for node placement failed");
    }
    p.nodes_.push_back(make_node(target, u));
  }
  return p;
}

double LambdaProfile::max_midpoint_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < nodes_.size(); ++i) {
    const ProfileNode& a = nodes_[i];
    const ProfileNode& b = nodes_[i + 1];
    const double width = b.r - a.r;
    const double interpolated = hermite5(0.5, width, a, b);
    // Exact lambda at the midpoint: solve r(u) = r_mid from node a.
    const double target = 0.5 * width;
    double u = 0.5 * (a.u + b.u);
    for (int it = 0; it < 60; ++it) {
      const double du = (integrate_radius(a.u, u) - target) / drdu(u);
      u -= du;
      if (std::abs(du) <= 1e-14 * std::max(1.0, u)) {
        break;
      }
    }
    const double exact = s0_ + u * u;
    worst = std::max(worst, std::abs(interpolated - exact) / exact);
  }
  return worst;
}

LambdaProfile LambdaProfile::build(int n, double m, double r_max, double tol) {
  check_dimension(n);
  check_mass(m);
  if (!(r_max > 1.0)) {
    throw ConfigurationError("lambda profile: r_max must exceed r_horizon + 1");
  }
  if (m == 0.0) {
    return tabulate(n, m, r_max, 0.0);
  }
  double last_error = 0.0;
  for (double step = kCoarsestStep; step >= kFinestStep; step *= 0.5) {
    LambdaProfile p = tabulate(n, m, r_max, step);
    last_error = p.max_midpoint_error();
    if (last_error <= tol) {
      return p;
    }
  }
  std::ostringstream os;
  os << "lambda profile: relative interpolation error " << last_error
     << " exceeds tolerance " << tol << " at the finest step " << kFinestStep;
  throw ConstructionError(os.str());
}

LambdaProfile LambdaProfile::extended(double new_r_max) const {
  if (closed_form() || new_r_max <= r_max()) {
    return *this;
  }
  LambdaProfile p = tabulate(n_, m_, new_r_max - shift_, step_);
  p.shift(shift_);
  return p;
}

double LambdaProfile::r_min() const { return closed_form() ? shift_ : nodes_.front().r; }

double LambdaProfile::r_max() const {
  return closed_form() ? std::numeric_limits<double>::infinity() : nodes_.back().r;
}

void LambdaProfile::shift(double c) {
  shift_ += c;
  for (ProfileNode& node : nodes_) {
    node.r += c;
  }
}

Warp LambdaProfile::evaluate(double r) const {
  Warp w;
  if (closed_form()) {
    const double x = r - shift_;
    if (x < 0.0) {
      throw DomainError("radius below the origin of hyperbolic space");
    }
    w.lambda = std::sinh(x);
    w.d1 = std::cosh(x);
    w.d2 = w.lambda;
    w.d3 = w.d1;
    return w;
  }
  const double lo = nodes_.front().r;
  const double hi = nodes_.back().r;
  const double slack = 1e-12 * std::max(1.0, std::abs(hi));
  if (!(r >= lo - slack) || !(r <= hi + slack)) {
    std::ostringstream os;
    os << "radius " << r << " outside the tabulated range [" << lo << ", " << hi << "]";
    throw DomainError(os.str());
  }
  r = std::clamp(r, lo, hi);
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), r,
                             [](double value, const ProfileNode& node) { return value < node.r; });
  std::size_t i = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, nodes_.size() - 1) - 1;
  const ProfileNode& a = nodes_[i];
  const ProfileNode& b = nodes_[i + 1];
  const double width = b.r - a.r;
  const double t = (r - a.r) / width;
  w.lambda = std::max(s0_, hermite5(t, width, a, b));
  w.d1 = lapse(w.lambda);
  w.d2 = second_derivative(w.lambda);
  w.d3 = third_derivative(w.lambda);
  return w;
}

double LambdaProfile::radius_of(double lambda) const {
  if (closed_form()) {
    if (!(lambda >= 0.0)) {
      throw DomainError("lambda must be >= 0 in hyperbolic space");
    }
    return std::asinh(lambda) + shift_;
  }
  if (!(lambda >= s0_) || !(lambda <= nodes_.back().lambda)) {
    std::ostringstream os;
    os << "lambda " << lambda << " outside the tabulated range [" << s0_ << ", "
       << nodes_.back().lambda << "]";
    throw DomainError(os.str());
  }
  auto it = std::upper_bound(
      nodes_.begin(), nodes_.end(), lambda,
      [](double value, const ProfileNode& node) { return value < node.lambda; });
  std::size_t i = static_cast<std::size_t>(std::distance(nodes_.begin(), it));
  i = std::clamp<std::size_t>(i, 1, nodes_.size()) - 1;
  const ProfileNode& a = nodes_[i];
  return a.r + integrate_radius(a.u, std::sqrt(lambda - s0_));
}

double calibrate_gauge(LambdaProfile& profile) {
  if (profile.closed_form()) {
    const double c = -profile.gauge_shift();
    profile.shift(c);
    return c;
  }
  const ProfileNode& far = profile.nodes().back();
  if (!(far.lambda > 1e3)) {
    throw DomainError("calibrate_gauge: profile too short (needs lambda > 1e3 at r_max)");
  }
  const int n = profile.dimension();
  const double s = far.lambda;
  // r(s) = arsinh(s) - (m / 2n) s^{-n} + O(s^{-n-2}) in the normalized gauge.
  const double normalized = std::asinh(s) - profile.mass() / (2.0 * n) * std::pow(s, -n);
  const double c = normalized - far.r;
  profile.shift(c);
  return c;
}

// ---------------------------------------------------------------------------------------------
// AmbientSpace

AmbientSpace::AmbientSpace(int n, double m, double r_max, double tol)
    : profile_(LambdaProfile::build(n, m, r_max, tol)) {}

AmbientSpace::AmbientSpace(LambdaProfile profile) : profile_(std::move(profile)) {}

std::shared_ptr<const AmbientSpace> AmbientSpace::extended(double r_max) const {
  return std::make_shared<const AmbientSpace>(profile_.extended(r_max));
}

std::shared_ptr<const AmbientSpace> make_ambient(int n, double m, double r_max) {
  return std::make_shared<const AmbientSpace>(n, m, r_max);
}

StaticPotential static_potential(const AmbientSpace& space, double r) {
  const Warp w = space.warp(r);
  return {w.d1, w.d2};
}

CurvatureComponents curvature_from_warp(int n, const Warp& w) {
  CurvatureComponents c;
  const double l2 = w.lambda * w.lambda;
  c.tangential_coefficient = l2 * (1.0 - w.d1 * w.d1);
  c.mixed_coefficient = -w.lambda * w.d2;
  c.sectional_tangential = (1.0 - w.d1 * w.d1) / l2;
  c.sectional_mixed = -w.d2 / w.lambda;
  c.ricci_radial = (n - 1) * c.sectional_mixed;
  c.ricci_tangential = c.sectional_mixed + (n - 2) * c.sectional_tangential;
  c.scalar = c.ricci_radial + (n - 1) * c.ricci_tangential;
  return c;
}

CurvatureComponents curvature_components(const AmbientSpace& space, double r) {
  if (!(r > space.r_horizon())) {
    throw DomainError("curvature_components requires r > r_horizon");
  }
  return curvature_from_warp(space.dimension(), space.warp(r));
}

StaticResidual static_residual_from_warp(int n, const Warp& w) {
  // f = lambda', f' = lambda'', f'' = lambda'''.
  const CurvatureComponents curv = curvature_from_warp(n, w);
  const double f = w.d1;
  const double laplacian = w.d3 + (n - 1) * (w.d1 / w.lambda) * w.d2;
  const double hess_radial = w.d3;
  const double hess_tangential = w.d1 * w.d2 / w.lambda;
  StaticResidual res;
  res.trace = std::abs(laplacian - n * f);
  res.tensor = std::max(std::abs(laplacian - hess_radial + f * curv.ricci_radial),
                        std::abs(laplacian - hess_tangential + f * curv.ricci_tangential));
  return res;
}

StaticResidual static_residual(const AmbientSpace& space, double r) {
  if (!(r > space.r_horizon())) {
    throw DomainError("static_residual requires r > r_horizon");
  }
  return static_residual_from_warp(space.dimension(), space.warp(r));
}

}  // namespace imcf
