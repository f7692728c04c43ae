#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/numeric/odeint.hpp>
#include <gtest/gtest.h>

#include "imcf/ambient.hpp"
#include "imcf/errors.hpp"

namespace {

using imcf::AmbientSpace;
using imcf::LambdaProfile;
using imcf::Warp;

constexpr double kPi = std::numbers::pi;

double lapse(int n, double m, double s) { return std::sqrt(1.0 + s * s - m * std::pow(s, 2 - n)); }

// Plain bisection on 1 + s^2 - m s^{2-n}, increasing in s.
double bisect_horizon(int n, double m) {
  double lo = 1e-12;
  double hi = 1.0 + m;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 + mid * mid - m * std::pow(mid, 2 - n) > 0.0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

// r(s) from the defining integral of the normalized gauge, for s >= s0.
double integral_radius(int n, double m, double s) {
  const auto integrand = [&](double t) { return 1.0 / lapse(n, m, t) - 1.0 / std::sqrt(1.0 + t * t); };
  boost::math::quadrature::tanh_sinh<double> near;
  boost::math::quadrature::exp_sinh<double> tail;
  const double split = std::max(s, 4.0);
  double correction = tail.integrate(integrand, split, INFINITY);
  if (s < split) {
    correction += near.integrate(integrand, s, split);
  }
  return std::asinh(s) - correction;
}

TEST(SolveHorizon, FactorableCases) {
  EXPECT_NEAR(imcf::solve_horizon(3, 2.0), 1.0, 1e-14);
  EXPECT_NEAR(imcf::solve_horizon(4, 2.0), 1.0, 1e-14);
  EXPECT_EQ(imcf::solve_horizon(3, 0.0), 0.0);
}

TEST(SolveHorizon, AgreesWithBisection) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> mass(1e-3, 20.0);
  for (int k = 0; k < 50; ++k) {
    const int n = 3 + k % 5;
    const double m = mass(rng);
    const double s0 = imcf::solve_horizon(n, m);
    EXPECT_NEAR(s0, bisect_horizon(n, m), 1e-12 * std::max(1.0, s0)) << "n=" << n << " m=" << m;
    EXPECT_LT(std::abs(1.0 + s0 * s0 - m * std::pow(s0, 2 - n)), 1e-12);
  }
}

TEST(SolveHorizon, RejectsBadInput) {
  EXPECT_THROW(imcf::solve_horizon(2, 1.0), imcf::ConfigurationError);
  EXPECT_THROW(imcf::solve_horizon(3, -1.0), imcf::ConfigurationError);
}

TEST(SphereArea, ClosedForms) {
  EXPECT_NEAR(imcf::sphere_area(2), 2.0 * kPi, 1e-14);
  EXPECT_NEAR(imcf::sphere_area(3), 4.0 * kPi, 1e-13);
  EXPECT_NEAR(imcf::sphere_area(4), 2.0 * kPi * kPi, 1e-13);
  EXPECT_NEAR(imcf::sphere_area(5), 8.0 * kPi * kPi / 3.0, 1e-13);
}

TEST(LambdaProfile, HyperbolicIsSinh) {
  const AmbientSpace space(3, 0.0);
  EXPECT_EQ(space.horizon_lambda(), 0.0);
  for (double r : {1e-3, 0.5, 1.0, 4.0, 11.0}) {
    const Warp w = space.warp(r);
    EXPECT_NEAR(w.lambda / std::sinh(r), 1.0, 1e-10);
    EXPECT_NEAR(w.d1 / std::cosh(r), 1.0, 1e-10);
    EXPECT_NEAR(w.d2 / std::sinh(r), 1.0, 1e-10);
  }
}

TEST(LambdaProfile, OdeResidualAtNodes) {
  for (auto [n, m] : {std::pair{3, 2.0}, {3, 0.5}, {4, 2.0}, {5, 1.0}, {7, 10.0}}) {
    const LambdaProfile p = LambdaProfile::build(n, m, 12.0);
    // The horizon node has d1 = 0 exactly; the closed form there is round-off.
    EXPECT_EQ(p.nodes().front().d1, 0.0);
    for (const auto& node : p.nodes().subspan(1)) {
      const double f = lapse(n, m, node.lambda);
      EXPECT_LE(std::abs(node.d1 - f), 1e-10 * std::max(1.0, f));
      const double d2 = node.lambda + 0.5 * m * (n - 2) * std::pow(node.lambda, 1 - n);
      EXPECT_LE(std::abs(node.d2 - d2), 1e-10 * d2);
    }
    EXPECT_NEAR(p.nodes().front().lambda, p.horizon_lambda(), 1e-14);
  }
}

TEST(LambdaProfile, InterpolantMatchesOdeBetweenNodes) {
  for (auto [n, m] : {std::pair{3, 2.0}, {4, 1.0}, {6, 3.0}}) {
    const AmbientSpace space(n, m);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> radius(space.r_horizon(), space.r_max());
    for (int k = 0; k < 400; ++k) {
      const double r = radius(rng);
      const Warp w = space.warp(r);
      EXPECT_LE(std::abs(w.d1 - lapse(n, m, w.lambda)), 1e-10 * std::max(1.0, w.d1)) << r;
    }
  }
}

// Second-order ODE lambda'' = lambda + m (n-2)/2 lambda^{1-n}, integrated from lambda = 2.
TEST(LambdaProfile, AgreesWithIndependentOdeIntegration) {
  namespace odeint = boost::numeric::odeint;
  using State = std::array<double, 2>;
  const int n = 3;
  const double m = 2.0;
  const AmbientSpace space(n, m);
  const double r0 = space.radius_of(2.0);
  State y{2.0, lapse(n, m, 2.0)};
  const auto rhs = [&](const State& x, State& dx, double) {
    dx[0] = x[1];
    dx[1] = x[0] + 0.5 * m * (n - 2) * std::pow(x[0], 1 - n);
  };
  auto stepper = odeint::make_controlled(1e-13, 1e-13, odeint::runge_kutta_dopri5<State>());
  double r = r0;
  for (double target : {r0 + 0.5, r0 + 1.0, r0 + 2.0, r0 + 4.0}) {
    odeint::integrate_adaptive(stepper, rhs, y, r, target, 1e-3);
    r = target;
    const Warp w = space.warp(target);
    EXPECT_NEAR(w.lambda / y[0], 1.0, 1e-9);
    EXPECT_NEAR(w.d1 / y[1], 1.0, 1e-9);
  }
}

TEST(LambdaProfile, RadiusOfInvertsLambda) {
  const AmbientSpace space(4, 2.0);
  for (double s : {1.0 + 1e-9, 1.001, 1.5, 3.0, 100.0, 5e4}) {
    EXPECT_NEAR(space.lambda(space.radius_of(s)) / s, 1.0, 1e-11) << s;
  }
  const double r = space.radius_of(2.0);
  EXPECT_NEAR(space.warp(r).d1, lapse(4, 2.0, 2.0), 1e-10);
}

TEST(LambdaProfile, LapseAtLambdaTwo) {
  const AmbientSpace space(3, 2.0);
  EXPECT_NEAR(space.warp(space.radius_of(2.0)).d1, 2.0, 1e-10);
}

TEST(LambdaProfile, ExtendedSharesNodes) {
  const LambdaProfile p = LambdaProfile::build(3, 2.0, 8.0);
  const LambdaProfile q = p.extended(14.0);
  ASSERT_GT(q.nodes().size(), p.nodes().size());
  EXPECT_GE(q.r_max(), 14.0);
  for (std::size_t i = 0; i + 1 < p.nodes().size(); ++i) {
    EXPECT_EQ(p.nodes()[i].r, q.nodes()[i].r);
    EXPECT_EQ(p.nodes()[i].lambda, q.nodes()[i].lambda);
  }
  EXPECT_EQ(p.lambda(5.0), q.lambda(5.0));
}

TEST(LambdaProfile, EvaluateOutsideRangeThrows) {
  const AmbientSpace space(3, 2.0);
  EXPECT_THROW(space.warp(space.r_horizon() - 0.1), imcf::DomainError);
  EXPECT_THROW(space.warp(space.r_max() + 1.0), imcf::DomainError);
}

TEST(CalibrateGauge, HyperbolicShiftIsZero) {
  LambdaProfile p = LambdaProfile::build(3, 0.0, 12.0);
  EXPECT_EQ(imcf::calibrate_gauge(p), 0.0);
}

TEST(CalibrateGauge, MatchesIntegralDefinition) {
  for (auto [n, m] : {std::pair{3, 2.0}, {4, 1.0}, {5, 3.0}}) {
    LambdaProfile p = LambdaProfile::build(n, m, 12.0);
    const double c = imcf::calibrate_gauge(p);
    const double s0 = p.horizon_lambda();
    EXPECT_NEAR(c, integral_radius(n, m, s0), 1e-6) << "n=" << n;
    EXPECT_NEAR(p.r_min(), c, 1e-14);
    // Two far radii agree with the integral as well.
    for (double s : {50.0, 500.0}) {
      EXPECT_NEAR(p.radius_of(s), integral_radius(n, m, s), 1e-6);
    }
  }
}

TEST(CalibrateGauge, StableUnderLongerProfile) {
  LambdaProfile a = LambdaProfile::build(3, 2.0, 12.0);
  LambdaProfile b = LambdaProfile::build(3, 2.0, 24.0);
  EXPECT_NEAR(imcf::calibrate_gauge(a), imcf::calibrate_gauge(b), 1e-8);
}

TEST(CalibrateGauge, FarFieldExpansion) {
  const int n = 3;
  const double m = 2.0;
  LambdaProfile p = LambdaProfile::build(n, m, 16.0);
  imcf::calibrate_gauge(p);
  for (double r : {6.0, 8.0, 10.0}) {
    const double sh = std::sinh(r);
    const double correction = m / (2.0 * n) * std::pow(sh, 1 - n);
    const double remainder = p.lambda(r) - sh - correction;
    EXPECT_LT(std::abs(remainder), 1e-3 * correction + 1e-12 * sh) << r;
  }
}

TEST(CalibrateGauge, ShortProfileThrows) {
  LambdaProfile p = LambdaProfile::build(3, 2.0, 4.0);
  EXPECT_THROW(imcf::calibrate_gauge(p), imcf::DomainError);
}

TEST(StaticPotential, Examples) {
  const AmbientSpace ads(3, 2.0);
  EXPECT_NEAR(imcf::static_potential(ads, ads.radius_of(2.0)).value, 2.0, 1e-10);
  EXPECT_NEAR(imcf::static_potential(ads, ads.r_horizon()).value, 0.0, 1e-12);
  const AmbientSpace hyp(3, 0.0);
  EXPECT_NEAR(imcf::static_potential(hyp, 1.3).value, std::cosh(1.3), 1e-12);
  EXPECT_NEAR(imcf::static_potential(hyp, 1.3).radial_derivative, std::sinh(1.3), 1e-12);
}

TEST(Curvature, HyperbolicSectionalCurvatures) {
  const AmbientSpace space(4, 0.0);
  for (double r : {0.3, 1.0, 5.0}) {
    const auto c = imcf::curvature_components(space, r);
    EXPECT_NEAR(c.sectional_tangential, -1.0, 1e-10);
    EXPECT_NEAR(c.sectional_mixed, -1.0, 1e-12);
    const double l = std::sinh(r);
    EXPECT_NEAR(c.tangential_coefficient / std::pow(l, 4), -1.0, 1e-10);
  }
}

TEST(Curvature, RadialRicciExample) {
  const AmbientSpace space(3, 2.0);
  const auto c = imcf::curvature_components(space, space.radius_of(2.0));
  EXPECT_NEAR(c.ricci_radial, -2.25, 1e-10);
  EXPECT_NEAR(c.mixed_coefficient, -2.0 * 2.25, 1e-9);
}

TEST(Curvature, ScalarCurvatureIsConstant) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 60; ++k) {
    const int n = 3 + k % 5;
    const double m = 5.0 * u(rng);
    const AmbientSpace space(n, m);
    const double r = space.r_horizon() + 0.01 + 6.0 * u(rng);
    EXPECT_NEAR(imcf::curvature_components(space, r).scalar, -n * (n - 1.0), 1e-8);
  }
}

TEST(Curvature, RicciAsymptotics) {
  const int n = 4;
  const double m = 2.0;
  LambdaProfile p = LambdaProfile::build(n, m, 14.0);
  imcf::calibrate_gauge(p);
  const AmbientSpace space(std::move(p));
  for (double r : {4.0, 6.0, 8.0}) {
    const double expected = -m * (n - 1) * (n - 2) / 2.0 * std::pow(std::sinh(r), -n);
    const double actual = imcf::curvature_components(space, r).ricci_radial + (n - 1);
    EXPECT_NEAR(actual / expected, 1.0, 5e-2) << r;
  }
}

TEST(StaticResidual, VanishesOnExamples) {
  const AmbientSpace hyp(3, 0.0);
  const AmbientSpace ads(3, 2.0);
  const AmbientSpace ads5(5, 1.0);
  for (const auto& [space, r] : {std::pair{&hyp, 0.7}, {&hyp, 4.0}, {&ads, ads.radius_of(2.0)},
                                 {&ads5, ads5.radius_of(3.0)}}) {
    const auto res = imcf::static_residual(*space, r);
    EXPECT_LT(res.trace, 1e-8);
    EXPECT_LT(res.tensor, 1e-8);
  }
}

TEST(StaticResidual, DetectsWrongDerivatives) {
  const AmbientSpace space(3, 2.0);
  const Warp exact = space.warp(space.radius_of(2.0));
  Warp w = exact;
  w.d2 = -w.d2;
  EXPECT_GT(imcf::static_residual_from_warp(3, w).trace, 1.0);
  w = exact;
  w.d3 = -w.d3;
  const auto res = imcf::static_residual_from_warp(3, w);
  EXPECT_GT(res.trace, 1.0);
  EXPECT_GT(res.tensor, 1.0);
}

}  // namespace
