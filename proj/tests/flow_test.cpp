#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "imcf/ambient.hpp"
#include "imcf/errors.hpp"
#include "imcf/flow.hpp"
#include "imcf/functionals.hpp"

namespace {

using imcf::SphereBackend;

imcf::StarGraph perturbed(const imcf::AmbientPtr& ambient, const imcf::GridPtr& grid, double r0,
                          double amplitude, int mode = 1) {
  std::vector<double> radii(grid->size());
  for (std::size_t i = 0; i < radii.size(); ++i) {
    radii[i] = r0 + amplitude * std::cos(mode * grid->polar_angle(i));
  }
  return imcf::StarGraph(ambient, grid, std::move(radii));
}

imcf::FlowState initial_state(const imcf::StarGraph& graph) {
  return imcf::FlowState{0.0, graph, 0, 0.0};
}

// Global error of lambda(t) = s e^{t/(n-1)} after repeated Heun steps.
double sphere_error(int n, double m, double dt, int steps) {
  const auto ambient = imcf::make_ambient(n, m, 20.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, n, 16);
  const double s = 2.0;
  auto state = initial_state(imcf::coordinate_sphere(ambient, grid, s));
  for (int k = 0; k < steps; ++k) {
    state = imcf::step(state, dt);
  }
  const auto& r = state.graph.radii();
  for (double x : r) {
    EXPECT_EQ(x, r.front());
  }
  return std::abs(ambient->lambda(r.front()) / (s * std::exp(state.t / (n - 1))) - 1.0);
}

TEST(Step, CoordinateSphereGrowsExponentiallyAtSecondOrder) {
  for (int n : {3, 5}) {
    for (double m : {0.0, 2.0}) {
      const double coarse = sphere_error(n, m, 0.1, 10);
      const double fine = sphere_error(n, m, 0.05, 20);
      EXPECT_LT(coarse, 1e-3);
      EXPECT_NEAR(std::log2(coarse / fine), 2.0, 0.3) << "n=" << n << " m=" << m;
    }
  }
}

TEST(Step, AdvancesTimeAndCounters) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 16);
  const auto next = imcf::step(initial_state(imcf::coordinate_sphere(ambient, grid, 2.0)), 0.01);
  EXPECT_DOUBLE_EQ(next.t, 0.01);
  EXPECT_EQ(next.step_index, 1);
  EXPECT_DOUBLE_EQ(next.dt_last, 0.01);
}

TEST(Step, AreaGrowsExponentially) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 64);
  auto state = initial_state(perturbed(ambient, grid, 2.0, 0.2));
  const double a0 = imcf::area(state.graph);
  const double dt = imcf::stable_dt(state, 0.4, 0.01);
  const auto next = imcf::step(state, dt);
  EXPECT_NEAR(imcf::area(next.graph) / (a0 * std::exp(dt)), 1.0, 1e-7);
}

TEST(Step, OversizedStepAbortsWithLastValidState) {
  const auto ambient = imcf::make_ambient(3, 2.0, 40.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 64);
  auto state = initial_state(perturbed(ambient, grid, 2.0, 0.3, 6));
  const double dt = 200.0 * imcf::stable_dt(state, 0.4);
  bool aborted = false;
  for (int k = 0; k < 200 && !aborted; ++k) {
    try {
      state = imcf::step(state, dt);
    } catch (const imcf::FlowAborted& e) {
      aborted = true;
      EXPECT_EQ(e.last_state().step_index, state.step_index);
      EXPECT_DOUBLE_EQ(e.abort_time(), state.t);
      for (double r : e.last_state().graph.radii()) {
        EXPECT_TRUE(std::isfinite(r));
      }
    }
  }
  EXPECT_TRUE(aborted);
}

TEST(Step, FlowSpeedRejectsLowFloorViolations) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 16);
  const auto state = initial_state(imcf::coordinate_sphere(ambient, grid, 2.0));
  EXPECT_THROW(imcf::flow_speed(state, 10.0), imcf::FlowAborted);
  const auto speed = imcf::flow_speed(state);
  EXPECT_NEAR(speed.front(), 0.5, 1e-12);
}

TEST(StableDt, ScalesWithSquareOfGridSpacing) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const double dt64 = imcf::stable_dt(
      initial_state(imcf::coordinate_sphere(ambient, imcf::make_grid(SphereBackend::axisymmetric, 3, 64), 2.0)),
      0.4);
  const double dt128 = imcf::stable_dt(
      initial_state(imcf::coordinate_sphere(ambient, imcf::make_grid(SphereBackend::axisymmetric, 3, 128), 2.0)),
      0.4);
  EXPECT_GT(dt64, 0.0);
  EXPECT_TRUE(std::isfinite(dt64));
  EXPECT_NEAR(dt64 / dt128, 4.0, 1e-12);
  EXPECT_DOUBLE_EQ(
      imcf::stable_dt(initial_state(imcf::coordinate_sphere(
                          ambient, imcf::make_grid(SphereBackend::axisymmetric, 3, 8), 2.0)),
                      0.4, 1e-4),
      1e-4);
}

TEST(StableDt, VanishesNearDegenerateMeanCurvature) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 32);
  const double near = imcf::stable_dt(initial_state(imcf::coordinate_sphere(ambient, grid, 1.0 + 1e-8)), 0.4);
  const double far = imcf::stable_dt(initial_state(imcf::coordinate_sphere(ambient, grid, 2.0)), 0.4);
  EXPECT_LT(near, 1e-6 * far);
}

TEST(Run, CoordinateSphereKeepsQAndAreaLaw) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 64);
  imcf::FlowConfig config;
  config.t_end = 2.0;
  const auto series = imcf::run(imcf::coordinate_sphere(ambient, grid, 2.0), config);
  ASSERT_EQ(series.size(), 41u);
  for (const auto& rec : series) {
    EXPECT_NEAR(rec.Q, imcf::Q_equality_value(3), 1e-6);
  }
  EXPECT_LT(imcf::area_law_error(series), 1e-6);
  EXPECT_TRUE(imcf::monotonicity_violations(series, 1e-6).empty());
}

TEST(Run, MonitorTimesAreExact) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 32);
  imcf::FlowConfig config;
  config.t_end = 0.33;
  config.monitor_cadence = 0.1;
  config.max_dt = 0.007;
  const auto series = imcf::run(imcf::coordinate_sphere(ambient, grid, 2.0), config);
  const std::vector<double> expected{0.0, 0.1, 0.2, 0.30000000000000004, 0.33};
  ASSERT_EQ(series.size(), expected.size());
  for (std::size_t k = 0; k < expected.size(); ++k) {
    EXPECT_DOUBLE_EQ(series[k].t, expected[k]);
  }
}

TEST(Run, ExtendsTheAmbientProfile) {
  const auto ambient = imcf::make_ambient(3, 2.0, 4.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 16);
  imcf::FlowConfig config;
  config.t_end = 6.0;
  config.max_dt = 0.05;
  const auto result = imcf::evolve(imcf::coordinate_sphere(ambient, grid, 2.0), config);
  EXPECT_GE(result.ambient_extensions, 1);
  EXPECT_GT(result.final_state.graph.ambient().r_max(), result.final_state.graph.max_radius());
  EXPECT_NEAR(result.series.back().lambda_outer, 2.0 * std::exp(3.0), 1e-3 * std::exp(3.0));
}

class PerturbedRun : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    const auto ambient = imcf::make_ambient(3, 2.0);
    const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 64);
    imcf::FlowConfig config;
    config.t_end = 8.0;
    config.monitor_cadence = 0.1;
    series_ = new std::vector<imcf::DiagnosticsRecord>(
        imcf::run(perturbed(ambient, grid, 2.0, 0.2), config));
    epsilon_ = imcf::discretization_tolerance(ambient, grid, 2.0, config);
  }
  static void TearDownTestSuite() { delete series_; }

  static std::vector<imcf::DiagnosticsRecord>* series_;
  static double epsilon_;
};

std::vector<imcf::DiagnosticsRecord>* PerturbedRun::series_ = nullptr;
double PerturbedRun::epsilon_ = 0.0;

TEST_F(PerturbedRun, QIsMonotoneAndBoundedBelow) {
  EXPECT_GT(epsilon_, 0.0);
  EXPECT_LT(epsilon_, 1e-6);
  EXPECT_TRUE(imcf::monotonicity_violations(*series_, epsilon_).empty());
  EXPECT_GE(series_->back().Q, imcf::Q_equality_value(3) - epsilon_);
  EXPECT_LT(series_->back().Q, series_->front().Q);
}

TEST_F(PerturbedRun, StaysMeanConvex) {
  for (const auto& rec : *series_) {
    EXPECT_GT(rec.H_min, 0.0);
  }
}

TEST_F(PerturbedRun, ChiApproachesLimitFromAbove) {
  const double limit = 0.5;
  const double start = series_->front().chi_max - limit;
  const double end = series_->back().chi_max - limit;
  EXPECT_LT(std::abs(end), std::abs(start));
  EXPECT_LT(end, 0.05);
}

TEST_F(PerturbedRun, RadialBoundsFollowSphereComparison) {
  const auto& first = series_->front();
  for (const auto& rec : *series_) {
    const double growth = std::exp(rec.t / 2.0);
    EXPECT_LE(rec.lambda_outer, growth * first.lambda_outer * (1.0 + 1e-6)) << rec.t;
    EXPECT_GE(rec.lambda_inner, growth * first.lambda_inner * (1.0 - 1e-6)) << rec.t;
  }
}

TEST_F(PerturbedRun, DecayRates) {
  const auto h = imcf::decay_fit(*series_, [](const auto& r) { return r.H_max - 2.0; }, 4.0, 8.0);
  const auto g = imcf::decay_fit(*series_, [](const auto& r) { return r.grad_phi_max; }, 4.0, 8.0);
  EXPECT_NEAR(h.rate, -1.0, 0.15);
  EXPECT_NEAR(g.rate, -0.5, 0.075);
  EXPECT_EQ(h.samples, 41);
}

// An off-center geodesic sphere flows through isometric images of centred spheres, and Q stays at
// cosh(d) times the equality value; the discrete drift is truncation error of 4th order.
TEST(Run, OffcenterSphereKeepsQAndRoundsOff) {
  const auto ambient = imcf::make_ambient(3, 0.0);
  imcf::FlowConfig config;
  config.t_end = 4.0;
  std::vector<double> drift;
  for (int N : {32, 64}) {
    const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, N);
    const auto series = imcf::run(imcf::offcenter_sphere(ambient, 1.0, 0.5, grid), config);
    EXPECT_LT(series.back().grad_phi_max, 0.5 * series.front().grad_phi_max);
    for (const auto& rec : series) {
      EXPECT_NEAR(rec.Q, std::cosh(0.5) * imcf::Q_equality_value(3), 1e-4);
    }
    drift.push_back(std::abs(series.back().Q - series.front().Q));
  }
  EXPECT_GT(std::log2(drift[0] / drift[1]), 3.5);
}

TEST(Run, InvalidConfigurationIsRejected) {
  const auto ambient = imcf::make_ambient(3, 2.0);
  const auto grid = imcf::make_grid(SphereBackend::axisymmetric, 3, 16);
  imcf::FlowConfig config;
  config.max_dt = -1.0;
  EXPECT_THROW(imcf::run(imcf::coordinate_sphere(ambient, grid, 2.0), config),
               imcf::ConfigurationError);
}

std::vector<imcf::DiagnosticsRecord> synthetic(auto&& f) {
  std::vector<imcf::DiagnosticsRecord> series;
  for (int k = 0; k <= 40; ++k) {
    imcf::DiagnosticsRecord rec;
    rec.t = 0.1 * k;
    rec.Q = f(rec.t);
    series.push_back(rec);
  }
  return series;
}

TEST(DecayFit, RecoversExponentialRate) {
  const auto series = synthetic([](double t) { return 3.0 * std::exp(-t); });
  const auto fit = imcf::decay_fit(series, [](const auto& r) { return r.Q; }, 1.0, 4.0);
  EXPECT_NEAR(fit.rate, -1.0, 1e-10);
  EXPECT_LT(fit.residual, 1e-12);
  EXPECT_EQ(fit.samples, 31);
}

TEST(DecayFit, RejectsUnusableWindows) {
  const auto series = synthetic([](double t) { return 1.0 - t; });
  const auto q = [](const imcf::DiagnosticsRecord& r) { return r.Q; };
  EXPECT_THROW(imcf::decay_fit(series, q, 0.5, 2.0), imcf::FitError);
  EXPECT_THROW(imcf::decay_fit(series, q, 0.05, 0.15), imcf::FitError);
  EXPECT_NO_THROW(imcf::decay_fit(series, q, 0.0, 0.5));
}

TEST(Monotonicity, ReportsIncreasesAboveTolerance) {
  const auto series = synthetic([](double t) { return t > 1.95 && t < 2.05 ? 1.0 : 0.5; });
  const auto v = imcf::monotonicity_violations(series, 1e-3);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_NEAR(v[0].t, 1.9, 1e-12);
  EXPECT_NEAR(v[0].delta_Q, 0.5, 1e-12);
  EXPECT_NEAR(imcf::max_Q_increment(series), 0.5, 1e-12);
  EXPECT_TRUE(imcf::monotonicity_violations(series, 0.6).empty());
}

}  // namespace
