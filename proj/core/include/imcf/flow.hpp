#pragma once

// Non-parametric inverse mean curvature flow dr/dt = rho / H, explicit Heun (RK2) in time.

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "imcf/functionals.hpp"
#include "imcf/graph_geometry.hpp"

namespace imcf {

struct FlowConfig {
  double t_end = 1.0;
  double cfl_factor = 0.4;
  double max_dt = 0.01;
  double monitor_cadence = 0.05;
  double h_min_floor = 1e-6;

  /// Throws ConfigurationError unless every field is finite and positive.
  void validate() const;
};

struct FlowState {
  double t = 0.0;
  StarGraph graph;
  long step_index = 0;
  double dt_last = 0.0;
};

struct DiagnosticsRecord {
  double t = 0.0;
  double area = 0.0;
  double int_fH = 0.0;
  double int_f_vol = 0.0;
  double Q = 0.0;
  double minkowski_deficit = 0.0;
  double brendle_gap = 0.0;
  double div_residual = 0.0;
  double H_min = 0.0;
  double H_max = 0.0;
  double grad_phi_max = 0.0;
  double chi_max = 0.0;        // max rho / H
  double kappa_dev_max = 0.0;  // max |kappa_i - 1|
  double lambda_outer = 0.0;   // lambda at the outermost node
  double lambda_inner = 0.0;   // lambda at the innermost node
};

class FlowAborted : public std::runtime_error {
 public:
  FlowAborted(const std::string& reason, FlowState last_valid,
              std::vector<DiagnosticsRecord> partial = {});

  const FlowState& last_state() const { return last_; }
  const std::vector<DiagnosticsRecord>& series() const { return series_; }
  double abort_time() const { return last_.t; }

 private:
  FlowState last_;
  std::vector<DiagnosticsRecord> series_;
};

DiagnosticsRecord diagnose(const FlowState& state);
DiagnosticsRecord diagnose(double t, const StarGraph& graph, const GeometryFields& fields);

/// rho / H at every node.  Throws FlowAborted if H drops below `h_min_floor`.
std::vector<double> flow_speed(const FlowState& state, double h_min_floor = 1e-6);

/// One Heun step.  Throws FlowAborted (carrying `state`) when a stage is not mean convex above
/// the floor, produces a non-finite radius, or crosses the horizon.
FlowState step(const FlowState& state, double dt, double h_min_floor = 1e-6);

/// cfl * h^2 * min(lambda^2 H^2) / C with the stencil constant C of the grid backend; capped at
/// `max_dt` when that is positive.
double stable_dt(const FlowState& state, double cfl_factor, double max_dt = 0.0);

struct FlowResult {
  std::vector<DiagnosticsRecord> series;
  FlowState final_state;
  int ambient_extensions = 0;
};

/// Integrates to config.t_end, sampling at t = 0, every monitor_cadence, and t_end.  The ambient
/// profile is extended whenever the surface approaches its far end.  Throws FlowAborted with the
/// partial series.
FlowResult evolve(const StarGraph& initial, const FlowConfig& config);
std::vector<DiagnosticsRecord> run(const StarGraph& initial, const FlowConfig& config);

struct DecayFit {
  double rate = 0.0;
  double residual = 0.0;  // root-mean-square misfit of log(quantity)
  int samples = 0;
};

using QuantitySelector = std::function<double(const DiagnosticsRecord&)>;

/// Least-squares slope of log(quantity) against t over the samples with t in [t_a, t_b].
/// Throws FitError on fewer than two samples or a non-positive sample.
DecayFit decay_fit(const std::vector<DiagnosticsRecord>& series, const QuantitySelector& quantity,
                   double t_a, double t_b);

struct MonotonicityViolation {
  double t = 0.0;        // start of the offending interval
  double delta_Q = 0.0;  // Q(t_{k+1}) - Q(t_k)
};

std::vector<MonotonicityViolation> monotonicity_violations(
    const std::vector<DiagnosticsRecord>& series, double tolerance);

/// Largest |Q(t_{k+1}) - Q(t_k)| over a series.
double max_Q_increment(const std::vector<DiagnosticsRecord>& series);

/// 10x the largest |Delta Q| of the coordinate sphere lambda = s flowed with the same grid and
/// configuration.
double discretization_tolerance(const AmbientPtr& ambient, const GridPtr& grid, double s,
                                const FlowConfig& config);

/// max_k | |Sigma_{t_k}| e^{-t_k} / |Sigma_0| - 1 |.
double area_law_error(const std::vector<DiagnosticsRecord>& series);

}  // namespace imcf
