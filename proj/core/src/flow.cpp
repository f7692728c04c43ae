#include "imcf/flow.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "imcf/errors.hpp"

namespace imcf {

namespace {

// Headroom kept between the outermost node and the end of the tabulated profile.
constexpr double kProfileMargin = 1.5;
constexpr double kProfileGrowth = 6.0;
constexpr double kTimeSnap = 1e-12;

std::string describe(const char* what, double t) {
  std::ostringstream os;
  os << what << " at t = " << t;
  return os.str();
}

}  // namespace

void FlowConfig::validate() const {
  const std::pair<const char*, double> fields[] = {{"t_end", t_end},
                                                   {"cfl", cfl_factor},
                                                   {"max_dt", max_dt},
                                                   {"cadence", monitor_cadence},
                                                   {"h_min_floor", h_min_floor}};
  for (const auto& [name, value] : fields) {
    if (!std::isfinite(value) || !(value > 0.0)) {
      std::ostringstream os;
      os << "flow config: " << name << " must be finite and positive, got " << value;
      throw ConfigurationError(os.str());
    }
  }
}

FlowAborted::FlowAborted(const std::string& reason, FlowState last_valid,
                         std::vector<DiagnosticsRecord> partial)
    : std::runtime_error(reason), last_(std::move(last_valid)), series_(std::move(partial)) {}

DiagnosticsRecord diagnose(double t, const StarGraph& graph, const GeometryFields& fields) {
  const FunctionalReport report = evaluate_functionals(graph, fields);
  DiagnosticsRecord rec;
  rec.t = t;
  rec.area = report.area;
  rec.int_fH = report.int_fH;
  rec.int_f_vol = report.volume.closed_form;
  rec.Q = report.Q;
  rec.minkowski_deficit = report.minkowski_deficit;
  rec.brendle_gap = report.brendle_gap;
  rec.div_residual = report.divergence_residual;

  const auto [hmin, hmax] =
      std::minmax_element(fields.mean_curvature.begin(), fields.mean_curvature.end());
  rec.H_min = *hmin;
  rec.H_max = *hmax;
  double grad = 0.0;
  double chi = -INFINITY;
  double kappa = 0.0;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    grad = std::max(grad, std::sqrt(fields.rho[i] * fields.rho[i] - 1.0));
    chi = std::max(chi, fields.rho[i] / fields.mean_curvature[i]);
    kappa = std::max({kappa, std::abs(fields.kappa1[i] - 1.0), std::abs(fields.kappa2[i] - 1.0)});
  }
  rec.grad_phi_max = grad;
  rec.chi_max = chi;
  rec.kappa_dev_max = kappa;
  const auto [rmin, rmax] = std::minmax_element(graph.radii().begin(), graph.radii().end());
  rec.lambda_outer = graph.ambient().lambda(*rmax);
  rec.lambda_inner = graph.ambient().lambda(*rmin);
  return rec;
}

DiagnosticsRecord diagnose(const FlowState& state) {
  return diagnose(state.t, state.graph, geometry(state.graph));
}

std::vector<double> flow_speed(const FlowState& state, double h_min_floor) {
  const GeometryFields fields = geometry(state.graph);
  std::vector<double> speed(fields.size());
  for (std::size_t i = 0; i < speed.size(); ++i) {
    const double H = fields.mean_curvature[i];
    if (!(H >= h_min_floor)) {
      std::ostringstream os;
      os << "mean curvature " << H << " below floor " << h_min_floor << " at node " << i
         << ", t = " << state.t;
      throw FlowAborted(os.str(), state);
    }
    speed[i] = fields.rho[i] / H;
  }
  return speed;
}

namespace {

FlowState advance(const FlowState& base, const std::vector<double>& radii, double t,
                  const FlowState& last_valid) {
  const double r_max = base.graph.ambient().r_max();
  for (double r : radii) {
    if (!std::isfinite(r)) {
      throw FlowAborted(describe("non-finite radius", t), last_valid);
    }
    if (r > r_max) {
      throw FlowAborted(describe("radius beyond the tabulated ambient range", t), last_valid);
    }
  }
  try {
    return FlowState{t, StarGraph(base.graph.ambient_ptr(), base.graph.grid_ptr(), radii),
                     base.step_index, base.dt_last};
  } catch (const DomainError& e) {
    throw FlowAborted(e.what(), last_valid);
  }
}

}  // namespace

FlowState step(const FlowState& state, double dt, double h_min_floor) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw ConfigurationError("step: dt must be finite and positive");
  }
  const std::vector<double>& r0 = state.graph.radii();
  const std::size_t count = r0.size();

  const std::vector<double> k1 = flow_speed(state, h_min_floor);
  std::vector<double> r1(count);
  for (std::size_t i = 0; i < count; ++i) {
    r1[i] = r0[i] + dt * k1[i];
  }
  const FlowState predictor = advance(state, r1, state.t + dt, state);

  std::vector<double> k2;
  try {
    k2 = flow_speed(predictor, h_min_floor);
  } catch (const FlowAborted& e) {
    throw FlowAborted(e.what(), state);
  }
  std::vector<double> r2(count);
  for (std::size_t i = 0; i < count; ++i) {
    r2[i] = r0[i] + 0.5 * dt * (k1[i] + k2[i]);
  }
  FlowState next = advance(state, r2, state.t + dt, state);
  next.step_index = state.step_index + 1;
  next.dt_last = dt;
  return next;
}

double stable_dt(const FlowState& state, double cfl_factor, double max_dt) {
  const StarGraph& graph = state.graph;
  const SphereGrid& grid = graph.grid();
  const int n = grid.dimension();
  const GeometryFields fields = geometry(graph);

  double h = grid.polar_step();
  double stencil = 16.0 / 3.0 * (n - 1);
  if (grid.backend() == SphereBackend::latlong) {
    h = std::min(h, grid.azimuth_step() * std::sin(grid.polar_angles().front()));
    stencil = 16.0;
  }
  double coefficient = INFINITY;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    const double lh = fields.lambda[i] * fields.mean_curvature[i];
    coefficient = std::min(coefficient, lh * lh);
  }
  if (!(coefficient > 0.0) || !std::isfinite(coefficient)) {
    return 0.0;
  }
  const double dt = cfl_factor * h * h * coefficient / stencil;
  return max_dt > 0.0 ? std::min(dt, max_dt) : dt;
}

FlowResult evolve(const StarGraph& initial, const FlowConfig& config) {
  config.validate();
  FlowResult result{{}, FlowState{0.0, initial, 0, 0.0}, 0};
  FlowState& state = result.final_state;
  std::vector<DiagnosticsRecord>& series = result.series;

  const auto record = [&](const FlowState& s) {
    const GeometryFields fields = geometry(s.graph);
    const MeanConvexity convexity = mean_convexity_check(fields);
    if (!(convexity.min_mean_curvature >= config.h_min_floor)) {
      throw FlowAborted(describe("surface is not mean convex above the floor", s.t), s, series);
    }
    series.push_back(diagnose(s.t, s.graph, fields));
  };

  record(state);
  long monitor_index = 1;
  while (state.t < config.t_end - kTimeSnap) {
    const AmbientSpace& space = state.graph.ambient();
    if (state.graph.max_radius() > space.r_max() - kProfileMargin) {
      state.graph = state.graph.with_ambient(
          space.extended(std::max(space.r_max(), state.graph.max_radius()) + kProfileGrowth));
      ++result.ambient_extensions;
    }

    const double next_monitor =
        std::min(config.t_end, static_cast<double>(monitor_index) * config.monitor_cadence);
    double dt = stable_dt(state, config.cfl_factor, config.max_dt);
    if (!(dt > 0.0)) {
      throw FlowAborted(describe("no admissible time step", state.t), state, series);
    }
    bool lands = false;
    if (state.t + dt >= next_monitor - kTimeSnap) {
      dt = next_monitor - state.t;
      lands = true;
    }
    try {
      state = step(state, dt, config.h_min_floor);
    } catch (const FlowAborted& e) {
      throw FlowAborted(e.what(), e.last_state(), series);
    }
    if (lands) {
      state.t = next_monitor;
      record(state);
      ++monitor_index;
    }
  }
  return result;
}

std::vector<DiagnosticsRecord> run(const StarGraph& initial, const FlowConfig& config) {
  return evolve(initial, config).series;
}

DecayFit decay_fit(const std::vector<DiagnosticsRecord>& series, const QuantitySelector& quantity,
                   double t_a, double t_b) {
  std::vector<double> ts;
  std::vector<double> ys;
  for (const DiagnosticsRecord& rec : series) {
    if (rec.t < t_a - kTimeSnap || rec.t > t_b + kTimeSnap) {
      continue;
    }
    const double q = quantity(rec);
    if (!(q > 0.0) || !std::isfinite(q)) {
      std::ostringstream os;
      os << "decay_fit: non-positive sample " << q << " at t = " << rec.t;
      throw FitError(os.str());
    }
    ts.push_back(rec.t);
    ys.push_back(std::log(q));
  }
  if (ts.size() < 2) {
    throw FitError("decay_fit: fewer than two samples in the window");
  }
  const double count = static_cast<double>(ts.size());
  double mt = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    mt += ts[i];
    my += ys[i];
  }
  mt /= count;
  my /= count;
  double stt = 0.0;
  double sty = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    stt += (ts[i] - mt) * (ts[i] - mt);
    sty += (ts[i] - mt) * (ys[i] - my);
  }
  if (!(stt > 0.0)) {
    throw FitError("decay_fit: window contains a single time");
  }
  DecayFit fit;
  fit.rate = sty / stt;
  fit.samples = static_cast<int>(ts.size());
  double sq = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double e = ys[i] - (my + fit.rate * (ts[i] - mt));
    sq += e * e;
  }
  fit.residual = std::sqrt(sq / count);
  return fit;
}

std::vector<MonotonicityViolation> monotonicity_violations(
    const std::vector<DiagnosticsRecord>& series, double tolerance) {
  std::vector<MonotonicityViolation> out;
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    const double dq = series[k + 1].Q - series[k].Q;
    if (dq > tolerance) {
      out.push_back({series[k].t, dq});
    }
  }
  return out;
}

double max_Q_increment(const std::vector<DiagnosticsRecord>& series) {
  double worst = 0.0;
  for (std::size_t k = 0; k + 1 < series.size(); ++k) {
    worst = std::max(worst, std::abs(series[k + 1].Q - series[k].Q));
  }
  return worst;
}

double discretization_tolerance(const AmbientPtr& ambient, const GridPtr& grid, double s,
                                const FlowConfig& config) {
  return 10.0 * max_Q_increment(run(coordinate_sphere(ambient, grid, s), config));
}

double area_law_error(const std::vector<DiagnosticsRecord>& series) {
  if (series.empty()) {
    return 0.0;
  }
  const double a0 = series.front().area;
  double worst = 0.0;
  for (const DiagnosticsRecord& rec : series) {
    worst = std::max(worst, std::abs(rec.area * std::exp(-rec.t) / a0 - 1.0));
  }
  return worst;
}

}  // namespace imcf
