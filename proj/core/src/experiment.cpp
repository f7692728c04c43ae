#include "imcf/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>

#include "imcf/errors.hpp"

namespace imcf {

namespace {

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string format_short(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// Lambda of the coordinate sphere used to calibrate the monotonicity tolerance.
double reference_lambda(const Scenario& sc) {
  return sc.surface.kind == SurfaceKind::offcenter ? std::sinh(sc.surface.R) : sc.surface.s;
}

void write_plot_script(std::ostream& out, const std::string& csv_name, const std::string& name) {
  out << "# gnuplot script for " << csv_name << "\n"
      << "set datafile separator ','\n"
      << "set key autotitle columnhead\n"
      << "set terminal pngcairo size 1200,800\n"
      << "set output '" << name << ".png'\n"
      << "set multiplot layout 2,2\n"
      << "set xlabel 't'\n"
      << "plot '" << csv_name << "' using 1:5 with lines title 'Q'\n"
      << "plot '" << csv_name << "' using 1:($2*exp(-$1)) with lines title 'area * exp(-t)'\n"
      << "set logscale y\n"
      << "plot '" << csv_name << "' using 1:11 with lines title 'max |grad phi|', \\\n"
      << "     '' using 1:13 with lines title 'max |kappa - 1|'\n"
      << "unset logscale y\n"
      << "plot '" << csv_name << "' using 1:6 with lines title 'minkowski deficit', \\\n"
      << "     '' using 1:7 with lines title 'brendle gap'\n"
      << "unset multiplot\n";
}

}  // namespace

void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& series) {
  out << kCsvHeader << '\n';
  for (const DiagnosticsRecord& r : series) {
    const double fields[] = {r.t,           r.area,       r.int_fH,      r.int_f_vol,
                             r.Q,           r.minkowski_deficit,         r.brendle_gap,
                             r.div_residual, r.H_min,     r.H_max,       r.grad_phi_max,
                             r.chi_max,     r.kappa_dev_max};
    bool first = true;
    for (double v : fields) {
      if (!first) {
        out << ',';
      }
      out << format_double(v);
      first = false;
    }
    out << '\n';
  }
}

std::vector<RateEstimate> fit_decay_rates(const std::vector<DiagnosticsRecord>& series, int n) {
  std::vector<RateEstimate> out;
  if (series.empty()) {
    return out;
  }
  const double t_end = series.back().t;
  const double limit = n - 1.0;
  const auto add = [&](const std::string& name, double expected, const QuantitySelector& q) {
    RateEstimate est{name, expected, std::nullopt, ""};
    try {
      est.fit = decay_fit(series, q, 0.5 * t_end, t_end);
    } catch (const FitError& e) {
      est.note = e.what();
    }
    out.push_back(std::move(est));
  };
  add("H_max-(n-1)", -2.0 / limit, [=](const DiagnosticsRecord& r) { return r.H_max - limit; });
  add("grad_phi_max", -1.0 / limit, [](const DiagnosticsRecord& r) { return r.grad_phi_max; });
  add("kappa_dev_max", -2.0 / limit, [](const DiagnosticsRecord& r) { return r.kappa_dev_max; });
  return out;
}

RunReport simulate(const Scenario& scenario) {
  RunReport report;
  report.scenario = scenario;
  const AmbientPtr ambient = build_ambient(scenario);
  const GridPtr grid = build_grid(scenario);
  const StarGraph initial = build_initial_surface(scenario, ambient, grid);
  try {
    report.series = run(initial, scenario.flow);
  } catch (const FlowAborted& e) {
    report.aborted = true;
    report.abort_reason = e.what();
    report.abort_time = e.abort_time();
    report.series = e.series();
  }
  report.tolerance =
      discretization_tolerance(ambient, grid, reference_lambda(scenario), scenario.flow);
  report.violations = monotonicity_violations(report.series, report.tolerance);
  report.area_law_error = area_law_error(report.series);
  report.rates = fit_decay_rates(report.series, scenario.n);
  return report;
}

void write_summary(std::ostream& out, const RunReport& report) {
  const Scenario& sc = report.scenario;
  out << "scenario: " << sc.name << '\n'
      << "ambient: n = " << sc.n << ", m = " << format_short(sc.m) << '\n'
      << "surface: " << to_string(sc.surface.kind) << '\n'
      << "grid: " << to_string(sc.backend) << ", N = " << sc.resolution << '\n'
      << "flow: t_end = " << format_short(sc.flow.t_end) << ", cfl = "
      << format_short(sc.flow.cfl_factor) << ", max_dt = " << format_short(sc.flow.max_dt)
      << ", cadence = " << format_short(sc.flow.monitor_cadence) << '\n';
  if (report.aborted) {
    out << "status: aborted at t = " << format_short(report.abort_time) << ": "
        << report.abort_reason << '\n';
  } else {
    out << "status: completed\n";
  }
  out << "samples: " << report.series.size() << '\n';
  if (!report.series.empty()) {
    out << "Q(0): " << format_double(report.series.front().Q) << '\n'
        << "Q(end): " << format_double(report.series.back().Q) << '\n';
  }
  out << "Q equality value: " << format_double(Q_equality_value(sc.n)) << '\n'
      << "monotonicity tolerance: " << format_short(report.tolerance) << '\n'
      << "monotonicity violations: " << report.violations.size() << '\n';
  for (const MonotonicityViolation& v : report.violations) {
    out << "  t = " << format_short(v.t) << ", dQ = " << format_short(v.delta_Q) << '\n';
  }
  out << "area law error: " << format_short(report.area_law_error) << '\n';
  for (const RateEstimate& r : report.rates) {
    out << "decay rate " << r.quantity << ": ";
    if (r.fit) {
      out << format_short(r.fit->rate) << " (expected " << format_short(r.expected)
          << ", fit residual " << format_short(r.fit->residual) << ")\n";
    } else {
      out << "n/a (" << r.note << ")\n";
    }
  }
}

std::filesystem::path output_directory(const Scenario& scenario) {
  if (const char* env = std::getenv("IMCF_LAB_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return scenario.output_dir;
}

RunReport run_scenario(const Scenario& scenario) {
  RunReport report = simulate(scenario);
  const std::filesystem::path dir = output_directory(scenario);
  std::filesystem::create_directories(dir);
  report.csv_path = dir / (scenario.name + ".csv");
  report.summary_path = dir / (scenario.name + "_summary.txt");
  report.plot_path = dir / (scenario.name + ".gp");

  const auto open = [](const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary);
    if (!out) {
      throw ConfigurationError("cannot write '" + p.string() + "'");
    }
    return out;
  };
  {
    std::ofstream out = open(report.csv_path);
    write_csv(out, report.series);
  }
  {
    std::ofstream out = open(report.summary_path);
    write_summary(out, report);
  }
  {
    std::ofstream out = open(report.plot_path);
    write_plot_script(out, report.csv_path.filename().string(), scenario.name);
  }
  return report;
}

double fitted_order(const std::vector<int>& resolutions, const std::vector<double>& errors) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < resolutions.size() && i < errors.size(); ++i) {
    if (errors[i] > 0.0 && std::isfinite(errors[i])) {
      xs.push_back(std::log(static_cast<double>(resolutions[i])));
      ys.push_back(std::log(errors[i]));
    }
  }
  if (xs.size() < 2) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  return -sxy / sxx;
}

ConvergenceTable convergence_study(const Scenario& scenario, std::vector<int> resolutions) {
  if (resolutions.size() < 3) {
    throw ConfigurationError("convergence study needs at least three resolutions");
  }
  std::sort(resolutions.begin(), resolutions.end());
  if (std::adjacent_find(resolutions.begin(), resolutions.end()) != resolutions.end()) {
    throw ConfigurationError("convergence study: resolutions must be distinct");
  }
  const bool sphere = scenario.surface.kind == SurfaceKind::sphere;
  const double q_star = Q_equality_value(scenario.n);
  const double base = static_cast<double>(resolutions.front());

  ConvergenceTable table;
  std::vector<double> final_q;
  for (int N : resolutions) {
    Scenario sc = scenario;
    sc.resolution = N;
    sc.flow.max_dt = scenario.flow.max_dt * (base / N) * (base / N);
    const AmbientPtr ambient = build_ambient(sc);
    const GridPtr grid = build_grid(sc);
    ConvergenceRow row;
    row.resolution = N;
    row.max_dt = sc.flow.max_dt;
    std::vector<DiagnosticsRecord> series;
    try {
      series = run(build_initial_surface(sc, ambient, grid), sc.flow);
    } catch (const FlowAborted& e) {
      row.aborted = true;
      series = e.series();
    }
    row.area_law_error = area_law_error(series);
    for (const DiagnosticsRecord& r : series) {
      row.div_residual = std::max(row.div_residual, std::abs(r.div_residual));
      if (sphere) {
        row.q_error = std::max(row.q_error, std::abs(r.Q - q_star));
      }
    }
    final_q.push_back(series.empty() ? std::numeric_limits<double>::quiet_NaN()
                                     : series.back().Q);
    table.rows.push_back(row);
  }
  if (!sphere) {
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
      table.rows[i].q_error = i + 1 < table.rows.size()
                                  ? std::abs(final_q[i] - final_q.back())
                                  : std::numeric_limits<double>::quiet_NaN();
    }
  }
  std::vector<double> area;
  std::vector<double> q;
  std::vector<double> div;
  for (const ConvergenceRow& r : table.rows) {
    area.push_back(r.area_law_error);
    q.push_back(r.q_error);
    div.push_back(r.div_residual);
  }
  table.area_law_order = fitted_order(resolutions, area);
  table.q_order = fitted_order(resolutions, q);
  table.div_residual_order = fitted_order(resolutions, div);
  return table;
}

void write_convergence(std::ostream& out, const ConvergenceTable& table) {
  out << "N,max_dt,area_law_error,q_error,div_residual,aborted\n";
  for (const ConvergenceRow& r : table.rows) {
    out << r.resolution << ',' << format_short(r.max_dt) << ',' << format_short(r.area_law_error)
        << ',' << format_short(r.q_error) << ',' << format_short(r.div_residual) << ','
        << (r.aborted ? 1 : 0) << '\n';
  }
  out << "# fitted order: area_law " << format_short(table.area_law_order) << ", q "
      << format_short(table.q_order) << ", div_residual "
      << format_short(table.div_residual_order) << '\n';
}

}  // namespace imcf
