#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "imcf/flow.hpp"
#include "imcf/scenario.hpp"

namespace imcf {

inline constexpr const char* kCsvHeader =
    "t,area,int_fH,int_f_vol,Q,minkowski_deficit,brendle_gap,div_residual,H_min,H_max,"
    "grad_phi_max,chi_max,kappa_dev_max";

void write_csv(std::ostream& out, const std::vector<DiagnosticsRecord>& series);

struct RateEstimate {
  std::string quantity;
  double expected = 0.0;
  std::optional<DecayFit> fit;  // empty when the window cannot be fitted
  std::string note;
};

struct RunReport {
  Scenario scenario;
  std::vector<DiagnosticsRecord> series;
  bool aborted = false;
  std::string abort_reason;
  double abort_time = 0.0;
  double tolerance = 0.0;  // calibrated monotonicity tolerance
  std::vector<MonotonicityViolation> violations;
  double area_law_error = 0.0;
  std::vector<RateEstimate> rates;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
  std::filesystem::path plot_path;

  int exit_status() const { return aborted ? 2 : 0; }
};

/// Flow, diagnostics and rate fits without touching the filesystem.
RunReport simulate(const Scenario& scenario);

/// Late-window ([t_end / 2, t_end]) fits of H_max - (n-1), max |grad phi| and kappa_dev_max.
std::vector<RateEstimate> fit_decay_rates(const std::vector<DiagnosticsRecord>& series, int n);

void write_summary(std::ostream& out, const RunReport& report);

/// Directory for artifacts: $IMCF_LAB_OUT when set, otherwise scenario.output_dir.
std::filesystem::path output_directory(const Scenario& scenario);

/// simulate() and write <name>.csv, <name>_summary.txt and <name>.gp to output_directory().
RunReport run_scenario(const Scenario& scenario);

struct ConvergenceRow {
  int resolution = 0;
  double max_dt = 0.0;
  double area_law_error = 0.0;
  double q_error = 0.0;  // coordinate spheres: max |Q - Q_*|; otherwise |Q_N(t_end) - Q_finest(t_end)|
  double div_residual = 0.0;
  bool aborted = false;
};

struct ConvergenceTable {
  std::vector<ConvergenceRow> rows;
  double area_law_order = 0.0;  // least-squares slope of -log(error) against log(N)
  double q_order = 0.0;
  double div_residual_order = 0.0;
};

/// Runs the scenario at each resolution with max_dt scaled by (N_0 / N)^2, N_0 the smallest.
/// Throws ConfigurationError for fewer than three resolutions.
ConvergenceTable convergence_study(const Scenario& scenario, std::vector<int> resolutions);

void write_convergence(std::ostream& out, const ConvergenceTable& table);

/// Least-squares order of err ~ N^{-p}; NaN when fewer than two positive errors.
double fitted_order(const std::vector<int>& resolutions, const std::vector<double>& errors);

}  // namespace imcf
