#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "imcf/errors.hpp"
#include "imcf/experiment.hpp"
#include "imcf/functionals.hpp"

namespace {

namespace fs = std::filesystem;

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

imcf::Scenario sphere_scenario() {
  return imcf::parse_scenario("name = sphere\nn = 3\nm = 2\ns = 2\nN = 32\nt_end = 0.5\n");
}

class ScopedOutputDir {
 public:
  explicit ScopedOutputDir(const std::string& tag)
      : path_(fs::temp_directory_path() / ("imcf_experiment_test_" + tag)) {
    fs::remove_all(path_);
    setenv("IMCF_LAB_OUT", path_.c_str(), 1);
  }
  ~ScopedOutputDir() {
    unsetenv("IMCF_LAB_OUT");
    fs::remove_all(path_);
  }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

TEST(Csv, HeaderIsExact) {
  std::ostringstream os;
  imcf::write_csv(os, {});
  EXPECT_EQ(os.str(),
            "t,area,int_fH,int_f_vol,Q,minkowski_deficit,brendle_gap,div_residual,H_min,H_max,"
            "grad_phi_max,chi_max,kappa_dev_max\n");
}

TEST(Csv, RowsHaveThirteenColumns) {
  const auto report = imcf::simulate(sphere_scenario());
  std::ostringstream os;
  imcf::write_csv(os, report.series);
  std::istringstream in(os.str());
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 12) << line;
    ++rows;
  }
  EXPECT_EQ(rows, static_cast<int>(report.series.size()) + 1);
}

TEST(RunScenario, SphereQColumnIsConstant) {
  const auto report = imcf::simulate(sphere_scenario());
  EXPECT_FALSE(report.aborted);
  EXPECT_EQ(report.exit_status(), 0);
  for (const auto& rec : report.series) {
    EXPECT_NEAR(rec.Q, imcf::Q_equality_value(3), 1e-6);
  }
  EXPECT_TRUE(report.violations.empty());
}

TEST(RunScenario, SameSeedGivesByteIdenticalCsv) {
  const auto sc = imcf::parse_scenario(
      "name = rnd\nn = 3\nm = 2\nsurface = random\ns = 2\nseed = 11\nN = 32\nt_end = 0.3\n");
  std::string first;
  {
    ScopedOutputDir dir("a");
    const auto report = imcf::run_scenario(sc);
    EXPECT_EQ(report.csv_path, dir.path() / "rnd.csv");
    EXPECT_TRUE(fs::exists(report.summary_path));
    EXPECT_TRUE(fs::exists(report.plot_path));
    first = slurp(report.csv_path);
  }
  ScopedOutputDir dir("b");
  const auto report = imcf::run_scenario(sc);
  EXPECT_EQ(slurp(report.csv_path), first);
  EXPECT_FALSE(first.empty());
}

TEST(RunScenario, SummaryReportsRates) {
  const auto report = imcf::simulate(sphere_scenario());
  std::ostringstream os;
  imcf::write_summary(os, report);
  EXPECT_NE(os.str().find("sphere"), std::string::npos);
  EXPECT_EQ(report.rates.size(), 3u);
}

TEST(Convergence, NeedsThreeResolutions) {
  EXPECT_THROW(imcf::convergence_study(sphere_scenario(), {16, 32}), imcf::ConfigurationError);
  EXPECT_THROW(imcf::convergence_study(sphere_scenario(), {16, 32, 32}), imcf::ConfigurationError);
}

TEST(Convergence, PerturbedAreaLawConverges) {
  const auto sc = imcf::parse_scenario(
      "name = pert\nn = 3\nm = 2\nsurface = perturbed\ns = 2\nmode = 2\namplitude = 0.2\nN = 32\n"
      "t_end = 0.5\n");
  const auto table = imcf::convergence_study(sc, {16, 32, 64});
  ASSERT_EQ(table.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(table.rows[1].max_dt, 0.25 * table.rows[0].max_dt);
  EXPECT_GT(table.area_law_order, 2.0);
  std::ostringstream os;
  imcf::write_convergence(os, table);
  EXPECT_EQ(os.str().rfind("N,max_dt,area_law_error,q_error,div_residual,aborted\n", 0), 0u);
}

TEST(FittedOrder, RecoversPowerLaw) {
  EXPECT_NEAR(imcf::fitted_order({16, 32, 64}, {1.0, 1.0 / 16, 1.0 / 256}), 4.0, 1e-12);
  EXPECT_TRUE(std::isnan(imcf::fitted_order({16, 32}, {1.0, 0.0})));
}

TEST(DecayRates, WindowIsLateHalf) {
  std::vector<imcf::DiagnosticsRecord> series;
  for (int k = 0; k <= 40; ++k) {
    imcf::DiagnosticsRecord rec;
    rec.t = 0.1 * k;
    rec.H_max = 2.0 + std::exp(-rec.t);
    rec.grad_phi_max = std::exp(-0.5 * rec.t);
    rec.kappa_dev_max = std::exp(-rec.t);
    series.push_back(rec);
  }
  const auto rates = imcf::fit_decay_rates(series, 3);
  ASSERT_EQ(rates.size(), 3u);
  ASSERT_TRUE(rates[0].fit.has_value());
  EXPECT_NEAR(rates[0].fit->rate, -1.0, 1e-9);
  EXPECT_NEAR(rates[1].fit->rate, -0.5, 1e-9);
  EXPECT_EQ(rates[0].fit->samples, 21);
  EXPECT_DOUBLE_EQ(rates[1].expected, -0.5);
}

TEST(Cookbook, EveryScenarioRunsToCompletion) {
  for (const auto& entry : fs::directory_iterator(IMCF_SCENARIO_DIR)) {
    if (entry.path().extension() != ".scn") {
      continue;
    }
    const auto report = imcf::simulate(imcf::load_scenario(entry.path().string()));
    EXPECT_FALSE(report.aborted) << entry.path() << ": " << report.abort_reason;
    if (report.scenario.surface.kind == imcf::SurfaceKind::offcenter) {
      // Q is exactly constant here, so truncation drift shows up against the round-off
      // tolerance; it must stay at truncation size.
      EXPECT_LT(imcf::max_Q_increment(report.series), 1e-8) << entry.path();
    } else {
      EXPECT_TRUE(report.violations.empty()) << entry.path();
    }
    EXPECT_DOUBLE_EQ(report.series.back().t, report.scenario.flow.t_end);
  }
}

}  // namespace
