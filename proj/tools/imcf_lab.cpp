// imcf-lab: run flow scenarios, convergence studies and the acceptance suite.

#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "imcf/acceptance.hpp"
#include "imcf/errors.hpp"
#include "imcf/experiment.hpp"
#include "imcf/scenario.hpp"

namespace {

int command_run(const std::string& path) {
  const imcf::Scenario scenario = imcf::load_scenario(path);
  const imcf::RunReport report = imcf::run_scenario(scenario);
  imcf::write_summary(std::cout, report);
  std::cout << "wrote " << report.csv_path.string() << "\n"
            << "wrote " << report.summary_path.string() << "\n"
            << "wrote " << report.plot_path.string() << "\n";
  if (report.aborted) {
    std::cerr << "imcf-lab: flow aborted at t = " << report.abort_time << ": "
              << report.abort_reason << "\n";
  }
  return report.exit_status();
}

int command_converge(const std::string& path, const std::vector<int>& resolutions) {
  const imcf::Scenario scenario = imcf::load_scenario(path);
  const imcf::ConvergenceTable table = imcf::convergence_study(scenario, resolutions);
  imcf::write_convergence(std::cout, table);

  const std::filesystem::path dir = imcf::output_directory(scenario);
  std::filesystem::create_directories(dir);
  const std::filesystem::path out_path = dir / (scenario.name + "_convergence.csv");
  std::ofstream out(out_path, std::ios::binary);
  imcf::write_convergence(out, table);
  std::cout << "wrote " << out_path.string() << "\n";
  return 0;
}

int command_accept(int resolution, const std::vector<int>& only) {
  imcf::AcceptanceOptions options;
  options.resolution = resolution;
  options.only = only;
  const auto results = imcf::run_acceptance(options, std::cout);
  int failed = 0;
  for (const auto& r : results) {
    failed += r.passed ? 0 : 1;
  }
  std::cout << "acceptance: " << results.size() - failed << "/" << results.size() << " passed\n";
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inverse mean curvature flow laboratory for AdS-Schwarzschild manifolds"};
  app.require_subcommand(1);

  std::string scenario_path;
  auto* run = app.add_subcommand("run", "Flow one scenario and write CSV, summary and plot script");
  run->add_option("scenario", scenario_path, "Scenario file")->required()->check(CLI::ExistingFile);

  std::string converge_path;
  std::vector<int> resolutions{32, 64, 128};
  auto* converge = app.add_subcommand("converge", "Resolution study of one scenario");
  converge->add_option("scenario", converge_path, "Scenario file")
      ->required()
      ->check(CLI::ExistingFile);
  converge->add_option("--res", resolutions, "Comma-separated resolutions (at least three)")
      ->delimiter(',')
      ->capture_default_str();

  int accept_resolution = 0;
  std::vector<int> only;
  auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
  accept->add_option("--res", accept_resolution, "Override every grid resolution (0 = defaults)");
  accept->add_option("--only", only, "Comma-separated criterion numbers")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      return command_run(scenario_path);
    }
    if (*converge) {
      return command_converge(converge_path, resolutions);
    }
    if (*accept) {
      return command_accept(accept_resolution, only);
    }
  } catch (const imcf::ConfigurationError& e) {
    std::cerr << "imcf-lab: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "imcf-lab: error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
