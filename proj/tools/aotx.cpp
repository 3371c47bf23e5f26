// aotx: command-line front end for the resonator transistor simulator.
//
//   aotx spectrum <config.yaml>   per-scenario transmission sweeps (CSV)
//   aotx metrics  <config.yaml>   four-row contrast / loss table (CSV + text)
//   aotx validate                 analytic invariant suite
//
// Exit codes: 0 success, 1 simulation error, 2 config error.

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <string>

#include "aotransistor/io.hpp"

namespace {

aotx::SimulationConfig load(const std::string& config_path, const std::string& manifest_path, int nodes) {
  aotx::SimulationConfig c =
      manifest_path.empty() ? aotx::parse_config(config_path) : aotx::config_from_manifest(manifest_path);
  if (nodes > 0) c.solver.nodes = nodes;
  for (const auto& w : c.scheme.warnings()) std::cerr << "warning: " << w << "\n";
  for (const auto& w : c.cavity.warnings()) std::cerr << "warning: " << w << "\n";
  return c;
}

int report(const aotx::CommandResult& r) {
  for (const auto& f : r.files) std::cout << "wrote " << f << "\n";
  if (r.exit_code != 0) std::cerr << "simulation error; see manifest.json\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Micro-resonator all-optical transistor simulator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string output_dir, seed_manifest;
  int threads = 1, nodes = 0;
  app.add_option("--output-dir", output_dir, "Directory for output files (overrides output.directory)");
  app.add_option("--threads", threads, "Worker threads; never changes output bytes")->check(CLI::PositiveNumber);
  app.add_option("--quadrature-nodes", nodes, "Override the Doppler quadrature node count")
      ->check(CLI::NonNegativeNumber);
  app.add_option("--seed-manifest", seed_manifest, "Reproduce a prior run from its manifest.json");

  std::string config_path;
  auto* spectrum = app.add_subcommand("spectrum", "Write per-scenario detuning sweeps");
  spectrum->add_option("config", config_path, "YAML configuration");
  auto* metrics = app.add_subcommand("metrics", "Write the contrast / loss table");
  metrics->add_option("config", config_path, "YAML configuration");
  auto* validate = app.add_subcommand("validate", "Run the analytic invariant suite");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (validate->parsed()) {
    const aotx::ValidationReport rep = aotx::run_validation();
    std::cout << rep.text();
    return rep.all_pass() ? 0 : 1;
  }

  if (config_path.empty() && seed_manifest.empty()) {
    std::cerr << "error: a config file (or --seed-manifest) is required\n";
    return 2;
  }

  aotx::SimulationConfig cfg;
  try {
    cfg = load(config_path, seed_manifest, nodes);
  } catch (const aotx::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const aotx::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  const aotx::RunOptions opt{output_dir, threads};
  try {
    if (spectrum->parsed()) return report(aotx::cmd_spectrum(cfg, opt));
    if (metrics->parsed()) return report(aotx::cmd_metrics(cfg, opt));
  } catch (const aotx::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
