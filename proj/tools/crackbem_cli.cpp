// Command-line front end: crackbem <solve|convergence|td-map|energy> --config <path> [--out <dir>] [--threads <n>]

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "crackbem/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Small-crack elasticity experiments: forward solves, asymptotic comparisons, energy and td maps"};
  app.require_subcommand(1);

  std::string config;
  std::string out;
  int threads = 1;
  for (const char* name : {"solve", "convergence", "td-map", "energy"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "Experiment configuration (JSON)")->required();
    sub->add_option("--out", out, "Output directory (overrides output.directory)");
    sub->add_option("--threads", threads, "Worker threads for independent jobs");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : crackbem::harness::kConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  std::optional<std::filesystem::path> out_dir;
  if (!out.empty()) out_dir = out;
  return crackbem::harness::run_command(command, config, out_dir, threads);
}
