#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "app/commands.hpp"
#include "app/config.hpp"

int main(int argc, char** argv) {
  using namespace kinscat::app;
  CLI::App cli{"Spectral kinetic solver for final-state scattering of Vlasov-type plasmas"};
  cli.footer(config_reference());
  std::string command;
  std::string config_path;
  std::string out;
  int threads = 0;
  bool verbose = false;
  cli.add_option("command", command, "penrose | kernel | damp | scatter | roundtrip | poisson | selftest")
      ->required()
      ->check(CLI::IsMember(command_names()));
  cli.add_option("--config", config_path, "key = value config file");
  cli.add_option("--out", out, "output directory (overrides output.dir)");
  cli.add_option("--threads", threads, "worker threads (overrides run.threads)")->check(CLI::PositiveNumber);
  cli.add_flag("--verbose", verbose, "extra progress output");
  try {
    cli.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return cli.exit(e);
  } catch (const CLI::ParseError& e) {
    cli.exit(e);
    return kExitConfig;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = parse_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
  if (!out.empty()) cfg.output_dir = out;
  if (threads > 0) cfg.threads = threads;
  return run_command(command, cfg, std::cout, verbose);
}
