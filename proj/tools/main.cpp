// slidekit: run experiments from a config file, describe them, list them.
#include <iostream>

#include <CLI11.hpp>

#include "runner.hpp"
#include "slidekit/parallel.hpp"

int main(int argc, char** argv) {
  namespace rn = slidekit::runner;
  CLI::App app{"slidekit experiment runner"};
  app.require_subcommand(0, 1);
  app.fallthrough();

  std::string config, out_dir = "out";
  int threads = 1;
  bool list = false;
  app.add_option("--config", config, "experiment config file");
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--threads", threads, "worker threads (speed only, never results)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_flag("--list", list, "list experiment names");

  auto* run = app.add_subcommand("run", "run an experiment config");
  std::string run_config;
  run->add_option("CONFIG", run_config, "experiment config file");

  auto* describe = app.add_subcommand("describe", "print what an experiment computes");
  std::string name;
  describe->add_option("name", name, "experiment name")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  if (list) {
    for (const auto& n : rn::experiment_names()) std::cout << n << '\n';
    return 0;
  }
  if (*describe) {
    try {
      std::cout << rn::describe(name) << '\n';
      return 0;
    } catch (const slidekit::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 2;
    }
  }
  if (*run && !run_config.empty()) config = run_config;
  if (config.empty()) {
    std::cerr << app.help();
    return 2;
  }
  slidekit::parallel::set_threads(threads);
  return rn::run(config, out_dir, std::cout, std::cerr);
}
