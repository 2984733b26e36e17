// Command-line entry point: one subcommand per experiment task, shared flags
// for config/output/parallelism.  Exit codes: 0 pass, 1 assertion or runtime
// failure, 2 usage/config error.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wirehom/experiments.hpp"

namespace {

struct Args {
  std::string config;
  std::string out = "out";
  int jobs = 1;
  unsigned long seed = 0;
  std::string tolerance_profile = "default";
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "wirehom - cell problems, connectivity classification and plane-wave "
      "scattering for thin-wire interface models"};
  app.require_subcommand(1);

  Args args;
  std::string chosen_task;

  const std::vector<std::pair<std::string, std::string>> tasks = {
      {"cell2d-solve", "Solve the transverse cell potentials for one wire"},
      {"verify-estimates", "Ring-mean and energy-growth checks over a radius ladder"},
      {"defect-ladder", "Defect pairs (a, b) along an eta ladder for a sequence law"},
      {"classify", "Connectivity verdicts and effective interface kind for a law"},
      {"scatter", "Reflection/transmission matrices and field profile"},
      {"sweep", "Parameter sweeps (incidence angle, wire radius)"},
  };
  for (const auto& [name, description] : tasks) {
    CLI::App* sub = app.add_subcommand(name, description);
    sub->add_option("--config", args.config, "Experiment config file (text or JSON)")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", args.out, "Output directory for artifacts");
    sub->add_option("--jobs", args.jobs, "Worker threads for independent points")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", args.seed, "Random seed for property sweeps");
    sub->add_option("--tolerance-profile", args.tolerance_profile,
                    "Tolerance set recorded in the manifest and enforced")
        ->check(CLI::IsMember({"default", "strict"}));
    sub->callback([&chosen_task, name = name] { chosen_task = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help() << std::flush;
    return 2;
  }

  try {
    const wirehom::ConfigMap cfg = wirehom::load_config_file(args.config);
    wirehom::RunOptions opt;
    opt.out_dir = args.out;
    opt.jobs = args.jobs;
    opt.seed = args.seed;
    opt.tolerance_profile = args.tolerance_profile;
    return wirehom::run(cfg, opt, std::cout, chosen_task);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
