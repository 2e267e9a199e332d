#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "ricci_lab/commands.hpp"
#include "ricci_lab/errors.hpp"
#include "ricci_lab/scenario.hpp"

int main(int argc, char** argv) {
  using namespace rlab::cli;

  CLI::App app{"Ricci-flow inequality laboratory"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<int> grid_n;

  for (const std::string& name : command_names()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario_path, "scenario file (key = value lines)")->required();
    sub->add_option("--out", out_dir, "output directory (overrides out_dir)");
    sub->add_option("--seed", seed, "field-family seed (overrides seed)");
    sub->add_option("--grid-n", grid_n, "grid size (overrides grid_n)");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  Scenario scenario;
  try {
    scenario = load_scenario(scenario_path);
    if (out_dir) scenario.out_dir = *out_dir;
    if (seed) scenario.seed = *seed;
    if (grid_n) scenario.grid_n = *grid_n;
    validate(scenario);
  } catch (const rlab::ConfigError& e) {
    std::cerr << "config error";
    if (e.line() > 0) std::cerr << " at line " << e.line();
    if (!e.key().empty()) std::cerr << " (key " << e.key() << ')';
    std::cerr << ": " << e.what() << '\n';
    return kExitConfigError;
  }
  return run_command(command, scenario, std::cout);
}
