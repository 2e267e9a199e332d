#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ricci_lab/manifold_models.hpp"

namespace rlab::cli {

/// Parsed `key = value` scenario. Every field has a default; parse_scenario validates
/// the result against the preconditions of the modules it feeds.
struct Scenario {
  std::string family = "round_sphere";  ///< round_sphere | flat_torus | conformal_s2
  int n = 2;
  double r0 = 1.0;
  std::vector<double> lengths = {6.283185307179586};
  std::string preset = "round";  ///< conformal_s2: round | bumped
  double bump_a = 0.3;
  double bump_b = 0.0;
  int grid_n = 128;
  double dt = 1e-4;
  double t_end_fraction = 0.9;
  int snapshots = 10;
  std::vector<double> q_list = {1.0, 1.25, 1.5};
  std::vector<double> mu_list = {1.0, 1.5};
  double sigma_min = 1e-3;
  double sigma_max = 1e3;
  int sigma_count = 25;
  int field_budget = 200;
  std::uint64_t seed = 1;
  double rho = 1.0;
  double safety = 1.1;
  std::string out_dir = "ricci_lab_out";
};

/// Throws ConfigError naming the line and key on unknown keys, bad values or
/// violated preconditions.
Scenario parse_scenario(std::string_view text);
Scenario load_scenario(const std::filesystem::path& path);

/// Re-checks every precondition (used after command-line overrides).
void validate(const Scenario& scenario);

/// Every key with its effective value, plus derived exponents p, one `key = value` per line.
std::string echo_scenario(const Scenario& scenario);

MetricState initial_state(const Scenario& scenario);
/// Flow horizon T: the extinction time for spheres, +inf for tori.
double flow_horizon(const Scenario& scenario);
/// End time of the simulated flow: t_end_fraction * T, or t_end_fraction itself when T = inf.
double flow_end_time(const Scenario& scenario);

}  // namespace rlab::cli
