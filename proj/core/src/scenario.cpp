#include "ricci_lab/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "ricci_lab/errors.hpp"
#include "ricci_lab/report.hpp"

namespace rlab::cli {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_double(const std::string& text, int line, const std::string& key) {
  const char* begin = text.c_str();
  char* end = nullptr;
  const double value = std::strtod(begin, &end);
  if (text.empty() || end != begin + text.size() || !std::isfinite(value))
    throw ConfigError("expected a finite number, got '" + text + "'", line, key);
  return value;
}

template <typename Int>
Int to_integer(const std::string& text, int line, const std::string& key) {
  Int value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size())
    throw ConfigError("expected an integer, got '" + text + "'", line, key);
  return value;
}

std::vector<double> to_list(const std::string& text, int line, const std::string& key) {
  std::string cleaned = text;
  for (char& c : cleaned)
    if (c == '[' || c == ']') c = ' ';
  std::vector<double> out;
  std::stringstream in(cleaned);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (item.empty()) throw ConfigError("empty list entry", line, key);
    out.push_back(to_double(item, line, key));
  }
  if (out.empty()) throw ConfigError("list must not be empty", line, key);
  return out;
}

using LineOf = std::function<int(const std::string&)>;

void check(bool ok, const std::string& message, const std::string& key, const LineOf& line_of) {
  if (!ok) throw ConfigError(message, line_of(key), key);
}

void validate_impl(const Scenario& s, const LineOf& line_of) {
  check(s.family == "round_sphere" || s.family == "flat_torus" || s.family == "conformal_s2",
        "family must be round_sphere, flat_torus or conformal_s2", "family", line_of);
  check(s.n >= 2, "n must be >= 2", "n", line_of);
  if (s.family == "flat_torus") {
    check(s.lengths.size() >= 2, "a flat torus needs at least two side lengths", "lengths", line_of);
    check(static_cast<int>(s.lengths.size()) == s.n,
          "n must equal the number of torus side lengths", "n", line_of);
    for (double l : s.lengths) check(l > 0.0, "torus side lengths must be > 0", "lengths", line_of);
  }
  if (s.family == "conformal_s2") {
    check(s.n == 2, "conformal_s2 is two-dimensional (n = 2)", "n", line_of);
    check(s.preset == "round" || s.preset == "bumped", "preset must be round or bumped", "preset",
          line_of);
  }
  check(s.r0 > 0.0, "r0 must be > 0", "r0", line_of);
  check(s.grid_n >= 16 && s.grid_n <= 1024, "grid_n must lie in [16, 1024]", "grid_n", line_of);
  check(s.dt > 0.0, "dt must be > 0", "dt", line_of);
  if (s.family == "flat_torus")
    check(s.t_end_fraction > 0.0, "t_end_fraction must be > 0", "t_end_fraction", line_of);
  else
    check(s.t_end_fraction > 0.0 && s.t_end_fraction < 1.0, "t_end_fraction must lie in (0, 1)",
          "t_end_fraction", line_of);
  check(s.snapshots >= 2, "snapshots must be >= 2", "snapshots", line_of);
  check(!s.q_list.empty(), "q_list must not be empty", "q_list", line_of);
  for (double q : s.q_list) check(q >= 1.0 && q < s.n, "every q must satisfy 1 <= q < n", "q_list", line_of);
  check(!s.mu_list.empty(), "mu_list must not be empty", "mu_list", line_of);
  for (double mu : s.mu_list)
    check(mu >= 1.0 && mu < 2.0 && mu < s.n, "every mu must satisfy 1 <= mu < min(2, n)", "mu_list",
          line_of);
  check(s.sigma_min > 0.0, "sigma_min must be > 0", "sigma_min", line_of);
  check(s.sigma_max > s.sigma_min, "sigma_max must exceed sigma_min", "sigma_max", line_of);
  check(s.sigma_count >= 2, "sigma_count must be >= 2", "sigma_count", line_of);
  check(s.field_budget >= 50, "field_budget must be >= 50", "field_budget", line_of);
  check(s.rho > 0.0, "rho must be > 0", "rho", line_of);
  check(s.safety >= 1.0, "safety must be >= 1", "safety", line_of);
  check(!s.out_dir.empty(), "out_dir must not be empty", "out_dir", line_of);
}

std::string join(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : "") + format_double(values[i]);
  return out;
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  Scenario s;
  std::map<std::string, int> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    const std::string content = trim(std::string_view(raw).substr(0, hash));
    if (content.empty()) continue;
    const auto eq = content.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
    const std::string key = trim(std::string_view(content).substr(0, eq));
    const std::string value = trim(std::string_view(content).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key", line);
    if (!seen.emplace(key, line).second) throw ConfigError("duplicate key", line, key);

    if (key == "family") s.family = value;
    else if (key == "n") s.n = to_integer<int>(value, line, key);
    else if (key == "r0") s.r0 = to_double(value, line, key);
    else if (key == "lengths") s.lengths = to_list(value, line, key);
    else if (key == "preset") s.preset = value;
    else if (key == "bump_a") s.bump_a = to_double(value, line, key);
    else if (key == "bump_b") s.bump_b = to_double(value, line, key);
    else if (key == "grid_n") s.grid_n = to_integer<int>(value, line, key);
    else if (key == "dt") s.dt = to_double(value, line, key);
    else if (key == "t_end_fraction") s.t_end_fraction = to_double(value, line, key);
    else if (key == "snapshots") s.snapshots = to_integer<int>(value, line, key);
    else if (key == "q_list") s.q_list = to_list(value, line, key);
    else if (key == "q") s.q_list = {to_double(value, line, key)};
    else if (key == "mu_list") s.mu_list = to_list(value, line, key);
    else if (key == "sigma_min") s.sigma_min = to_double(value, line, key);
    else if (key == "sigma_max") s.sigma_max = to_double(value, line, key);
    else if (key == "sigma_count") s.sigma_count = to_integer<int>(value, line, key);
    else if (key == "field_budget") s.field_budget = to_integer<int>(value, line, key);
    else if (key == "seed") s.seed = to_integer<std::uint64_t>(value, line, key);
    else if (key == "rho") s.rho = to_double(value, line, key);
    else if (key == "safety") s.safety = to_double(value, line, key);
    else if (key == "out_dir") s.out_dir = value;
    else throw ConfigError("unknown key", line, key);
  }
  if (seen.contains("q") && seen.contains("q_list"))
    throw ConfigError("q and q_list are mutually exclusive", seen.at("q"), "q");
  // A torus scenario without an explicit n takes its dimension from the side lengths.
  if (s.family == "flat_torus" && !seen.contains("n")) s.n = static_cast<int>(s.lengths.size());
  // The single-value form `q` reports errors under its own name.
  const bool single_q = seen.contains("q");
  try {
    validate_impl(s, [&](const std::string& key) {
      const auto it = seen.find(single_q && key == "q_list" ? "q" : key);
      return it == seen.end() ? 0 : it->second;
    });
  } catch (const ConfigError& e) {
    if (!single_q || e.key() != "q_list") throw;
    throw ConfigError(e.what(), e.line(), "q");
  }
  return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

void validate(const Scenario& scenario) {
  validate_impl(scenario, [](const std::string&) { return 0; });
}

std::string echo_scenario(const Scenario& s) {
  std::ostringstream out;
  out << "family = " << s.family << '\n'
      << "n = " << s.n << '\n'
      << "r0 = " << format_double(s.r0) << '\n'
      << "lengths = " << join(s.lengths) << '\n'
      << "preset = " << s.preset << '\n'
      << "bump_a = " << format_double(s.bump_a) << '\n'
      << "bump_b = " << format_double(s.bump_b) << '\n'
      << "grid_n = " << s.grid_n << '\n'
      << "dt = " << format_double(s.dt) << '\n'
      << "t_end_fraction = " << format_double(s.t_end_fraction) << '\n'
      << "snapshots = " << s.snapshots << '\n'
      << "q_list = " << join(s.q_list) << '\n'
      << "mu_list = " << join(s.mu_list) << '\n'
      << "sigma_min = " << format_double(s.sigma_min) << '\n'
      << "sigma_max = " << format_double(s.sigma_max) << '\n'
      << "sigma_count = " << s.sigma_count << '\n'
      << "field_budget = " << s.field_budget << '\n'
      << "seed = " << s.seed << '\n'
      << "rho = " << format_double(s.rho) << '\n'
      << "safety = " << format_double(s.safety) << '\n'
      << "out_dir = " << s.out_dir << '\n';
  for (double q : s.q_list)
    out << "# derived: q = " << format_double(q) << " -> p = "
        << format_double(s.n * q / (s.n - q)) << '\n';
  return out.str();
}

MetricState initial_state(const Scenario& s) {
  if (s.family == "round_sphere") return make_round_sphere(s.n, s.r0);
  if (s.family == "flat_torus") return make_flat_torus(s.lengths);
  return make_conformal_s2(s.preset, s.grid_n, s.r0, BumpParameters{s.bump_a, s.bump_b});
}

double flow_horizon(const Scenario& s) { return initial_state(s).extinction_time(); }

double flow_end_time(const Scenario& s) {
  const double horizon = flow_horizon(s);
  return std::isfinite(horizon) ? s.t_end_fraction * horizon : s.t_end_fraction;
}

}  // namespace rlab::cli
