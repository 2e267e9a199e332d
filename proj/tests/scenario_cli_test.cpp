#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "ricci_lab/commands.hpp"
#include "ricci_lab/errors.hpp"
#include "ricci_lab/scenario.hpp"

namespace rlab::cli {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ricci_lab_cli_test" / name;
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

/// Small sphere scenario: enough to exercise every command in a few seconds.
Scenario small_sphere(const fs::path& out) {
  Scenario s = parse_scenario(
      "family = round_sphere\n"
      "grid_n = 48\n"
      "dt = 1e-3\n"
      "t_end_fraction = 0.5\n"
      "snapshots = 3\n"
      "q_list = 1, 1.5\n"
      "mu_list = 1, 1.5\n"
      "field_budget = 60\n"
      "sigma_count = 9\n");
  s.out_dir = out.string();
  return s;
}

int run(std::string_view command, const Scenario& s) {
  std::ostringstream log;
  const int status = run_command(command, s, log);
  if (status != kExitOk) std::cerr << log.str();
  return status;
}

TEST(ParseScenarioTest, UnitSphereAndDefaults) {
  const Scenario s = parse_scenario("family = round_sphere\nn = 2\nr0 = 1\n");
  EXPECT_EQ(s.family, "round_sphere");
  EXPECT_EQ(s.n, 2);
  EXPECT_EQ(s.r0, 1.0);
  EXPECT_EQ(s.grid_n, Scenario{}.grid_n);
  EXPECT_EQ(s.safety, 1.1);
  EXPECT_NEAR(flow_horizon(s), 0.5, 1e-15);
  EXPECT_NEAR(flow_end_time(s), 0.45, 1e-15);
}

TEST(ParseScenarioTest, DerivedExponentEchoed) {
  const Scenario s = parse_scenario("n = 2\nq = 1.5\n");
  ASSERT_EQ(s.q_list.size(), 1u);
  const std::string echo = echo_scenario(s);
  EXPECT_NE(echo.find("# derived: q = 1.5 -> p = 6\n"), std::string::npos) << echo;
  // The echo is itself a valid scenario reproducing the same values.
  EXPECT_EQ(echo_scenario(parse_scenario(echo)), echo);
}

TEST(ParseScenarioTest, ExponentRangeRejected) {
  try {
    parse_scenario("# header\nn = 2\nq = 2.5\n");
    FAIL() << "q >= n accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_EQ(e.key(), "q");
  }
  try {
    parse_scenario("q_list = 1, 2\n");
    FAIL() << "q >= n accepted";
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1);
    EXPECT_EQ(e.key(), "q_list");
  }
  EXPECT_THROW(parse_scenario("mu_list = 2\n"), ConfigError);
  EXPECT_THROW(parse_scenario("q = 1.5\nq_list = 1.5\n"), ConfigError);
}

TEST(ParseScenarioTest, MalformedInputNamesLineAndKey) {
  const auto expect_error = [](const std::string& text, int line, const std::string& key) {
    try {
      parse_scenario(text);
      ADD_FAILURE() << "accepted: " << text;
    } catch (const ConfigError& e) {
      EXPECT_EQ(e.line(), line) << text;
      EXPECT_EQ(e.key(), key) << text;
    }
  };
  expect_error("family = round_sphere\ncolour = blue\n", 2, "colour");
  expect_error("n = 2\nn = 3\n", 2, "n");
  expect_error("\n\ngrid_n = many\n", 3, "grid_n");
  expect_error("grid_n = 12.5\n", 1, "grid_n");
  expect_error("dt = 1e-3x\n", 1, "dt");
  expect_error("grid_n = 8\n", 1, "grid_n");
  expect_error("field_budget = 10\n", 1, "field_budget");
  expect_error("safety = 0.5\n", 1, "safety");
  expect_error("t_end_fraction = 1\n", 1, "t_end_fraction");
  expect_error("family = klein_bottle\n", 1, "family");
  EXPECT_THROW(parse_scenario("just words\n"), ConfigError);
}

TEST(ParseScenarioTest, TorusDimensionFromLengths) {
  const Scenario s = parse_scenario("family = flat_torus\nlengths = [1, 2, 3]\n");
  EXPECT_EQ(s.n, 3);
  EXPECT_EQ(s.lengths, (std::vector<double>{1, 2, 3}));
  EXPECT_FALSE(std::isfinite(flow_horizon(s)));
  EXPECT_THROW(parse_scenario("family = flat_torus\nn = 2\nlengths = 1, 2, 3\n"), ConfigError);
}

TEST(ParseScenarioTest, ShippedScenariosLoad) {
  for (const auto& entry : fs::directory_iterator(RICCI_LAB_SCENARIO_DIR))
    if (entry.path().extension() == ".cfg") EXPECT_NO_THROW(load_scenario(entry.path())) << entry.path();
  EXPECT_THROW(load_scenario("/nonexistent/scenario.cfg"), ConfigError);
}

TEST(RegistryTest, CheckIdsUnique) {
  const auto& ids = registered_check_ids();
  EXPECT_EQ(std::set<std::string>(ids.begin(), ids.end()).size(), ids.size());
  EXPECT_EQ(command_names(), (std::vector<std::string>{"flow", "spectrum", "verify", "kappa", "report"}));
}

class CommandTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    out_ = scratch("verify_a");
    status_ = run("verify", small_sphere(out_));
  }
  static inline fs::path out_;
  static inline int status_ = -1;
};

TEST_F(CommandTest, VerifyPassesAndListsEveryIdOnce) {
  EXPECT_EQ(status_, kExitOk);
  std::istringstream summary(slurp(out_ / "verify_summary.csv"));
  std::string line;
  std::getline(summary, line);
  EXPECT_EQ(line, "check_id,kind,rows,failures,worst_margin,status");
  std::multiset<std::string> seen;
  while (std::getline(summary, line) && !line.empty()) seen.insert(line.substr(0, line.find(',')));
  for (const std::string& id : registered_check_ids()) EXPECT_EQ(seen.count(id), 1u) << id;
  EXPECT_EQ(seen.size(), registered_check_ids().size());
}

TEST_F(CommandTest, ReportIdsAreRegistered) {
  std::istringstream reports(slurp(out_ / "reports.csv"));
  std::string line;
  std::getline(reports, line);
  EXPECT_EQ(line, "check_id,t,q,p,mu,sigma,lhs,rhs,margin,witness,pass");
  const auto& ids = registered_check_ids();
  int rows = 0;
  while (std::getline(reports, line) && !line.empty()) {
    ++rows;
    const std::string id = line.substr(0, line.find(','));
    EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
  }
  EXPECT_GT(rows, 0);
}

TEST_F(CommandTest, RerunIsByteIdentical) {
  const fs::path again = scratch("verify_b");
  ASSERT_EQ(run("verify", small_sphere(again)), status_);
  for (const char* file : {"reports.csv", "constants.csv", "verify_summary.csv"}) {
    const std::string a = slurp(out_ / file);
    EXPECT_FALSE(a.empty()) << file;
    EXPECT_EQ(a, slurp(again / file)) << file;
  }
}

TEST_F(CommandTest, ReportAfterVerify) {
  const Scenario s = small_sphere(out_);
  ASSERT_EQ(run("flow", s), kExitOk);
  ASSERT_EQ(run("report", s), kExitOk);
  for (const char* file : {"flow_curvature.svg", "constants_vs_t.svg", "norm_curves.svg", "summary.txt"})
    EXPECT_TRUE(fs::exists(out_ / file)) << file;
  const std::string svg = slurp(out_ / "norm_curves.svg");
  EXPECT_NE(svg.find("alpha"), std::string::npos);
  EXPECT_EQ(svg, (run("report", s), slurp(out_ / "norm_curves.svg")));
}

TEST(ExitCodeTest, ReportWithoutInputs) {
  EXPECT_EQ(run("report", small_sphere(scratch("empty"))), kExitConfigError);
}

TEST(ExitCodeTest, UnknownCommand) {
  EXPECT_EQ(run("frobnicate", small_sphere(scratch("unknown"))), kExitConfigError);
}

TEST(ExitCodeTest, CflViolatingStep) {
  Scenario s = parse_scenario("family = conformal_s2\npreset = bumped\nbump_b = 0.6\ndt = 1e-2\n");
  s.out_dir = scratch("cfl").string();
  EXPECT_EQ(run("flow", s), kExitConfigError);
}

TEST(ExitCodeTest, KappaGate) {
  Scenario torus = load_scenario(fs::path(RICCI_LAB_SCENARIO_DIR) / "flat_torus.cfg");
  torus.out_dir = scratch("kappa_torus").string();
  torus.grid_n = 32;
  EXPECT_EQ(run("kappa", torus), kExitHypothesisRefused);
  const std::string summary = slurp(fs::path(torus.out_dir) / "kappa_summary.txt");
  EXPECT_NE(summary.find("refused"), std::string::npos) << summary;

  EXPECT_EQ(run("kappa", small_sphere(scratch("kappa_sphere"))), kExitOk);
}

TEST(ExitCodeTest, SpectrumReportsHypothesis) {
  Scenario torus = load_scenario(fs::path(RICCI_LAB_SCENARIO_DIR) / "flat_torus.cfg");
  torus.out_dir = scratch("spectrum_torus").string();
  EXPECT_EQ(run("spectrum", torus), kExitOk);
  EXPECT_TRUE(fs::exists(fs::path(torus.out_dir) / "spectrum.csv"));
  EXPECT_TRUE(fs::exists(fs::path(torus.out_dir) / "hypothesis.txt"));
}

int run_binary(const std::string& args) {
  const std::string command = std::string(RICCI_LAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

TEST(BinaryTest, ExitStatusContract) {
  const fs::path dir = scratch("binary");
  fs::create_directories(dir);
  const std::string scenarios = RICCI_LAB_SCENARIO_DIR;
  EXPECT_EQ(run_binary("kappa --scenario " + scenarios + "/flat_torus.cfg --grid-n 32 --out " +
                       (dir / "torus").string()),
            kExitHypothesisRefused);
  EXPECT_EQ(run_binary("flow --scenario " + scenarios + "/unit_sphere.cfg --out " +
                       (dir / "sphere").string()),
            kExitOk);
  EXPECT_TRUE(fs::exists(dir / "sphere" / "flow_trace.csv"));
  EXPECT_EQ(run_binary("flow --scenario " + scenarios + "/unit_sphere.cfg --grid-n 4"),
            kExitConfigError);
  EXPECT_EQ(run_binary("flow"), kExitConfigError);

  std::ofstream(dir / "bad.cfg") << "n = 2\nq = 2.5\n";
  EXPECT_EQ(run_binary("verify --scenario " + (dir / "bad.cfg").string()), kExitConfigError);
}

}  // namespace
}  // namespace rlab::cli
