// End-to-end acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fails.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "ricci_lab/commands.hpp"
#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/errors.hpp"
#include "ricci_lab/field_family.hpp"
#include "ricci_lab/heat_semigroup.hpp"
#include "ricci_lab/inequality_lab.hpp"
#include "ricci_lab/manifold_models.hpp"
#include "ricci_lab/noncollapse.hpp"
#include "ricci_lab/report.hpp"
#include "ricci_lab/ricci_flow.hpp"
#include "ricci_lab/scenario.hpp"

namespace fs = std::filesystem;
using namespace rlab;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kGridN = 128;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

fs::path scenario_dir() { return RICCI_LAB_SCENARIO_DIR; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ricci_lab_acceptance" / name;
  fs::remove_all(dir);
  return dir;
}

FlowTrace simulate(const cli::Scenario& s) {
  FlowOptions options;
  options.snapshots = s.snapshots;
  options.grid_n = s.grid_n;
  return run_flow(cli::initial_state(s), cli::flow_end_time(s), s.dt, options);
}

/// Unit-sphere flow to 0.9 T shared by criteria 9 to 11.
const FlowTrace& sphere_trace() {
  static const FlowTrace trace = simulate(cli::load_scenario(scenario_dir() / "unit_sphere.cfg"));
  return trace;
}

double sphere_a_hat(std::vector<double>* by_time = nullptr) {
  static std::vector<double> values;
  if (values.empty()) {
    const SobolevExponents e(2, 1.5);
    const double r0_minus = max_negative_curvature(discretize(sphere_trace().initial(), kGridN));
    for (const FlowSnapshot& snap : sphere_trace().snapshots) {
      const Discretization g = discretize(snap.state, kGridN);
      values.push_back(
          estimate_uniform_sobolev_constant(e, g, make_field_family(g, {200, 1}), r0_minus).value);
    }
  }
  if (by_time) *by_time = values;
  return *std::max_element(values.begin(), values.end());
}

// 1. Numeric conformal flow from phi = 0 against e^{2 phi(t)} = 1 - 2t.
Outcome conformal_closed_form() {
  FlowOptions options;
  options.snapshots = 46;
  const FlowTrace trace = run_flow(make_conformal_s2("round", kGridN, 1.0), 0.45, 1e-4, options);
  double worst = 0.0;
  for (const FlowSnapshot& snap : trace.snapshots) {
    const double exact = 1.0 - 2.0 * snap.t;
    const Eigen::ArrayXd area = (2.0 * snap.state.conformal().phi.array()).exp();
    worst = std::max(worst, ((area - exact).abs() / exact).maxCoeff());
  }
  Outcome out;
  out.require(!trace.abort_reason.has_value(), "reached t = " + fmt(trace.snapshots.back().t));
  out.require(worst <= 1e-6, "snapshot max rel err " + fmt(worst));
  const double every_step = closed_form_error(trace, 1.0);
  out.require(every_step <= 1e-6, "per-step max rel err " + fmt(every_step));
  return out;
}

// 2. Volume identity on every step of every shipped scenario.
Outcome volume_identity() {
  Outcome out;
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(scenario_dir()))
    if (entry.path().extension() == ".cfg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  for (const fs::path& file : files) {
    const FlowTrace trace = simulate(cli::load_scenario(file));
    const double defect = flow_diagnostics(trace).volume_defect;
    out.require(!trace.abort_reason && defect <= 1e-4,
                file.stem().string() + " defect " + fmt(defect));
  }
  return out;
}

// 3. min R never decreases on the unit-sphere and bumped flows.
Outcome min_r_monotone() {
  Outcome out;
  for (const char* name : {"unit_sphere", "bumped_s2"}) {
    const FlowReport report =
        flow_diagnostics(simulate(cli::load_scenario(scenario_dir() / (std::string(name) + ".cfg"))), 1e-8);
    out.require(report.min_r_violations == 0,
                std::string(name) + " violations " + std::to_string(report.min_r_violations) +
                    ", worst drop " + fmt(report.worst_min_r_drop));
  }
  return out;
}

// 4. Spectral oracles on the unit sphere and the flat torus.
Outcome spectral_oracle() {
  Outcome out;
  const Discretization sphere = discretize(make_round_sphere(2, 1.0), kGridN);
  const double lambda0 = first_eigenvalue(sphere);
  out.require(std::abs(lambda0 - 0.5) <= 1e-3 * 0.5, "lambda0(S2) = " + fmt(lambda0));
  const SpectralDecomposition lap = decompose(laplacian_operator(sphere));
  const double first = lap.eigenvalues[1];
  out.require(std::abs(first - 2.0) <= 1e-3 * 2.0, "first nonzero -Delta = " + fmt(first));
  const double torus = first_eigenvalue(discretize(make_flat_torus({2 * kPi, 2 * kPi}), kGridN));
  out.require(std::abs(torus) <= 1e-10, "lambda0(T2) = " + fmt(torus));
  return out;
}

// 5. Derivation forms on 200 fields x q x mu on three states.
Outcome derivation_suite() {
  Outcome out;
  const std::vector<std::pair<std::string, MetricState>> states = {
      {"unit S2", make_round_sphere(2, 1.0)},
      {"bumped S2", make_conformal_s2("bumped", kGridN, 1.0, {0.3, 0.6})},
      {"flat T2", make_flat_torus({2 * kPi, 2 * kPi})}};
  for (const auto& [name, state] : states) {
    const Discretization g = discretize(state, kGridN);
    const FieldFamily family = make_field_family(g, {200, 1});
    double worst = std::numeric_limits<double>::infinity();
    int evaluated = 0;
    for (const LabeledField& f : family.fields) {
      const ScalarField u = g.field(f.values);
      for (double q : {1.0, 1.25, 1.5}) {
        const SobolevExponents e(2, q);
        worst = std::min({worst, verify_jensen_step(u, e, g).margin,
                          verify_log_sobolev_q(u, e, g, 1.0).derivation.margin});
        evaluated += 2;
      }
      for (double mu : {1.0, 1.5}) {
        worst = std::min({worst, holder_gradient_check(u, mu, g).margin,
                          verify_log_sobolev_2(u, mu, g, 1.0).derivation.margin});
        evaluated += 2;
      }
    }
    out.require(worst >= -1e-10, name + ": " + std::to_string(evaluated) + " checks, worst margin " +
                                     fmt(worst));
  }
  return out;
}

// Diagonal of the kernel of -Delta + shift on the unit sphere, harmonics of degree <= 50.
double sphere_series(double t, double shift) {
  double sum = 0.0;
  for (int k = 0; k <= 50; ++k) sum += (2 * k + 1) * std::exp(-(k * (k + 1) + shift) * t);
  return sum / (4 * kPi);
}

// 6. Semigroup chain: duality, splitting, positivity, contraction, series match.
Outcome semigroup_chain() {
  Outcome out;
  const std::vector<std::pair<std::string, MetricState>> states = {
      {"unit S2", make_round_sphere(2, 1.0)},
      {"bumped S2", make_conformal_s2("bumped", kGridN, 1.0, {0.3, 0.6})},
      {"flat T2", make_flat_torus({2 * kPi, 2 * kPi})}};
  for (const auto& [name, state] : states) {
    const Discretization g = discretize(state, kGridN);
    const HeatSemigroup h = HeatSemigroup::for_state(g);
    double duality = 0.0, splitting = -std::numeric_limits<double>::infinity();
    double positivity = 0.0, contraction = -std::numeric_limits<double>::infinity();
    const auto fields = random_smooth_fields(g, 50, 7);
    for (double t : {1e-2, 1e-1, 1.0}) {
      const double one_two = h.norm(NormPair::kOneToTwo, t);
      const double two_inf = h.norm(NormPair::kTwoToInf, t);
      duality = std::max(duality, std::abs(one_two - two_inf) / two_inf);
      const double whole = h.norm(NormPair::kOneToInf, t);
      const double split = h.norm(NormPair::kTwoToInf, t / 2) * h.norm(NormPair::kOneToTwo, t / 2);
      splitting = std::max(splitting, (whole - split) / split);
      for (const LabeledField& f : fields) {
        const Eigen::VectorXd u = f.values.cwiseAbs();
        const Eigen::VectorXd v = h.apply(u, t);
        positivity = std::min(positivity, v.minCoeff() / u.maxCoeff());
        const Eigen::VectorXd w = h.apply(f.values, t);
        contraction = std::max(contraction, w.cwiseAbs().maxCoeff() / f.values.cwiseAbs().maxCoeff() - 1.0);
      }
    }
    out.require(duality <= 1e-10, name + " duality rel gap " + fmt(duality));
    out.require(splitting <= 1e-10, name + " splitting excess " + fmt(splitting));
    out.require(positivity >= -1e-12, name + " min of e^{-Ht}|u| " + fmt(positivity));
    out.require(contraction <= 1e-12, name + " Linf growth " + fmt(contraction));
  }
  // H = -Delta + R/4 on the unit sphere has the shift 1/2.
  const Discretization sphere = discretize(make_round_sphere(2, 1.0), kGridN);
  const HeatSemigroup h = HeatSemigroup::for_state(sphere);
  for (double t : {1e-2, 1e-1, 1.0}) {
    const double series = sphere_series(t, 0.5);
    const double err = std::abs(h.norm(NormPair::kOneToInf, t) - series) / series;
    out.require(err <= 1e-6, "series rel err at t=" + fmt(t) + " " + fmt(err));
  }
  return out;
}

// 7. Fitted ultracontractivity exponents on the torus and the unit sphere.
Outcome fitted_exponents() {
  Outcome out;
  const std::vector<double> grid = log_spaced(1e-3, 1e-1, 21);
  for (const auto& [name, state] : std::vector<std::pair<std::string, MetricState>>{
           {"flat T2", make_flat_torus({2 * kPi, 2 * kPi})}, {"unit S2", make_round_sphere(2, 1.0)}}) {
    const HeatSemigroup h = HeatSemigroup::for_state(discretize(state, kGridN));
    const double n = state.dimension();
    const double a2 = ultracontractivity_curve(h, NormPair::kTwoToInf, grid).fit.alpha;
    const double a1 = ultracontractivity_curve(h, NormPair::kOneToInf, grid).fit.alpha;
    out.require(std::abs(a2 - n / 4) <= 0.15, name + " alpha(2->inf) " + fmt(a2));
    out.require(std::abs(a1 - n / 2) <= 0.2, name + " alpha(1->inf) " + fmt(a1));
  }
  return out;
}

// 8. Shifted semigroup bound, C6, and the q -> inf interpolation.
Outcome shifted_chain() {
  Outcome out;
  const Discretization g = discretize(make_round_sphere(2, 1.0), kGridN);
  const HeatSemigroup shifted = HeatSemigroup::for_state(g, 1.0);
  double worst = std::numeric_limits<double>::infinity();
  bool all = true;
  for (double t : {1.0, 2.0, 5.0, 10.0}) {
    const InequalityReport r = shifted_norm_bound_check(shifted, t);
    all = all && r.pass;
    worst = std::min(worst, r.margin);
  }
  out.require(all, "shifted bound worst margin " + fmt(worst));
  const double c6 = shifted_constant(shifted, default_c6_grid());
  out.require(std::isfinite(c6) && c6 > 0, "C6 = " + fmt(c6));
  double q_worst = std::numeric_limits<double>::infinity();
  for (double q : {1.25, 1.5, 2.0})
    for (double t : {0.1, 1.0}) q_worst = std::min(q_worst, q_to_infty_check(shifted, t, q, c6).margin);
  out.require(q_worst > 0, "q->inf worst margin " + fmt(q_worst));
  return out;
}

// 9. C2 along the unit-sphere flow stays bounded.
Outcome c2_uniformity() {
  const cli::Scenario s = cli::load_scenario(scenario_dir() / "unit_sphere.cfg");
  const FlowTrace& trace = sphere_trace();
  const UniformLogSobolevEstimate est = estimate_uniform_constants(
      trace, log_spaced(s.sigma_min, s.sigma_max, s.sigma_count), {s.field_budget, s.seed},
      hypothesis_status(trace.initial(), trace.extinction_time, kGridN), kGridN);
  const auto [lo, hi] = std::minmax_element(est.c2_by_time.begin(), est.c2_by_time.end());
  Outcome out;
  // The ratio is taken literally; with negative C2 it is also reported for e^{C2}.
  const double ratio = *hi / *lo;
  out.require(std::isfinite(ratio) && ratio <= 3.0,
              "C2 in [" + fmt(*lo) + ", " + fmt(*hi) + "], max/min " + fmt(ratio) +
                  ", e^C2 ratio " + fmt(std::exp(*hi - *lo)));
  // Trend: slope of log e^{C2} = C2 against log(T - t).
  std::vector<double> x, y;
  for (std::size_t k = 0; k < est.times.size(); ++k) {
    x.push_back(std::log(trace.extinction_time - est.times[k]));
    y.push_back(est.c2_by_time[k]);
  }
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / x.size();
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / y.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    sxy += (x[k] - mx) * (y[k] - my);
    sxx += (x[k] - mx) * (x[k] - mx);
  }
  const double slope = sxy / sxx;
  out.require(slope >= -0.1, "slope vs log(T-t) " + fmt(slope));
  return out;
}

// 10. A^(t) along the same flow.
Outcome a_uniformity() {
  std::vector<double> by_time;
  const double max_a = sphere_a_hat(&by_time);
  Outcome out;
  out.require(max_a <= 1.5 * by_time.front(),
              "A(0) " + fmt(by_time.front()) + ", max A " + fmt(max_a) + ", ratio " +
                  fmt(max_a / by_time.front()));
  return out;
}

// 11. Noncollapsing scan with kappa at A = 1.1 A^.
Outcome noncollapse() {
  const FlowTrace& trace = sphere_trace();
  const double a = 1.1 * sphere_a_hat();
  const KappaCertificate cert =
      noncollapse_scan(trace, 1.0, SobolevExponents(2, 1.5), a,
                       hypothesis_status(trace.initial(), trace.extinction_time, kGridN));
  Outcome out;
  out.require(!cert.refused && cert.overall_pass,
              "kappa " + fmt(cert.kappa) + ", " + std::to_string(cert.rows.size()) +
                  " admissible cells, " + std::to_string(cert.inadmissible) + " inadmissible");
  double worst = 0.0, min_ratio = std::numeric_limits<double>::infinity();
  for (const ScanRow& row : cert.rows) {
    const double r0 = std::sqrt(1.0 - 2.0 * row.t);
    const double exact = 2 * kPi * r0 * r0 * (1 - std::cos(row.r / r0));
    worst = std::max(worst, std::abs(row.volume - exact) / exact);
    min_ratio = std::min(min_ratio, row.vol_over_rn / cert.kappa);
  }
  out.require(!cert.rows.empty() && worst <= 1e-4, "closed-form ball rel err " + fmt(worst));
  out.detail += "; min vol/(kappa r^2) " + fmt(min_ratio);
  return out;
}

// 12. kappa algebra and the ball-volume recursion.
Outcome kappa_algebra() {
  Outcome out;
  const double expected = std::pow(2.0, -26.0 / 3.0);
  const double k = kappa_formula(2, 1.5, 1.0, 1.0, 0.0);
  out.require(std::abs(k - expected) <= 1e-12 * expected, "example kappa " + fmt(k));
  int checked = 0, violations = 0;
  for (int n : {2, 3, 4})
    for (double q = 1.0625; q < n; q += 0.0625)
      for (double a : {0.5, 1.0, 5.0}) {
        ++checked;
        if (kappa_formula(n, q, a, 1.0, 0.0) > fixed_point_kappa(n, q, a)) ++violations;
      }
  out.require(violations == 0, std::to_string(checked) + " grid points, " +
                                   std::to_string(violations) + " above beta");
  const double beta = fixed_point_kappa(2, 1.5, 1.0);
  const double start = kPi * (1 - 1e-3);
  const double ten = volume_recursion(2, 1.5, 1.0, 10, start) / beta;
  int levels = 10;
  double ratio = ten;
  while (levels < 200 && std::abs(ratio - 1.0) > 1e-12) ratio = volume_recursion(2, 1.5, 1.0, ++levels, start) / beta;
  out.require(std::abs(ratio - 1.0) <= 0.01 && ratio >= 1.0 - 1e-12,
              "recursion v(1)/beta: 10 levels " + fmt(ten) + ", " + std::to_string(levels) +
                  " levels " + fmt(ratio));
  return out;
}

int run_cli(const std::string& args) {
  const std::string command = std::string(RICCI_LAB_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(command.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

// 13. The kappa command refuses the torus and certifies the sphere.
Outcome hypothesis_gate() {
  Outcome out;
  const fs::path torus = scratch("gate_torus");
  const int torus_status =
      run_cli("kappa --scenario " + (scenario_dir() / "flat_torus.cfg").string() + " --out " + torus.string());
  const std::string summary = slurp(torus / "kappa_summary.txt");
  out.require(torus_status == 2 && summary.find("refused") != std::string::npos,
              "flat torus exit " + std::to_string(torus_status));
  const fs::path sphere = scratch("gate_sphere");
  const int sphere_status =
      run_cli("kappa --scenario " + (scenario_dir() / "unit_sphere.cfg").string() + " --out " + sphere.string());
  out.require(sphere_status == 0, "unit sphere exit " + std::to_string(sphere_status));
  return out;
}

// 14. Identical runs write identical CSV files.
Outcome determinism() {
  Outcome out;
  const fs::path a = scratch("determinism_a"), b = scratch("determinism_b");
  const std::string cfg = (scenario_dir() / "bumped_s2.cfg").string();
  for (const fs::path& dir : {a, b})
    for (const char* command : {"flow", "verify", "kappa"})
      run_cli(std::string(command) + " --scenario " + cfg + " --out " + dir.string());
  int files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    if (slurp(entry.path()) != slurp(b / entry.path().filename())) ++differing;
  }
  out.require(files > 0 && differing == 0,
              std::to_string(files) + " CSV files compared, " + std::to_string(differing) + " differ");
  return out;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"closed-form conformal flow", conformal_closed_form},
      {"volume identity", volume_identity},
      {"min R monotonicity", min_r_monotone},
      {"spectral oracles", spectral_oracle},
      {"log-Sobolev derivation suite", derivation_suite},
      {"semigroup chain", semigroup_chain},
      {"ultracontractivity exponents", fitted_exponents},
      {"shifted semigroup and q->inf bounds", shifted_chain},
      {"uniform log-Sobolev constant", c2_uniformity},
      {"uniform Sobolev constant", a_uniformity},
      {"noncollapsing scan", noncollapse},
      {"kappa algebra", kappa_algebra},
      {"hypothesis gate", hypothesis_gate},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome outcome;
    try {
      outcome = criteria[i].second();
    } catch (const std::exception& e) {
      outcome.pass = false;
      outcome.detail = std::string("exception: ") + e.what();
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!outcome.pass) ++failures;
    std::cout << "criterion " << i + 1 << " (" << criteria[i].first << "): "
              << (outcome.pass ? "PASS" : "FAIL") << " -- " << outcome.detail << " ["
              << fmt(seconds) << " s]" << std::endl;
  }
  std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
