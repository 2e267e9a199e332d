#include "ricci_lab/commands.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/errors.hpp"
#include "ricci_lab/field_family.hpp"
#include "ricci_lab/heat_semigroup.hpp"
#include "ricci_lab/inequality_lab.hpp"
#include "ricci_lab/noncollapse.hpp"
#include "ricci_lab/report.hpp"
#include "ricci_lab/ricci_flow.hpp"
#include "ricci_lab/svg_plot.hpp"

namespace rlab::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kCurvePoints = 16;
constexpr int kPositivityFields = 50;
constexpr double kVolumeDefectLimit = 1e-4;

std::ofstream open_output(const fs::path& dir, const std::string& name) {
  fs::create_directories(dir);
  std::ofstream out(dir / name, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write " + (dir / name).string());
  return out;
}

FlowTrace simulate(const Scenario& s) {
  FlowOptions options;
  options.snapshots = s.snapshots;
  options.grid_n = s.grid_n;
  return run_flow(initial_state(s), flow_end_time(s), s.dt, options);
}

std::vector<double> sigma_grid(const Scenario& s) {
  return log_spaced(s.sigma_min, s.sigma_max, s.sigma_count);
}

// Largest q in the list admissible for the uniform Sobolev and ball estimates (1 < q < n).
std::optional<double> ball_exponent(const Scenario& s) {
  std::optional<double> best;
  for (double q : s.q_list)
    if (q > 1.0 && q < s.n && (!best || q > *best)) best = q;
  return best;
}

FieldFamilySpec family_spec(const Scenario& s) { return {s.field_budget, s.seed}; }

// Worst report per (check_id, t, q, mu), kept in first-seen order.
class ReportBook {
 public:
  void add(const InequalityReport& r) {
    const std::string key = r.check_id + '|' + format_double(r.t) + '|' + format_double(r.q) +
                            '|' + format_double(r.mu);
    const auto [it, inserted] = index_.emplace(key, rows_.size());
    if (inserted) {
      rows_.push_back(r);
      evaluated_[r.check_id] += 1;
    } else {
      keep_worst(rows_[it->second], r);
    }
    if (!r.pass) failures_[r.check_id] += 1;
  }
  const std::vector<InequalityReport>& rows() const { return rows_; }
  bool hard_failure() const {
    return std::any_of(rows_.begin(), rows_.end(),
                       [](const InequalityReport& r) { return r.hard && !r.pass; });
  }
  int failures(const std::string& id) const {
    const auto it = failures_.find(id);
    return it == failures_.end() ? 0 : it->second;
  }
  int rows_for(const std::string& id) const {
    const auto it = evaluated_.find(id);
    return it == evaluated_.end() ? 0 : it->second;
  }
  void note(const std::string& id, std::string text) { notes_[id] = std::move(text); }
  std::string note_for(const std::string& id) const {
    const auto it = notes_.find(id);
    return it == notes_.end() ? std::string{} : it->second;
  }

 private:
  std::vector<InequalityReport> rows_;
  std::map<std::string, std::size_t> index_;
  std::map<std::string, int> failures_;
  std::map<std::string, int> evaluated_;
  std::map<std::string, std::string> notes_;
};

const std::map<std::string, bool>& hardness() {
  static const std::map<std::string, bool> table = {
      {"volume_identity", true},          {"min_r_monotonicity", true},
      {"jensen_step", true},              {"log_sobolev_q", true},
      {"log_sobolev_q_constant", false},  {"holder_gradient", true},
      {"log_sobolev_2", true},            {"log_sobolev_2_constant", false},
      {"uniform_logsob", false},          {"uniform_sobolev", false},
      {"semigroup_duality", true},        {"semigroup_splitting", true},
      {"semigroup_positivity", true},     {"semigroup_contraction", true},
      {"ultracontractivity_2_inf", false}, {"ultracontractivity_1_inf", false},
      {"shifted_semigroup_bound", true},  {"q_to_infty", true},
      {"inverse_sqrt", true},             {"ball_sobolev", false},
      {"layer_cake", true},               {"ball_holder", true},
      {"volume_growth", false},
  };
  return table;
}

InequalityReport custom_report(const std::string& id, double lhs, double rhs, double t,
                               std::string witness, Tolerance tol = {}) {
  InequalityReport r = make_report(id, lhs, rhs, std::move(witness), hardness().at(id), tol);
  r.t = t;
  return r;
}

void flow_checks(const FlowTrace& trace, ReportBook& book) {
  const FlowReport diag = flow_diagnostics(trace);
  const double t = trace.snapshots.back().t;
  book.add(custom_report("volume_identity", diag.volume_defect, kVolumeDefectLimit, t, "flow",
                         {0.0, 0.0}));
  book.add(custom_report("min_r_monotonicity", diag.min_r_violations, 0.0, t,
                         "drop=" + format_double(diag.worst_min_r_drop), {0.0, 0.0}));
}

void theorem_one_checks(const Discretization& geom, const FieldFamily& family, const Scenario& s,
                        ReportBook& book, std::vector<ConstantEstimate>& constants) {
  for (double q : s.q_list) {
    const SobolevExponents e(geom.dimension(), q);
    const ConstantEstimate c = estimate_sobolev_constant(e, geom, family);
    constants.push_back(c);
    for (const LabeledField& f : family.fields) {
      const ScalarField u = geom.field(f.values);
      book.add(verify_jensen_step(u, e, geom, f.id));
      const LogSobolevCheck check = verify_log_sobolev_q(u, e, geom, c.value, f.id);
      book.add(check.derivation);
      book.add(check.constant_form);
    }
  }
  for (double mu : s.mu_list) {
    const SobolevExponents e(geom.dimension(), mu);
    const ConstantEstimate c = estimate_sobolev_constant(e, geom, family);
    for (const LabeledField& f : family.fields) {
      const ScalarField u = geom.field(f.values);
      book.add(holder_gradient_check(u, mu, geom, f.id));
      const LogSobolevCheck check = verify_log_sobolev_2(u, mu, geom, c.value, f.id);
      book.add(check.derivation);
      book.add(check.constant_form);
    }
  }
}

void semigroup_checks(const Discretization& geom, const Scenario& s, int snapshot_index,
                      const fs::path& out_dir, ReportBook& book,
                      std::vector<ConstantEstimate>& constants) {
  const double t_state = geom.time();
  const int n = geom.dimension();
  const HeatSemigroup semigroup = HeatSemigroup::for_state(geom);
  const HeatSemigroup shifted_sg = HeatSemigroup::for_state(geom, 1.0);
  const std::vector<double> times = log_spaced(1e-3, 1.0, kCurvePoints);

  const OperatorNormCurve one_inf = ultracontractivity_curve(semigroup, NormPair::kOneToInf, times);
  const OperatorNormCurve two_inf = ultracontractivity_curve(semigroup, NormPair::kTwoToInf, times);
  const OperatorNormCurve one_two = ultracontractivity_curve(semigroup, NormPair::kOneToTwo, times);
  {
    std::ofstream csv = open_output(out_dir, "norm_curve_s" + std::to_string(snapshot_index) + ".csv");
    write_norm_curve_csv(csv, one_inf, two_inf, one_two);
  }

  for (std::size_t i = 0; i < times.size(); ++i) {
    const double a = one_two.values[i], b = two_inf.values[i];
    InequalityReport dual = custom_report("semigroup_duality", std::abs(a - b),
                                          1e-10 * std::max(a, b), t_state,
                                          "t=" + format_double(times[i]), {0.0, 0.0});
    book.add(dual);
    const double half = 0.5 * times[i];
    book.add(custom_report("semigroup_splitting", one_inf.values[i],
                           semigroup.norm(NormPair::kTwoToInf, half) *
                               semigroup.norm(NormPair::kOneToTwo, half),
                           t_state, "t=" + format_double(times[i]), {1e-10, 1e-10}));
  }

  const std::vector<LabeledField> noise =
      random_smooth_fields(geom, kPositivityFields, s.seed, /*first_index=*/100000);
  for (double t : {1e-3, 1e-2, 1e-1, 1.0}) {
    const KernelMatrix kernel = semigroup.kernel(t);
    for (const LabeledField& f : noise) {
      const Eigen::VectorXd u = f.values.cwiseAbs();
      const double sup = u.maxCoeff();
      const Eigen::VectorXd image = kernel.apply(u);
      book.add(custom_report("semigroup_positivity", -image.minCoeff(), 1e-10 * sup, t_state,
                             f.id + "@t=" + format_double(t), {0.0, 0.0}));
      const Eigen::VectorXd signed_image = kernel.apply(f.values);
      const double signed_sup = f.values.cwiseAbs().maxCoeff();
      book.add(custom_report("semigroup_contraction", signed_image.cwiseAbs().maxCoeff(),
                             signed_sup * (1.0 + 1e-10), t_state, f.id + "@t=" + format_double(t),
                             {0.0, 0.0}));
    }
  }

  book.add(custom_report("ultracontractivity_2_inf", std::abs(two_inf.fit.alpha - n / 4.0), 0.15,
                         t_state, "alpha=" + format_double(two_inf.fit.alpha), {0.0, 0.0}));
  book.add(custom_report("ultracontractivity_1_inf", std::abs(one_inf.fit.alpha - n / 2.0), 0.2,
                         t_state, "alpha=" + format_double(one_inf.fit.alpha), {0.0, 0.0}));

  for (double t : {1.0, 2.0, 5.0, 10.0}) {
    InequalityReport r = shifted_norm_bound_check(shifted_sg, t);
    r.witness = "t=" + format_double(t);
    r.t = t_state;
    book.add(r);
  }
  const double c6 = shifted_constant(shifted_sg, default_c6_grid());
  std::vector<double> qs;
  for (double q : s.q_list)
    if (q > 1.0) qs.push_back(q);
  if (std::find(qs.begin(), qs.end(), 2.0) == qs.end()) qs.push_back(2.0);
  for (double q : qs)
    for (double t : {0.1, 1.0}) {
      InequalityReport r = q_to_infty_check(shifted_sg, t, q, c6);
      r.witness = "t=" + format_double(t);
      r.t = t_state;
      book.add(r);
    }

  for (std::size_t k = 0; k < std::min<std::size_t>(noise.size(), 10); ++k) {
    const Eigen::VectorXd& u = noise[k].values;
    const Eigen::VectorXd twice = shifted_sg.inv_sqrt_apply(shifted_sg.inv_sqrt_apply(u));
    const Eigen::VectorXd direct = shifted_sg.inverse_apply(u);
    const ScalarField diff = geom.field(twice - direct);
    const double scale = lp_norm(geom.field(u), 2.0, geom);
    book.add(custom_report("inverse_sqrt", lp_norm(diff, 2.0, geom), 1e-8 * scale, t_state,
                           noise[k].id, {0.0, 0.0}));
  }

  auto constant = [&](const std::string& id, double value) {
    ConstantEstimate c;
    c.id = id;
    c.value = value;
    c.t = t_state;
    c.witness = "kernel";
    constants.push_back(c);
  };
  constant("C4", empirical_constant(two_inf, n / 4.0));
  constant("C5", empirical_constant(one_inf, n / 2.0));
  constant("C6", c6);
  constant("alpha_1_inf", one_inf.fit.alpha);
  constant("alpha_2_inf", two_inf.fit.alpha);
}

struct UniformSobolev {
  double q = 0.0;
  double a_hat = 0.0;
  std::vector<ConstantEstimate> by_time;
};

std::optional<UniformSobolev> uniform_sobolev_constants(const FlowTrace& trace, const Scenario& s) {
  const std::optional<double> q = ball_exponent(s);
  if (!q) return std::nullopt;
  const Discretization initial = discretize(trace.initial(), s.grid_n);
  const double max_r0_minus = max_negative_curvature(initial);
  UniformSobolev out;
  out.q = *q;
  const SobolevExponents e(initial.dimension(), *q);
  for (const FlowSnapshot& snap : trace.snapshots) {
    const Discretization geom = discretize(snap.state, s.grid_n);
    const FieldFamily family = make_field_family(geom, family_spec(s));
    out.by_time.push_back(estimate_uniform_sobolev_constant(e, geom, family, max_r0_minus));
    out.a_hat = std::max(out.a_hat, out.by_time.back().value);
  }
  return out;
}

void ball_checks(const FlowTrace& trace, const Scenario& s, double q, double a, ReportBook& book) {
  const Discretization initial = discretize(trace.initial(), s.grid_n);
  if (initial.kind() != GridKind::kPolar) {
    for (const char* id : {"ball_sobolev", "layer_cake", "ball_holder", "volume_growth"})
      book.note(id, "not evaluated: balls need a rotationally symmetric state");
    return;
  }
  const SobolevExponents e(initial.dimension(), q);
  const std::vector<double> radii = log_spaced(0.05 * s.rho, s.rho, ScanOptions{}.radii);
  int admissible = 0, unresolved = 0;
  for (const FlowSnapshot& snap : trace.snapshots) {
    std::vector<Pole> centers{Pole::kNorth};
    if (snap.state.is_conformal()) centers.push_back(Pole::kSouth);
    for (double r : radii) {
      const Discretization rescaled = discretize(rescale_metric(snap.state, 1.0 / (r * r)), s.grid_n);
      for (Pole center : centers) {
        const VolumeIterationReport chain = volume_iteration_check(rescaled, e, a, 0.5, center);
        if (!chain.admissible) continue;
        if (!chain.resolved) {
          ++unresolved;
          continue;
        }
        ++admissible;
        for (InequalityReport rep :
             {chain.ball_sobolev, chain.layer_cake, chain.holder, chain.volume_growth}) {
          rep.witness += (center == Pole::kNorth ? "@north" : "@south");
          rep.witness += ";r=" + format_double(r);
          rep.t = snap.t;
          book.add(rep);
        }
      }
    }
  }
  for (const char* id : {"ball_sobolev", "layer_cake", "ball_holder", "volume_growth"}) {
    if (admissible == 0)
      book.note(id, "not evaluated: no admissible resolved ball");
    else if (unresolved > 0)
      book.note(id, std::to_string(unresolved) + " admissible balls below grid resolution skipped");
  }
}

void write_verify_summary(std::ostream& out, const ReportBook& book, const std::string& extra) {
  out << "check_id,kind,rows,failures,worst_margin,status\n";
  for (const std::string& id : registered_check_ids()) {
    double worst = std::numeric_limits<double>::infinity();
    for (const InequalityReport& r : book.rows())
      if (r.check_id == id) worst = std::min(worst, r.margin);
    const int rows = book.rows_for(id);
    const int failures = book.failures(id);
    std::string status = rows == 0 ? "skipped" : (failures == 0 ? "pass" : "fail");
    const std::string note = book.note_for(id);
    if (!note.empty()) status += " (" + note + ")";
    out << id << ',' << (hardness().at(id) ? "hard" : "soft") << ',' << rows << ',' << failures
        << ',' << format_double(rows ? worst : kNotApplicable) << ',' << status << '\n';
  }
  out << extra;
}

int run_flow_command(const Scenario& s, std::ostream& log) {
  const FlowTrace trace = simulate(s);
  std::ofstream csv = open_output(s.out_dir, "flow_trace.csv");
  write_trace_csv(csv, trace);
  const FlowReport diag = flow_diagnostics(trace);
  std::ofstream summary = open_output(s.out_dir, "flow_summary.txt");
  summary << "steps: " << trace.steps.size() - 1 << '\n'
          << "dt: " << format_double(trace.dt) << '\n'
          << "t_end: " << format_double(trace.snapshots.back().t) << '\n'
          << "extinction_time: " << format_double(trace.extinction_time) << '\n'
          << "volume_defect: " << format_double(diag.volume_defect) << '\n'
          << "min_r_violations: " << diag.min_r_violations << '\n'
          << "r_evolution_residual: " << format_double(diag.r_evolution_residual) << '\n';
  if (trace.abort_reason) summary << "aborted: " << *trace.abort_reason << '\n';
  log << "flow: " << trace.steps.size() - 1 << " steps to t = "
      << format_double(trace.snapshots.back().t) << ", volume defect "
      << format_double(diag.volume_defect) << '\n';
  if (trace.abort_reason) {
    log << "flow aborted: " << *trace.abort_reason << '\n';
    return kExitCheckFailure;
  }
  return kExitOk;
}

int run_spectrum_command(const Scenario& s, std::ostream& log) {
  const MetricState state0 = initial_state(s);
  const Discretization geom = discretize(state0, s.grid_n);
  const SpectralDecomposition h = decompose(schrodinger_operator(geom, potential_lambda0(geom)));
  const SpectralDecomposition lap = decompose(laplacian_operator(geom));
  std::ofstream csv = open_output(s.out_dir, "spectrum.csv");
  csv << "k,eigenvalue_H,eigenvalue_laplacian\n";
  for (Eigen::Index k = 0; k < h.eigenvalues.size(); ++k)
    csv << k << ',' << format_double(h.eigenvalues[k]) << ',' << format_double(lap.eigenvalues[k])
        << '\n';
  const HypothesisStatus status = hypothesis_status(state0, flow_horizon(s), s.grid_n);
  std::ofstream hyp = open_output(s.out_dir, "hypothesis.txt");
  hyp << "horizon: " << format_double(flow_horizon(s)) << '\n'
      << "horizon_finite: " << (status.horizon_finite ? "true" : "false") << '\n'
      << "lambda0: " << format_double(status.lambda0) << '\n'
      << "tolerance: " << format_double(status.tolerance) << '\n'
      << "satisfied: " << (status.satisfied ? "true" : "false") << '\n';
  log << "spectrum: lambda0 = " << format_double(status.lambda0)
      << ", hypothesis " << (status.satisfied ? "satisfied" : "not satisfied") << '\n';
  return kExitOk;
}

int run_verify_command(const Scenario& s, std::ostream& log) {
  const FlowTrace trace = simulate(s);
  if (trace.abort_reason) {
    log << "verify: flow aborted: " << *trace.abort_reason << '\n';
    return kExitCheckFailure;
  }
  {
    std::ofstream csv = open_output(s.out_dir, "flow_trace.csv");
    write_trace_csv(csv, trace);
  }
  ReportBook book;
  std::vector<ConstantEstimate> constants;
  flow_checks(trace, book);

  const HypothesisStatus hypothesis =
      hypothesis_status(trace.initial(), flow_horizon(s), s.grid_n);
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    const Discretization geom = discretize(trace.snapshots[k].state, s.grid_n);
    const FieldFamily family = make_field_family(geom, family_spec(s));
    theorem_one_checks(geom, family, s, book, constants);
    semigroup_checks(geom, s, static_cast<int>(k), s.out_dir, book, constants);
  }

  const std::vector<double> sigmas = sigma_grid(s);
  const UniformLogSobolevEstimate logsob =
      estimate_uniform_constants(trace, sigmas, family_spec(s), hypothesis, s.grid_n);
  for (std::size_t k = 0; k < logsob.times.size(); ++k) {
    book.add(custom_report("uniform_logsob", logsob.c2_by_time[k], logsob.c2, logsob.times[k],
                           logsob.witnesses[k]));
    ConstantEstimate c;
    c.id = "C2";
    c.t = logsob.times[k];
    c.value = logsob.c2_by_time[k];
    c.witness = logsob.witnesses[k];
    c.family_hash = logsob.family_hash;
    c.budget = logsob.budget;
    constants.push_back(c);
  }
  std::string extra = "C2: " + format_double(logsob.c2) + "\nC1_fit: " + format_double(logsob.c1) + '\n';
  if (logsob.c3)
    extra += "C3: " + format_double(*logsob.c3) + '\n';
  else
    extra += "C3: refused (" + logsob.c3_refusal + ")\n";

  if (const auto uniform = uniform_sobolev_constants(trace, s)) {
    const double a = s.safety * uniform->a_hat;
    const Discretization initial = discretize(trace.initial(), s.grid_n);
    const double max_r0_minus = max_negative_curvature(initial);
    const SobolevExponents e(initial.dimension(), uniform->q);
    for (const ConstantEstimate& c : uniform->by_time) constants.push_back(c);
    for (const FlowSnapshot& snap : trace.snapshots) {
      const Discretization geom = discretize(snap.state, s.grid_n);
      const FieldFamily family = make_field_family(geom, family_spec(s));
      for (const LabeledField& f : family.fields)
        book.add(verify_uniform_sobolev(geom.field(f.values), e, geom, a, max_r0_minus, f.id));
    }
    ball_checks(trace, s, uniform->q, a, book);
    extra += "A_hat: " + format_double(uniform->a_hat) + "\nA_used: " + format_double(a) + '\n';
  } else {
    for (const char* id : {"uniform_sobolev", "ball_sobolev", "layer_cake", "ball_holder", "volume_growth"})
      book.note(id, "not evaluated: no q in q_list with 1 < q < n");
  }

  {
    std::ofstream csv = open_output(s.out_dir, "reports.csv");
    write_report_csv(csv, book.rows());
  }
  {
    std::ofstream csv = open_output(s.out_dir, "constants.csv");
    write_constants_csv(csv, constants);
  }
  {
    std::ofstream summary = open_output(s.out_dir, "verify_summary.csv");
    write_verify_summary(summary, book, "");
  }
  {
    std::ofstream summary = open_output(s.out_dir, "verify_constants.txt");
    summary << extra;
  }
  const bool failed = book.hard_failure();
  log << "verify: " << book.rows().size() << " report rows, hard checks "
      << (failed ? "FAILED" : "passed") << '\n';
  return failed ? kExitCheckFailure : kExitOk;
}

int run_kappa_command(const Scenario& s, std::ostream& log) {
  const std::optional<double> q = ball_exponent(s);
  if (!q) throw ConfigError("kappa needs some q in q_list with 1 < q < n", 0, "q_list");
  const MetricState state0 = initial_state(s);
  const HypothesisStatus hypothesis = hypothesis_status(state0, flow_horizon(s), s.grid_n);
  const SobolevExponents e(s.n, *q);
  ScanOptions options;
  options.grid_n = s.grid_n;

  KappaCertificate cert;
  if (!hypothesis.satisfied) {
    // The scan refuses before touching the trace; a one-step placeholder keeps the API uniform.
    FlowTrace empty;
    empty.snapshots.push_back({state0.time(), state0, 0});
    cert = noncollapse_scan(empty, s.rho, e, 1.0, hypothesis, options);
    cert.a = kNotApplicable;
  } else {
    const FlowTrace trace = simulate(s);
    if (trace.abort_reason) {
      log << "kappa: flow aborted: " << *trace.abort_reason << '\n';
      return kExitCheckFailure;
    }
    const auto uniform = uniform_sobolev_constants(trace, s);
    cert = noncollapse_scan(trace, s.rho, e, s.safety * uniform->a_hat, hypothesis, options);
  }
  {
    std::ofstream csv = open_output(s.out_dir, "kappa_certificate.csv");
    write_certificate_csv(csv, cert);
  }
  {
    std::ofstream summary = open_output(s.out_dir, "kappa_summary.txt");
    write_certificate_summary(summary, cert);
  }
  if (cert.refused) {
    log << "kappa: refused: " << cert.refusal_reason << '\n';
    return kExitHypothesisRefused;
  }
  log << "kappa: kappa = " << format_double(cert.kappa) << ", " << cert.rows.size()
      << " admissible cells, " << (cert.overall_pass ? "pass" : "FAIL") << '\n';
  return cert.overall_pass ? kExitOk : kExitCheckFailure;
}

void require_inputs(const fs::path& dir, const std::vector<std::string>& names) {
  for (const std::string& name : names)
    if (!fs::exists(dir / name))
      throw ConfigError("missing input " + (dir / name).string() + "; run flow and verify first");
}

int run_report_command(const Scenario& s, std::ostream& log) {
  const fs::path dir = s.out_dir;
  require_inputs(dir, {"flow_trace.csv", "constants.csv", "reports.csv", "norm_curve_s0.csv"});

  const CsvTable flow = read_csv(dir / "flow_trace.csv");
  {
    PlotSpec plot;
    plot.title = "Scalar curvature along the flow";
    plot.x_label = "t";
    plot.y_label = "R";
    plot.series.push_back({"min R", flow.numeric_column("t"), flow.numeric_column("min_R")});
    plot.series.push_back({"max R", flow.numeric_column("t"), flow.numeric_column("max_R")});
    std::ofstream out = open_output(dir, "flow_curvature.svg");
    out << render_svg(plot);
  }

  const CsvTable constants = read_csv(dir / "constants.csv");
  {
    std::map<std::string, PlotSeries> series;
    std::vector<std::string> order;
    const int id_col = constants.column("constant_id");
    const std::vector<double> t = constants.numeric_column("t");
    const std::vector<double> v = constants.numeric_column("value");
    for (std::size_t i = 0; i < constants.rows.size(); ++i) {
      const std::string& id = constants.rows[i][id_col];
      if (!series.contains(id)) {
        order.push_back(id);
        series[id].label = id;
      }
      series[id].x.push_back(t[i]);
      series[id].y.push_back(v[i]);
    }
    PlotSpec plot;
    plot.title = "Empirical constants along the flow";
    plot.x_label = "t";
    plot.y_label = "value";
    for (const std::string& id : order)
      if (series[id].x.size() >= 2 && id.rfind("alpha", 0) != 0) plot.series.push_back(series[id]);
    std::ofstream out = open_output(dir, "constants_vs_t.svg");
    out << render_svg(plot);
  }

  {
    PlotSpec plot;
    plot.title = "Heat-kernel L1 -> Linf norm";
    plot.x_label = "t";
    plot.y_label = "norm";
    plot.log_x = plot.log_y = true;
    for (int k = 0;; ++k) {
      const fs::path path = dir / ("norm_curve_s" + std::to_string(k) + ".csv");
      if (!fs::exists(path)) break;
      const CsvTable curve = read_csv(path);
      const std::vector<double> alpha = curve.numeric_column("alpha_fit_window");
      const auto fitted = std::find_if(alpha.begin(), alpha.end(),
                                       [](double a) { return !std::isnan(a); });
      const std::string slope = fitted == alpha.end() ? "nan" : format_double(*fitted);
      plot.series.push_back({"snapshot " + std::to_string(k), curve.numeric_column("t"),
                             curve.numeric_column("norm_1_inf")});
      plot.annotations.push_back("snapshot " + std::to_string(k) + ": alpha = " + slope);
    }
    std::ofstream out = open_output(dir, "norm_curves.svg");
    out << render_svg(plot);
  }

  const CsvTable reports = read_csv(dir / "reports.csv");
  const int id_col = reports.column("check_id");
  const int pass_col = reports.column("pass");
  std::ofstream summary = open_output(dir, "summary.txt");
  bool hard_failure = false;
  for (const std::string& id : registered_check_ids()) {
    int rows = 0, failures = 0;
    for (const auto& row : reports.rows)
      if (row[id_col] == id) {
        ++rows;
        if (row[pass_col] != "true") ++failures;
      }
    if (failures > 0 && hardness().at(id)) hard_failure = true;
    summary << id << ": " << (rows == 0 ? "skipped" : failures == 0 ? "pass" : "fail") << " ("
            << rows << " rows, " << failures << " failing)\n";
  }
  log << "report: plots and summary written to " << dir.string() << '\n';
  return hard_failure ? kExitCheckFailure : kExitOk;
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = {"flow", "spectrum", "verify", "kappa", "report"};
  return names;
}

const std::vector<std::string>& registered_check_ids() {
  static const std::vector<std::string> ids = {
      "volume_identity",      "min_r_monotonicity",     "jensen_step",
      "log_sobolev_q",        "log_sobolev_q_constant", "holder_gradient",
      "log_sobolev_2",        "log_sobolev_2_constant", "uniform_logsob",
      "uniform_sobolev",      "semigroup_duality",      "semigroup_splitting",
      "semigroup_positivity", "semigroup_contraction",  "ultracontractivity_2_inf",
      "ultracontractivity_1_inf", "shifted_semigroup_bound", "q_to_infty",
      "inverse_sqrt",         "ball_sobolev",           "layer_cake",
      "ball_holder",          "volume_growth",
  };
  return ids;
}

int run_command(std::string_view command, const Scenario& scenario, std::ostream& log) {
  try {
    validate(scenario);
    log << "# effective scenario\n" << echo_scenario(scenario);
    {
      std::ofstream echo = open_output(scenario.out_dir, "scenario_echo.txt");
      echo << echo_scenario(scenario);
    }
    if (command == "flow") return run_flow_command(scenario, log);
    if (command == "spectrum") return run_spectrum_command(scenario, log);
    if (command == "verify") return run_verify_command(scenario, log);
    if (command == "kappa") return run_kappa_command(scenario, log);
    if (command == "report") return run_report_command(scenario, log);
    throw ConfigError("unknown command '" + std::string(command) + "'");
  } catch (const ConfigError& e) {
    log << "config error";
    if (e.line() > 0) log << " at line " << e.line();
    if (!e.key().empty()) log << " (key " << e.key() << ')';
    log << ": " << e.what() << '\n';
    return kExitConfigError;
  } catch (const CflError& e) {
    log << "precondition failed: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ExtinctionError& e) {
    log << "precondition failed: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const HypothesisRefused& e) {
    log << "hypothesis refused: " << e.what() << '\n';
    return kExitHypothesisRefused;
  } catch (const DomainError& e) {
    log << "invalid input: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const Error& e) {
    log << "error: " << e.what() << '\n';
    return kExitCheckFailure;
  }
}

}  // namespace rlab::cli
