#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "ricci_lab/manifold_models.hpp"

namespace rlab {

struct FlowOptions {
  /// dt <= cfl * h^2 * min e^{2 phi} for explicit steps.
  double cfl = 0.2;
  /// Runs must end before this fraction of the extinction time.
  double extinction_fraction = 0.99;
  /// Number of stored snapshots, first and last step included.
  int snapshots = 10;
  /// Grid used for diagnostics of homogeneous families.
  int grid_n = kDefaultGridN;
};

/// Diagnostics recorded after every requested step.
struct StepDiagnostics {
  double t = 0.0;
  double min_r = 0.0;
  double max_r = 0.0;
  double volume = 0.0;
  double integral_r = 0.0;
  /// Extremes of e^{2 phi} over nodes (conformal only).
  double min_area_factor = 0.0;
  double max_area_factor = 0.0;
  /// max over interior nodes of |dR/dt - (Delta R + R^2)| across the step (conformal only).
  double r_evolution_residual = 0.0;
  /// Explicit substeps taken to respect the CFL guard.
  int substeps = 1;
};

struct FlowSnapshot {
  double t;
  MetricState state;
  /// Index into FlowTrace::steps.
  int step = 0;
};

struct FlowTrace {
  std::vector<FlowSnapshot> snapshots;
  std::vector<StepDiagnostics> steps;
  double dt = 0.0;
  double extinction_time = 0.0;
  /// Set when the run stopped early; snapshots end at the last valid state.
  std::optional<std::string> abort_reason;

  const MetricState& initial() const { return snapshots.front().state; }
  const MetricState& final() const { return snapshots.back().state; }
};

/// Largest explicit step admitted by the CFL guard for a conformal state.
double max_stable_step(const MetricState& state, double cfl = FlowOptions{}.cfl);

/// Right-hand side of d phi/dt = e^{-2 phi} (Lap phi - 1) = -R/2.
Eigen::VectorXd conformal_flow_rate(const ThetaGrid& grid, const Eigen::VectorXd& phi);

/// One RK4 step for conformal states; closed form for spheres; identity for tori.
MetricState step_flow(const MetricState& state, double dt, double cfl = FlowOptions{}.cfl);

/// Integrates to t_end with requested step dt. The initial dt must satisfy the CFL guard;
/// when the guard tightens as the metric shrinks, each step is split into equal substeps.
FlowTrace run_flow(const MetricState& state0, double t_end, double dt,
                   const FlowOptions& options = {});

struct FlowReport {
  /// max_k |dvol/dt + int R dV| / (1 + |int R dV|) over steps.
  double volume_defect = 0.0;
  int min_r_violations = 0;
  /// Largest decrease of min R between consecutive steps (0 when monotone).
  double worst_min_r_drop = 0.0;
  double r_evolution_residual = 0.0;
  bool conformal = false;
};

FlowReport flow_diagnostics(const FlowTrace& trace, double monotonicity_slack = 1e-8);

/// Largest |e^{2 phi} - (r0^2 - 2t)| / (r0^2 - 2t) over all steps of a flow started from a
/// round conformal sphere of radius r0.
double closed_form_error(const FlowTrace& trace, double r0);

/// CSV with header t,min_R,max_R,vol,int_R_dV, one row per snapshot.
void write_trace_csv(std::ostream& out, const FlowTrace& trace);

}  // namespace rlab
