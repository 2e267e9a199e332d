#include "ricci_lab/ricci_flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/errors.hpp"
#include "ricci_lab/report.hpp"

namespace rlab {

namespace {

Eigen::VectorXd rk4(const ThetaGrid& grid, const Eigen::VectorXd& phi, double dt) {
  const Eigen::VectorXd k1 = conformal_flow_rate(grid, phi);
  const Eigen::VectorXd k2 = conformal_flow_rate(grid, phi + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = conformal_flow_rate(grid, phi + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = conformal_flow_rate(grid, phi + dt * k3);
  return phi + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// Delta_g R + R^2 at the nodes of a conformal state.
Eigen::VectorXd curvature_source(const MetricState& state, const Discretization& geom) {
  const Eigen::VectorXd& r = geom.scalar_curvature();
  const Eigen::VectorXd lap = unit_sphere_laplacian(state.conformal().grid, r);
  return lap.cwiseQuotient((2.0 * geom.log_scale().array()).exp().matrix()) + r.cwiseAbs2();
}

StepDiagnostics measure(const MetricState& state, int grid_n) {
  StepDiagnostics d;
  d.t = state.time();
  if (state.is_conformal()) {
    const Discretization geom = discretize(state, grid_n);
    const Eigen::VectorXd& r = geom.scalar_curvature();
    d.min_r = r.minCoeff();
    d.max_r = r.maxCoeff();
    d.volume = geom.total_volume();
    d.integral_r = geom.weights().dot(r);
    const Eigen::ArrayXd area = (2.0 * state.conformal().phi.array()).exp();
    d.min_area_factor = area.minCoeff();
    d.max_area_factor = area.maxCoeff();
    return d;
  }
  const double r = state.is_round_sphere()
                       ? discretize(state, 3).scalar_curvature()[0]
                       : 0.0;
  d.min_r = r;
  d.max_r = r;
  d.volume = volume(state);
  d.integral_r = r * d.volume;
  return d;
}

}  // namespace

double max_stable_step(const MetricState& state, double cfl) {
  if (!state.is_conformal()) return std::numeric_limits<double>::infinity();
  const auto& conformal = state.conformal();
  const double h = conformal.grid.spacing();
  return cfl * h * h * std::exp(2.0 * conformal.phi.minCoeff());
}

Eigen::VectorXd conformal_flow_rate(const ThetaGrid& grid, const Eigen::VectorXd& phi) {
  const Eigen::ArrayXd lap = unit_sphere_laplacian(grid, phi).array();
  return ((lap - 1.0) * (-2.0 * phi.array()).exp()).matrix();
}

MetricState step_flow(const MetricState& state, double dt, double cfl) {
  if (!(dt > 0.0)) throw DomainError("flow step must be > 0");
  const double t = state.time() + dt;
  if (state.is_round_sphere()) return closed_form_flow(state, t);
  if (state.is_flat_torus())
    return MetricState(state.family(), t, Provenance::kClosedForm, state.scale());

  const double limit = max_stable_step(state, cfl);
  if (dt > limit) {
    std::ostringstream msg;
    msg.precision(6);
    msg << "dt = " << dt << " violates the CFL guard; admissible dt <= " << limit;
    throw CflError(msg.str(), limit);
  }
  const auto& conformal = state.conformal();
  return make_conformal_s2(conformal.grid, rk4(conformal.grid, conformal.phi, dt), t,
                           Provenance::kNumeric);
}

FlowTrace run_flow(const MetricState& state0, double t_end, double dt, const FlowOptions& options) {
  if (!(dt > 0.0)) throw DomainError("flow step must be > 0");
  const double t0 = state0.time();
  if (!(t_end > t0)) throw DomainError("t_end must exceed the initial time");
  if (options.snapshots < 2) throw DomainError("a flow trace needs at least 2 snapshots");
  const double t_max = state0.extinction_time();
  const double guard = options.extinction_fraction * t_max;
  if (std::isfinite(t_max) && t_end > guard)
    throw ExtinctionError("t_end = " + std::to_string(t_end) + " exceeds the extinction guard " +
                          std::to_string(guard));
  if (state0.is_conformal()) {
    const double limit = max_stable_step(state0, options.cfl);
    if (dt > limit) {
      std::ostringstream msg;
      msg.precision(6);
      msg << "dt = " << dt << " violates the CFL guard at t = " << t0
          << "; admissible dt <= " << limit;
      throw CflError(msg.str(), limit);
    }
  }

  const int steps = static_cast<int>(std::ceil((t_end - t0) / dt - 1e-9));
  const double step = (t_end - t0) / steps;

  std::vector<int> snapshot_steps;
  for (int j = 0; j < options.snapshots; ++j)
    snapshot_steps.push_back(static_cast<int>(std::lround(static_cast<double>(j) * steps /
                                                          (options.snapshots - 1))));
  snapshot_steps.erase(std::unique(snapshot_steps.begin(), snapshot_steps.end()),
                       snapshot_steps.end());

  FlowTrace trace;
  trace.dt = step;
  trace.extinction_time = t_max;
  trace.steps.reserve(steps + 1);
  trace.steps.push_back(measure(state0, options.grid_n));
  trace.snapshots.push_back({t0, state0, 0});
  std::size_t next_snapshot = 1;

  MetricState current = state0;
  Eigen::VectorXd source;
  if (current.is_conformal()) source = curvature_source(current, discretize(current));

  for (int k = 1; k <= steps; ++k) {
    const double target = t0 + k * step;
    MetricState next = current;
    int substeps = 1;
    try {
      if (current.is_conformal()) {
        const double limit = max_stable_step(current, options.cfl);
        substeps = std::max(1, static_cast<int>(std::ceil((target - current.time()) / (0.95 * limit))));
        const double sub = (target - current.time()) / substeps;
        for (int s = 0; s < substeps; ++s) {
          next = step_flow(next, sub, options.cfl);
          if (!next.conformal().phi.allFinite()) throw Error("non-finite conformal factor");
        }
      } else {
        next = step_flow(current, target - current.time());
      }
    } catch (const Error& e) {
      trace.abort_reason = "step " + std::to_string(k) + " at t = " + format_double(target) +
                           ": " + e.what();
      break;
    }

    StepDiagnostics diag = measure(next, options.grid_n);
    diag.substeps = substeps;
    if (next.is_conformal()) {
      const Discretization geom = discretize(next);
      const Eigen::VectorXd next_source = curvature_source(next, geom);
      const Eigen::VectorXd rate =
          (geom.scalar_curvature() - discretize(current).scalar_curvature()) / step;
      const Eigen::VectorXd residual = rate - 0.5 * (source + next_source);
      const int n = static_cast<int>(residual.size());
      diag.r_evolution_residual = residual.segment(1, n - 2).cwiseAbs().maxCoeff();
      source = next_source;
    }
    trace.steps.push_back(diag);
    current = std::move(next);
    if (next_snapshot < snapshot_steps.size() && snapshot_steps[next_snapshot] == k) {
      trace.snapshots.push_back({current.time(), current, k});
      ++next_snapshot;
    }
  }

  if (trace.abort_reason && trace.snapshots.back().step != static_cast<int>(trace.steps.size()) - 1) {
    const int last = static_cast<int>(trace.steps.size()) - 1;
    trace.snapshots.push_back({current.time(), current, last});
  }
  return trace;
}

FlowReport flow_diagnostics(const FlowTrace& trace, double monotonicity_slack) {
  if (trace.snapshots.size() < 3) throw DomainError("flow diagnostics need >= 3 snapshots");
  FlowReport report;
  report.conformal = trace.initial().is_conformal();
  for (std::size_t k = 1; k < trace.steps.size(); ++k) {
    const StepDiagnostics& a = trace.steps[k - 1];
    const StepDiagnostics& b = trace.steps[k];
    const double dt = b.t - a.t;
    const double mean_integral = 0.5 * (a.integral_r + b.integral_r);
    const double defect =
        std::abs((b.volume - a.volume) / dt + mean_integral) / (1.0 + std::abs(mean_integral));
    report.volume_defect = std::max(report.volume_defect, defect);
    const double drop = a.min_r - b.min_r;
    if (drop > monotonicity_slack * (1.0 + std::abs(a.min_r))) ++report.min_r_violations;
    report.worst_min_r_drop = std::max(report.worst_min_r_drop, drop);
    report.r_evolution_residual = std::max(report.r_evolution_residual, b.r_evolution_residual);
  }
  return report;
}

double closed_form_error(const FlowTrace& trace, double r0) {
  double worst = 0.0;
  for (const StepDiagnostics& d : trace.steps) {
    const double exact = r0 * r0 - 2.0 * d.t;
    worst = std::max({worst, std::abs(d.max_area_factor - exact) / exact,
                      std::abs(d.min_area_factor - exact) / exact});
  }
  return worst;
}

void write_trace_csv(std::ostream& out, const FlowTrace& trace) {
  out << "t,min_R,max_R,vol,int_R_dV\n";
  for (const FlowSnapshot& snap : trace.snapshots) {
    const StepDiagnostics& d = trace.steps[snap.step];
    out << format_double(d.t) << ',' << format_double(d.min_r) << ',' << format_double(d.max_r)
        << ',' << format_double(d.volume) << ',' << format_double(d.integral_r) << '\n';
  }
}

}  // namespace rlab
