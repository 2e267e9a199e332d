#include "ricci_lab/manifold_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/errors.hpp"

namespace rlab {

ThetaGrid::ThetaGrid(int node_count)
    : node_count_(node_count), spacing_(std::numbers::pi / node_count) {
  if (node_count < 3) throw DomainError("theta grid needs at least 3 nodes");
}

double ThetaGrid::base_weight(int i) const {
  return 2.0 * std::numbers::pi * std::sin(node(i)) * spacing_;
}

Eigen::VectorXd ThetaGrid::nodes() const {
  Eigen::VectorXd out(node_count_);
  for (int i = 0; i < node_count_; ++i) out[i] = node(i);
  return out;
}

Eigen::VectorXd ThetaGrid::base_weights() const {
  Eigen::VectorXd out(node_count_);
  for (int i = 0; i < node_count_; ++i) out[i] = base_weight(i);
  return out;
}

ScalarField::ScalarField(GridKind kind, Eigen::VectorXd values)
    : kind_(kind), values_(std::move(values)) {
  if (!values_.allFinite()) throw DomainError("scalar field has non-finite values");
}

MetricState::MetricState(ManifoldFamily family, double time, Provenance provenance, double scale)
    : family_(std::move(family)), time_(time), provenance_(provenance), scale_(scale) {
  if (!(time >= 0.0)) throw DomainError("flow time must be >= 0");
  if (!(scale > 0.0) || !std::isfinite(scale)) throw DomainError("metric scale must be > 0");
  if (const auto* s = std::get_if<RoundSphere>(&family_)) {
    if (s->dimension < 2) throw DomainError("sphere dimension must be >= 2");
    if (!(s->initial_radius > 0.0)) throw DomainError("sphere radius must be > 0");
    if (time_ >= extinction_time()) throw ExtinctionError("round sphere state past extinction");
  } else if (const auto* torus = std::get_if<FlatTorus>(&family_)) {
    if (torus->side_lengths.size() < 2) throw DomainError("torus dimension must be >= 2");
    for (double side : torus->side_lengths)
      if (!(side > 0.0) || !std::isfinite(side)) throw DomainError("torus sides must be > 0");
  } else {
    const auto& conformal = std::get<ConformalS2>(family_);
    if (conformal.phi.size() != conformal.grid.size())
      throw DomainError("conformal factor size does not match its grid");
    if (!conformal.phi.allFinite()) throw DomainError("conformal factor must be finite");
  }
}

int MetricState::dimension() const noexcept {
  if (const auto* s = std::get_if<RoundSphere>(&family_)) return s->dimension;
  if (const auto* torus = std::get_if<FlatTorus>(&family_))
    return static_cast<int>(torus->side_lengths.size());
  return 2;
}

double MetricState::extinction_time() const {
  if (const auto* s = std::get_if<RoundSphere>(&family_))
    return s->initial_radius * s->initial_radius / (2.0 * (s->dimension - 1));
  if (is_flat_torus()) return std::numeric_limits<double>::infinity();
  // Gauss-Bonnet: d vol / dt = -int R dA = -8 pi on S^2.
  return time_ + volume(*this) / (8.0 * std::numbers::pi);
}

double sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

double ball_volume(int n) { return std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n + 1.0); }

MetricState make_round_sphere(int n, double r0) {
  if (n < 2) throw DomainError("round sphere needs n >= 2, got " + std::to_string(n));
  if (!(r0 > 0.0)) throw DomainError("round sphere needs r0 > 0");
  return MetricState(RoundSphere{n, r0}, 0.0, Provenance::kClosedForm);
}

MetricState make_flat_torus(std::vector<double> side_lengths) {
  return MetricState(FlatTorus{std::move(side_lengths)}, 0.0, Provenance::kClosedForm);
}

MetricState closed_form_flow(const MetricState& state, double t) {
  if (!state.is_round_sphere()) throw DomainError("closed-form flow needs a round sphere");
  if (!(t >= 0.0)) throw DomainError("flow time must be >= 0");
  const double t_max = state.extinction_time();
  if (t >= t_max)
    throw ExtinctionError("t = " + std::to_string(t) + " is past the extinction time " +
                          std::to_string(t_max));
  return MetricState(state.round_sphere(), t, Provenance::kClosedForm, state.scale());
}

double sphere_radius(const MetricState& state) {
  const auto& s = state.round_sphere();
  const double r0 = s.initial_radius;
  const double shrink = 1.0 - 2.0 * (s.dimension - 1) * state.time() / (r0 * r0);
  return std::sqrt(state.scale() * shrink) * r0;
}

MetricState make_conformal_s2(std::string_view preset, int grid_n, double r0, BumpParameters bump) {
  if (grid_n < 16) throw DomainError("conformal S^2 needs grid N >= 16");
  if (!(r0 > 0.0)) throw DomainError("conformal S^2 needs r0 > 0");
  const ThetaGrid grid(grid_n);
  Eigen::VectorXd phi = Eigen::VectorXd::Constant(grid_n, std::log(r0));
  if (preset == "bumped") {
    for (int i = 0; i < grid_n; ++i) {
      const double c = std::cos(grid.node(i));
      phi[i] += bump.a * c + bump.b * c * c;
    }
  } else if (preset != "round") {
    throw DomainError("unknown conformal preset '" + std::string(preset) + "'");
  }
  return make_conformal_s2(grid, std::move(phi));
}

MetricState make_conformal_s2(const ThetaGrid& grid, Eigen::VectorXd phi, double time,
                              Provenance provenance) {
  if (grid.size() < 16) throw DomainError("conformal S^2 needs grid N >= 16");
  if (!phi.allFinite()) throw DomainError("conformal factor must be finite");
  return MetricState(ConformalS2{grid, std::move(phi)}, time, provenance);
}

double volume(const MetricState& state) {
  const int n = state.dimension();
  if (state.is_round_sphere()) return sphere_area(n) * std::pow(sphere_radius(state), n);
  if (state.is_flat_torus()) {
    double vol = 1.0;
    for (double side : state.flat_torus().side_lengths) vol *= side;
    return vol * std::pow(state.scale(), 0.5 * n);
  }
  const auto& conformal = state.conformal();
  double vol = 0.0;
  for (int i = 0; i < conformal.grid.size(); ++i)
    vol += std::exp(2.0 * conformal.phi[i]) * conformal.grid.base_weight(i);
  return vol;
}

ScalarField scalar_curvature(const MetricState& state, int grid_n) {
  return ScalarField(state.is_flat_torus() ? GridKind::kPeriodic : GridKind::kPolar,
                     discretize(state, grid_n).scalar_curvature());
}

MetricState rescale_metric(const MetricState& state, double c) {
  if (!(c > 0.0) || !std::isfinite(c)) throw DomainError("rescale factor must be > 0");
  if (state.is_conformal()) {
    const auto& conformal = state.conformal();
    Eigen::VectorXd phi = conformal.phi.array() + 0.5 * std::log(c);
    return MetricState(ConformalS2{conformal.grid, std::move(phi)}, state.time(),
                       state.provenance());
  }
  return MetricState(state.family(), state.time(), state.provenance(), state.scale() * c);
}

HypothesisStatus hypothesis_status(const MetricState& state0, double horizon, int grid_n,
                                   double tolerance) {
  HypothesisStatus status;
  status.horizon_finite = std::isfinite(horizon);
  status.lambda0 = first_eigenvalue(discretize(state0, grid_n));
  status.tolerance = tolerance;
  status.satisfied = status.horizon_finite || status.lambda0 > tolerance;
  return status;
}

}  // namespace rlab
