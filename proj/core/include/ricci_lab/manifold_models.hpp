#pragma once

#include <limits>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ricci_lab/grid.hpp"

namespace rlab {

/// Round n-sphere. The metric at flow time t is (1 - 2(n-1)t / r0^2) times the initial one.
struct RoundSphere {
  int dimension;
  double initial_radius;
};

/// Flat n-torus with the given side lengths; n = side_lengths.size().
struct FlatTorus {
  std::vector<double> side_lengths;
};

/// Rotationally symmetric metric e^{2 phi(theta)} (dtheta^2 + sin^2 theta dvarphi^2) on S^2.
struct ConformalS2 {
  ThetaGrid grid;
  Eigen::VectorXd phi;
};

using ManifoldFamily = std::variant<RoundSphere, FlatTorus, ConformalS2>;

enum class Provenance { kClosedForm, kNumeric };

/// A metric g(t) from one of the supported families. Immutable.
///
/// Homogeneous families keep their closed-form parameters plus a constant
/// multiplier `scale` (set by rescale_metric); conformal states fold any
/// rescaling into phi.
class MetricState {
 public:
  MetricState(ManifoldFamily family, double time, Provenance provenance, double scale = 1.0);

  const ManifoldFamily& family() const noexcept { return family_; }
  double time() const noexcept { return time_; }
  Provenance provenance() const noexcept { return provenance_; }
  double scale() const noexcept { return scale_; }
  int dimension() const noexcept;

  bool is_round_sphere() const noexcept { return std::holds_alternative<RoundSphere>(family_); }
  bool is_flat_torus() const noexcept { return std::holds_alternative<FlatTorus>(family_); }
  bool is_conformal() const noexcept { return std::holds_alternative<ConformalS2>(family_); }

  const RoundSphere& round_sphere() const { return std::get<RoundSphere>(family_); }
  const FlatTorus& flat_torus() const { return std::get<FlatTorus>(family_); }
  const ConformalS2& conformal() const { return std::get<ConformalS2>(family_); }

  /// Absolute flow time at which the family's Ricci flow becomes extinct (+inf for tori).
  double extinction_time() const;

 private:
  ManifoldFamily family_;
  double time_;
  Provenance provenance_;
  double scale_;
};

/// Volume of the unit n-sphere S^n in R^{n+1}.
double sphere_area(int n);
/// Volume of the unit ball in R^n.
double ball_volume(int n);

MetricState make_round_sphere(int n, double r0);
MetricState make_flat_torus(std::vector<double> side_lengths);

/// Exact shrinking-sphere solution at time t. Throws ExtinctionError for t >= r0^2 / (2(n-1)).
MetricState closed_form_flow(const MetricState& state, double t);

/// Current radius of a (possibly rescaled) round sphere state.
double sphere_radius(const MetricState& state);

struct BumpParameters {
  double a = 0.3;
  double b = 0.0;
};

/// Presets: "round" (phi = log r0) and "bumped" (phi = log r0 + a cos theta + b cos^2 theta).
MetricState make_conformal_s2(std::string_view preset, int grid_n = kDefaultGridN,
                              double r0 = 1.0, BumpParameters bump = {});
MetricState make_conformal_s2(const ThetaGrid& grid, Eigen::VectorXd phi, double time = 0.0,
                              Provenance provenance = Provenance::kClosedForm);

/// Total volume. Closed form for homogeneous families, grid quadrature for conformal ones.
double volume(const MetricState& state);

/// Scalar curvature at the nodes of the state's discretisation (grid_n ignored for conformal).
ScalarField scalar_curvature(const MetricState& state, int grid_n = kDefaultGridN);

/// Metric multiplied by c: volumes scale by c^{n/2}, R by 1/c, distances by sqrt(c).
MetricState rescale_metric(const MetricState& state, double c);

struct HypothesisStatus {
  bool horizon_finite = false;
  double lambda0 = 0.0;
  double tolerance = 1e-8;
  bool satisfied = false;
};

inline constexpr double kInfiniteHorizon = std::numeric_limits<double>::infinity();

/// Evaluates "T < inf or lambda0(g0) > tol" for a flow started at state0.
HypothesisStatus hypothesis_status(const MetricState& state0, double horizon,
                                   int grid_n = kDefaultGridN, double tolerance = 1e-8);

}  // namespace rlab
