#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/inequality_lab.hpp"
#include "ricci_lab/report.hpp"
#include "ricci_lab/ricci_flow.hpp"

namespace rlab {

enum class Pole { kNorth, kSouth };

/// Geodesic ball centred at a pole of a polar state (any point of a flat torus).
struct BallRegion {
  Pole center = Pole::kNorth;
  double radius = 0.0;
  /// Coordinate cutoff with d(theta*) = radius, measured from the centre pole.
  double theta_star = 0.0;
  double volume = 0.0;
  bool whole_manifold = false;
};

/// Distance from the pole to theta, integrating e^{phi} with phi interpolated linearly
/// between nodes (constant in the two end half-cells).
double pole_distance(const Discretization& geom, double theta, Pole center = Pole::kNorth);
/// Distance between the poles.
double diameter(const Discretization& geom);
/// d(theta_i) for every node.
Eigen::VectorXd node_distances(const Discretization& geom, Pole center = Pole::kNorth);

/// theta* by bisection to 1e-12, volume by Gauss-Legendre quadrature of the interpolated metric.
BallRegion geodesic_ball(const Discretization& geom, double r, Pole center = Pole::kNorth);

/// u = max(0, r1 - d(x, pole)).
ScalarField cutoff_function(const Discretization& geom, double r1, Pole center = Pole::kNorth);

/// min( (2^{(n+3q)/q} A)^{-n}, (sqrt2 A (1 + (4 + max R0_-) rho^2)^{1/2})^{-n} ).
double kappa_formula(int n, double q, double a, double rho, double max_r0_minus);

/// beta = (2^{n/q + 5/2} A)^{-n}, the self-consistent solution of the ball-volume recursion.
double fixed_point_kappa(int n, double q, double a);

/// Runs v(2r) = (2r / (4 sqrt2 A))^{nq/(n+q)} v(r)^{n/(n+q)} upward from
/// v(2^-levels) = start_ratio * r^n and returns v(1).
double volume_recursion(int n, double q, double a, int levels, double start_ratio);

/// Fewest nodes inside B(r1/2) for the iteration chain to be evaluated.
inline constexpr int kMinHalfBallNodes = 4;

struct VolumeIterationReport {
  bool admissible = false;
  /// B(r1/2) holds at least kMinHalfBallNodes nodes; otherwise every norm collapses to 0.
  bool resolved = false;
  /// max R of the rescaled metric over nodes of the unit ball.
  double max_curvature = 0.0;
  InequalityReport ball_sobolev;   ///< ||u||_p <= 2 sqrt2 A ||grad u||_q on the ball
  InequalityReport layer_cake;     ///< (r1/2) vol(B(r1/2))^{1/q} <= ||u||_q
  InequalityReport holder;         ///< ||u||_q <= vol(B(r1))^{1/n} ||u||_p
  InequalityReport volume_growth;  ///< vol(B(r1)) >= (r1/(4 sqrt2 A))^{nq/(n+q)} vol(B(r1/2))^{n/(n+q)}
};

/// Evaluates the ball-volume iteration for the cutoff witness on a rescaled state.
/// The chain is skipped when the ball is inadmissible or not resolved by the grid.
/// Ball volumes here are node sums over {d(theta_i) < r}, which keeps Hoelder exact.
VolumeIterationReport volume_iteration_check(const Discretization& rescaled,
                                             const SobolevExponents& e, double a, double r1,
                                             Pole center = Pole::kNorth);

struct ScanRow {
  double t = 0.0;
  double r = 0.0;
  Pole center = Pole::kNorth;
  double rmax_ball = 0.0;
  double volume = 0.0;
  double vol_over_rn = 0.0;
  double kappa = 0.0;
  bool admissible = false;
  bool pass = false;
};

struct KappaCertificate {
  double kappa = 0.0;
  int n = 0;
  double q = 0.0;
  double p = 0.0;
  double rho = 0.0;
  double a = 0.0;
  double max_r0_minus = 0.0;
  HypothesisStatus hypothesis;
  bool refused = false;
  std::string refusal_reason;
  /// Admissible cells only, ordered by (t, centre, r).
  std::vector<ScanRow> rows;
  int inadmissible = 0;
  bool overall_pass = false;
};

struct ScanOptions {
  int radii = 16;
  double min_radius_fraction = 0.05;
  int grid_n = kDefaultGridN;
};

/// Checks vol_t(B_t(pole, r)) >= kappa r^n on every admissible (t, r), where admissible means
/// max R over the ball <= r^{-2}. Refuses when the hypothesis is not satisfied. The constant A
/// is empirical, so the certificate is too.
KappaCertificate noncollapse_scan(const FlowTrace& trace, double rho, const SobolevExponents& e,
                                  double a, const HypothesisStatus& hypothesis,
                                  const ScanOptions& options = {});

/// t,r,Rmax_ball,vol,vol_over_rn,kappa,pass
void write_certificate_csv(std::ostream& out, const KappaCertificate& certificate);
/// key: value lines (kappa, A, q, p, rho, hypothesis, overall_pass, ...).
void write_certificate_summary(std::ostream& out, const KappaCertificate& certificate);

}  // namespace rlab
