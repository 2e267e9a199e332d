#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/report.hpp"

namespace rlab {

/// Kernel of e^{-Ht} on one factor: (e^{-Ht} u)_i = sum_j K_ij u_j w_j.
struct KernelFactor {
  Eigen::MatrixXd values;
  Eigen::VectorXd weights;
};

/// Heat kernel at time t. Product manifolds (tori) carry one factor per axis and the
/// kernel is their tensor product; polar states carry a single factor.
class KernelMatrix {
 public:
  KernelMatrix(double t, std::vector<KernelFactor> factors);

  double time() const noexcept { return time_; }
  const std::vector<KernelFactor>& factors() const noexcept { return factors_; }
  const KernelFactor& primary() const { return factors_.front(); }

  /// Action on fields of the reduced coordinate (the other torus axes act on constants).
  Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

 private:
  double time_;
  std::vector<KernelFactor> factors_;
};

enum class NormPair { kOneToInf, kTwoToInf, kOneToTwo, kQToInf };

/// Exact Lp -> Lq norms of the discrete kernel:
///   1->inf = max K_ij, 2->inf = max_i ||K_i.||_2, 1->2 = max_j ||K_.j||_2,
///   q->inf = max_i ||K_i.||_{q'} with 1/q + 1/q' = 1.
double operator_norm(const KernelMatrix& kernel, NormPair pair, double q = 2.0);

/// e^{-Ht} for a Kronecker sum of factor generators, via dense spectral calculus.
class HeatSemigroup {
 public:
  HeatSemigroup(std::vector<DiscreteOperator> factors, int dimension);

  /// H_s = -Delta + (R + max R_-)/4 on the state, plus a constant shift (1 for H~_s).
  static HeatSemigroup for_state(const Discretization& geom, double shift = 0.0);

  int dimension() const noexcept { return dimension_; }
  const std::vector<DiscreteOperator>& factors() const noexcept { return factors_; }
  const std::vector<SpectralDecomposition>& spectra() const noexcept { return spectra_; }
  double bottom_of_spectrum() const;

  KernelMatrix kernel(double t) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& u, double t) const;
  double norm(NormPair pair, double t, double q = 2.0) const;

  /// H^{-1/2} u on the reduced coordinate; requires every eigenvalue >= 1/2.
  Eigen::VectorXd inv_sqrt_apply(const Eigen::VectorXd& u) const;
  /// H^{-1} u on the reduced coordinate.
  Eigen::VectorXd inverse_apply(const Eigen::VectorXd& u) const;

 private:
  std::vector<DiscreteOperator> factors_;
  std::vector<SpectralDecomposition> spectra_;
  int dimension_;
};

KernelMatrix heat_kernel(const DiscreteOperator& op, double t);
KernelMatrix heat_kernel(const HeatSemigroup& semigroup, double t);

/// count log-spaced points from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, int count);

struct PowerLawFit {
  double alpha = 0.0;      ///< nu ~ C t^{-alpha}
  double prefactor = 0.0;  ///< C
  double residual = 0.0;   ///< rms of log residuals
};

/// Least-squares fit of log nu = log C - alpha log t over samples with t in [lo, hi].
PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> nu, double lo,
                          double hi);

struct OperatorNormCurve {
  NormPair pair = NormPair::kOneToInf;
  std::vector<double> times;
  std::vector<double> values;
  double window_lo = 1e-3;
  double window_hi = 1e-1;
  PowerLawFit fit;
};

OperatorNormCurve ultracontractivity_curve(const HeatSemigroup& semigroup, NormPair pair,
                                           std::span<const double> t_grid,
                                           double window_lo = 1e-3, double window_hi = 1e-1);

/// max over the curve of t^{exponent} nu(t); C4 uses exponent n/4 on (2->inf), C5 n/2 on (1->inf).
double empirical_constant(const OperatorNormCurve& curve, double exponent, double t_max = 1.0);

/// (a) of the shifted semigroup bound: nu~(t) <= e^{1-t} nu~(1) for t >= 1, where
/// nu~ is the 1->inf norm of e^{-H~ t}, H~ = H + 1.
InequalityReport shifted_norm_bound_check(const HeatSemigroup& shifted, double t);

/// C6 = max_t t^{n/2} nu~(t) over t_grid (default [1e-3, 10]).
double shifted_constant(const HeatSemigroup& shifted, std::span<const double> t_grid);
std::vector<double> default_c6_grid();

/// ||e^{-H~ t}||_{q->inf} <= C6^{1/q} t^{-n/(2q)}.
InequalityReport q_to_infty_check(const HeatSemigroup& shifted, double t, double q, double c6);

/// CSV t,norm_1_inf,norm_2_inf,norm_1_2,alpha_fit_window for one operator snapshot.
/// alpha_fit_window carries the fitted 1->inf exponent on rows inside the fit window.
void write_norm_curve_csv(std::ostream& out, const OperatorNormCurve& one_inf,
                          const OperatorNormCurve& two_inf, const OperatorNormCurve& one_two);

}  // namespace rlab
