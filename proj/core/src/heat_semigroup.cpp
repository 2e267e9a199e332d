#include "ricci_lab/heat_semigroup.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>

#include "ricci_lab/errors.hpp"

namespace rlab {

namespace {

KernelFactor factor_kernel(const SpectralDecomposition& spec, double t) {
  const Eigen::VectorXd decay = (-spec.eigenvalues.array() * t).exp().matrix();
  KernelFactor f;
  f.values = spec.eigenvectors * decay.asDiagonal() * spec.eigenvectors.transpose();
  f.values = 0.5 * (f.values + f.values.transpose()).eval();
  f.weights = spec.weights;
  return f;
}

// Per-factor norm; the tensor-product kernel norm is the product of these.
double factor_norm(const KernelFactor& f, NormPair pair, double q) {
  const Eigen::ArrayXXd a = f.values.array().abs();
  const Eigen::ArrayXd w = f.weights.array();
  switch (pair) {
    case NormPair::kOneToInf:
      return a.maxCoeff();
    case NormPair::kTwoToInf:
      return std::sqrt((a.square().rowwise() * w.transpose()).rowwise().sum().maxCoeff());
    case NormPair::kOneToTwo:
      return std::sqrt((a.square().colwise() * w).colwise().sum().maxCoeff());
    case NormPair::kQToInf: {
      if (!(q >= 1.0)) throw DomainError("q->inf norm needs q >= 1");
      if (q == 1.0) return a.maxCoeff();
      if (std::isinf(q)) return (a.rowwise() * w.transpose()).rowwise().sum().maxCoeff();
      const double conj = q / (q - 1.0);
      const double row_max =
          (a.pow(conj).rowwise() * w.transpose()).rowwise().sum().maxCoeff();
      return std::pow(row_max, 1.0 / conj);
    }
  }
  throw DomainError("unsupported norm pair");
}

}  // namespace

KernelMatrix::KernelMatrix(double t, std::vector<KernelFactor> factors)
    : time_(t), factors_(std::move(factors)) {
  if (factors_.empty()) throw DomainError("kernel needs at least one factor");
}

Eigen::VectorXd KernelMatrix::apply(const Eigen::VectorXd& u) const {
  const KernelFactor& f = primary();
  if (u.size() != f.weights.size()) throw DomainError("field size does not match the kernel");
  Eigen::VectorXd out = f.values * u.cwiseProduct(f.weights);
  // Remaining axes act on constants, which they preserve up to the shift carried by factor 0.
  for (std::size_t k = 1; k < factors_.size(); ++k) {
    const KernelFactor& g = factors_[k];
    out *= (g.values * g.weights).mean();
  }
  return out;
}

double operator_norm(const KernelMatrix& kernel, NormPair pair, double q) {
  double product = 1.0;
  for (const KernelFactor& f : kernel.factors()) product *= factor_norm(f, pair, q);
  return product;
}

HeatSemigroup::HeatSemigroup(std::vector<DiscreteOperator> factors, int dimension)
    : factors_(std::move(factors)), dimension_(dimension) {
  if (factors_.empty()) throw DomainError("semigroup needs at least one factor");
  spectra_.reserve(factors_.size());
  for (const DiscreteOperator& op : factors_) spectra_.push_back(decompose(op));
}

HeatSemigroup HeatSemigroup::for_state(const Discretization& geom, double shift) {
  if (geom.kind() == GridKind::kPolar) {
    return HeatSemigroup({shifted(schrodinger_operator(geom, potential_hs(geom)), shift)},
                         geom.dimension());
  }
  // Flat torus: R = 0, so H_s is the Laplacian and factors along each side.
  std::vector<DiscreteOperator> factors;
  for (double side : geom.torus_sides()) factors.push_back(periodic_laplacian(geom.size(), side));
  factors.front() = shifted(factors.front(), shift);
  return HeatSemigroup(std::move(factors), geom.dimension());
}

double HeatSemigroup::bottom_of_spectrum() const {
  double total = 0.0;
  for (const SpectralDecomposition& s : spectra_) total += s.eigenvalues[0];
  return total;
}

KernelMatrix HeatSemigroup::kernel(double t) const {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat kernel needs t > 0");
  std::vector<KernelFactor> factors;
  factors.reserve(spectra_.size());
  for (const SpectralDecomposition& s : spectra_) factors.push_back(factor_kernel(s, t));
  return KernelMatrix(t, std::move(factors));
}

Eigen::VectorXd HeatSemigroup::apply(const Eigen::VectorXd& u, double t) const {
  return kernel(t).apply(u);
}

double HeatSemigroup::norm(NormPair pair, double t, double q) const {
  return operator_norm(kernel(t), pair, q);
}

namespace {

Eigen::VectorXd spectral_apply(const SpectralDecomposition& s, const Eigen::VectorXd& u,
                               double power) {
  if (u.size() != s.weights.size()) throw DomainError("field size does not match the operator");
  if (s.eigenvalues.minCoeff() < 0.5)
    throw DomainError("shifted generator has an eigenvalue below 1/2");
  const Eigen::VectorXd coeffs = s.eigenvectors.transpose() * u.cwiseProduct(s.weights);
  const Eigen::VectorXd scaled = coeffs.cwiseProduct(s.eigenvalues.array().pow(power).matrix());
  return s.eigenvectors * scaled;
}

}  // namespace

Eigen::VectorXd HeatSemigroup::inv_sqrt_apply(const Eigen::VectorXd& u) const {
  return spectral_apply(spectra_.front(), u, -0.5);
}

Eigen::VectorXd HeatSemigroup::inverse_apply(const Eigen::VectorXd& u) const {
  return spectral_apply(spectra_.front(), u, -1.0);
}

KernelMatrix heat_kernel(const DiscreteOperator& op, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw DomainError("heat kernel needs t > 0");
  return KernelMatrix(t, {factor_kernel(decompose(op), t)});
}

KernelMatrix heat_kernel(const HeatSemigroup& semigroup, double t) { return semigroup.kernel(t); }

std::vector<double> log_spaced(double lo, double hi, int count) {
  if (!(lo > 0.0) || !(hi >= lo) || count < 1) throw DomainError("invalid log-spaced range");
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i < count; ++i) out[i] = std::exp(a + (b - a) * i / (count - 1));
  out.back() = hi;
  return out;
}

PowerLawFit fit_power_law(std::span<const double> t, std::span<const double> nu, double lo,
                          double hi) {
  if (t.size() != nu.size()) throw DomainError("fit samples have mismatched lengths");
  std::vector<double> xs, ys;
  const double slack = 1e-12;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < lo * (1 - slack) || t[i] > hi * (1 + slack) || !(nu[i] > 0.0)) continue;
    xs.push_back(std::log(t[i]));
    ys.push_back(std::log(nu[i]));
  }
  if (xs.size() < 2) throw DomainError("power-law fit needs at least two samples in the window");
  const double m = static_cast<double>(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (!(sxx > 0.0)) throw DomainError("power-law fit window has a single abscissa");
  const double slope = sxy / sxx;
  const double intercept = my - slope * mx;
  double ss = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (intercept + slope * xs[i]);
    ss += r * r;
  }
  return {-slope, std::exp(intercept), std::sqrt(ss / m)};
}

OperatorNormCurve ultracontractivity_curve(const HeatSemigroup& semigroup, NormPair pair,
                                           std::span<const double> t_grid, double window_lo,
                                           double window_hi) {
  OperatorNormCurve curve;
  curve.pair = pair;
  curve.window_lo = window_lo;
  curve.window_hi = window_hi;
  for (std::size_t i = 0; i < t_grid.size(); ++i) {
    if (i > 0 && !(t_grid[i] > t_grid[i - 1])) throw DomainError("t grid must increase");
    curve.times.push_back(t_grid[i]);
    curve.values.push_back(semigroup.norm(pair, t_grid[i]));
  }
  curve.fit = fit_power_law(curve.times, curve.values, window_lo, window_hi);
  return curve;
}

double empirical_constant(const OperatorNormCurve& curve, double exponent, double t_max) {
  double best = 0.0;
  for (std::size_t i = 0; i < curve.times.size(); ++i)
    if (curve.times[i] <= t_max * (1 + 1e-12))
      best = std::max(best, std::pow(curve.times[i], exponent) * curve.values[i]);
  return best;
}

InequalityReport shifted_norm_bound_check(const HeatSemigroup& shifted, double t) {
  if (!(t >= 1.0)) throw DomainError("shifted bound applies for t >= 1");
  const double lhs = shifted.norm(NormPair::kOneToInf, t);
  const double rhs = std::exp(1.0 - t) * shifted.norm(NormPair::kOneToInf, 1.0);
  InequalityReport r = make_report("shifted_semigroup_bound", lhs, rhs, "kernel");
  r.t = t;
  return r;
}

std::vector<double> default_c6_grid() { return log_spaced(1e-3, 10.0, 41); }

double shifted_constant(const HeatSemigroup& shifted, std::span<const double> t_grid) {
  const double half_n = 0.5 * shifted.dimension();
  double best = 0.0;
  for (double t : t_grid)
    best = std::max(best, std::pow(t, half_n) * shifted.norm(NormPair::kOneToInf, t));
  return best;
}

InequalityReport q_to_infty_check(const HeatSemigroup& shifted, double t, double q, double c6) {
  const double lhs = shifted.norm(NormPair::kQToInf, t, q);
  const double rhs = std::pow(c6, 1.0 / q) * std::pow(t, -0.5 * shifted.dimension() / q);
  InequalityReport r = make_report("q_to_infty", lhs, rhs, "kernel");
  r.t = t;
  r.q = q;
  return r;
}

void write_norm_curve_csv(std::ostream& out, const OperatorNormCurve& one_inf,
                          const OperatorNormCurve& two_inf, const OperatorNormCurve& one_two) {
  if (two_inf.times.size() != one_inf.times.size() || one_two.times.size() != one_inf.times.size())
    throw DomainError("norm curves must share a time grid");
  out << "t,norm_1_inf,norm_2_inf,norm_1_2,alpha_fit_window\n";
  for (std::size_t i = 0; i < one_inf.times.size(); ++i) {
    const double t = one_inf.times[i];
    const bool inside = t >= one_inf.window_lo * (1 - 1e-12) && t <= one_inf.window_hi * (1 + 1e-12);
    out << format_double(t) << ',' << format_double(one_inf.values[i]) << ','
        << format_double(two_inf.values[i]) << ',' << format_double(one_two.values[i]) << ','
        << format_double(inside ? one_inf.fit.alpha : kNotApplicable) << '\n';
  }
}

}  // namespace rlab
