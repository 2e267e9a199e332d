#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/field_family.hpp"
#include "ricci_lab/report.hpp"
#include "ricci_lab/ricci_flow.hpp"

namespace rlab {

/// Dimension n and q in [1, n); p is always derived from 1/p = 1/q - 1/n.
class SobolevExponents {
 public:
  SobolevExponents(int n, double q);

  int n() const noexcept { return n_; }
  double q() const noexcept { return q_; }
  double p() const noexcept { return n_ * q_ / (n_ - q_); }
  /// 2p / (p - q), equal to 2n / q.
  double entropy_factor() const { return 2.0 * p() / (p() - q_); }

 private:
  int n_;
  double q_;
};

struct ConstantEstimate {
  std::string id;
  double value = 0.0;
  double t = 0.0;
  std::string witness;
  std::string family_description;
  std::uint64_t family_hash = 0;
  int budget = 0;
};

/// ||u||_p / (||grad u||_q + vol^{-1/n} ||u||_q).
double sobolev_quotient(const ScalarField& u, const SobolevExponents& e, const Discretization& geom);
/// Same with an externally supplied |grad u| (chain-rule gradients of |u|^{2/mu}).
double sobolev_quotient(const ScalarField& u, const ScalarField& grad_norm,
                        const SobolevExponents& e, const Discretization& geom);

/// Certified lower bound of C_{p,q}: family maximum followed by 50 ascent steps.
ConstantEstimate estimate_sobolev_constant(const SobolevExponents& e, const Discretization& geom,
                                           const FieldFamily& family, int ascent_steps = 50);

/// int |u|^q log u^2 <= (2n/q) log ||u||_p after normalising ||u||_q = 1.
InequalityReport verify_jensen_step(const ScalarField& u, const SobolevExponents& e,
                                    const Discretization& geom, std::string witness = {});

struct LogSobolevCheck {
  InequalityReport derivation;     ///< always holds
  InequalityReport constant_form;  ///< against the supplied lower bound of C_{p,q}
  double quotient = 0.0;
  bool constant_exceeded = false;  ///< quotient(u) > C_lower: the estimator should be raised
};

LogSobolevCheck verify_log_sobolev_q(const ScalarField& u, const SobolevExponents& e,
                                     const Discretization& geom, double c_lower,
                                     std::string witness = {});

/// ||grad |u|^{2/mu}||_mu <= (2/mu) ||grad u||_2 after normalising ||u||_2 = 1.
InequalityReport holder_gradient_check(const ScalarField& u, double mu, const Discretization& geom,
                                       std::string witness = {});

/// Composite check of int u^2 log u^2 <= n log(C (2/mu ||grad u||_2 + vol^{-1/n})).
/// c_lower bounds C_{n mu/(n-mu), mu}.
LogSobolevCheck verify_log_sobolev_2(const ScalarField& u, double mu, const Discretization& geom,
                                     double c_lower, std::string witness = {});

/// sum w u^2 log u^2 with the 0 log 0 = 0 convention below u_floor.
double entropy(const ScalarField& u, const Discretization& geom);

/// D(u, sigma) = int u^2 log u^2 - sigma int (|grad u|^2 + R/4 u^2) + (n/2) log sigma, ||u||_2 = 1.
double uniform_logsob_defect(const ScalarField& u, double sigma, const Discretization& geom);

struct UniformLogSobolevEstimate {
  std::vector<double> times;
  std::vector<double> c2_by_time;
  std::vector<std::string> witnesses;
  double c2 = 0.0;
  /// Slope of C2(t) against t, used as C1 when positive.
  double c1 = 0.0;
  std::optional<double> c3;
  std::string c3_refusal;
  std::uint64_t family_hash = 0;
  int budget = 0;
};

UniformLogSobolevEstimate estimate_uniform_constants(const FlowTrace& trace,
                                                     std::span<const double> sigma_grid,
                                                     const FieldFamilySpec& family,
                                                     const HypothesisStatus& hypothesis,
                                                     int grid_n = kDefaultGridN);

/// ||u||_p <= A (sum w (|grad u|^2 + V u^2)^{q/2})^{1/q}, V = (R + 4 + max R(g0)_-)/4.
/// Throws DomainError when some V < 1 - 1e-8 (broken min-R monotonicity upstream).
InequalityReport verify_uniform_sobolev(const ScalarField& u, const SobolevExponents& e,
                                        const Discretization& geom, double a,
                                        double max_r0_minus, std::string witness = {});

/// lhs / rhs of verify_uniform_sobolev with A = 1.
double uniform_sobolev_quotient(const ScalarField& u, const SobolevExponents& e,
                                const Discretization& geom, double max_r0_minus);

/// A^(t): family maximum (plus ascent) of the uniform Sobolev quotient at one snapshot.
ConstantEstimate estimate_uniform_sobolev_constant(const SobolevExponents& e,
                                                   const Discretization& geom,
                                                   const FieldFamily& family,
                                                   double max_r0_minus, int ascent_steps = 50);

/// max_M R_- at the initial snapshot of a trace.
double max_negative_curvature(const Discretization& geom);

/// constant_id,t,value,family_hash,budget
void write_constants_csv(std::ostream& out, const std::vector<ConstantEstimate>& estimates);

}  // namespace rlab
