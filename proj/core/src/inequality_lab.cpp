#include "ricci_lab/inequality_lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

#include "ricci_lab/errors.hpp"

namespace rlab {

namespace {

constexpr double kUFloor = 1e-300;
constexpr int kMinimumBudget = 50;

double norm_of(const Eigen::ArrayXd& values, double p, const Eigen::ArrayXd& w) {
  return std::pow((w * values.abs().pow(p)).sum(), 1.0 / p);
}

ScalarField normalized(const ScalarField& u, double q, const Discretization& geom) {
  const double norm = lp_norm(u, q, geom);
  if (!(norm > 0.0)) throw DomainError("field is identically zero");
  return geom.field(u.values() / norm);
}

// sum w |u|^q log u^2, nodes below the floor contribute nothing.
double weighted_entropy(const Eigen::ArrayXd& u, double q, const Eigen::ArrayXd& w) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double a = std::abs(u[i]);
    if (a < kUFloor) continue;
    total += w[i] * std::pow(a, q) * 2.0 * std::log(a);
  }
  return total;
}

std::string hex(std::uint64_t value) {
  char buffer[24];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

template <typename Objective>
ConstantEstimate maximize_over_family(const std::string& id, const Discretization& geom,
                                      const FieldFamily& family, int ascent_steps,
                                      Objective&& objective) {
  if (static_cast<int>(family.fields.size()) < kMinimumBudget)
    throw DomainError("constant estimation needs at least 50 fields");
  ConstantEstimate best;
  best.id = id;
  best.t = geom.time();
  best.family_description = family.description;
  best.family_hash = family.hash;
  best.budget = family.budget;
  best.value = -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd* start = nullptr;
  for (const LabeledField& f : family.fields) {
    const double value = objective(f.values);
    if (value > best.value) {
      best.value = value;
      best.witness = f.id;
      start = &f.values;
    }
  }
  if (ascent_steps > 0 && start != nullptr) {
    const AscentResult ascent =
        local_ascent(*start, objective, geom.kind(), ascent_steps, family.hash);
    if (ascent.objective > best.value) {
      best.value = ascent.objective;
      best.witness += "+ascent";
    }
  }
  return best;
}

}  // namespace

SobolevExponents::SobolevExponents(int n, double q) : n_(n), q_(q) {
  if (n < 2) throw DomainError("Sobolev exponents need n >= 2");
  if (!(q >= 1.0 && q < n)) throw DomainError("Sobolev exponents need 1 <= q < n");
}

double sobolev_quotient(const ScalarField& u, const ScalarField& grad_norm,
                        const SobolevExponents& e, const Discretization& geom) {
  geom.require_compatible(u);
  geom.require_compatible(grad_norm);
  if (!(u.values().cwiseAbs().maxCoeff() > 0.0)) throw DomainError("field is identically zero");
  const double q = e.q();
  const double denominator = lp_norm(grad_norm, q, geom) +
                             std::pow(geom.total_volume(), -1.0 / e.n()) * lp_norm(u, q, geom);
  return lp_norm(u, e.p(), geom) / denominator;
}

double sobolev_quotient(const ScalarField& u, const SobolevExponents& e, const Discretization& geom) {
  return sobolev_quotient(u, gradient_norm_field(u, geom), e, geom);
}

ConstantEstimate estimate_sobolev_constant(const SobolevExponents& e, const Discretization& geom,
                                           const FieldFamily& family, int ascent_steps) {
  char id[48];
  std::snprintf(id, sizeof id, "C_p%g_q%g", e.p(), e.q());
  return maximize_over_family(id, geom, family, ascent_steps, [&](const Eigen::VectorXd& v) {
    return sobolev_quotient(geom.field(v), e, geom);
  });
}

InequalityReport verify_jensen_step(const ScalarField& u, const SobolevExponents& e,
                                    const Discretization& geom, std::string witness) {
  const ScalarField v = normalized(u, e.q(), geom);
  const double lhs = weighted_entropy(v.values().array(), e.q(), geom.weights().array());
  const double rhs = e.entropy_factor() * std::log(lp_norm(v, e.p(), geom));
  InequalityReport r = make_report("jensen_step", lhs, rhs, std::move(witness));
  r.t = geom.time();
  r.q = e.q();
  r.p = e.p();
  return r;
}

LogSobolevCheck verify_log_sobolev_q(const ScalarField& u, const SobolevExponents& e,
                                     const Discretization& geom, double c_lower,
                                     std::string witness) {
  const ScalarField v = normalized(u, e.q(), geom);
  const double grad = lp_norm(gradient_norm_field(v, geom), e.q(), geom);
  const double tail = grad + std::pow(geom.total_volume(), -1.0 / e.n());
  const double factor = 2.0 * e.n() / e.q();
  LogSobolevCheck check;
  check.quotient = sobolev_quotient(v, e, geom);
  const double lhs = weighted_entropy(v.values().array(), e.q(), geom.weights().array());
  check.derivation =
      make_report("log_sobolev_q", lhs, factor * std::log(check.quotient * tail), witness);
  check.constant_form = make_report("log_sobolev_q_constant", lhs,
                                    factor * std::log(c_lower * tail), witness, /*hard=*/false);
  check.constant_exceeded = check.quotient > c_lower;
  for (InequalityReport* r : {&check.derivation, &check.constant_form}) {
    r->t = geom.time();
    r->q = e.q();
    r->p = e.p();
  }
  return check;
}

InequalityReport holder_gradient_check(const ScalarField& u, double mu, const Discretization& geom,
                                       std::string witness) {
  if (!(mu >= 1.0 && mu <= 2.0)) throw DomainError("Hoelder step needs mu in [1, 2]");
  const ScalarField v = normalized(u, 2.0, geom);
  const Eigen::ArrayXd grad = gradient_norm_field(v, geom).values().array();
  const Eigen::ArrayXd w = geom.weights().array();
  const Eigen::ArrayXd grad_v =
      (2.0 / mu) * v.values().array().abs().pow((2.0 - mu) / mu) * grad;
  const double lhs = norm_of(grad_v, mu, w);
  const double rhs = (2.0 / mu) * norm_of(grad, 2.0, w);
  InequalityReport r = make_report("holder_gradient", lhs, rhs, std::move(witness));
  r.t = geom.time();
  r.mu = mu;
  return r;
}

LogSobolevCheck verify_log_sobolev_2(const ScalarField& u, double mu, const Discretization& geom,
                                     double c_lower, std::string witness) {
  const int n = geom.dimension();
  if (!(mu >= 1.0 && mu < 2.0 && mu < n)) throw DomainError("log-Sobolev needs 1 <= mu < min(2, n)");
  const SobolevExponents e(n, mu);
  const ScalarField unit = normalized(u, 2.0, geom);
  const Eigen::ArrayXd x = unit.values().array().abs();
  const Eigen::ArrayXd grad = gradient_norm_field(unit, geom).values().array();
  const ScalarField v = geom.field(x.pow(2.0 / mu).matrix());
  const ScalarField grad_v = geom.field(((2.0 / mu) * x.pow((2.0 - mu) / mu) * grad).matrix());

  const double tail =
      (2.0 / mu) * norm_of(grad, 2.0, geom.weights().array()) +
      std::pow(geom.total_volume(), -1.0 / n);
  LogSobolevCheck check;
  check.quotient = sobolev_quotient(v, grad_v, e, geom);
  const double lhs = entropy(unit, geom);
  check.derivation = make_report("log_sobolev_2", lhs, n * std::log(check.quotient * tail), witness);
  check.constant_form = make_report("log_sobolev_2_constant", lhs, n * std::log(c_lower * tail),
                                    witness, /*hard=*/false);
  check.constant_exceeded = check.quotient > c_lower;
  for (InequalityReport* r : {&check.derivation, &check.constant_form}) {
    r->t = geom.time();
    r->mu = mu;
    r->q = mu;
    r->p = e.p();
  }
  return check;
}

double entropy(const ScalarField& u, const Discretization& geom) {
  geom.require_compatible(u);
  return weighted_entropy(u.values().array(), 2.0, geom.weights().array());
}

namespace {

// (entropy, energy) of the L2-normalised field; energy uses the potential R/4.
std::pair<double, double> entropy_and_energy(const ScalarField& u, const Discretization& geom) {
  const ScalarField v = normalized(u, 2.0, geom);
  const Eigen::ArrayXd grad = gradient_norm_field(v, geom).values().array();
  const Eigen::ArrayXd x = v.values().array();
  const double energy =
      (geom.weights().array() *
       (grad.square() + 0.25 * geom.scalar_curvature().array() * x.square()))
          .sum();
  return {entropy(v, geom), energy};
}

}  // namespace

double uniform_logsob_defect(const ScalarField& u, double sigma, const Discretization& geom) {
  if (!(sigma > 0.0)) throw DomainError("sigma must be > 0");
  const auto [ent, energy] = entropy_and_energy(u, geom);
  return ent - sigma * energy + 0.5 * geom.dimension() * std::log(sigma);
}

UniformLogSobolevEstimate estimate_uniform_constants(const FlowTrace& trace,
                                                     std::span<const double> sigma_grid,
                                                     const FieldFamilySpec& family_spec,
                                                     const HypothesisStatus& hypothesis,
                                                     int grid_n) {
  if (sigma_grid.empty()) throw DomainError("sigma grid is empty");
  for (double s : sigma_grid)
    if (!(s > 0.0)) throw DomainError("sigma grid must be positive");
  UniformLogSobolevEstimate out;
  out.budget = family_spec.budget;
  out.c2 = -std::numeric_limits<double>::infinity();
  for (const FlowSnapshot& snap : trace.snapshots) {
    const Discretization geom = discretize(snap.state, grid_n);
    const FieldFamily family = make_field_family(geom, family_spec);
    if (out.times.empty()) out.family_hash = family.hash;
    const double half_n = 0.5 * geom.dimension();
    double best = -std::numeric_limits<double>::infinity();
    std::string witness;
    for (const LabeledField& f : family.fields) {
      const auto [ent, energy] = entropy_and_energy(geom.field(f.values), geom);
      for (double sigma : sigma_grid) {
        const double d = ent - sigma * energy + half_n * std::log(sigma);
        if (d > best) {
          best = d;
          witness = f.id + "@sigma=" + format_double(sigma);
        }
      }
    }
    out.times.push_back(snap.t);
    out.c2_by_time.push_back(best);
    out.witnesses.push_back(witness);
    out.c2 = std::max(out.c2, best);
  }

  if (out.times.size() >= 2) {
    const double m = static_cast<double>(out.times.size());
    double mt = 0, mc = 0;
    for (std::size_t i = 0; i < out.times.size(); ++i) mt += out.times[i], mc += out.c2_by_time[i];
    mt /= m;
    mc /= m;
    double stt = 0, stc = 0;
    for (std::size_t i = 0; i < out.times.size(); ++i) {
      stt += (out.times[i] - mt) * (out.times[i] - mt);
      stc += (out.times[i] - mt) * (out.c2_by_time[i] - mc);
    }
    if (stt > 0.0) out.c1 = std::max(0.0, stc / stt);
  }

  if (hypothesis.lambda0 > hypothesis.tolerance) {
    out.c3 = out.c2;
  } else {
    out.c3_refusal = "lambda0 = " + format_double(hypothesis.lambda0) + " is not positive";
  }
  return out;
}

namespace {

double uniform_rhs_norm(const ScalarField& u, const SobolevExponents& e, const Discretization& geom,
                        double max_r0_minus) {
  const Eigen::ArrayXd v = (geom.scalar_curvature().array() + 4.0 + max_r0_minus) / 4.0;
  if (v.minCoeff() < 1.0 - 1e-8)
    throw DomainError("uniform Sobolev potential dropped below 1: min R fell below min R(g0)");
  const Eigen::ArrayXd grad = gradient_norm_field(u, geom).values().array();
  const Eigen::ArrayXd x = u.values().array();
  const double q = e.q();
  return std::pow((geom.weights().array() * (grad.square() + v * x.square()).pow(q / 2.0)).sum(),
                  1.0 / q);
}

}  // namespace

InequalityReport verify_uniform_sobolev(const ScalarField& u, const SobolevExponents& e,
                                        const Discretization& geom, double a,
                                        double max_r0_minus, std::string witness) {
  geom.require_compatible(u);
  if (!(e.q() > 1.0)) throw DomainError("uniform Sobolev needs 1 < q < n");
  const double rhs = a * uniform_rhs_norm(u, e, geom, max_r0_minus);
  InequalityReport r = make_report("uniform_sobolev", lp_norm(u, e.p(), geom), rhs,
                                   std::move(witness), /*hard=*/false);
  r.t = geom.time();
  r.q = e.q();
  r.p = e.p();
  return r;
}

double uniform_sobolev_quotient(const ScalarField& u, const SobolevExponents& e,
                                const Discretization& geom, double max_r0_minus) {
  geom.require_compatible(u);
  if (!(u.values().cwiseAbs().maxCoeff() > 0.0)) throw DomainError("field is identically zero");
  return lp_norm(u, e.p(), geom) / uniform_rhs_norm(u, e, geom, max_r0_minus);
}

ConstantEstimate estimate_uniform_sobolev_constant(const SobolevExponents& e,
                                                   const Discretization& geom,
                                                   const FieldFamily& family,
                                                   double max_r0_minus, int ascent_steps) {
  char id[48];
  std::snprintf(id, sizeof id, "A_p%g_q%g", e.p(), e.q());
  return maximize_over_family(id, geom, family, ascent_steps, [&](const Eigen::VectorXd& v) {
    return uniform_sobolev_quotient(geom.field(v), e, geom, max_r0_minus);
  });
}

double max_negative_curvature(const Discretization& geom) {
  return std::max(0.0, -geom.scalar_curvature().minCoeff());
}

void write_constants_csv(std::ostream& out, const std::vector<ConstantEstimate>& estimates) {
  out << "constant_id,t,value,family_hash,budget\n";
  for (const ConstantEstimate& c : estimates)
    out << c.id << ',' << format_double(c.t) << ',' << format_double(c.value) << ','
        << hex(c.family_hash) << ',' << c.budget << '\n';
}

}  // namespace rlab
