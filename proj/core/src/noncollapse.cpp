#include "ricci_lab/noncollapse.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>

#include "ricci_lab/errors.hpp"
#include "ricci_lab/heat_semigroup.hpp"

namespace rlab {

namespace {

constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// Piecewise-linear log scale on breakpoints 0, theta_0, ..., theta_{N-1}, pi, seen from
// the chosen pole; cumulative[k] is the distance to breakpoint k.
struct Profile {
  std::vector<double> breaks;
  std::vector<double> phi;
  std::vector<double> cumulative;
  int n = 2;
  double transverse = 0.0;

  // Integral of e^{phi} over [breaks[k], x] for x inside segment k.
  double partial_length(std::size_t k, double x) const {
    const double len = breaks[k + 1] - breaks[k];
    const double s = x - breaks[k];
    if (len <= 0.0 || s <= 0.0) return 0.0;
    const double delta = (phi[k + 1] - phi[k]) * s / len;
    const double factor = std::abs(delta) < 1e-12 ? 1.0 + 0.5 * delta : std::expm1(delta) / delta;
    return s * std::exp(phi[k]) * factor;
  }

  std::size_t segment(double x) const {
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), x);
    const std::size_t k = it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin()) - 1;
    return std::min(k, breaks.size() - 2);
  }

  double distance(double x) const {
    x = std::clamp(x, 0.0, std::numbers::pi);
    const std::size_t k = segment(x);
    return cumulative[k] + partial_length(k, x);
  }

  double phi_at(double x) const {
    const std::size_t k = segment(x);
    const double len = breaks[k + 1] - breaks[k];
    if (len <= 0.0) return phi[k];
    return phi[k] + (phi[k + 1] - phi[k]) * (x - breaks[k]) / len;
  }

  // |S^{n-1}| int_0^x e^{n phi} sin^{n-1} by 8-point Gauss-Legendre per segment.
  double volume(double x) const {
    double total = 0.0;
    for (std::size_t k = 0; k + 1 < breaks.size() && breaks[k] < x; ++k) {
      const double a = breaks[k];
      const double b = std::min(breaks[k + 1], x);
      if (b <= a) continue;
      const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
      double seg = 0.0;
      for (std::size_t g = 0; g < kGaussNodes.size(); ++g) {
        const double s = mid + half * kGaussNodes[g];
        seg += kGaussWeights[g] * std::exp(n * phi_at(s)) * std::pow(std::sin(s), n - 1);
      }
      total += half * seg;
    }
    return transverse * total;
  }

  double length() const { return cumulative.back(); }
};

Profile make_profile(const Discretization& geom, Pole center) {
  if (geom.kind() != GridKind::kPolar) throw DomainError("pole distances need a polar state");
  const Eigen::Index n = geom.size();
  Profile prof;
  prof.n = geom.dimension();
  prof.transverse = geom.transverse_measure();
  prof.breaks.reserve(n + 2);
  prof.phi.reserve(n + 2);
  const bool south = center == Pole::kSouth;
  auto node = [&](Eigen::Index i) {
    return south ? std::numbers::pi - geom.coordinates()[n - 1 - i] : geom.coordinates()[i];
  };
  auto log_scale = [&](Eigen::Index i) { return geom.log_scale()[south ? n - 1 - i : i]; };
  prof.breaks.push_back(0.0);
  prof.phi.push_back(log_scale(0));
  for (Eigen::Index i = 0; i < n; ++i) {
    prof.breaks.push_back(node(i));
    prof.phi.push_back(log_scale(i));
  }
  prof.breaks.push_back(std::numbers::pi);
  prof.phi.push_back(log_scale(n - 1));
  prof.cumulative.assign(prof.breaks.size(), 0.0);
  for (std::size_t k = 0; k + 1 < prof.breaks.size(); ++k)
    prof.cumulative[k + 1] = prof.cumulative[k] + prof.partial_length(k, prof.breaks[k + 1]);
  return prof;
}

double ball_node_volume(const Discretization& geom, const Eigen::VectorXd& d, double r) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] < r) total += geom.weights()[i];
  return total;
}

}  // namespace

double pole_distance(const Discretization& geom, double theta, Pole center) {
  return make_profile(geom, center).distance(theta);
}

double diameter(const Discretization& geom) { return make_profile(geom, Pole::kNorth).length(); }

Eigen::VectorXd node_distances(const Discretization& geom, Pole center) {
  const Profile prof = make_profile(geom, center);
  const Eigen::Index n = geom.size();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double theta = geom.coordinates()[i];
    d[i] = prof.distance(center == Pole::kSouth ? std::numbers::pi - theta : theta);
  }
  return d;
}

BallRegion geodesic_ball(const Discretization& geom, double r, Pole center) {
  if (!(r >= 0.0)) throw DomainError("ball radius must be >= 0");
  BallRegion ball;
  ball.center = center;
  ball.radius = r;
  if (geom.kind() == GridKind::kPeriodic) {
    const auto& sides = geom.torus_sides();
    const double limit = 0.5 * *std::min_element(sides.begin(), sides.end());
    if (r > limit) throw DomainError("torus balls are supported up to half the shortest side");
    ball.theta_star = r;
    ball.volume = ball_volume(geom.dimension()) * std::pow(r, geom.dimension());
    return ball;
  }
  const Profile prof = make_profile(geom, center);
  const double diam = prof.length();
  if (r > diam * (1.0 + 1e-12)) throw DomainError("ball radius exceeds the diameter");
  if (r >= diam) {
    ball.theta_star = std::numbers::pi;
    ball.whole_manifold = true;
  } else {
    double lo = 0.0, hi = std::numbers::pi;
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      (prof.distance(mid) < r ? lo : hi) = mid;
    }
    ball.theta_star = 0.5 * (lo + hi);
  }
  ball.volume = prof.volume(ball.theta_star);
  return ball;
}

ScalarField cutoff_function(const Discretization& geom, double r1, Pole center) {
  if (!(r1 >= 0.0)) throw DomainError("cutoff radius must be >= 0");
  const Eigen::VectorXd d = node_distances(geom, center);
  return geom.field((r1 - d.array()).max(0.0).matrix());
}

namespace {

void require_kappa_range(int n, double q, double a) {
  if (n < 2 || !(q > 1.0 && q < n)) throw DomainError("kappa needs 1 < q < n");
  if (!(a > 0.0)) throw DomainError("kappa needs A > 0");
}

}  // namespace

double kappa_formula(int n, double q, double a, double rho, double max_r0_minus) {
  require_kappa_range(n, q, a);
  if (!(rho > 0.0)) throw DomainError("kappa needs rho > 0");
  if (!(max_r0_minus >= 0.0)) throw DomainError("max R0_- must be >= 0");
  const double first = std::pow(std::exp2((n + 3.0 * q) / q) * a, -n);
  const double second =
      std::pow(std::sqrt(2.0) * a * std::sqrt(1.0 + (4.0 + max_r0_minus) * rho * rho), -n);
  return std::min(first, second);
}

double fixed_point_kappa(int n, double q, double a) {
  require_kappa_range(n, q, a);
  return std::pow(std::exp2(n / q + 2.5) * a, -n);
}

double volume_recursion(int n, double q, double a, int levels, double start_ratio) {
  require_kappa_range(n, q, a);
  if (levels < 0 || !(start_ratio > 0.0)) throw DomainError("invalid recursion start");
  double r = std::ldexp(1.0, -levels);
  double v = start_ratio * std::pow(r, n);
  const double growth = n * q / (n + q);
  const double carry = n / (n + q);
  for (int k = 0; k < levels; ++k) {
    r *= 2.0;
    v = std::pow(r / (4.0 * std::sqrt(2.0) * a), growth) * std::pow(v, carry);
  }
  return v;
}

VolumeIterationReport volume_iteration_check(const Discretization& rescaled,
                                             const SobolevExponents& e, double a, double r1,
                                             Pole center) {
  if (!(r1 > 0.0 && r1 <= 1.0)) throw DomainError("cutoff radius must lie in (0, 1]");
  VolumeIterationReport out;
  const Eigen::VectorXd d = node_distances(rescaled, center);
  double rmax = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < d.size(); ++i)
    if (d[i] < 1.0) rmax = std::max(rmax, rescaled.scalar_curvature()[i]);
  out.max_curvature = rmax;
  out.admissible = rmax <= 1.0;
  if (!out.admissible) return out;
  out.resolved = (d.array() < 0.5 * r1).count() >= kMinHalfBallNodes;
  if (!out.resolved) return out;

  const int n = e.n();
  const double q = e.q(), p = e.p();
  const ScalarField u = cutoff_function(rescaled, r1, center);
  const double norm_p = lp_norm(u, p, rescaled);
  const double norm_q = lp_norm(u, q, rescaled);
  const double grad_q = lp_norm(gradient_norm_field(u, rescaled), q, rescaled);
  const double vol = ball_node_volume(rescaled, d, r1);
  const double vol_half = ball_node_volume(rescaled, d, 0.5 * r1);
  const std::string witness = "cutoff_r1=" + format_double(r1);

  out.ball_sobolev = make_report("ball_sobolev", norm_p, 2.0 * std::sqrt(2.0) * a * grad_q,
                                 witness, /*hard=*/false);
  out.layer_cake = make_report("layer_cake", 0.5 * r1 * std::pow(vol_half, 1.0 / q), norm_q, witness);
  out.holder = make_report("ball_holder", norm_q, std::pow(vol, 1.0 / n) * norm_p, witness);
  out.volume_growth = make_report(
      "volume_growth",
      std::pow(r1 / (4.0 * std::sqrt(2.0) * a), n * q / (n + q)) * std::pow(vol_half, n / (n + q)),
      vol, witness, /*hard=*/false);
  for (InequalityReport* r : {&out.ball_sobolev, &out.layer_cake, &out.holder, &out.volume_growth}) {
    r->t = rescaled.time();
    r->q = q;
    r->p = p;
  }
  return out;
}

KappaCertificate noncollapse_scan(const FlowTrace& trace, double rho, const SobolevExponents& e,
                                  double a, const HypothesisStatus& hypothesis,
                                  const ScanOptions& options) {
  KappaCertificate cert;
  cert.n = e.n();
  cert.q = e.q();
  cert.p = e.p();
  cert.rho = rho;
  cert.a = a;
  cert.hypothesis = hypothesis;
  if (trace.snapshots.empty()) throw DomainError("trace has no snapshots");
  if (options.radii < 1 || !(options.min_radius_fraction > 0.0 && options.min_radius_fraction <= 1.0))
    throw DomainError("invalid radius grid");

  if (!hypothesis.satisfied) {
    cert.refused = true;
    cert.refusal_reason = "flow horizon is infinite and lambda0 = " +
                          format_double(hypothesis.lambda0) + " is not positive";
    return cert;
  }
  const Discretization initial = discretize(trace.initial(), options.grid_n);
  if (initial.kind() != GridKind::kPolar) {
    cert.refused = true;
    cert.refusal_reason = "ball scans need a rotationally symmetric state";
    return cert;
  }
  cert.max_r0_minus = max_negative_curvature(initial);
  cert.kappa = kappa_formula(e.n(), e.q(), a, rho, cert.max_r0_minus);

  const std::vector<double> radii =
      log_spaced(options.min_radius_fraction * rho, rho, options.radii);
  cert.overall_pass = true;
  for (const FlowSnapshot& snap : trace.snapshots) {
    const Discretization geom = discretize(snap.state, options.grid_n);
    std::vector<Pole> centers{Pole::kNorth};
    if (snap.state.is_conformal()) centers.push_back(Pole::kSouth);
    for (Pole center : centers) {
      const Eigen::VectorXd d = node_distances(geom, center);
      const double diam = diameter(geom);
      for (double r : radii) {
        double rmax = -std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < d.size(); ++i)
          if (d[i] < r) rmax = std::max(rmax, geom.scalar_curvature()[i]);
        if (!(rmax <= 1.0 / (r * r))) {
          ++cert.inadmissible;
          continue;
        }
        ScanRow row;
        row.t = snap.t;
        row.r = r;
        row.center = center;
        row.rmax_ball = rmax;
        row.volume = geodesic_ball(geom, std::min(r, diam), center).volume;
        row.vol_over_rn = row.volume / std::pow(r, e.n());
        row.kappa = cert.kappa;
        row.admissible = true;
        row.pass = row.volume >= cert.kappa * std::pow(r, e.n());
        cert.overall_pass = cert.overall_pass && row.pass;
        cert.rows.push_back(row);
      }
    }
  }
  return cert;
}

void write_certificate_csv(std::ostream& out, const KappaCertificate& certificate) {
  out << "t,r,Rmax_ball,vol,vol_over_rn,kappa,pass\n";
  for (const ScanRow& row : certificate.rows)
    out << format_double(row.t) << ',' << format_double(row.r) << ','
        << format_double(row.rmax_ball) << ',' << format_double(row.volume) << ','
        << format_double(row.vol_over_rn) << ',' << format_double(row.kappa) << ','
        << (row.pass ? "true" : "false") << '\n';
}

void write_certificate_summary(std::ostream& out, const KappaCertificate& c) {
  out << "kappa: " << format_double(c.kappa) << '\n'
      << "A: " << format_double(c.a) << '\n'
      << "q: " << format_double(c.q) << '\n'
      << "p: " << format_double(c.p) << '\n'
      << "rho: " << format_double(c.rho) << '\n'
      << "n: " << c.n << '\n'
      << "max_R0_minus: " << format_double(c.max_r0_minus) << '\n'
      << "hypothesis: " << (c.hypothesis.satisfied ? "satisfied" : "refused")
      << " (horizon_finite=" << (c.hypothesis.horizon_finite ? "true" : "false")
      << ", lambda0=" << format_double(c.hypothesis.lambda0) << ")\n";
  if (c.refused) out << "refusal: " << c.refusal_reason << '\n';
  out << "admissible_cells: " << c.rows.size() << '\n'
      << "inadmissible_cells: " << c.inadmissible << '\n'
      << "certificate: empirical (A is a measured constant times a safety factor)\n"
      << "overall_pass: " << (c.overall_pass ? "true" : "false") << '\n';
}

}  // namespace rlab
