#include <cmath>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>

#include "ricci_lab/discrete_calculus.hpp"
#include "ricci_lab/errors.hpp"
#include "ricci_lab/field_family.hpp"
#include "ricci_lab/inequality_lab.hpp"
#include "ricci_lab/manifold_models.hpp"
#include "ricci_lab/noncollapse.hpp"
#include "ricci_lab/ricci_flow.hpp"

namespace rlab {
namespace {

constexpr double kPi = std::numbers::pi;

double cap_area(double r0, double r) { return 2 * kPi * r0 * r0 * (1 - std::cos(r / r0)); }

TEST(GeodesicBallTest, WholeSphereAndHemisphere) {
  const Discretization g = discretize(make_round_sphere(2, 1.0));
  const BallRegion whole = geodesic_ball(g, kPi);
  EXPECT_NEAR(whole.theta_star, kPi, 1e-12);
  EXPECT_NEAR(whole.volume, 4 * kPi, 1e-10);
  EXPECT_TRUE(whole.whole_manifold);
  EXPECT_NEAR(geodesic_ball(g, kPi / 2).volume, 2 * kPi, 1e-10);
  EXPECT_NEAR(diameter(g), kPi, 1e-12);
}

TEST(GeodesicBallTest, CapClosedForm) {
  for (double r0 : {0.5, 1.0, 2.0}) {
    const Discretization g = discretize(make_round_sphere(2, r0));
    for (double frac : {0.01, 0.1, 0.3, 0.7, 0.95}) {
      const double r = frac * kPi * r0;
      const double exact = cap_area(r0, r);
      EXPECT_NEAR(geodesic_ball(g, r).volume, exact, 1e-4 * exact) << r0 << " " << frac;
      EXPECT_NEAR(geodesic_ball(g, r, Pole::kSouth).volume, exact, 1e-4 * exact);
    }
  }
}

TEST(GeodesicBallTest, ConformalRoundMatchesRoundSphere) {
  const Discretization g = discretize(make_conformal_s2("round", 128, 1.5));
  for (double r : {0.2, 1.0, 3.0}) {
    const double exact = cap_area(1.5, r);
    EXPECT_NEAR(geodesic_ball(g, r).volume, exact, 1e-4 * exact);
  }
}

TEST(GeodesicBallTest, Scaling) {
  for (const MetricState& s : {make_round_sphere(2, 1.0), make_round_sphere(3, 1.0),
                               make_conformal_s2("bumped", 128, 1.0, {0.3, 0.6})}) {
    const double c = 2.7;
    const Discretization g = discretize(s);
    const Discretization big = discretize(rescale_metric(s, c));
    const int n = g.dimension();
    for (double r : {0.3, 1.1}) {
      const double v = geodesic_ball(g, r).volume;
      EXPECT_NEAR(geodesic_ball(big, std::sqrt(c) * r).volume, std::pow(c, n / 2.0) * v,
                  1e-10 * std::pow(c, n / 2.0) * v);
    }
  }
}

TEST(GeodesicBallTest, BeyondDiameterThrows) {
  const Discretization g = discretize(make_round_sphere(2, 1.0));
  EXPECT_THROW(geodesic_ball(g, 3.5), DomainError);
  const Discretization bumped = discretize(make_conformal_s2("bumped", 128, 1.0, {0.3, 0.6}));
  EXPECT_THROW(geodesic_ball(bumped, 1.01 * diameter(bumped)), DomainError);
  EXPECT_TRUE(geodesic_ball(bumped, diameter(bumped)).whole_manifold);
}

TEST(GeodesicBallTest, DistanceStrictlyIncreasing) {
  const Discretization g = discretize(make_conformal_s2("bumped", 128, 1.0, {0.3, 0.6}));
  const Eigen::VectorXd d = node_distances(g);
  for (int i = 1; i < d.size(); ++i) EXPECT_GT(d[i], d[i - 1]);
}

TEST(GeodesicBallTest, SmallBallRatio) {
  for (const MetricState& s : {make_round_sphere(2, 1.0), make_conformal_s2("bumped", 128, 1.0, {0.3, 0.6})}) {
    const Discretization g = discretize(s);
    const double r = 0.05 * diameter(g);
    EXPECT_NEAR(geodesic_ball(g, r).volume / (r * r), kPi, 0.02 * kPi);
  }
}

TEST(CutoffTest, ZeroRadius) {
  const Discretization g = discretize(make_round_sphere(2, 1.0));
  EXPECT_EQ(cutoff_function(g, 0.0).values().cwiseAbs().maxCoeff(), 0.0);
}

TEST(CutoffTest, HalfBallBoundAndIntegral) {
  const Discretization g = discretize(make_round_sphere(2, 1.0), 512);
  const ScalarField u = cutoff_function(g, 1.0);
  const Eigen::VectorXd d = node_distances(g);
  for (int i = 0; i < g.size(); ++i) {
    if (d[i] < 0.5) {
      EXPECT_GE(u[i], 0.5);
    }
    if (d[i] >= 1.0) {
      EXPECT_EQ(u[i], 0.0);
    }
  }
  // 2 pi int_0^1 (1 - theta) sin theta = 2 pi (1 - sin 1).
  EXPECT_NEAR(g.weights().dot(u.values()), 2 * kPi * (1 - std::sin(1.0)), 1e-4);
}

TEST(CutoffTest, UnitGradientOnRoundStates) {
  for (const MetricState& s : {make_round_sphere(2, 1.0), make_round_sphere(2, 3.0),
                               make_conformal_s2("round", 256, 0.7)}) {
    const Discretization g = discretize(s, 256);
    const ScalarField u = cutoff_function(g, 0.5);
    const ScalarField grad = gradient_norm_field(u, g);
    for (int i = 1; i + 1 < g.size(); ++i)
      if (u[i - 1] > 0 && u[i] > 0 && u[i + 1] > 0) EXPECT_LE(grad[i], 1 + 1e-8) << i;
  }
}

TEST(KappaTest, HandEvaluatedExample) {
  const double expected = std::pow(2.0, -26.0 / 3.0);
  EXPECT_NEAR(kappa_formula(2, 1.5, 1.0, 1.0, 0.0), expected, 1e-12 * expected);
  EXPECT_NEAR(expected, 2.46e-3, 1e-5);
  EXPECT_THROW(kappa_formula(2, 2.0, 1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(kappa_formula(2, 1.0, 1.0, 1.0, 0.0), DomainError);
}

TEST(KappaTest, MonotoneInAAndSmallRho) {
  double prev = kappa_formula(3, 1.5, 0.1, 1.0, 0.5);
  for (double a = 0.2; a < 1e4; a *= 2) {
    const double k = kappa_formula(3, 1.5, a, 1.0, 0.5);
    EXPECT_LT(k, prev);
    prev = k;
  }
  EXPECT_LT(prev, 1e-15);
  // rho -> 0: second branch tends to (sqrt2 A)^{-n}.
  for (double a : {0.01, 0.1, 1.0}) {
    const double first = std::pow(std::pow(2.0, (2 + 3 * 1.5) / 1.5) * a, -2.0);
    const double second = std::pow(std::sqrt(2.0) * a, -2.0);
    const double k = kappa_formula(2, 1.5, a, 1e-9, 0.0);
    EXPECT_NEAR(k, std::min(first, second), 1e-8 * k);
  }
}

TEST(KappaTest, BelowFixedPointOnGrid) {
  for (int n : {2, 3, 4})
    for (double q = 1.0 + 0.125; q < n; q += 0.125)
      for (double a : {0.5, 1.0, 5.0})
        EXPECT_LE(kappa_formula(n, q, a, 1.0, 0.0), fixed_point_kappa(n, q, a)) << n << q << a;
}

TEST(FixedPointTest, SelfConsistentSolution) {
  // beta^{q/(n+q)} = (4 sqrt2 A)^{-nq/(n+q)} 2^{-n^2/(n+q)}.
  for (int n : {2, 3, 4})
    for (double q : {1.25, 1.5}) {
      const double a = 0.8;
      const double lhs = std::pow(fixed_point_kappa(n, q, a), q / (n + q));
      const double rhs = std::pow(4 * std::sqrt(2.0) * a, -n * q / (n + q)) *
                         std::pow(2.0, -double(n * n) / (n + q));
      EXPECT_NEAR(lhs, rhs, 1e-12 * rhs);
    }
  EXPECT_NEAR(fixed_point_kappa(2, 1.5, 1.0), std::pow(2.0, -23.0 / 3.0), 1e-15);
}

TEST(FixedPointTest, RecursionConvergence) {
  // With x_k = v(r_k) / (beta r_k^n) the recursion reads x_{k+1} = x_k^{n/(n+q)}, so
  // v(1) = beta (start / beta)^{(n/(n+q))^L}.
  const int n = 2;
  const double q = 1.5, a = 1.0;
  const double start = kPi * (1 - 1e-3);
  const double beta = fixed_point_kappa(n, q, a);
  for (int levels : {1, 5, 10, 30}) {
    const double oracle = beta * std::pow(start / beta, std::pow(n / (n + q), levels));
    EXPECT_NEAR(volume_recursion(n, q, a, levels, start), oracle, 1e-10 * oracle);
  }
  EXPECT_NEAR(volume_recursion(n, q, a, 10, start) / beta, 1.0237, 1e-3);
  EXPECT_NEAR(volume_recursion(n, q, a, 30, start) / beta, 1.0, 1e-2);
}

TEST(VolumeIterationTest, RescaledSpherePositiveMargins) {
  const SobolevExponents e(2, 1.5);
  for (double c : {2.0, 4.0}) {
    const Discretization g = discretize(rescale_metric(make_round_sphere(2, 1.0), c));
    const double a = estimate_uniform_sobolev_constant(e, g, make_field_family(g, {200, 1}), 0.0).value;
    const VolumeIterationReport r = volume_iteration_check(g, e, 1.1 * a, 0.5);
    ASSERT_TRUE(r.admissible);
    EXPECT_LE(r.max_curvature, 1.0 + 1e-12);
    EXPECT_GT(r.layer_cake.margin, 0.0);
    EXPECT_GT(r.holder.margin, 0.0);
    EXPECT_GT(r.ball_sobolev.margin, 0.0);
    EXPECT_GT(r.volume_growth.margin, 0.0);
  }
}

TEST(VolumeIterationTest, InadmissibleWhenCurvatureTooLarge) {
  const Discretization g = discretize(make_round_sphere(2, 1.0));
  const VolumeIterationReport r = volume_iteration_check(g, SobolevExponents(2, 1.5), 1.0, 0.5);
  EXPECT_FALSE(r.admissible);
  EXPECT_NEAR(r.max_curvature, 2.0, 1e-12);
}

TEST(VolumeIterationTest, HolderNeverFails) {
  const Discretization g = discretize(make_conformal_s2("bumped", 128, 3.0, {0.3, 0.2}));
  for (double r1 : {0.1, 0.3, 0.6, 1.0}) {
    const VolumeIterationReport r = volume_iteration_check(g, SobolevExponents(2, 1.25), 1.0, r1);
    if (r.admissible) EXPECT_GE(r.holder.margin, -1e-10);
  }
}

class ScanTest : public ::testing::Test {
 protected:
  static double sphere_a() {
    const MetricState s = make_round_sphere(2, 1.0);
    const Discretization g = discretize(s);
    return 1.1 * estimate_uniform_sobolev_constant(SobolevExponents(2, 1.5), g,
                                                   make_field_family(g, {200, 1}), 0.0)
                     .value;
  }
};

TEST_F(ScanTest, UnitSpherePasses) {
  const MetricState s = make_round_sphere(2, 1.0);
  FlowOptions options;
  options.snapshots = 4;
  const FlowTrace trace = run_flow(s, 0.45, 1e-3, options);
  const double a = sphere_a();
  const KappaCertificate c = noncollapse_scan(trace, 1.0, SobolevExponents(2, 1.5), a,
                                              hypothesis_status(s, s.extinction_time()));
  EXPECT_FALSE(c.refused);
  EXPECT_TRUE(c.overall_pass);
  EXPECT_NEAR(c.kappa, kappa_formula(2, 1.5, a, 1.0, 0.0), 1e-15);
  EXPECT_GT(c.inadmissible, 0);
  ASSERT_FALSE(c.rows.empty());
  for (const ScanRow& row : c.rows) {
    EXPECT_LE(row.rmax_ball, 1.0 / (row.r * row.r));
    EXPECT_GE(row.volume, c.kappa * row.r * row.r);
    const double r0 = std::sqrt(1.0 - 2.0 * row.t);
    EXPECT_NEAR(row.volume, cap_area(r0, row.r), 1e-4 * row.volume);
  }
  const KappaCertificate again = noncollapse_scan(trace, 1.0, SobolevExponents(2, 1.5), a,
                                                  hypothesis_status(s, s.extinction_time()));
  std::ostringstream x, y;
  write_certificate_csv(x, c);
  write_certificate_csv(y, again);
  EXPECT_EQ(x.str(), y.str());
  EXPECT_EQ(x.str().substr(0, x.str().find('\n')), "t,r,Rmax_ball,vol,vol_over_rn,kappa,pass");
}

TEST_F(ScanTest, SummaryKeys) {
  const MetricState s = make_round_sphere(2, 1.0);
  FlowOptions options;
  options.snapshots = 2;
  const KappaCertificate c =
      noncollapse_scan(run_flow(s, 0.1, 1e-3, options), 1.0, SobolevExponents(2, 1.5), 0.5,
                       hypothesis_status(s, s.extinction_time()));
  std::ostringstream out;
  write_certificate_summary(out, c);
  for (const char* key : {"kappa:", "A:", "q:", "p:", "rho:", "hypothesis:", "overall_pass:"})
    EXPECT_NE(("\n" + out.str()).find(std::string("\n") + key), std::string::npos) << key;
}

TEST_F(ScanTest, TorusRefused) {
  const MetricState torus = make_flat_torus({2 * kPi, 2 * kPi});
  FlowOptions options;
  options.snapshots = 2;
  const KappaCertificate c =
      noncollapse_scan(run_flow(torus, 0.1, 0.05, options), 1.0, SobolevExponents(2, 1.5), 1.0,
                       hypothesis_status(torus, kInfiniteHorizon));
  EXPECT_TRUE(c.refused);
  EXPECT_FALSE(c.overall_pass);
  EXPECT_FALSE(c.hypothesis.satisfied);
  EXPECT_TRUE(c.rows.empty());
}

TEST(ScalingCoherenceTest, VolumeRatioMatchesRescaledUnitBall) {
  for (const MetricState& s : {make_round_sphere(2, 1.0), make_conformal_s2("bumped", 128, 1.0, {0.3, 0.6})}) {
    const Discretization g = discretize(s);
    for (double r : {0.1, 0.4, 0.9}) {
      const Discretization bar = discretize(rescale_metric(s, 1.0 / (r * r)));
      const double direct = geodesic_ball(g, r).volume / (r * r);
      EXPECT_NEAR(geodesic_ball(bar, 1.0).volume, direct, 1e-10 * direct);
    }
  }
}

}  // namespace
}  // namespace rlab
