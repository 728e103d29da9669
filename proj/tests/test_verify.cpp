#include <gtest/gtest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <memory>

#include "fracmix/errors.hpp"
#include "fracmix/verify.hpp"

using namespace fracmix;

namespace {

DomainPartition standard(double s) {
  DomainPartition p;
  p.omega = {{-1, 1}};
  p.sigma2 = {{1, 2}};
  p.sigma1 = {{-kInf, -1}, {2, kInf}};
  p.s = s;
  return p;
}

struct Bench {
  std::shared_ptr<const Mesh> mesh;
  OperatorSet ops;
  Gauges g;
};

Bench make(double s, int n) {
  Bench st;
  st.mesh = std::make_shared<const Mesh>(build_mesh(standard(s), n, n / 2));
  st.ops = assemble_stiffness(st.mesh, KernelParams::make(s));
  st.g = Gauges::compute(st.ops);
  return st;
}

double ts(const std::function<double(double)>& f, double a, double b) {
  static boost::math::quadrature::tanh_sinh<double> q;
  return q.integrate(f, a, b, 1e-12);
}

}  // namespace

TEST(Families, MembersAreAdmissible) {
  const auto p = standard(0.5);
  for (auto kind : {FamilyKind::RandomBumps, FamilyKind::IndicatorMollifications, FamilyKind::Constant}) {
    const FunctionFamily f = make_family(kind, 5, 3, p);
    EXPECT_EQ(f.members.size(), 5u);
    EXPECT_NO_THROW(check_family(f, p));
    for (const auto& m : f.members) EXPECT_EQ(m(1.5), 0.0);
  }
  const FunctionFamily a = make_family(FamilyKind::RandomBumps, 3, 9, p);
  const FunctionFamily b = make_family(FamilyKind::RandomBumps, 3, 9, p);
  for (double x : {-0.7, 0.1, 0.55}) EXPECT_EQ(a.members[1](x), b.members[1](x));
  EXPECT_EQ(family_kind_from_string("random_bumps"), FamilyKind::RandomBumps);
  EXPECT_THROW(family_kind_from_string("nope"), ConfigError);
}

TEST(HardyIntegral, MatchesDirectQuadrature) {
  for (double s : {0.25, 0.5, 0.75}) {
    const Mesh m = build_mesh(standard(s), 16, 8, Grading::geometric(0.8));
    const Eigen::VectorXd phi = interpolate_on(m, [](double x) { return std::cos(x) - std::cos(1.0); }, m.dirichlet_dofs());
    double direct = 0.0;
    for (const auto& el : m.elements()) {
      if (el.region != Region::Omega) continue;
      const double xl = m.x(el.left), xr = m.x(el.right);
      const double pl = m.dof(el.left) >= 0 ? phi(m.dof(el.left)) : 0.0, pr = m.dof(el.right) >= 0 ? phi(m.dof(el.right)) : 0.0;
      auto f = [&](double x) {
        const double v = pl + (pr - pl) * (x - xl) / (xr - xl);
        return v * v * std::pow(1.0 - std::abs(x), -2 * s);
      };
      if (xl < 0 && xr > 0) direct += ts(f, xl, 0.0) + ts(f, 0.0, xr);
      else direct += ts(f, xl, xr);
    }
    EXPECT_NEAR(hardy_weighted_integral(m, phi), direct, 1e-10 * direct) << s;
  }
}

TEST(DeltaMoment, ConstantSource) {
  for (double s : {0.25, 0.5}) EXPECT_NEAR(delta_moment(standard(s), [](double) { return 1.0; }), 2.0 / (1 + s), 1e-12);
}

TEST(Certificates, EllipticHopfConstantSourceIdentity) {
  const Bench st = make(0.5, 32);
  const FunctionFamily f = make_family(FamilyKind::RandomBumps, 5, 1, st.mesh->partition());
  const Certificate c = certify_elliptic_hopf(st.ops, st.g, f);
  EXPECT_TRUE(c.pass);
  EXPECT_GT(c.constant("c_emp_min"), 0.0);
  EXPECT_NEAR(c.constant("c_emp_constant_source"), c.constant("inverse_integral_xi0"), 1e-10);
  EXPECT_LT(c.constant("scaling_defect"), 1e-10);
  EXPECT_EQ(c.digest, fnv1a(c.inputs));
  const Certificate again = certify_elliptic_hopf(st.ops, st.g, f);
  EXPECT_EQ(again.constant("c_emp_min"), c.constant("c_emp_min"));
}

TEST(Certificates, PoincareAndEigenComparison) {
  const Bench st = make(0.25, 32);
  const FunctionFamily f = make_family(FamilyKind::RandomBumps, 5, 2, st.mesh->partition());
  const Certificate p = certify_poincare(st.ops, st.g, f);
  EXPECT_TRUE(p.pass);
  EXPECT_GE(p.constant("min_sample_quotient"), p.constant("lambda1"));
  EXPECT_LT(p.constant("eigenfunction_quotient_gap"), 1e-8);
  const Certificate e = certify_eigen_comparison(st.ops, st.g);
  EXPECT_TRUE(e.pass);
  EXPECT_GE(e.constant("product"), 1.0);
  EXPECT_GT(e.constant("C_up"), 0.0);
}

TEST(Certificates, HardyAndSobolevAreScaleInvariant) {
  const Bench st = make(0.4, 32);
  const FunctionFamily f = make_family(FamilyKind::RandomBumps, 4, 3, st.mesh->partition());
  const Certificate h = certify_hardy(st.ops, f);
  EXPECT_TRUE(h.pass);
  EXPECT_LT(h.constant("homogeneity_defect"), 1e-12);
  const Certificate w = certify_weighted_sobolev(st.ops, st.g.xi0, f, 1.0);
  EXPECT_TRUE(w.pass);
  EXPECT_NEAR(w.constant("q"), 2.8, 1e-15);
  EXPECT_NO_THROW(certify_weighted_sobolev(st.ops, st.g.xi0, f, 10.0));  // 2/(1-0.8)
  EXPECT_THROW(certify_weighted_sobolev(st.ops, st.g.xi0, f, 10.5), DomainError);
}

TEST(Certificates, HardyFiniteOnGradedMesh) {
  // geometric grading leaves element ends where interpolation does not round to the nodal value
  const double s = 0.5;
  auto mesh = std::make_shared<const Mesh>(build_mesh(standard(s), 32, 16, Grading::geometric(0.85, 6)));
  const OperatorSet ops = assemble_stiffness(mesh, KernelParams::make(s));
  const FunctionFamily f = make_family(FamilyKind::IndicatorMollifications, 20, 7, mesh->partition());
  const Certificate h = certify_hardy(ops, f);
  EXPECT_TRUE(h.pass);
  EXPECT_TRUE(std::isfinite(h.constant("hardy_sup")));
}

TEST(Certificates, SobolevRangeChecks) {
  const Bench st = make(0.25, 16);
  const FunctionFamily f = make_family(FamilyKind::RandomBumps, 2, 3, st.mesh->partition());
  EXPECT_THROW(certify_weighted_sobolev(st.ops, st.g.xi0, f, 4.5), DomainError);  // 2/(1-0.5) = 4
  EXPECT_THROW(certify_weighted_sobolev(st.ops, st.g.xi0, f, -1.0), DomainError);
  EXPECT_NO_THROW(certify_weighted_sobolev(st.ops, st.g.xi0, f, 0.0));
  EXPECT_THROW(certify_linfty_ratio(st.ops, st.g, f, 3.0), DomainError);  // needs p > 4
}

TEST(Certificates, LinftyRatioSelfConsistency) {
  const Bench st = make(0.5, 32);
  const FunctionFamily f = make_family(FamilyKind::RandomBumps, 4, 5, st.mesh->partition());
  const Certificate c = certify_linfty_ratio(st.ops, st.g, f, 4.0);
  EXPECT_TRUE(c.pass);
  EXPECT_LT(c.constant("self_ratio_defect"), 1e-8);
}

TEST(Certificates, ComparisonAndDeltaBounds) {
  const Bench st = make(0.25, 32);
  const FunctionFamily f = make_family(FamilyKind::RandomBumps, 5, 4, st.mesh->partition());
  EXPECT_TRUE(certify_comparison(st.ops, f).pass);
  const Certificate e = certify_delta_lower_bounds(st.ops, st.g, f, BoundMode::Elliptic);
  EXPECT_TRUE(e.pass);
  EXPECT_LT(e.constant("scaling_defect"), 1e-10);
  ParabolicSetup ps;
  ps.dt_factor = 0.1;
  EXPECT_TRUE(certify_delta_lower_bounds(st.ops, st.g, f, BoundMode::Parabolic, ps).pass);
  EXPECT_TRUE(certify_dirichlet_delta(st.ops).pass);
}

TEST(Certificates, ParabolicHopfAndPositivity) {
  const Bench st = make(0.5, 32);
  const FunctionFamily f = make_family(FamilyKind::RandomBumps, 3, 6, st.mesh->partition());
  ParabolicSetup ps;
  const Certificate c = certify_parabolic_hopf(st.ops, st.g, f, ps);
  EXPECT_TRUE(c.pass);
  EXPECT_LT(c.constant("eigen_start_identity_defect"), 1e-9);
  EXPECT_TRUE(certify_parabolic_positivity(st.ops, st.g, f, ps).pass);
}

TEST(Certificates, ThetaForEigenfunctionStart) {
  const Bench st = make(0.5, 32);
  const double dt = 0.05 / st.g.chi.lambda1;
  const Trajectory v = solve_parabolic(st.ops, st.g.chi.chi, 1.0 / st.g.chi.lambda1, dt);
  const Certificate c = monitor_theta(st.ops, v, v, {1, 2});
  EXPECT_TRUE(c.pass);
  EXPECT_LT(c.constant("theta2_final"), c.constant("theta2_initial"));
  const Field zero(st.mesh, Eigen::VectorXd::Zero(static_cast<long>(st.mesh->n_active())));
  const Trajectory z = solve_parabolic(st.ops, zero, 1.0 / st.g.chi.lambda1, dt);
  EXPECT_THROW(monitor_theta(st.ops, z, v, {1}), RatioError);
}

TEST(Certificates, RefinementDrift) {
  Certificate a, b;
  a.name = b.name = "x";
  a.pass = b.pass = true;
  a.set("k", 1.0);
  b.set("k", 1.1);
  const Certificate r = refine_stable({a, b}, "k", 0.25);
  EXPECT_TRUE(r.pass);
  EXPECT_NEAR(r.constant("drift"), 0.1 / 1.1, 1e-15);
  EXPECT_FALSE(refine_stable({a, b}, "k", 0.05).pass);
  EXPECT_THROW(refine_stable({a}, "k", 0.1), ConfigError);
}

TEST(Green, IdentityHoldsForSmoothPair) {
  const double s = 0.5;
  const auto p = standard(s);
  FunctionView u, phi;
  u.value = [](double x) { return x > -1 && x < 2 ? (x + 1) * (x + 1) * (2 - x) * (2 - x) : 0.0; };
  phi.value = [](double x) { return x > -1 && x < 2 ? (x + 1) * (x + 1) * (2 - x) * (2 - x) * (1 + 0.3 * x) : 0.0; };
  u.breakpoints = phi.breakpoints = {-1.0, 2.0};
  const GreenCheck g = green_identity(KernelParams::make(s), p, u, phi);
  EXPECT_LT(g.rel_error, 1e-6) << g.form << " " << g.interior << " " << g.exterior;
}
