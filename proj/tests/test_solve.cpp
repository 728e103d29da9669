#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "fracmix/errors.hpp"
#include "fracmix/solve.hpp"

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

OperatorSet make_ops(double s, int n) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(standard(s), n, n / 2));
  return assemble_stiffness(mesh, KernelParams::make(s));
}

}  // namespace

TEST(Elliptic, ResidualAndModes) {
  const OperatorSet ops = make_ops(0.5, 32);
  const LoadVector F = assemble_load(*ops.mesh, [](double x) { return 1.0 + x * x; });
  const Field u = solve_elliptic(BoundaryMode::Mixed, ops, F);
  EXPECT_LT((ops.A * u.coeffs() - F.values).norm(), 1e-10 * F.values.norm());
  const Field d = solve_elliptic(BoundaryMode::Dirichlet, ops, F);
  for (auto e : ops.mesh->exterior_dofs()) EXPECT_EQ(d.coeffs()(static_cast<long>(e)), 0.0);
  EXPECT_EQ(mode_dofs(*ops.mesh, BoundaryMode::Dirichlet).size(), ops.mesh->dirichlet_dofs().size());
  EXPECT_EQ(mode_dofs(*ops.mesh, BoundaryMode::Mixed).size(), ops.mesh->n_active());
}

TEST(Elliptic, DirichletTorsionMatchesBubbleProfile) {
  // (-Delta)^s (1-x^2)_+^s = Gamma(1+2s), so the torsion function is (1-x^2)^s / Gamma(1+2s).
  for (double s : {0.25, 0.5, 0.75}) {
    const OperatorSet ops = make_ops(s, 128);
    const Field u = solve_elliptic(BoundaryMode::Dirichlet, ops, assemble_load(*ops.mesh, [](double) { return 1.0; }));
    const double K = 1.0 / std::tgamma(1 + 2 * s);
    double err = 0.0, ref = 0.0;
    for (auto d : ops.mesh->dirichlet_dofs()) {
      const double x = ops.mesh->x(ops.mesh->active_nodes()[d]);
      const double e = K * std::pow(1 - x * x, s);
      err += (u.coeffs()(static_cast<long>(d)) - e) * (u.coeffs()(static_cast<long>(d)) - e);
      ref += e * e;
    }
    EXPECT_LT(std::sqrt(err / ref), 0.05) << s;
  }
}

TEST(Elliptic, MixedSolutionIsPositiveAndDominatesDirichlet) {
  const OperatorSet ops = make_ops(0.25, 64);
  const LoadVector F = assemble_load(*ops.mesh, [](double x) { return std::exp(-10 * x * x); });
  const Field um = solve_elliptic(BoundaryMode::Mixed, ops, F);
  const Field ud = solve_elliptic(BoundaryMode::Dirichlet, ops, F);
  EXPECT_GT(um.coeffs().minCoeff(), 0.0);
  EXPECT_GE((um.coeffs() - ud.coeffs()).minCoeff(), -1e-12);
}

TEST(Eigen, MixedBelowDirichletAndNormalized) {
  const OperatorSet ops = make_ops(0.5, 64);
  const EigenPair m = solve_eigen(BoundaryMode::Mixed, ops);
  const EigenPair d = solve_eigen(BoundaryMode::Dirichlet, ops);
  EXPECT_GT(m.lambda1, 0.0);
  EXPECT_LT(m.lambda1, d.lambda1);
  EXPECT_LT(m.residual, 1e-10);
  EXPECT_LT(d.residual, 1e-10);
  const Eigen::VectorXd& c = m.chi.coeffs();
  EXPECT_NEAR(c.dot(ops.M_omega * c), 1.0, 1e-12);
  EXPECT_GE(c.minCoeff(), 0.0);
  EXPECT_NEAR(c.dot(ops.A * c), m.lambda1, 1e-10 * m.lambda1);
  // dense generalized eigenproblem on the mixed space as an independent check
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges;
  const auto I = ops.mesh->omega_dofs();
  const auto E = ops.mesh->exterior_dofs();
  const long ni = static_cast<long>(I.size()), ne = static_cast<long>(E.size());
  Eigen::MatrixXd Aii(ni, ni), Aie(ni, ne), Aee(ne, ne), Mii(ni, ni);
  for (long p = 0; p < ni; ++p) {
    for (long q = 0; q < ni; ++q) Aii(p, q) = ops.A(I[p], I[q]), Mii(p, q) = ops.M_omega(I[p], I[q]);
    for (long q = 0; q < ne; ++q) Aie(p, q) = ops.A(I[p], E[q]);
  }
  for (long p = 0; p < ne; ++p)
    for (long q = 0; q < ne; ++q) Aee(p, q) = ops.A(E[p], E[q]);
  const Eigen::MatrixXd S = Aii - Aie * Aee.llt().solve(Aie.transpose());
  ges.compute(S, Mii);
  EXPECT_NEAR(ges.eigenvalues()(0), m.lambda1, 1e-9 * m.lambda1);
}

TEST(Parabolic, EigenfunctionDecaysExactlyUnderTrapezoidal) {
  const OperatorSet ops = make_ops(0.5, 64);
  const EigenPair e = solve_eigen(BoundaryMode::Mixed, ops);
  StepperSpec cn{Scheme::Trapezoidal, MassKind::Consistent};
  int halvings = -1;
  const double dt = calibrate_dt(ops, e, cn, 6, &halvings);
  EXPECT_LE(dt, 0.1 / e.lambda1);
  EXPECT_GE(halvings, 0);
  const Trajectory tr = solve_parabolic(ops, e.chi, 1.0 / e.lambda1, dt, cn);
  const double g = std::exp(e.lambda1 * tr.times.back());
  for (auto d : ops.mesh->dirichlet_dofs())
    EXPECT_NEAR(tr.states.back().coeffs()(static_cast<long>(d)) * g / e.chi.coeffs()(static_cast<long>(d)), 1.0, 0.01);
}

TEST(Parabolic, LumpedEulerKeepsPositivityAndDecays) {
  const OperatorSet ops = make_ops(0.25, 64);
  const Field u0(ops.mesh, Eigen::VectorXd::Zero(static_cast<long>(ops.mesh->n_active())));
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<long>(ops.mesh->n_active()));
  for (auto d : ops.mesh->omega_dofs()) {
    const double x = ops.mesh->x(ops.mesh->active_nodes()[d]);
    c(static_cast<long>(d)) = std::abs(x - 0.3) < 0.1 ? 1.0 : 0.0;
  }
  const Trajectory tr = solve_parabolic(ops, Field(ops.mesh, c), 1.0, 0.01);
  ASSERT_EQ(tr.states.size(), 101u);
  for (const auto& st : tr.states) EXPECT_GE(st.coeffs().minCoeff(), 0.0);
  for (std::size_t n = 1; n < tr.l2.size(); ++n) EXPECT_LT(tr.l2[n], tr.l2[n - 1]);
  EXPECT_GT(tr.states[1].coeffs().minCoeff(), 0.0);  // positivity spreads in one step
}

TEST(Parabolic, StoreEveryKeepsLastState) {
  const OperatorSet ops = make_ops(0.5, 16);
  const Field u0 = interpolate(ops.mesh, [](double x) { return std::abs(x) < 1 ? 1 - x * x : 0.0; });
  const Trajectory tr = solve_parabolic(ops, u0, 1.0, 0.1, {}, 4);
  ASSERT_FALSE(tr.times.empty());
  EXPECT_NEAR(tr.times.back(), 1.0, 1e-12);
  EXPECT_THROW(solve_parabolic(ops, u0, 1.0, -0.1), StepError);
}

TEST(Parabolic, HarmonicExtensionZeroesExteriorRows) {
  const OperatorSet ops = make_ops(0.5, 32);
  const Field u0 = interpolate(ops.mesh, [](double x) { return std::abs(x) < 1 ? 1 - x * x : 0.0; });
  const Field ext = harmonic_extension(ops, u0);
  const Eigen::VectorXd r = ops.A * ext.coeffs();
  for (auto e : ops.mesh->exterior_dofs()) EXPECT_NEAR(r(static_cast<long>(e)), 0.0, 1e-12);
  for (auto d : ops.mesh->omega_dofs()) EXPECT_EQ(ext.coeffs()(static_cast<long>(d)), u0.coeffs()(static_cast<long>(d)));
}
