#include <gtest/gtest.h>

#include <cmath>
#include <memory>

#include "fracmix/solve.hpp"
#include "fracmix/walker.hpp"

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

DomainPartition symmetric(double s) {
  DomainPartition p;
  p.omega = {{-1, 1}};
  p.sigma2 = {{-2, -1}, {1, 2}};
  p.sigma1 = {{-kInf, -2}, {2, kInf}};
  p.s = s;
  return p;
}

Eigen::VectorXd left_payoff(const JumpChain& c) {
  Eigen::VectorXd g(static_cast<long>(c.bins.size()));
  for (std::size_t i = 0; i < c.bins.size(); ++i) g(static_cast<long>(i)) = c.bins[i].hi <= 0.0 ? 1.0 : 0.0;
  return g;
}

}  // namespace

TEST(Splitmix, ReferenceOutput) {
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_NE(splitmix64(1), splitmix64(2));
}

TEST(Chain, RowsAreStochastic) {
  const Mesh m = build_mesh(standard(0.4), 16, 8);
  const JumpChain c = build_chain(m, KernelParams::make(0.4), 2.0, 8);
  for (long i = 0; i < c.P_oo.rows(); ++i) {
    EXPECT_NEAR(c.P_oo.row(i).sum() + c.P_os.row(i).sum() + c.P_oa.row(i).sum(), 1.0, 1e-14);
    EXPECT_GE(c.P_oo.row(i).minCoeff(), 0.0);
    EXPECT_EQ(c.P_oo(i, i), 0.0);
  }
  for (long e = 0; e < c.R_so.rows(); ++e) {
    EXPECT_NEAR(c.R_so.row(e).sum() + c.R_sa.row(e).sum(), 1.0, 1e-14);
    EXPECT_GE(c.R_so.row(e).minCoeff(), 0.0);
  }
  EXPECT_EQ(c.omega_x.size(), m.omega_dofs().size());
  EXPECT_EQ(c.sigma2_x.size(), m.exterior_dofs().size());
  EXPECT_EQ(c.n_absorbers(), c.bins.size() + c.boundary_x.size());
}

TEST(Chain, ReflectionUsesNormalizer) {
  const auto p = standard(0.5);
  const Mesh m = build_mesh(p, 16, 8);
  const JumpChain c = build_chain(m, KernelParams::make(0.5), 2.0, 8);
  for (std::size_t e = 0; e < c.sigma2_x.size(); ++e) {
    EXPECT_NEAR(c.sigma2_normalizer[e], reflect_normalizer(p, c.sigma2_x[e]), 1e-14);
    EXPECT_NEAR(c.sigma2_mass[e] * c.sigma2_normalizer[e], 1.0, 1e-12);
  }
}

TEST(Chain, ConstantPayoffIsExact) {
  const Mesh m = build_mesh(standard(0.3), 16, 8);
  const JumpChain c = build_chain(m, KernelParams::make(0.3), 2.0, 8);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<long>(c.bins.size()));
  EXPECT_LT((solve_chain(c, ones).array() - 1.0).abs().maxCoeff(), 1e-12);
  const WalkEstimate w = estimate_payoff(c, 3, ones, 2000, 11);
  EXPECT_EQ(w.estimate, 1.0);
  EXPECT_EQ(w.std_error, 0.0);
  EXPECT_EQ(w.count, 2000u);
}

TEST(Chain, SymmetricConfigurationSplitsEvenly) {
  const Mesh m = build_mesh(symmetric(0.5), 16, 16);
  const JumpChain c = build_chain(m, KernelParams::make(0.5), 2.0, 8);
  const long centre = c.omega_state(0.0);
  ASSERT_GE(centre, 0);
  const Eigen::VectorXd g = left_payoff(c);
  const Eigen::VectorXd u = solve_chain(c, g);
  EXPECT_NEAR(u(centre), 0.5, 1e-10);
  for (long i = 0; i < u.size(); ++i) EXPECT_NEAR(u(i) + u(u.size() - 1 - i), 1.0, 1e-10);
  const WalkEstimate w = estimate_payoff(c, static_cast<std::size_t>(centre), g, 20000, 5);
  EXPECT_LT(std::abs(w.estimate - 0.5), 3.0 * w.std_error);
}

TEST(Chain, MonteCarloIsReproducibleAndMatchesDenseSolve) {
  const Mesh m = build_mesh(standard(0.6), 16, 8);
  const JumpChain c = build_chain(m, KernelParams::make(0.6), 2.0, 8);
  const Eigen::VectorXd g = left_payoff(c);
  const Eigen::VectorXd u = solve_chain(c, g);
  const WalkEstimate a = estimate_payoff(c, 5, g, 10000, 99);
  const WalkEstimate b = estimate_payoff(c, 5, g, 10000, 99);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.std_error, b.std_error);
  EXPECT_LT(std::abs(a.estimate - u(5)), 3.0 * a.std_error);
  EXPECT_NE(estimate_payoff(c, 5, g, 10000, 100).estimate, a.estimate);
}

TEST(Chain, TracksGalerkinSolutionOnFineMesh) {
  const double s = 0.5;
  auto mesh = std::make_shared<const Mesh>(build_mesh(standard(s), 64, 32));
  const OperatorSet ops = assemble_stiffness(mesh, KernelParams::make(s));
  const JumpChain c = build_chain(*mesh, ops.kernel, 2.0, 16);
  const Eigen::VectorXd g = left_payoff(c);
  Sigma1Data h{c.bins, std::vector<double>(g.data(), g.data() + g.size())};
  const LoadVector zero{Eigen::VectorXd::Zero(static_cast<long>(mesh->n_active())), "0"};
  const Field gal = EllipticSolver(ops, BoundaryMode::Mixed).solve(dirichlet_lift(ops, zero, h));
  const Eigen::VectorXd u = solve_chain(c, g);
  const long mid = c.omega_state(0.0);
  EXPECT_NEAR(u(mid), gal(0.0), 0.05);
}
