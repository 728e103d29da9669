#include <gtest/gtest.h>

#include <cmath>

#include "fracmix/domain.hpp"
#include "fracmix/errors.hpp"

using namespace fracmix;

namespace {

DomainPartition standard(double s = 0.5) {
  DomainPartition p;
  p.omega = {{-1, 1}};
  p.sigma2 = {{1, 2}};
  p.sigma1 = {{-kInf, -1}, {2, kInf}};
  p.s = s;
  return p;
}

}  // namespace

TEST(Partition, StandardConfigurationValidates) { EXPECT_NO_THROW(validate_partition(standard())); }

TEST(Partition, RejectsOverlap) {
  auto p = standard();
  p.sigma2 = {{0.5, 2}};
  EXPECT_THROW(validate_partition(p), OverlapError);
}

TEST(Partition, RejectsGap) {
  auto p = standard();
  p.sigma2 = {{1, 1.5}};
  EXPECT_THROW(validate_partition(p), CoverageError);
}

TEST(Partition, RejectsUnboundedSigma2) {
  auto p = standard();
  p.sigma2 = {{1, kInf}};
  p.sigma1 = {{-kInf, -1}};
  EXPECT_THROW(validate_partition(p), UnboundedSigma2Error);
}

TEST(Partition, RejectsEmptySigma2AndBadS) {
  auto p = standard();
  p.sigma2.clear();
  p.sigma1 = {{-kInf, -1}, {1, kInf}};
  EXPECT_THROW(validate_partition(p), MeasureError);
  auto q = standard();
  q.s = 1.0;
  EXPECT_THROW(validate_partition(q), InputError);
  q.s = 0.0;
  EXPECT_THROW(validate_partition(q), InputError);
}

TEST(Partition, RejectsDegenerateInterval) {
  auto p = standard();
  p.sigma2 = {{1, 1}, {1, 2}};
  EXPECT_THROW(validate_partition(p), InputError);
}

TEST(Mesh, UniformNodeCountsAndClasses) {
  const Mesh m = build_mesh(standard(), 64, 32);
  ASSERT_EQ(m.n_nodes(), 97u);
  EXPECT_DOUBLE_EQ(m.x(0), -1.0);
  EXPECT_DOUBLE_EQ(m.x(96), 2.0);
  EXPECT_EQ(m.dof_class(0), DofClass::Eliminated);
  EXPECT_EQ(m.dof_class(64), DofClass::Interior);  // x = 1, Omega/Sigma2 interface
  EXPECT_DOUBLE_EQ(m.x(64), 1.0);
  EXPECT_EQ(m.dof_class(96), DofClass::NeumannExt);  // x = 2, Sigma2/Sigma1 point
  EXPECT_EQ(m.n_active(), 96u);
  EXPECT_EQ(m.dirichlet_dofs().size(), 63u);
  EXPECT_EQ(m.omega_dofs().size(), 64u);
  EXPECT_EQ(m.exterior_dofs().size(), 32u);
  for (const auto& e : m.elements()) EXPECT_NEAR(m.length(e), 1.0 / 32.0, 1e-15);
}

TEST(Mesh, GeometricGradingShrinksTowardSigma1) {
  const double ratio = 0.8;
  const Mesh m = build_mesh(standard(), 16, 4, Grading::geometric(ratio));
  // Omega has one end on Sigma1 (x = -1): widths grow geometrically away from it.
  const auto& el = m.elements();
  for (std::size_t k = 0; k + 1 < 16; ++k)
    EXPECT_NEAR(m.length(el[k]) / m.length(el[k + 1]), ratio, 1e-12);
  double total = 0.0;
  for (std::size_t k = 0; k < 16; ++k) total += m.length(el[k]);
  EXPECT_NEAR(total, 2.0, 1e-14);
}

TEST(Mesh, GradingLayersLimitRatioSteps) {
  const Mesh m = build_mesh(standard(), 16, 4, Grading::geometric(0.5, 2));
  const auto& el = m.elements();
  EXPECT_NEAR(m.length(el[0]) / m.length(el[1]), 0.5, 1e-12);
  EXPECT_NEAR(m.length(el[1]) / m.length(el[2]), 1.0, 1e-12);
  EXPECT_NEAR(m.length(el[7]) / m.length(el[8]), 1.0, 1e-12);
}

TEST(Mesh, SplitsByComponentLength) {
  DomainPartition p;
  p.omega = {{-3, -1}, {1, 2}};
  p.sigma2 = {{-1, 0}, {2, 4}};
  p.sigma1 = {{-kInf, -3}, {0, 1}, {4, kInf}};
  const Mesh m = build_mesh(p, 12, 6);
  int first = 0, second = 0;
  for (const auto& e : m.elements()) {
    if (e.region != Region::Omega) continue;
    if (m.x(e.left) < 0) ++first;
    else ++second;
  }
  EXPECT_EQ(first, 8);
  EXPECT_EQ(second, 4);
}

TEST(Mesh, RejectsTooFewElements) {
  EXPECT_THROW(build_mesh(standard(), 3, 4), ConfigError);
  EXPECT_THROW(build_mesh(standard(), 8, 1), ConfigError);
}

TEST(Mesh, LocateFindsElement) {
  const Mesh m = build_mesh(standard(), 8, 4);
  const long e = m.locate(0.3);
  ASSERT_GE(e, 0);
  const auto& el = m.elements()[static_cast<std::size_t>(e)];
  EXPECT_LE(m.x(el.left), 0.3);
  EXPECT_GE(m.x(el.right), 0.3);
  EXPECT_EQ(m.locate(-1.5), -1);
  EXPECT_EQ(m.locate(5.0), -1);
}

TEST(Mesh, HashDependsOnNodes) {
  EXPECT_EQ(build_mesh(standard(), 8, 4).hash(), build_mesh(standard(), 8, 4).hash());
  EXPECT_NE(build_mesh(standard(), 8, 4).hash(), build_mesh(standard(), 16, 4).hash());
}

TEST(BoundaryDistance, DistanceToNearestEndpoint) {
  const auto p = standard();
  EXPECT_DOUBLE_EQ(boundary_distance(p, 0.0), 1.0);
  EXPECT_NEAR(boundary_distance(p, 0.9), 0.1, 1e-15);
  EXPECT_NEAR(boundary_distance(p, -0.75), 0.25, 1e-15);
  EXPECT_DOUBLE_EQ(boundary_distance(p, -1.0), 0.0);
  EXPECT_THROW(boundary_distance(p, 1.5), DomainError);
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a(std::string("")), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a(std::string("a")), 0xaf63dc4c8601ec8cULL);
}
