#include <gtest/gtest.h>

#include <cmath>

#include "fracmix/quadrature.hpp"

using fracmix::gauss_jacobi;
using fracmix::gauss_legendre;

TEST(GaussLegendre, IntegratesMonomialsUpToDegree2nMinus1) {
  for (int n : {1, 2, 5, 8, 20}) {
    const auto& r = gauss_legendre(n);
    ASSERT_EQ(r.size(), static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double q = 0.0;
      for (std::size_t i = 0; i < r.size(); ++i) q += r.weights[i] * std::pow(r.nodes[i], k);
      EXPECT_NEAR(q, 1.0 / (k + 1), 1e-14) << "n=" << n << " k=" << k;
    }
  }
}

TEST(GaussLegendre, NodesInsideUnitInterval) {
  const auto& r = gauss_legendre(12);
  for (double t : r.nodes) {
    EXPECT_GT(t, 0.0);
    EXPECT_LT(t, 1.0);
  }
}

TEST(GaussJacobi, IntegratesWeightedMonomials) {
  for (double alpha : {-0.5, -0.8, 0.0, 0.5, 1.5}) {
    for (int n : {1, 3, 6, 12}) {
      const auto& r = gauss_jacobi(n, alpha);
      for (int k = 0; k <= 2 * n - 1; ++k) {
        double q = 0.0;
        for (std::size_t i = 0; i < r.size(); ++i) q += r.weights[i] * std::pow(r.nodes[i], k);
        EXPECT_NEAR(q, 1.0 / (k + alpha + 1.0), 1e-12 / (k + alpha + 1.0) + 1e-13)
            << "alpha=" << alpha << " n=" << n << " k=" << k;
      }
    }
  }
}

TEST(GaussJacobi, ZeroAlphaMatchesLegendre) {
  const auto& a = gauss_jacobi(7, 0.0);
  const auto& b = gauss_legendre(7);
  for (std::size_t i = 0; i < 7; ++i) {
    EXPECT_NEAR(a.nodes[i], b.nodes[i], 1e-14);
    EXPECT_NEAR(a.weights[i], b.weights[i], 1e-14);
  }
}

TEST(GaussJacobi, CachedRuleIsStable) {
  const auto* first = &gauss_jacobi(5, 0.3);
  EXPECT_EQ(first, &gauss_jacobi(5, 0.3));
}
