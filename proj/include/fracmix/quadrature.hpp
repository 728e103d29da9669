#pragma once

#include <vector>

namespace fracmix {

/// Quadrature rule on the reference interval [0,1].
struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::size_t size() const { return nodes.size(); }
};

/// n-point Gauss-Legendre rule on [0,1].
const Rule& gauss_legendre(int n);

/// n-point Gauss rule for the weight t^alpha on [0,1], alpha > -1.
/// Exact for p(t) t^alpha with deg p <= 2n-1.
const Rule& gauss_jacobi(int n, double alpha);

}  // namespace fracmix
