#include "fracmix/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include <Eigen/Dense>

#include "fracmix/errors.hpp"

namespace fracmix {
namespace {

// Golub-Welsch for the Jacobi weight (1-x)^a (1+x)^b on [-1,1], mapped to
// [0,1] as t = (1+x)/2. With a = 0 the weight becomes 2^b t^b.
Rule golub_welsch(int n, double a, double b) {
  if (n < 1) throw QuadratureError("rule size must be positive");
  Eigen::VectorXd diag(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 1);
  for (int k = 0; k < n; ++k) {
    const double ab = 2.0 * k + a + b;
    if (k == 0)
      diag(k) = (b - a) / (a + b + 2.0);
    else
      diag(k) = (b * b - a * a) / (ab * (ab + 2.0));
    if (k + 1 < n) {
      const double j = k + 1.0;
      const double t = 2.0 * j + a + b;
      const double beta = 4.0 * j * (j + a) * (j + b) * (j + a + b) /
                          (t * t * (t + 1.0) * (t - 1.0));
      off(k) = std::sqrt(beta);
    }
  }
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) {
    J(k, k) = diag(k);
    if (k + 1 < n) J(k, k + 1) = J(k + 1, k) = off(k);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  if (es.info() != Eigen::Success) throw QuadratureError("Golub-Welsch eigen solve failed");

  const double mu0 = std::exp((a + b + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(a + b + 2.0));
  // Weight on [0,1]: the map contributes a factor 2^{-(a+b+1)}.
  const double scale = std::exp(-(a + b + 1.0) * std::log(2.0));
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  for (int k = 0; k < n; ++k) {
    const double v0 = es.eigenvectors()(0, k);
    r.nodes[k] = 0.5 * (1.0 + es.eigenvalues()(k));
    r.weights[k] = mu0 * v0 * v0 * scale;
  }
  return r;
}

std::mutex cache_mutex;
std::map<std::pair<int, double>, Rule> cache;

const Rule& cached(int n, double alpha) {
  std::lock_guard<std::mutex> lock(cache_mutex);
  auto key = std::make_pair(n, alpha);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (!(alpha > -1.0)) throw QuadratureError("Jacobi exponent must exceed -1");
  return cache.emplace(key, golub_welsch(n, 0.0, alpha)).first->second;
}

}  // namespace

const Rule& gauss_legendre(int n) { return cached(n, 0.0); }

const Rule& gauss_jacobi(int n, double alpha) { return cached(n, alpha); }

}  // namespace fracmix
