#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fracmix/domain.hpp"
#include "fracmix/field.hpp"
#include "fracmix/kernel.hpp"

namespace fracmix {

/// Jump chain on mesh dual cells. From an Omega state the walker lands in any other
/// cell or Sigma1 bin with probability proportional to the exact cell integral of
/// |x_i-y|^{-1-2s}; from a Sigma2 state it is sent back into Omega with the reflection
/// density c(x)|x-y|^{-1-2s}. Absorbers are the Sigma1 bins followed by the boundary
/// half-cells of Omega nodes that touch Sigma1.
struct JumpChain {
  std::vector<double> omega_x;
  std::vector<std::size_t> omega_dof;  // active DoF index of each Omega state
  std::vector<double> sigma2_x;
  std::vector<Interval> bins;
  std::vector<double> boundary_x;
  std::vector<std::size_t> boundary_bin;  // bin whose payoff a boundary cell inherits
  Eigen::MatrixXd P_oo, P_os, P_oa;       // Omega rows
  Eigen::MatrixXd R_so, R_sa;             // Sigma2 rows
  std::vector<double> sigma2_mass;        // reflection mass before normalization
  std::vector<double> sigma2_normalizer;  // c(x) at each Sigma2 state

  std::size_t n_absorbers() const { return bins.size() + boundary_x.size(); }
  /// Payoff on every absorber from one value per bin.
  Eigen::VectorXd absorber_payoff(const Eigen::VectorXd& bin_payoff) const;
  /// Index of the Omega state at x, or -1.
  long omega_state(double x) const;
};

JumpChain build_chain(const Mesh& m, const KernelParams& k, double sigma1_window, int n_bins);

/// Expected payoffs from every Omega state by a dense solve of the chain equations.
Eigen::VectorXd solve_chain(const JumpChain& c, const Eigen::VectorXd& bin_payoff);

struct WalkEstimate {
  std::size_t start = 0;
  double x = 0.0;
  double estimate = 0.0;
  double std_error = 0.0;
  std::size_t count = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo mean payoff of walkers started at Omega state `start`. Batches of
/// walkers draw from seeds derived from `seed`, so results are reproducible.
WalkEstimate estimate_payoff(const JumpChain& c, std::size_t start, const Eigen::VectorXd& bin_payoff,
                             std::size_t n_walkers, std::uint64_t seed);

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace fracmix
