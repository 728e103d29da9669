#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fracmix/assembly.hpp"
#include "fracmix/families.hpp"
#include "fracmix/solve.hpp"
#include "fracmix/walker.hpp"

namespace fracmix {

struct Certificate {
  std::string name;
  std::vector<std::pair<std::string, double>> constants;
  std::string inputs;  // canonical description of what was measured
  std::uint64_t digest = 0;
  double tolerance = 0.0;
  bool pass = false;
  std::string notes;

  void set(const std::string& key, double value);
  double constant(const std::string& key) const;
  bool has(const std::string& key) const;
};

/// Torsion function and mixed first eigenpair, shared by most certificates.
struct Gauges {
  Field xi0;
  EigenPair chi;
  static Gauges compute(const OperatorSet& ops, double eig_tol = 1e-11);
};

/// Canonical input descriptor for an operator set plus extra tokens.
std::string describe_inputs(const OperatorSet& ops, const std::string& extra);

/// Interpolates f on the given DoFs of the mesh; every other DoF is zero.
Eigen::VectorXd interpolate_on(const Mesh& m, const std::function<double(double)>& f,
                               const std::vector<std::size_t>& dofs);

/// int_Omega phi^2 delta^{-2s} for a piecewise-linear phi vanishing at Sigma1-adjacent ends.
double hardy_weighted_integral(const Mesh& m, const Eigen::VectorXd& coeffs);

/// int_Omega f delta^s. Integration panels also break at the given kinks of f.
double delta_moment(const DomainPartition& p, const std::function<double(double)>& f,
                    const std::vector<double>& kinks = {});

Certificate certify_poincare(const OperatorSet& ops, const Gauges& g, const FunctionFamily& samples);

Certificate certify_hardy(const OperatorSet& ops, const FunctionFamily& samples);

Certificate certify_weighted_sobolev(const OperatorSet& ops, const Field& u, const FunctionFamily& samples,
                                     double r, double r_ceiling = 4.0);

Certificate certify_linfty_ratio(const OperatorSet& ops, const Gauges& g, const FunctionFamily& g_family,
                                 double p);

Certificate certify_elliptic_hopf(const OperatorSet& ops, const Gauges& g, const FunctionFamily& f_family);

Certificate certify_eigen_comparison(const OperatorSet& ops, const Gauges& g);

struct ParabolicSetup {
  StepperSpec stepper{};
  double dt_factor = 0.05;  // dt = dt_factor / lambda1
  std::vector<double> t_grid{0.1, 0.2, 0.4, 1.0, 2.0, 3.0};  // in units of 1/lambda1
};

Certificate certify_parabolic_hopf(const OperatorSet& ops, const Gauges& g, const FunctionFamily& u0_family,
                                   const ParabolicSetup& setup);

/// theta_{2j}(t) = sum_i m_i u_i^2 (v_i/u_i)^{2j} over Omega nodes, lumped weights.
Certificate monitor_theta(const OperatorSet& ops, const Trajectory& u, const Trajectory& v,
                          const std::vector<int>& j_list);

enum class BoundMode { Elliptic, Parabolic };

Certificate certify_delta_lower_bounds(const OperatorSet& ops, const Gauges& g, const FunctionFamily& family,
                                       BoundMode mode, const ParabolicSetup& setup = {});

/// Two-sided bounds of the Dirichlet first eigenfunction against delta^s.
Certificate certify_dirichlet_delta(const OperatorSet& ops);

/// Mixed solutions dominate Dirichlet ones and stay nonnegative for f >= 0.
Certificate certify_comparison(const OperatorSet& ops, const FunctionFamily& f_family);

/// Parabolic positivity and L2 decay for nonnegative data.
Certificate certify_parabolic_positivity(const OperatorSet& ops, const Gauges& g,
                                         const FunctionFamily& u0_family, const ParabolicSetup& setup);

struct WalkerSetup {
  double window = 2.0;
  int n_bins = 32;
  std::size_t n_walkers = 100000;
  std::uint64_t seed = 1;
};

/// Chain dense solve against Monte Carlo at the given start points, plus the gap to
/// the Galerkin solution with the same datum (recorded only).
Certificate certify_walker(const OperatorSet& ops, const std::vector<Eigen::VectorXd>& bin_payoffs,
                           const std::vector<double>& starts, const WalkerSetup& setup);

/// Refinement stability: drift of `key` between the last two certificates.
Certificate refine_stable(const std::vector<Certificate>& per_mesh, const std::string& key,
                          double max_drift);

struct GreenCheck {
  double form = 0.0;      // (a/2) iint_Q (u(x)-u(y))(phi(x)-phi(y)) k
  double interior = 0.0;  // int_Omega phi (-Delta)^s u
  double exterior = 0.0;  // int_{Sigma2} phi N_s u
  double rel_error = 0.0;
};

/// Both sides of the integration-by-parts identity for smooth u, phi vanishing on Sigma1.
GreenCheck green_identity(const KernelParams& k, const DomainPartition& p, const FunctionView& u,
                          const FunctionView& phi, const QuadratureSpec& q = {});

}  // namespace fracmix
