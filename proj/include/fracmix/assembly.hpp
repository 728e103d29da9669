#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include <Eigen/Dense>

#include "fracmix/domain.hpp"
#include "fracmix/field.hpp"
#include "fracmix/kernel.hpp"

namespace fracmix {

/// Discrete form (a_ns/2) iint_Q (phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-2s}
/// over active DoFs, plus mass matrices.
struct OperatorSet {
  std::shared_ptr<const Mesh> mesh;
  KernelParams kernel;
  QuadratureSpec quad;
  Eigen::MatrixXd A;          // active x active
  Eigen::MatrixXd A_lift;     // active x eliminated, couplings to boundary nodes
  Eigen::MatrixXd M_omega;    // int_Omega phi_i phi_j
  Eigen::MatrixXd M_full;     // int_{Omega u Sigma2} phi_i phi_j
  Eigen::VectorXd M_lumped;   // row sums of M_omega
  std::uint64_t mesh_hash = 0;

  double form_factor() const { return 0.5 * kernel.a_ns; }
};

struct LoadVector {
  Eigen::VectorXd values;  // active DoFs
  std::string source;
};

enum class MassRegion { Omega, Full };

OperatorSet assemble_stiffness(std::shared_ptr<const Mesh> mesh, const KernelParams& k,
                               const QuadratureSpec& q = {});

/// Active x active mass matrix over Omega or Omega u Sigma2.
Eigen::MatrixXd assemble_mass(const Mesh& m, MassRegion region);

LoadVector assemble_load(const Mesh& m, const std::function<double(double)>& f,
                         std::string source = "function");

/// iint_Q u(x)u(y)(phi_i(x)-phi_i(y))(phi_j(x)-phi_j(y)) |x-y|^{-1-2s} over active DoFs,
/// without a_ns or the factor 1/2. u vanishes on Sigma1 so no exterior term appears.
Eigen::MatrixXd assemble_weighted_form(const Field& u, const QuadratureSpec& q = {});

struct LiftResult {
  LoadVector load;  // F plus the Sigma1 coupling minus the boundary-node columns
  Field boundary;   // zero coefficients, boundary-node values and the Sigma1 datum
};

/// Moves a piecewise-constant Dirichlet datum on Sigma1 to the right side.
LiftResult dirichlet_lift(const OperatorSet& ops, const LoadVector& F, const Sigma1Data& h);

/// Row-major CSV dump of A, M_omega and M_full with a header carrying the mesh hash.
void dump_operators(const OperatorSet& ops, const std::string& path);

}  // namespace fracmix
