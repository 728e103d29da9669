#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fracmix/assembly.hpp"
#include "fracmix/field.hpp"

namespace fracmix {

enum class BoundaryMode { Mixed, Dirichlet };
enum class MassKind { Consistent, Lumped };

const char* to_string(BoundaryMode m);

/// Active DoFs that are free in the given mode. Dirichlet mode also eliminates the
/// Sigma2 nodes and the Omega endpoints next to Sigma2.
std::vector<std::size_t> mode_dofs(const Mesh& m, BoundaryMode mode);

/// Cholesky factorization of A restricted to a mode, reusable across right sides.
class EllipticSolver {
 public:
  EllipticSolver(const OperatorSet& ops, BoundaryMode mode);

  Field solve(const LoadVector& F) const;
  Field solve(const LiftResult& lifted) const;  // mixed mode only
  Eigen::VectorXd solve_raw(const Eigen::VectorXd& rhs) const;  // in mode coordinates

  const std::vector<std::size_t>& dofs() const { return dofs_; }
  BoundaryMode mode() const { return mode_; }

 private:
  Field expand(const Eigen::VectorXd& x) const;

  const OperatorSet* ops_;
  BoundaryMode mode_;
  std::vector<std::size_t> dofs_;
  Eigen::MatrixXd A_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

Field solve_elliptic(BoundaryMode mode, const OperatorSet& ops, const LoadVector& F);

/// Solution with f = 1 in mixed mode.
Field solve_xi0(const OperatorSet& ops);

struct EigenPair {
  double lambda1 = 0.0;
  Field chi;  // int_Omega chi^2 = 1 (under the mass used), chi >= 0
  double residual = 0.0;
  int iterations = 0;
  BoundaryMode mode = BoundaryMode::Mixed;
  MassKind mass = MassKind::Consistent;
};

/// Smallest pair of A x = lambda M_omega x by inverse iteration. NEUMANN_EXT DoFs carry
/// no mass, so each step solves the full system, which slaves them harmonically.
EigenPair solve_eigen(BoundaryMode mode, const OperatorSet& ops, double tol = 1e-11,
                      MassKind mass = MassKind::Consistent, int max_iter = 1000);

enum class Scheme { ImplicitEuler, Trapezoidal };

struct StepperSpec {
  Scheme scheme = Scheme::ImplicitEuler;
  MassKind mass = MassKind::Lumped;
  std::string describe() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<Field> states;
  std::vector<double> l2;  // interior L2 norm under the stepper's mass
  StepperSpec stepper;
  double dt = 0.0;
};

/// Replaces the NEUMANN_EXT values of u by the A-harmonic extension of its Omega values.
Field harmonic_extension(const OperatorSet& ops, const Field& u);

/// M u' + A u = 0 with algebraic NEUMANN_EXT rows. Stores every store_every-th step
/// and always the last one.
Trajectory solve_parabolic(const OperatorSet& ops, const Field& u0, double t_end, double dt,
                           const StepperSpec& stepper = {}, std::size_t store_every = 1);

/// Mass matrix used by a stepper, on all active DoFs.
Eigen::MatrixXd stepper_mass(const OperatorSet& ops, MassKind mass);

/// Starts at dt = 1/(10 lambda1) and halves until the eigenfunction decays within 1%
/// nodewise at t = 1/lambda1. Returns dt; halvings reports the number of halvings.
double calibrate_dt(const OperatorSet& ops, const EigenPair& eig, const StepperSpec& stepper,
                    int max_halvings, int* halvings = nullptr);

}  // namespace fracmix
