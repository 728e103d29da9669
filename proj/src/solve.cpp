#include "fracmix/solve.hpp"

#include <cmath>

#include "fracmix/errors.hpp"

namespace fracmix {
namespace {

Eigen::MatrixXd restrict(const Eigen::MatrixXd& M, const std::vector<std::size_t>& idx) {
  const long n = static_cast<long>(idx.size());
  Eigen::MatrixXd out(n, n);
  for (long i = 0; i < n; ++i)
    for (long j = 0; j < n; ++j) out(i, j) = M(static_cast<long>(idx[i]), static_cast<long>(idx[j]));
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<std::size_t>& idx) {
  Eigen::VectorXd out(static_cast<long>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out(static_cast<long>(i)) = v(static_cast<long>(idx[i]));
  return out;
}

}  // namespace

const char* to_string(BoundaryMode m) { return m == BoundaryMode::Mixed ? "MIXED" : "DIRICHLET"; }

std::string StepperSpec::describe() const {
  std::string s = scheme == Scheme::ImplicitEuler ? "implicit_euler" : "trapezoidal";
  s += mass == MassKind::Lumped ? "/lumped" : "/consistent";
  return s;
}

std::vector<std::size_t> mode_dofs(const Mesh& m, BoundaryMode mode) {
  if (mode == BoundaryMode::Dirichlet) return m.dirichlet_dofs();
  std::vector<std::size_t> all(m.n_active());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return all;
}

EllipticSolver::EllipticSolver(const OperatorSet& ops, BoundaryMode mode)
    : ops_(&ops), mode_(mode), dofs_(mode_dofs(*ops.mesh, mode)) {
  if (dofs_.empty()) throw SingularMatrixError("no free DoFs in this mode");
  A_ = restrict(ops.A, dofs_);
  llt_.compute(A_);
  if (llt_.info() != Eigen::Success) throw SingularMatrixError("stiffness matrix is not positive definite");
}

Eigen::VectorXd EllipticSolver::solve_raw(const Eigen::VectorXd& rhs) const {
  Eigen::VectorXd x = llt_.solve(rhs);
  const double nb = rhs.norm();
  if (nb > 0.0) {
    const double res = (A_ * x - rhs).norm() / nb;
    if (!(res < 1e-10)) throw SingularMatrixError("relative residual " + std::to_string(res));
  }
  return x;
}

Field EllipticSolver::expand(const Eigen::VectorXd& x) const {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<long>(ops_->mesh->n_active()));
  for (std::size_t i = 0; i < dofs_.size(); ++i) c(static_cast<long>(dofs_[i])) = x(static_cast<long>(i));
  return Field(ops_->mesh, std::move(c));
}

Field EllipticSolver::solve(const LoadVector& F) const {
  return expand(solve_raw(gather(F.values, dofs_)));
}

Field EllipticSolver::solve(const LiftResult& lifted) const {
  if (mode_ != BoundaryMode::Mixed) throw ConfigError("a Dirichlet lift needs the mixed mode");
  const Field u = expand(solve_raw(lifted.load.values));
  return Field(ops_->mesh, u.coeffs(), lifted.boundary.boundary_values(), lifted.boundary.datum());
}

Field solve_elliptic(BoundaryMode mode, const OperatorSet& ops, const LoadVector& F) {
  return EllipticSolver(ops, mode).solve(F);
}

Field solve_xi0(const OperatorSet& ops) {
  return solve_elliptic(BoundaryMode::Mixed, ops, assemble_load(*ops.mesh, [](double) { return 1.0; }, "f=1"));
}

Eigen::MatrixXd stepper_mass(const OperatorSet& ops, MassKind mass) {
  if (mass == MassKind::Consistent) return ops.M_omega;
  return ops.M_lumped.asDiagonal();
}

EigenPair solve_eigen(BoundaryMode mode, const OperatorSet& ops, double tol, MassKind mass,
                      int max_iter) {
  const auto dofs = mode_dofs(*ops.mesh, mode);
  const Eigen::MatrixXd A = restrict(ops.A, dofs);
  const Eigen::MatrixXd M = restrict(stepper_mass(ops, mass), dofs);
  Eigen::LLT<Eigen::MatrixXd> llt(A);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("stiffness matrix is not positive definite");

  const Mesh& m = *ops.mesh;
  Eigen::VectorXd x(static_cast<long>(dofs.size()));
  for (std::size_t i = 0; i < dofs.size(); ++i)
    x(static_cast<long>(i)) = m.dof_class(m.active_nodes()[dofs[i]]) == DofClass::Interior ? 1.0 : 0.0;

  double lambda = 0.0, prev = 0.0, res = 0.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    x = llt.solve(M * x);
    const double mm = x.dot(M * x);
    x /= std::sqrt(mm);
    const Eigen::VectorXd Ax = A * x;
    lambda = x.dot(Ax);
    res = (Ax - lambda * (M * x)).norm() / x.norm();
    if (it > 0 && std::abs(lambda - prev) < tol * lambda && res < tol) break;
    prev = lambda;
  }
  if (it == max_iter) throw ConvergenceError("inverse iteration did not converge");
  if (x.sum() < 0.0) x = -x;

  EigenPair ep;
  ep.lambda1 = lambda;
  ep.residual = res;
  ep.iterations = it + 1;
  ep.mode = mode;
  ep.mass = mass;
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<long>(m.n_active()));
  for (std::size_t i = 0; i < dofs.size(); ++i) c(static_cast<long>(dofs[i])) = x(static_cast<long>(i));
  ep.chi = Field(ops.mesh, std::move(c));
  return ep;
}

Field harmonic_extension(const OperatorSet& ops, const Field& u) {
  const auto E = ops.mesh->exterior_dofs();
  const auto I = ops.mesh->omega_dofs();
  if (E.empty()) return u;
  Eigen::MatrixXd AEE = restrict(ops.A, E);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<long>(E.size()));
  for (std::size_t a = 0; a < E.size(); ++a)
    for (std::size_t b = 0; b < I.size(); ++b)
      rhs(static_cast<long>(a)) -= ops.A(static_cast<long>(E[a]), static_cast<long>(I[b])) *
                                   u.coeffs()(static_cast<long>(I[b]));
  Eigen::LLT<Eigen::MatrixXd> llt(AEE);
  if (llt.info() != Eigen::Success) throw SingularMatrixError("exterior block is not positive definite");
  const Eigen::VectorXd xe = llt.solve(rhs);
  Eigen::VectorXd c = u.coeffs();
  for (std::size_t a = 0; a < E.size(); ++a) c(static_cast<long>(E[a])) = xe(static_cast<long>(a));
  return Field(ops.mesh, std::move(c), u.boundary_values(), u.datum());
}

Trajectory solve_parabolic(const OperatorSet& ops, const Field& u0, double t_end, double dt,
                           const StepperSpec& stepper, std::size_t store_every) {
  if (!(dt > 0.0) || !(t_end >= 0.0)) throw StepError("time step and horizon must be positive");
  if (store_every == 0) store_every = 1;
  const Eigen::MatrixXd M = stepper_mass(ops, stepper.mass);
  const double theta = stepper.scheme == Scheme::ImplicitEuler ? 1.0 : 0.5;
  const Eigen::MatrixXd B = M / dt + theta * ops.A;
  const Eigen::MatrixXd C = M / dt - (1.0 - theta) * ops.A;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw StepError("step matrix factorization failed");
  const auto E = ops.mesh->exterior_dofs();

  Trajectory tr;
  tr.stepper = stepper;
  tr.dt = dt;
  Field u = harmonic_extension(ops, u0);
  Eigen::VectorXd x = u.coeffs();
  const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
  auto record = [&](long n) {
    tr.times.push_back(n * dt);
    tr.states.emplace_back(ops.mesh, x);
    tr.l2.push_back(std::sqrt(std::max(0.0, x.dot(M * x))));
  };
  record(0);
  for (long n = 1; n <= steps; ++n) {
    Eigen::VectorXd rhs = C * x;
    for (auto e : E) rhs(static_cast<long>(e)) = 0.0;
    x = llt.solve(rhs);
    if (!x.allFinite()) throw StepError("non-finite state");
    if (n % static_cast<long>(store_every) == 0 || n == steps) record(n);
  }
  return tr;
}

double calibrate_dt(const OperatorSet& ops, const EigenPair& eig, const StepperSpec& stepper,
                    int max_halvings, int* halvings) {
  const double t = 1.0 / eig.lambda1;
  double dt = 0.1 / eig.lambda1;
  const auto I = ops.mesh->dirichlet_dofs();
  for (int h = 0; h <= max_halvings; ++h) {
    const Trajectory tr = solve_parabolic(ops, eig.chi, t, dt, stepper, 1u << 30);
    const Eigen::VectorXd& u = tr.states.back().coeffs();
    const double decay = std::exp(eig.lambda1 * tr.times.back());
    bool ok = true;
    for (auto d : I) {
      const double r = u(static_cast<long>(d)) * decay / eig.chi.coeffs()(static_cast<long>(d));
      if (!(r >= 0.99 && r <= 1.01)) ok = false;
    }
    if (ok) {
      if (halvings) *halvings = h;
      return dt;
    }
    dt *= 0.5;
  }
  throw ConvergenceError("eigenfunction decay test failed after all halvings");
}

}  // namespace fracmix
