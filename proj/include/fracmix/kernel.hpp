#pragma once

#include <functional>
#include <vector>

#include "fracmix/domain.hpp"

namespace fracmix {

/// 2^{2s} s Gamma((N+2s)/2) / (pi^{N/2} Gamma(1-s)).
double normalization_constant(double s, int dim = 1);

struct KernelParams {
  double s = 0.5;
  int dim = 1;
  double a_ns = 0.0;

  static KernelParams make(double s, int dim = 1);
};

/// a_ns |x-y|^{-N-2s}.
double kernel_eval(const KernelParams& k, double x, double y);

/// Integral of |x-y|^{-1-2s} over y in I, x outside the open interval I.
/// Infinite when x is an endpoint of I.
double tail_integral(double s, double x, const Interval& I);

/// Sum of tail_integral over every Sigma1 component.
double sigma1_kill(const DomainPartition& p, double x);

/// c(x) with c(x) * int_Omega |x-y|^{-1-2s} dy = 1 (no a_ns).
double reflect_normalizer(const DomainPartition& p, double x);

struct QuadratureSpec {
  int gauss_order = 8;         // tensor rule on well separated element pairs
  int singular_order = 20;     // Gauss-Legendre order along the Duffy angle
  double admissibility = 1.0;  // tensor rule once dist >= admissibility * size
  double near_radius = 0.5;    // PV near field, fraction of distance to nearest breakpoint
  int pv_order = 24;           // Gauss-Jacobi order in the PV near field
  int refinement_cap = 40;     // bisection depth limit
  double tolerance = 1e-11;    // target for adaptive 1D integrals
};

/// A function of one variable: smooth between breakpoints, constant outside them.
struct FunctionView {
  std::function<double(double)> value;
  std::vector<double> breakpoints;  // sorted; first/last bound the support box
  double exterior_left = 0.0;
  double exterior_right = 0.0;

  double operator()(double x) const;
};

/// (-Delta)^s u(x) in the principal value sense, x strictly between breakpoints.
double pv_fractional_laplacian(const KernelParams& k, const FunctionView& u, double x,
                               const QuadratureSpec& q = {});

/// N_s u(x) = a_ns int_Omega (u(x)-u(y)) |x-y|^{-1-2s} dy for x outside closure(Omega).
double neumann_derivative(const KernelParams& k, const FunctionView& u, const DomainPartition& p,
                          double x, const QuadratureSpec& q = {});

/// Adaptive integral of f over [a,b]; endpoint singularities allowed.
double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-11);

}  // namespace fracmix
