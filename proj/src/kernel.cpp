#include "fracmix/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracmix/errors.hpp"
#include "fracmix/quadrature.hpp"

namespace fracmix {

double normalization_constant(double s, int dim) {
  if (!(s > 0.0 && s < 1.0)) throw DomainError("s must lie in (0,1)");
  if (dim < 1) throw DomainError("dimension must be positive");
  const double N = dim;
  return std::pow(2.0, 2.0 * s) * s * std::tgamma(0.5 * (N + 2.0 * s)) /
         (std::pow(std::numbers::pi, 0.5 * N) * std::tgamma(1.0 - s));
}

KernelParams KernelParams::make(double s, int dim) {
  return KernelParams{s, dim, normalization_constant(s, dim)};
}

double kernel_eval(const KernelParams& k, double x, double y) {
  if (x == y) throw SingularityError("kernel evaluated on the diagonal");
  return k.a_ns * std::pow(std::abs(x - y), -(k.dim + 2.0 * k.s));
}

double tail_integral(double s, double x, const Interval& I) {
  const double e = 2.0 * s;
  auto term = [&](double d) { return d == kInf ? 0.0 : std::pow(d, -e); };
  if (x <= I.lo) {
    const double dn = I.lo - x;
    if (dn == 0.0) return kInf;
    return (term(dn) - term(I.hi - x)) / e;
  }
  if (x >= I.hi) {
    const double dn = x - I.hi;
    if (dn == 0.0) return kInf;
    return (term(dn) - term(x - I.lo)) / e;
  }
  throw SingularityError("tail integral requested from inside the interval");
}

double sigma1_kill(const DomainPartition& p, double x) {
  double acc = 0.0;
  for (const auto& I : p.sigma1) acc += tail_integral(p.s, x, I);
  return acc;
}

double reflect_normalizer(const DomainPartition& p, double x) {
  if (p.in_omega_closure(x)) throw DomainError("reflect_normalizer needs x outside closure(omega)");
  bool in_s2 = false;
  for (const auto& I : p.sigma2)
    if (I.contains_closed(x)) in_s2 = true;
  if (!in_s2) throw DomainError("reflect_normalizer needs x in sigma2");
  double acc = 0.0;
  for (const auto& I : p.omega) acc += tail_integral(p.s, x, I);
  return 1.0 / acc;
}

double FunctionView::operator()(double x) const {
  if (!breakpoints.empty()) {
    if (x < breakpoints.front()) return exterior_left;
    if (x > breakpoints.back()) return exterior_right;
  }
  return value(x);
}

namespace {

double integrate_split(const std::function<double(double)>& f, double a, double b, double tol, int splits) {
  if (!(b > a)) return 0.0;
  // one integrator per nesting level; the integrator grows its tables lazily
  using Integrator = boost::math::quadrature::tanh_sinh<double>;
  thread_local std::vector<std::unique_ptr<Integrator>> pool;
  thread_local std::size_t depth = 0;
  if (pool.size() <= depth) pool.push_back(std::make_unique<Integrator>(15));
  struct Level {
    std::size_t& d;
    ~Level() { --d; }
  } level{++depth};
  double err = 0.0, l1 = 0.0;
  // integrate over [0, b-a] so the abscissae keep full relative precision near a
  const double v = pool[depth - 1]->integrate([&](double t) { return f(a + t); }, 0.0, b - a, tol, &err, &l1);
  if (!std::isfinite(v)) throw QuadratureError("non-finite integral");
  // panels a few thousand ulps wide cannot resolve their integrand; skip the check there
  const bool resolvable = b - a > 1e-10 * std::max({1.0, std::abs(a), std::abs(b)});
  if (!resolvable || err <= 1e-6 * l1 || err <= 1e-14) return v;
  // the level-difference estimate also picks up rounding noise in f; accept when an
  // independent evaluation on the two halves agrees with the whole
  if (splits >= 3) return v;
  const double m = 0.5 * (a + b);
  const double halves = integrate_split(f, a, m, tol, splits + 1) + integrate_split(f, m, b, tol, splits + 1);
  if (std::abs(halves - v) > 1e-6 * std::max(l1, std::abs(halves)))
    throw QuadratureError("adaptive integral did not reach tolerance");
  return halves;
}

// integral over [a,b] not containing x, on panels growing geometrically away from x
double integrate_away(const std::function<double(double)>& f, double x, double a, double b, double tol) {
  const bool right = a >= x;
  double lo = right ? a - x : x - b, hi = right ? b - x : x - a;
  double acc = 0.0;
  while (lo < hi) {
    const double next = std::min(hi, 4.0 * lo);
    acc += integrate_split(f, right ? x + lo : x - next, right ? x + next : x - lo, tol, 0);
    lo = next;
  }
  return acc;
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
  return integrate_split(f, a, b, tol, 0);
}

double pv_fractional_laplacian(const KernelParams& k, const FunctionView& u, double x,
                               const QuadratureSpec& q) {
  if (u.breakpoints.size() < 2) throw QuadratureError("function view needs a support box");
  const auto& bp = u.breakpoints;
  if (!(x > bp.front() && x < bp.back())) throw QuadratureError("PV point outside the support box");
  double dist = kInf;
  for (double b : bp) dist = std::min(dist, std::abs(x - b));
  if (dist == 0.0) throw QuadratureError("PV point coincides with a breakpoint");
  const double s = k.s;
  const double r = q.near_radius * dist;
  const double ux = u(x);

  const Rule& gj = gauss_jacobi(q.pv_order, 1.0 - 2.0 * s);
  const double scale = std::pow(r, 2.0 - 2.0 * s);
  double near = 0.0;
  for (std::size_t i = 0; i < gj.size(); ++i) {
    const double rho = r * gj.nodes[i];
    near += gj.weights[i] * (2.0 * ux - u(x + rho) - u(x - rho)) / (rho * rho);
  }
  near *= scale;

  std::vector<double> cuts(bp.begin(), bp.end());
  cuts.push_back(x - r);
  cuts.push_back(x + r);
  std::sort(cuts.begin(), cuts.end());
  double far = 0.0;
  const double e = 1.0 + 2.0 * s;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i], b = cuts[i + 1];
    if (b <= a || (a >= x - r && b <= x + r)) continue;
    // geometric sub-panels keep the |x-y|^{-1-2s} growth resolved when r is tiny
    far += integrate_away([&](double y) { return (ux - u.value(y)) * std::pow(std::abs(x - y), -e); }, x, a,
                          b, q.tolerance);
  }
  const double tails = (ux - u.exterior_left) * tail_integral(s, x, {-kInf, bp.front()}) +
                       (ux - u.exterior_right) * tail_integral(s, x, {bp.back(), kInf});
  return k.a_ns * (near + far + tails);
}

double neumann_derivative(const KernelParams& k, const FunctionView& u, const DomainPartition& p,
                          double x, const QuadratureSpec& q) {
  if (p.in_omega_closure(x)) throw DomainError("N_s needs x outside closure(omega)");
  const double ux = u(x);
  const double e = 1.0 + 2.0 * k.s;
  double acc = 0.0;
  for (const auto& I : p.omega) {
    std::vector<double> cuts{I.lo, I.hi};
    for (double b : u.breakpoints)
      if (I.contains(b)) cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
      acc += integrate_away([&](double y) { return (ux - u(y)) * std::pow(std::abs(x - y), -e); }, x,
                            cuts[i], cuts[i + 1], q.tolerance);
  }
  return k.a_ns * acc;
}

}  // namespace fracmix
