#include "fracmix/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fracmix/errors.hpp"
#include "fracmix/quadrature.hpp"

namespace fracmix {
namespace {

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

Certificate start(const std::string& name, const std::string& inputs, double tol) {
  Certificate c;
  c.name = name;
  c.inputs = inputs;
  c.digest = fnv1a(inputs);
  c.tolerance = tol;
  return c;
}

// Discrete semigroup state closest to time t.
std::size_t step_index(const Trajectory& tr, double t) {
  const long n = std::lround(t / tr.dt);
  if (n < 0 || static_cast<std::size_t>(n) >= tr.times.size()) throw ConfigError("time grid exceeds trajectory");
  return static_cast<std::size_t>(n);
}

double lp_norm(const DomainPartition& p, const std::function<double(double)>& g, double pw) {
  const Rule& r = gauss_legendre(8);
  double acc = 0.0;
  for (const auto& I : p.omega) {
    const int panels = 256;
    const double h = I.length() / panels;
    for (int k = 0; k < panels; ++k)
      for (std::size_t j = 0; j < r.size(); ++j)
        acc += r.weights[j] * h * std::pow(std::abs(g(I.lo + h * (k + r.nodes[j]))), pw);
  }
  return std::pow(acc, 1.0 / pw);
}

}  // namespace

void Certificate::set(const std::string& key, double value) {
  for (auto& kv : constants)
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  constants.emplace_back(key, value);
}

double Certificate::constant(const std::string& key) const {
  for (const auto& kv : constants)
    if (kv.first == key) return kv.second;
  throw ConfigError("certificate " + name + " has no constant " + key);
}

bool Certificate::has(const std::string& key) const {
  for (const auto& kv : constants)
    if (kv.first == key) return true;
  return false;
}

Gauges Gauges::compute(const OperatorSet& ops, double eig_tol) {
  return Gauges{solve_xi0(ops), solve_eigen(BoundaryMode::Mixed, ops, eig_tol)};
}

std::string describe_inputs(const OperatorSet& ops, const std::string& extra) {
  std::ostringstream os;
  os << "mesh=" << ops.mesh_hash << ";nodes=" << ops.mesh->n_nodes() << ";grading="
     << ops.mesh->grading().describe() << ";" << ops.mesh->partition().describe() << ";" << extra;
  return os.str();
}

Eigen::VectorXd interpolate_on(const Mesh& m, const std::function<double(double)>& f,
                               const std::vector<std::size_t>& dofs) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(static_cast<long>(m.n_active()));
  for (auto d : dofs) c(static_cast<long>(d)) = f(m.x(m.active_nodes()[d]));
  return c;
}

double hardy_weighted_integral(const Mesh& m, const Eigen::VectorXd& coeffs) {
  const double s = m.s();
  const double e = -2.0 * s;
  const Rule& gl = gauss_legendre(20);
  auto value = [&](std::size_t node) {
    const long d = m.dof(node);
    return d < 0 ? 0.0 : coeffs(d);
  };
  // int_{d0}^{d1} d^{k+e}
  auto moment = [&](int k, double d0, double d1) {
    const double p = k + 1 + e;
    if (p == 0.0) return std::log(d1 / d0);
    return (std::pow(d1, p) - (d0 > 0.0 ? std::pow(d0, p) : 0.0)) / p;
  };
  double acc = 0.0;
  for (const auto& el : m.elements()) {
    if (el.region != Region::Omega) continue;
    const double xl = m.x(el.left), xr = m.x(el.right);
    const double ul = value(el.left), ur = value(el.right);
    const Interval* comp = nullptr;
    for (const auto& I : m.partition().omega)
      if (I.contains_closed(0.5 * (xl + xr))) comp = &I;
    const double mid = 0.5 * (comp->lo + comp->hi);
    std::vector<std::pair<double, double>> pieces;
    if (xl < mid && mid < xr)
      pieces = {{xl, mid}, {mid, xr}};
    else
      pieces = {{xl, xr}};
    for (const auto& [a, b] : pieces) {
      const bool left_half = 0.5 * (a + b) <= mid;
      const double end = left_half ? comp->lo : comp->hi;
      const double da = std::abs(a - end), db = std::abs(b - end);
      const double d0 = std::min(da, db), d1 = std::max(da, db);
      auto phi_at = [&](double d) {
        const double x = left_half ? end + d : end - d;
        if (x == xl) return ul;
        if (x == xr) return ur;
        return ul + (ur - ul) * (x - xl) / (xr - xl);
      };
      if (d0 < d1 - d0) {
        // phi = alpha + beta d near the endpoint; exact moments
        const double alpha = phi_at(0.0), beta = phi_at(1.0) - alpha;
        if (d0 == 0.0 && alpha != 0.0 && e <= -1.0) return kInf;
        // skip vanishing coefficients so 0 * inf never enters
        if (alpha != 0.0) acc += alpha * alpha * moment(0, d0, d1) + 2.0 * alpha * beta * moment(1, d0, d1);
        if (beta != 0.0) acc += beta * beta * moment(2, d0, d1);
      } else {
        const double w = d1 - d0;
        for (std::size_t k = 0; k < gl.size(); ++k) {
          const double d = d0 + w * gl.nodes[k];
          const double v = phi_at(d);
          acc += gl.weights[k] * w * v * v * std::pow(d, e);
        }
      }
    }
  }
  return acc;
}

double delta_moment(const DomainPartition& p, const std::function<double(double)>& f,
                    const std::vector<double>& kinks) {
  double acc = 0.0;
  for (const auto& I : p.omega) {
    const double mid = 0.5 * (I.lo + I.hi);
    std::vector<double> cuts{I.lo, mid, I.hi};
    for (double k : kinks)
      if (I.contains(k)) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
      const bool left = cuts[i + 1] <= mid;
      acc += integrate([&](double x) { return f(x) * std::pow(left ? x - I.lo : I.hi - x, p.s); }, cuts[i],
                       cuts[i + 1], 1e-12);
    }
  }
  return acc;
}

Certificate certify_poincare(const OperatorSet& ops, const Gauges& g, const FunctionFamily& samples) {
  Certificate c = start("poincare", describe_inputs(ops, "family=" + samples.describe()), 1e-10);
  const Mesh& m = *ops.mesh;
  const double lambda = g.chi.lambda1;
  std::vector<std::size_t> all(m.n_active());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  double min_q = std::numeric_limits<double>::infinity();
  bool ok = lambda > 0.0;
  for (const auto& f : samples.members) {
    const Eigen::VectorXd phi = interpolate_on(m, f, all);
    if (phi.isZero(0.0)) continue;  // misses every node of this mesh
    const double q = phi.dot(ops.A * phi) / phi.dot(ops.M_omega * phi);
    min_q = std::min(min_q, q);
    if (!(q >= lambda * (1.0 - c.tolerance))) ok = false;
  }
  const Eigen::VectorXd& chi = g.chi.chi.coeffs();
  const double qchi = chi.dot(ops.A * chi) / chi.dot(ops.M_omega * chi);
  const double gap = std::abs(qchi - lambda) / lambda;
  if (!(gap < 1e-8)) ok = false;
  c.set("lambda1", lambda);
  c.set("lambda1_unnormalized", 2.0 * lambda / ops.kernel.a_ns);
  c.set("poincare_constant", 1.0 / lambda);
  c.set("min_sample_quotient", min_q);
  c.set("eigenfunction_quotient_gap", gap);
  c.set("eigen_residual", g.chi.residual);
  c.pass = ok;
  c.notes = "unnormalized lambda refers to the double integral without a_ns/2";
  return c;
}

Certificate certify_hardy(const OperatorSet& ops, const FunctionFamily& samples) {
  Certificate c = start("hardy", describe_inputs(ops, "family=" + samples.describe()), 1e-12);
  const Mesh& m = *ops.mesh;
  const auto D = m.dirichlet_dofs();
  const double scale = 2.0 / ops.kernel.a_ns;
  std::vector<std::function<double(double)>> fs = samples.members;
  const auto omega = m.partition().omega;
  fs.push_back([omega](double x) {
    for (const auto& I : omega)
      if (I.contains_closed(x)) return 4.0 * (x - I.lo) * (I.hi - x) / (I.length() * I.length());
    return 0.0;
  });
  double sup = 0.0, homog = 0.0;
  for (const auto& f : fs) {
    const Eigen::VectorXd phi = interpolate_on(m, f, D);
    if (phi.isZero(0.0)) continue;  // misses every node of this mesh
    const double lhs = hardy_weighted_integral(m, phi);
    const double semi = scale * phi.dot(ops.A * phi);
    const double ratio = lhs / semi;
    const Eigen::VectorXd phi2 = 2.0 * phi;
    const double ratio2 = hardy_weighted_integral(m, phi2) / (scale * phi2.dot(ops.A * phi2));
    homog = std::max(homog, std::abs(ratio2 - ratio) / ratio);
    sup = std::max(sup, ratio);
  }
  c.set("hardy_sup", sup);
  c.set("hardy_sup_with_a", sup * scale);
  c.set("homogeneity_defect", homog);
  c.pass = std::isfinite(sup) && sup > 0.0 && homog < c.tolerance;
  c.notes = "ratio int phi^2 delta^{-2s} / [phi]^2 with the unnormalized seminorm";
  return c;
}

Certificate certify_weighted_sobolev(const OperatorSet& ops, const Field& u, const FunctionFamily& samples,
                                     double r, double r_ceiling) {
  const Mesh& m = *ops.mesh;
  const double s = m.s();
  if (r < 0.0) throw DomainError("weighted Sobolev exponent r must be nonnegative");
  if (r > 0.0) {
    const double limit = s < 0.5 ? 2.0 / (1.0 - 2.0 * s) : r_ceiling;
    if (r > limit) throw DomainError("r = " + num(r) + " exceeds the admissible bound " + num(limit));
  }
  const double q = 2.0 * (1.0 + r * s);
  Certificate c = start("weighted_sobolev",
                        describe_inputs(ops, "r=" + num(r) + ";family=" + samples.describe()), 1e-12);
  const Eigen::MatrixXd W = assemble_weighted_form(u, ops.quad);
  const Rule& gl = gauss_legendre(8);
  auto uval = [&](std::size_t node) { return u.node_value(node); };
  auto sides = [&](const Eigen::VectorXd& phi) {
    double lhs = 0.0, mass = 0.0;
    for (const auto& el : m.elements()) {
      if (el.region != Region::Omega) continue;
      const double h = m.length(el);
      const long dl = m.dof(el.left), dr = m.dof(el.right);
      const double pl = dl < 0 ? 0.0 : phi(dl), pr = dr < 0 ? 0.0 : phi(dr);
      const double ul = uval(el.left), ur = uval(el.right);
      for (std::size_t k = 0; k < gl.size(); ++k) {
        const double t = gl.nodes[k];
        const double pv = (1 - t) * pl + t * pr, uv = std::max(0.0, (1 - t) * ul + t * ur);
        lhs += gl.weights[k] * h * std::pow(uv, r) * std::pow(std::abs(pv), q);
        mass += gl.weights[k] * h * uv * uv * pv * pv;
      }
    }
    return std::make_pair(std::pow(lhs, 1.0 / q), std::sqrt(phi.dot(W * phi) + mass));
  };
  std::vector<std::size_t> all(m.n_active());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  std::vector<Eigen::VectorXd> phis;
  for (const auto& f : samples.members) {
    Eigen::VectorXd phi = interpolate_on(m, f, all);
    if (!phi.isZero(0.0)) phis.push_back(std::move(phi));
  }
  phis.push_back(Eigen::VectorXd::Ones(static_cast<long>(m.n_active())));
  double sup = 0.0, homog = 0.0, const_ratio = 0.0;
  for (std::size_t i = 0; i < phis.size(); ++i) {
    const auto [l1, r1] = sides(phis[i]);
    const auto [l2, r2] = sides(3.0 * phis[i]);
    const double ratio = l1 / r1, ratio2 = l2 / r2;
    homog = std::max(homog, std::abs(ratio2 - ratio) / ratio);
    sup = std::max(sup, ratio);
    if (i + 1 == phis.size()) const_ratio = ratio;
  }
  c.set("r", r);
  c.set("q", q);
  c.set("sobolev_sup", sup);
  c.set("constant_member_ratio", const_ratio);
  c.set("homogeneity_defect", homog);
  c.pass = std::isfinite(sup) && sup > 0.0 && homog < c.tolerance;
  c.notes = "u is the mixed torsion function; both sides without a_ns";
  return c;
}

Certificate certify_linfty_ratio(const OperatorSet& ops, const Gauges& g, const FunctionFamily& g_family,
                                 double p) {
  const Mesh& m = *ops.mesh;
  if (!(p > 1.0 / m.s())) throw DomainError("the L^p exponent must exceed 1/s");
  Certificate c = start("linfty_ratio",
                        describe_inputs(ops, "p=" + num(p) + ";family=" + g_family.describe()), 1e-10);
  const EllipticSolver solver(ops, BoundaryMode::Mixed);
  const Eigen::VectorXd& u = g.xi0.coeffs();
  const auto D = m.dirichlet_dofs();
  auto ratio_of = [&](const std::function<double(double)>& gf) {
    const Field v = solver.solve(assemble_load(m, gf));
    double sup = 0.0;
    for (auto d : D) sup = std::max(sup, v.coeffs()(static_cast<long>(d)) / u(static_cast<long>(d)));
    return sup / lp_norm(m.partition(), gf, p);
  };
  double sup = 0.0, homog = 0.0;
  for (const auto& gf : g_family.members) {
    const double r1 = ratio_of(gf);
    const double r2 = ratio_of([&gf](double x) { return 2.0 * gf(x); });
    homog = std::max(homog, std::abs(r1 - r2) / r1);
    sup = std::max(sup, r1);
  }
  const auto omega = m.partition().omega;
  auto one = [omega](double x) {
    for (const auto& I : omega)
      if (I.contains_closed(x)) return 1.0;
    return 0.0;
  };
  const double self = ratio_of(one);
  const double self_expected = 1.0 / lp_norm(m.partition(), one, p);
  c.set("p", p);
  c.set("ratio_sup", sup);
  c.set("self_ratio_defect", std::abs(self - self_expected) / self_expected);
  c.set("homogeneity_defect", homog);
  c.pass = std::isfinite(sup) && sup > 0.0 && homog < c.tolerance &&
           c.constant("self_ratio_defect") < 1e-8;
  c.notes = "u is the solution for f = 1; v/u over nodes strictly inside omega";
  return c;
}

Certificate certify_elliptic_hopf(const OperatorSet& ops, const Gauges& g, const FunctionFamily& f_family) {
  Certificate c = start("elliptic_hopf", describe_inputs(ops, "family=" + f_family.describe()), 1e-10);
  const Mesh& m = *ops.mesh;
  const EllipticSolver solver(ops, BoundaryMode::Mixed);
  const Eigen::VectorXd& xi = g.xi0.coeffs();
  const auto D = m.dirichlet_dofs();
  auto c_emp = [&](const std::function<double(double)>& f) {
    const LoadVector F = assemble_load(m, f);
    const Field u = solver.solve(F);
    const double norm = F.values.dot(xi);
    double mn = std::numeric_limits<double>::infinity();
    for (auto d : D) mn = std::min(mn, u.coeffs()(static_cast<long>(d)) / (xi(static_cast<long>(d)) * norm));
    return mn;
  };
  double mn = std::numeric_limits<double>::infinity(), scale_defect = 0.0;
  for (const auto& f : f_family.members) {
    const double v = c_emp(f);
    const double v2 = c_emp([&f](double x) { return 2.0 * f(x); });
    scale_defect = std::max(scale_defect, std::abs(v2 - v) / std::abs(v));
    mn = std::min(mn, v);
  }
  const double c_one = c_emp([](double) { return 1.0; });
  const double int_xi = assemble_load(m, [](double) { return 1.0; }).values.dot(xi);
  const double identity = std::abs(c_one - 1.0 / int_xi) * int_xi;
  c.set("c_emp_min", mn);
  c.set("c_emp_min_unnormalized", mn / ops.kernel.a_ns);
  c.set("c_emp_constant_source", c_one);
  c.set("inverse_integral_xi0", 1.0 / int_xi);
  c.set("constant_source_identity_defect", identity);
  c.set("scaling_defect", scale_defect);
  c.pass = mn > 0.0 && std::isfinite(mn) && identity < c.tolerance && scale_defect < 1e-10;
  c.notes = "min over nodes strictly inside omega of u / (xi0 int f xi0)";
  return c;
}

Certificate certify_eigen_comparison(const OperatorSet& ops, const Gauges& g) {
  Certificate c = start("eigen_comparison", describe_inputs(ops, "lambda1=" + num(g.chi.lambda1)), 0.0);
  const Mesh& m = *ops.mesh;
  const Eigen::VectorXd& xi = g.xi0.coeffs();
  const Eigen::VectorXd& chi = g.chi.chi.coeffs();
  double up = 0.0, down = 0.0;
  for (auto d : m.dirichlet_dofs()) {
    const long i = static_cast<long>(d);
    up = std::max(up, chi(i) / xi(i));
    down = std::max(down, xi(i) / chi(i));
  }
  const double cross = chi.dot(ops.M_omega * xi);
  const double floor = cross / std::max(xi.dot(ops.M_omega * xi), chi.dot(ops.M_omega * chi));
  c.set("C_up", up);
  c.set("C_down", down);
  c.set("C", std::max(up, down));
  c.set("C_up_unnormalized", up * ops.kernel.a_ns);
  c.set("C_down_unnormalized", down / ops.kernel.a_ns);
  c.set("product", up * down);
  c.set("crude_floor", floor);
  c.pass = std::isfinite(up) && std::isfinite(down) && up > 0.0 && down > 0.0 && up * down >= 1.0 - 1e-12;
  c.notes = "ratios over nodes strictly inside omega; chi has unit L2(omega) norm";
  return c;
}

Certificate certify_parabolic_hopf(const OperatorSet& ops, const Gauges& g, const FunctionFamily& u0_family,
                                   const ParabolicSetup& setup) {
  const Mesh& m = *ops.mesh;
  const double lambda = g.chi.lambda1;
  const double dt = setup.dt_factor / lambda;
  Certificate c = start("parabolic_hopf",
                        describe_inputs(ops, "family=" + u0_family.describe() + ";stepper=" +
                                                 setup.stepper.describe() + ";dt=" + num(dt)),
                        0.0);
  const Eigen::VectorXd& xi = g.xi0.coeffs();
  const auto D = m.dirichlet_dofs();
  const double t_end = setup.t_grid.back() / lambda;
  const double gamma = 2.0 * m.s() / (1.0 + 2.0 * m.s());
  bool ok = true;
  double mn = std::numeric_limits<double>::infinity(), slope_acc = 0.0;
  std::vector<double> per_time(setup.t_grid.size(), std::numeric_limits<double>::infinity());
  for (const auto& f : u0_family.members) {
    const Field u0(ops.mesh, interpolate_on(m, f, m.omega_dofs()));
    if (u0.coeffs().isZero(0.0)) continue;  // misses every node of this mesh
    const double norm = u0.coeffs().dot(ops.M_omega * xi);
    const Trajectory tr = solve_parabolic(ops, u0, t_end, dt, setup.stepper);
    std::vector<double> logt, logc;
    for (std::size_t k = 0; k < setup.t_grid.size(); ++k) {
      const double t = setup.t_grid[k] / lambda;
      const Eigen::VectorXd& u = tr.states[step_index(tr, t)].coeffs();
      double v = std::numeric_limits<double>::infinity();
      for (auto d : D) v = std::min(v, u(static_cast<long>(d)) / (xi(static_cast<long>(d)) * norm));
      per_time[k] = std::min(per_time[k], v);
      mn = std::min(mn, v);
      if (!(v > 0.0)) ok = false;
      if (k < 3 && v > 0.0) {
        logt.push_back(std::log(t));
        logc.push_back(std::log(v) + lambda * t);
      }
    }
    if (logt.size() >= 2) {
      double mt = 0, mc = 0;
      for (std::size_t i = 0; i < logt.size(); ++i) mt += logt[i], mc += logc[i];
      mt /= logt.size();
      mc /= logc.size();
      double num_ = 0, den = 0;
      for (std::size_t i = 0; i < logt.size(); ++i) num_ += (logt[i] - mt) * (logc[i] - mc), den += (logt[i] - mt) * (logt[i] - mt);
      slope_acc += num_ / den;
    }
  }
  // u0 = chi under the stepper's own mass is an exact discrete mode: min u/xi = decay / C_down
  {
    const EigenPair ep = g.chi.mass == setup.stepper.mass ? g.chi
                                                           : solve_eigen(BoundaryMode::Mixed, ops, 1e-13, setup.stepper.mass);
    const Trajectory tr = solve_parabolic(ops, ep.chi, t_end, dt, setup.stepper);
    const Eigen::VectorXd& chi = ep.chi.coeffs();
    const double norm = chi.dot(ops.M_omega * xi);
    double down = 0.0;
    for (auto d : D) down = std::max(down, xi(static_cast<long>(d)) / chi(static_cast<long>(d)));
    double defect = 0.0;
    for (double tg : setup.t_grid) {
      const std::size_t n = step_index(tr, tg / lambda);
      const Eigen::VectorXd& u = tr.states[n].coeffs();
      double v = std::numeric_limits<double>::infinity(), decay = 0.0;
      for (auto d : D) {
        v = std::min(v, u(static_cast<long>(d)) / (xi(static_cast<long>(d)) * norm));
        decay += u(static_cast<long>(d)) / chi(static_cast<long>(d));
      }
      decay /= static_cast<double>(D.size());
      const double expect = decay / (down * norm);
      defect = std::max(defect, std::abs(v - expect) / expect);
    }
    c.set("eigen_start_identity_defect", defect);
  }
  for (std::size_t k = 0; k < setup.t_grid.size(); ++k)
    c.set("c_emp_t" + num(setup.t_grid[k]), per_time[k]);
  c.set("c_emp_min", mn);
  c.set("small_t_slope", slope_acc / u0_family.members.size());
  c.set("reference_exponent_1_over_2gamma", 1.0 / (2.0 * gamma));
  c.set("dt", dt);
  c.pass = ok;
  c.notes = "times in units of 1/lambda1; slope of log c_emp + lambda1 t against log t is recorded, not asserted";
  return c;
}

Certificate monitor_theta(const OperatorSet& ops, const Trajectory& u, const Trajectory& v,
                          const std::vector<int>& j_list) {
  Certificate c = start("theta_monotone",
                        describe_inputs(ops, "stepper=" + u.stepper.describe() + ";dt=" + num(u.dt)), 1e-8);
  if (u.times.size() != v.times.size()) throw ConsistencyError("trajectories use different grids");
  const auto I = ops.mesh->omega_dofs();
  bool ok = true;
  for (int j : j_list) {
    std::vector<double> theta;
    for (std::size_t n = 0; n < u.states.size(); ++n) {
      const Eigen::VectorXd& a = u.states[n].coeffs();
      const Eigen::VectorXd& b = v.states[n].coeffs();
      double acc = 0.0;
      for (auto d : I) {
        const long i = static_cast<long>(d);
        if (!(a(i) > 0.0)) throw RatioError("u vanishes at an omega node");
        acc += ops.M_lumped(i) * a(i) * a(i) * std::pow(b(i) / a(i), 2 * j);
      }
      theta.push_back(acc);
    }
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n + 1 < theta.size(); ++n) worst = std::max(worst, (theta[n + 1] - theta[n]) / theta[0]);
    if (!(worst < c.tolerance)) ok = false;
    const std::string tag = "theta" + std::to_string(2 * j);
    c.set(tag + "_initial", theta.front());
    c.set(tag + "_final", theta.back());
    c.set(tag + "_max_step_increase", worst);
  }
  c.pass = ok;
  c.notes = "v is the discrete semigroup applied to the eigenfunction; lumped Omega weights";
  return c;
}

Certificate certify_delta_lower_bounds(const OperatorSet& ops, const Gauges& g, const FunctionFamily& family,
                                       BoundMode mode, const ParabolicSetup& setup) {
  const Mesh& m = *ops.mesh;
  const auto& p = m.partition();
  const double s = m.s();
  const auto D = m.dirichlet_dofs();
  auto ds = [&](std::size_t d) { return std::pow(boundary_distance(p, m.x(m.active_nodes()[d])), s); };
  if (mode == BoundMode::Elliptic) {
    Certificate c = start("delta_elliptic", describe_inputs(ops, "family=" + family.describe()), 0.0);
    const EllipticSolver solver(ops, BoundaryMode::Mixed);
    double mn = std::numeric_limits<double>::infinity(), scale = 0.0;
    auto bound = [&](const std::function<double(double)>& f) {
      const Field u = solver.solve(assemble_load(m, f));
      const double mom = delta_moment(p, f, m.nodes());
      double v = std::numeric_limits<double>::infinity();
      for (auto d : D) v = std::min(v, u.coeffs()(static_cast<long>(d)) / (ds(d) * mom));
      return v;
    };
    for (const auto& f : family.members) {
      const double v = bound(f);
      const double v2 = bound([&f](double x) { return 3.0 * f(x); });
      scale = std::max(scale, std::abs(v2 - v) / v);
      mn = std::min(mn, v);
    }
    const auto omega = p.omega;
    const double one = bound([omega](double x) {
      for (const auto& I : omega)
        if (I.contains_closed(x)) return 1.0;
      return 0.0;
    });
    c.set("bound_min", mn);
    c.set("bound_constant_source", one);
    c.set("bound_min_unnormalized", mn * ops.kernel.a_ns);
    c.set("scaling_defect", scale);
    c.pass = mn > 0.0 && one > 0.0 && std::isfinite(mn) && scale < 1e-10;
    c.notes = "min u / (delta^s int f delta^s) over nodes strictly inside omega";
    return c;
  }
  const double lambda = g.chi.lambda1;
  const double dt = setup.dt_factor / lambda;
  Certificate c = start("delta_parabolic",
                        describe_inputs(ops, "family=" + family.describe() + ";stepper=" +
                                                 setup.stepper.describe() + ";dt=" + num(dt)),
                        0.0);
  const double t_end = setup.t_grid.back() / lambda;
  std::vector<std::function<double(double)>> data = family.members;
  const Field chi = g.chi.chi;
  data.push_back([&chi](double x) { return chi(x); });
  double mn = std::numeric_limits<double>::infinity(), chi_min = mn;
  for (std::size_t k = 0; k < data.size(); ++k) {
    const Field u0 = k + 1 == data.size() ? chi : Field(ops.mesh, interpolate_on(m, data[k], m.omega_dofs()));
    if (u0.coeffs().isZero(0.0)) continue;  // misses every node of this mesh
    const double mom = delta_moment(p, data[k], m.nodes());
    const Trajectory tr = solve_parabolic(ops, u0, t_end, dt, setup.stepper);
    for (double tg : setup.t_grid) {
      const Eigen::VectorXd& u = tr.states[step_index(tr, tg / lambda)].coeffs();
      double v = std::numeric_limits<double>::infinity();
      for (auto d : D) v = std::min(v, u(static_cast<long>(d)) / (ds(d) * mom));
      mn = std::min(mn, v);
      if (k + 1 == data.size()) chi_min = std::min(chi_min, v);
    }
  }
  c.set("bound_min", mn);
  c.set("bound_min_eigen_start", chi_min);
  c.pass = mn > 0.0 && std::isfinite(mn);
  c.notes = "min over the time grid of u(t) / (delta^s int u0 delta^s)";
  return c;
}

Certificate certify_dirichlet_delta(const OperatorSet& ops) {
  const Mesh& m = *ops.mesh;
  const EigenPair ep = solve_eigen(BoundaryMode::Dirichlet, ops);
  Certificate c = start("dirichlet_delta", describe_inputs(ops, "lambda1_dir=" + num(ep.lambda1)), 0.0);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (auto d : m.dirichlet_dofs()) {
    const double x = m.x(m.active_nodes()[d]);
    const double r = ep.chi.coeffs()(static_cast<long>(d)) / std::pow(boundary_distance(m.partition(), x), m.s());
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  c.set("lambda1_dirichlet", ep.lambda1);
  c.set("ratio_min", lo);
  c.set("ratio_max", hi);
  c.set("eigen_residual", ep.residual);
  c.pass = lo > 0.0 && std::isfinite(hi);
  c.notes = "chi_1/delta^s for the Dirichlet eigenfunction over nodes strictly inside omega";
  return c;
}

Certificate certify_comparison(const OperatorSet& ops, const FunctionFamily& f_family) {
  Certificate c = start("comparison", describe_inputs(ops, "family=" + f_family.describe()), 1e-10);
  const Mesh& m = *ops.mesh;
  const EllipticSolver mixed(ops, BoundaryMode::Mixed), dir(ops, BoundaryMode::Dirichlet);
  double min_diff = std::numeric_limits<double>::infinity(), min_u = min_diff;
  for (const auto& f : f_family.members) {
    const LoadVector F = assemble_load(m, f);
    const Eigen::VectorXd um = mixed.solve(F).coeffs();
    const Eigen::VectorXd ud = dir.solve(F).coeffs();
    const double scale = um.cwiseAbs().maxCoeff();
    min_diff = std::min(min_diff, (um - ud).minCoeff() / scale);
    min_u = std::min(min_u, um.minCoeff() / scale);
  }
  c.set("min_mixed_minus_dirichlet", min_diff);
  c.set("min_mixed", min_u);
  c.pass = min_diff >= -c.tolerance && min_u >= -c.tolerance;
  c.notes = "values scaled by the sup norm of the mixed solution, all active nodes";
  return c;
}

Certificate certify_parabolic_positivity(const OperatorSet& ops, const Gauges& g,
                                         const FunctionFamily& u0_family, const ParabolicSetup& setup) {
  const Mesh& m = *ops.mesh;
  const double lambda = g.chi.lambda1;
  const double dt = setup.dt_factor / lambda;
  Certificate c = start("parabolic_positivity",
                        describe_inputs(ops, "family=" + u0_family.describe() + ";stepper=" +
                                                 setup.stepper.describe() + ";dt=" + num(dt)),
                        1e-10);
  double worst = std::numeric_limits<double>::infinity(), growth = -std::numeric_limits<double>::infinity();
  for (const auto& f : u0_family.members) {
    const Field u0(ops.mesh, interpolate_on(m, f, m.omega_dofs()));
    if (u0.coeffs().isZero(0.0)) continue;  // misses every node of this mesh
    const double scale = u0.coeffs().cwiseAbs().maxCoeff();
    const Trajectory tr = solve_parabolic(ops, u0, setup.t_grid.back() / lambda, dt, setup.stepper);
    for (const auto& st : tr.states) worst = std::min(worst, st.coeffs().minCoeff() / scale);
    for (std::size_t n = 1; n < tr.l2.size(); ++n) growth = std::max(growth, (tr.l2[n] - tr.l2[n - 1]) / tr.l2[0]);
  }
  c.set("min_value_scaled", worst);
  c.set("max_l2_step_change", growth);
  c.pass = worst >= -c.tolerance && growth < 0.0;
  c.notes = "L2 norm under the stepper mass must strictly decrease each step";
  return c;
}

Certificate certify_walker(const OperatorSet& ops, const std::vector<Eigen::VectorXd>& bin_payoffs,
                           const std::vector<double>& starts, const WalkerSetup& setup) {
  const Mesh& m = *ops.mesh;
  const JumpChain chain = build_chain(m, ops.kernel, setup.window, setup.n_bins);
  std::ostringstream extra;
  extra << "window=" << num(setup.window) << ";bins=" << setup.n_bins << ";walkers=" << setup.n_walkers
        << ";seed=" << setup.seed << ";payoffs=" << bin_payoffs.size();
  Certificate c = start("walker", describe_inputs(ops, extra.str()), 3.0);
  const EllipticSolver solver(ops, BoundaryMode::Mixed);
  bool ok = true;
  double worst_sigma = 0.0, worst_gap = 0.0, row_defect = 0.0;
  for (long i = 0; i < chain.P_oo.rows(); ++i)
    row_defect = std::max(row_defect, std::abs(chain.P_oo.row(i).sum() + chain.P_os.row(i).sum() +
                                               chain.P_oa.row(i).sum() - 1.0));
  for (long e = 0; e < chain.R_so.rows(); ++e)
    row_defect = std::max(row_defect, std::abs(chain.R_so.row(e).sum() + chain.R_sa.row(e).sum() - 1.0));
  std::uint64_t seed = setup.seed;
  for (std::size_t k = 0; k < bin_payoffs.size(); ++k) {
    const Eigen::VectorXd dense = solve_chain(chain, bin_payoffs[k]);
    Sigma1Data h{chain.bins, std::vector<double>(bin_payoffs[k].data(), bin_payoffs[k].data() + bin_payoffs[k].size())};
    const LoadVector zero{Eigen::VectorXd::Zero(static_cast<long>(m.n_active())), "f=0"};
    const Field gal = solver.solve(dirichlet_lift(ops, zero, h));
    for (double x : starts) {
      long st = -1;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < chain.omega_x.size(); ++i)
        if (std::abs(chain.omega_x[i] - x) < best) best = std::abs(chain.omega_x[i] - x), st = static_cast<long>(i);
      const WalkEstimate est = estimate_payoff(chain, static_cast<std::size_t>(st), bin_payoffs[k], setup.n_walkers,
                                               seed = splitmix64(seed));
      const double diff = std::abs(est.estimate - dense(st));
      const double sig = est.std_error > 0.0 ? diff / est.std_error : (diff < 1e-12 ? 0.0 : kInf);
      worst_sigma = std::max(worst_sigma, sig);
      if (!(sig <= 3.0)) ok = false;
      worst_gap = std::max(worst_gap, std::abs(dense(st) - gal(chain.omega_x[static_cast<std::size_t>(st)])));
    }
  }
  c.set("max_deviation_in_std_errors", worst_sigma);
  c.set("row_sum_defect", row_defect);
  c.set("galerkin_gap", worst_gap);
  c.pass = ok && row_defect < 1e-12;
  c.notes = "Monte Carlo against the dense chain solve; Galerkin gap recorded only";
  return c;
}

Certificate refine_stable(const std::vector<Certificate>& per_mesh, const std::string& key, double max_drift) {
  if (per_mesh.size() < 2) throw ConfigError("refinement check needs at least two meshes");
  const Certificate& fine = per_mesh.back();
  const Certificate& mid = per_mesh[per_mesh.size() - 2];
  std::string inputs;
  for (const auto& c : per_mesh) inputs += c.inputs + "|";
  Certificate c = start(fine.name + "_refinement:" + key, inputs, max_drift);
  const double a = mid.constant(key), b = fine.constant(key);
  const double drift = std::abs(b - a) / std::max(std::abs(b), std::numeric_limits<double>::min());
  bool all = true;
  for (std::size_t i = 0; i < per_mesh.size(); ++i) {
    c.set(key + "_mesh" + std::to_string(i), per_mesh[i].constant(key));
    all = all && per_mesh[i].pass;
  }
  c.set("drift", drift);
  c.pass = all && std::isfinite(drift) && drift < max_drift;
  c.notes = "relative change between the two finest meshes";
  return c;
}

GreenCheck green_identity(const KernelParams& k, const DomainPartition& p, const FunctionView& u,
                          const FunctionView& phi, const QuadratureSpec& q) {
  const double s = k.s;
  const double e = -1.0 - 2.0 * s;
  const double tol = 1e-10;
  GreenCheck g;
  double form = 0.0;
  // Omega x Omega, both orders
  for (std::size_t a = 0; a < p.omega.size(); ++a)
    for (std::size_t b = a; b < p.omega.size(); ++b) {
      const Interval I = p.omega[a], J = p.omega[b];
      if (a == b) {
        // smooth in x for fixed rho; adaptive error estimates are unreliable on short ranges
        auto inner = [&](double rho) {
          const Rule& gl = gauss_legendre(20);
          const double len = I.hi - rho - I.lo;
          double acc = 0.0;
          for (int panel = 0; panel < 4; ++panel)
            for (std::size_t i = 0; i < gl.size(); ++i) {
              const double x = I.lo + len * (panel + gl.nodes[i]) / 4.0;
              acc += len / 4.0 * gl.weights[i] * (u(x + rho) - u(x)) * (phi(x + rho) - phi(x));
            }
          return acc;
        };
        // below rho0 the differences are rounding dominated; inner ~ rho^2 there
        const double rho0 = 1e-5 * I.length();
        const double head = inner(rho0) * std::pow(rho0, 1.0 + e) / (3.0 + e);
        form += k.a_ns * (head + integrate([&](double rho) { return inner(rho) * std::pow(rho, e); }, rho0,
                                           I.length(), tol));
      } else {
        form += k.a_ns * integrate(
                             [&](double x) {
                               return integrate(
                                   [&](double y) {
                                     return (u(x) - u(y)) * (phi(x) - phi(y)) * std::pow(std::abs(x - y), e);
                                   },
                                   J.lo, J.hi, tol);
                             },
                             I.lo, I.hi, tol);
      }
    }
  // Omega x Sigma2, both orders
  for (const auto& I : p.omega)
    for (const auto& J : p.sigma2)
      form += k.a_ns * integrate(
                           [&](double x) {
                             return integrate(
                                 [&](double y) {
                                   return (u(x) - u(y)) * (phi(x) - phi(y)) * std::pow(std::abs(x - y), e);
                                 },
                                 J.lo, J.hi, tol);
                           },
                           I.lo, I.hi, tol);
  // Omega x Sigma1, where u = phi = 0
  for (const auto& I : p.omega)
    form += k.a_ns * integrate([&](double x) {
                                 const double up = u(x) * phi(x);
                                 return up == 0.0 ? 0.0 : up * sigma1_kill(p, x);
                               }, I.lo, I.hi, tol);
  g.form = form;

  // Stop short of the breakpoints of u, where phi vanishes quadratically and the
  // evaluators run out of floating point resolution.
  auto trimmed = [&](const Interval& I) {
    const double eps = 1e-6 * I.length();
    Interval J = I;
    for (double b : u.breakpoints) {
      if (std::abs(b - I.lo) < 1e-12) J.lo += eps;
      if (std::abs(b - I.hi) < 1e-12) J.hi -= eps;
    }
    return J;
  };
  for (const auto& I0 : p.omega) {
    const Interval I = trimmed(I0);
    g.interior += integrate(
        [&](double x) {
          const double ph = phi(x);
          return ph == 0.0 ? 0.0 : ph * pv_fractional_laplacian(k, u, x, q);
        },
        I.lo, I.hi, tol);
  }
  for (const auto& J0 : p.sigma2) {
    const Interval J = trimmed(J0);
    g.exterior += integrate(
        [&](double x) {
          const double ph = phi(x);
          // abscissae rounded onto the interface carry no weight
          return ph == 0.0 || p.in_omega_closure(x) ? 0.0 : ph * neumann_derivative(k, u, p, x, q);
        },
        J.lo, J.hi, tol);
  }
  g.rel_error = std::abs(g.form - g.interior - g.exterior) / std::abs(g.form);
  return g;
}

}  // namespace fracmix
