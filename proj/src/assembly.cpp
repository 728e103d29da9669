#include "fracmix/assembly.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <iomanip>

#include "fracmix/errors.hpp"
#include "fracmix/quadrature.hpp"

namespace fracmix {
namespace {

using Local = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

struct Span {
  double lo, hi;
  double len() const { return hi - lo; }
};

// Linear function a + b x; used for hats and for the weight u restricted to an element.
struct Lin {
  double a = 1.0, b = 0.0;
  double operator()(double x) const { return a + b * x; }
};

Lin hat_left(double xl, double xr) { return {xr / (xr - xl), -1.0 / (xr - xl)}; }
Lin hat_right(double xl, double xr) { return {-xl / (xr - xl), 1.0 / (xr - xl)}; }

// Integrates D D^T w(x,y) |x-y|^{-1-2s} over K x L where D_a(x,y) = psi_a(x) - psi_a(y),
// the psi being the hats of K (x side) and L (y side) merged on shared nodes.
class PairIntegrator {
 public:
  PairIntegrator(double s, const QuadratureSpec& q) : s_(s), q_(q) {}

  // slot_of maps the four hats (K left, K right, L left, L right) into merged slots.
  Local integrate(Span K, Span L, std::array<int, 4> slot_of, bool identical,
                  const Lin* wK = nullptr, const Lin* wL = nullptr) {
    K_ = K;
    L_ = L;
    slot_ = slot_of;
    wK_ = wK;
    wL_ = wL;
    hK_[0] = hat_left(K.lo, K.hi);
    hK_[1] = hat_right(K.lo, K.hi);
    hL_[0] = hat_left(L.lo, L.hi);
    hL_[1] = hat_right(L.lo, L.hi);
    Local acc = Local::Zero();
    if (identical)
      same(acc);
    else
      sub(K, L, 0, acc);
    return acc;
  }

 private:
  Vec4 D(double x, double y) const {
    Vec4 d = Vec4::Zero();
    d(slot_[0]) += hK_[0](x);
    d(slot_[1]) += hK_[1](x);
    d(slot_[2]) -= hL_[0](y);
    d(slot_[3]) -= hL_[1](y);
    return d;
  }
  double W(double x, double y) const {
    if (!wK_) return 1.0;
    return (*wK_)(x) * (*wL_)(y);
  }

  void same(Local& acc) const {
    const double h = K_.len();
    Vec4 g = Vec4::Zero();
    g(slot_[0]) += -1.0 / h;
    g(slot_[1]) += 1.0 / h;
    double m;
    if (!wK_) {
      m = 2.0 * std::pow(h, 3.0 - 2.0 * s_) / ((2.0 - 2.0 * s_) * (3.0 - 2.0 * s_));
    } else {
      const Rule& gr = gauss_jacobi(6, 1.0 - 2.0 * s_);
      const Rule& gt = gauss_legendre(6);
      double sum = 0.0;
      for (std::size_t i = 0; i < gr.size(); ++i) {
        const double rho = gr.nodes[i];
        double inner = 0.0;
        for (std::size_t j = 0; j < gt.size(); ++j) {
          const double eta = (1.0 - rho) * gt.nodes[j];
          const double x = K_.lo + h * (eta + rho), y = K_.lo + h * eta;
          inner += gt.weights[j] * 0.5 * (W(x, y) + W(y, x));
        }
        sum += gr.weights[i] * (1.0 - rho) * inner;
      }
      m = 2.0 * std::pow(h, 3.0 - 2.0 * s_) * sum;
    }
    acc += m * g * g.transpose();
  }

  void sub(Span X, Span Y, int depth, Local& acc) const {
    double gap;
    if (X.hi <= Y.lo)
      gap = Y.lo - X.hi;
    else if (Y.hi <= X.lo)
      gap = X.lo - Y.hi;
    else
      throw QuadratureError("overlapping element pair");
    const double hx = X.len(), hy = Y.len();
    if (gap == 0.0) {
      const double small = std::min(hx, hy);
      if (std::max(hx, hy) > 2.0 * small && depth < q_.refinement_cap) {
        const bool split_x = hx > hy;
        Span B = split_x ? X : Y;
        const Span other = split_x ? Y : X;
        Span near, far;
        if (B.lo == other.hi) {
          near = {B.lo, B.lo + small};
          far = {B.lo + small, B.hi};
        } else {
          near = {B.hi - small, B.hi};
          far = {B.lo, B.hi - small};
        }
        if (split_x) {
          sub(near, Y, depth + 1, acc);
          sub(far, Y, depth + 1, acc);
        } else {
          sub(X, near, depth + 1, acc);
          sub(X, far, depth + 1, acc);
        }
        return;
      }
      touching(X, Y, acc);
      return;
    }
    if (gap >= q_.admissibility * std::max(hx, hy) || depth >= q_.refinement_cap) {
      tensor(X, Y, acc);
      return;
    }
    if (hx >= hy) {
      const double m = 0.5 * (X.lo + X.hi);
      sub({X.lo, m}, Y, depth + 1, acc);
      sub({m, X.hi}, Y, depth + 1, acc);
    } else {
      const double m = 0.5 * (Y.lo + Y.hi);
      sub(X, {Y.lo, m}, depth + 1, acc);
      sub(X, {m, Y.hi}, depth + 1, acc);
    }
  }

  void tensor(Span X, Span Y, Local& acc) const {
    const Rule& g = gauss_legendre(q_.gauss_order);
    const double e = -1.0 - 2.0 * s_;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double x = X.lo + X.len() * g.nodes[i];
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double y = Y.lo + Y.len() * g.nodes[j];
        const double w = g.weights[i] * g.weights[j] * X.len() * Y.len() * W(x, y) *
                         std::pow(std::abs(x - y), e);
        const Vec4 d = D(x, y);
        acc.noalias() += w * d * d.transpose();
      }
    }
  }

  // X and Y share one endpoint c; D vanishes at (c,c) and is linear, so after the
  // Duffy split the radial factor is t^{2-2s}.
  void touching(Span X, Span Y, Local& acc) const {
    const double c = (X.hi == Y.lo) ? X.hi : X.lo;
    const double sx = (X.lo == c) ? 1.0 : -1.0;
    const double sy = (Y.lo == c) ? 1.0 : -1.0;
    const double hx = X.len(), hy = Y.len();
    const double e = -1.0 - 2.0 * s_;
    const Rule& gw = gauss_legendre(q_.singular_order);
    const Rule& gt = gauss_jacobi(4, 2.0 - 2.0 * s_);
    const double t_exact = 1.0 / (3.0 - 2.0 * s_);
    for (std::size_t k = 0; k < gw.size(); ++k) {
      const double w = gw.nodes[k];
      // triangle u >= v: u = hx t, v = hy t w
      {
        const double x1 = c + sx * hx, y1 = c + sy * hy * w;
        const Vec4 d = D(x1, y1);
        double radial;
        if (!wK_) {
          radial = t_exact;
        } else {
          radial = 0.0;
          for (std::size_t j = 0; j < gt.size(); ++j) {
            const double t = gt.nodes[j];
            radial += gt.weights[j] * W(c + sx * hx * t, c + sy * hy * t * w);
          }
        }
        const double f = gw.weights[k] * hx * hy * std::pow(hx + hy * w, e) * radial;
        acc.noalias() += f * d * d.transpose();
      }
      // triangle v >= u: v = hy t, u = hx t w
      {
        const double x1 = c + sx * hx * w, y1 = c + sy * hy;
        const Vec4 d = D(x1, y1);
        double radial;
        if (!wK_) {
          radial = t_exact;
        } else {
          radial = 0.0;
          for (std::size_t j = 0; j < gt.size(); ++j) {
            const double t = gt.nodes[j];
            radial += gt.weights[j] * W(c + sx * hx * t * w, c + sy * hy * t);
          }
        }
        const double f = gw.weights[k] * hx * hy * std::pow(hx * w + hy, e) * radial;
        acc.noalias() += f * d * d.transpose();
      }
    }
  }

  double s_;
  const QuadratureSpec& q_;
  Span K_{}, L_{};
  std::array<int, 4> slot_{};
  Lin hK_[2], hL_[2];
  const Lin* wK_ = nullptr;
  const Lin* wL_ = nullptr;
};

struct Point {
  double x, w;
};

// Rule for int_X g(x) T(x) dx with T(x) = int_I |x-y|^{-1-2s} dy. When X touches I at e
// the rule is exact for g = (x-e) p(x), deg p small; g must vanish at e if s >= 1/2.
void tail_rule(Span X, const Interval& I, double s, const QuadratureSpec& q, int depth,
               std::vector<Point>& out) {
  double gap;
  double e_touch = 0.0;
  if (X.hi <= I.lo)
    gap = I.lo - X.hi, e_touch = X.hi;
  else if (X.lo >= I.hi)
    gap = X.lo - I.hi, e_touch = X.lo;
  else
    throw QuadratureError("Omega element overlaps Sigma1");
  const double h = X.len();
  if (gap == 0.0) {
    if (I.bounded() && I.length() < h && depth < q.refinement_cap) {
      const double cut = (e_touch == X.lo) ? X.lo + I.length() : X.hi - I.length();
      tail_rule({X.lo, cut}, I, s, q, depth + 1, out);
      tail_rule({cut, X.hi}, I, s, q, depth + 1, out);
      return;
    }
    const double dir = (e_touch == X.lo) ? 1.0 : -1.0;
    const Rule& gj = gauss_jacobi(12, 1.0 - 2.0 * s);
    const double scale = std::pow(h, 2.0 - 2.0 * s) / (2.0 * s);
    for (std::size_t k = 0; k < gj.size(); ++k) {
      const double d = h * gj.nodes[k];
      out.push_back({e_touch + dir * d, scale * gj.weights[k] / d});
    }
    if (I.bounded()) {
      // far end of I contributes -(dist to far end)^{-2s}/(2s), smooth on X
      const double far_end = (I.lo == e_touch) ? I.hi : I.lo;
      const Rule& g = gauss_legendre(10);
      for (std::size_t k = 0; k < g.size(); ++k) {
        const double x = X.lo + h * g.nodes[k];
        out.push_back({x, -g.weights[k] * h * std::pow(std::abs(x - far_end), -2.0 * s) / (2.0 * s)});
      }
    }
    return;
  }
  if (gap < h && depth < q.refinement_cap) {
    const double m = 0.5 * (X.lo + X.hi);
    tail_rule({X.lo, m}, I, s, q, depth + 1, out);
    tail_rule({m, X.hi}, I, s, q, depth + 1, out);
    return;
  }
  const Rule& g = gauss_legendre(10);
  for (std::size_t k = 0; k < g.size(); ++k) {
    const double x = X.lo + h * g.nodes[k];
    out.push_back({x, g.weights[k] * h * tail_integral(s, x, I)});
  }
}

// Assembles c * iint over Omega x (Omega u Sigma2) pairs into a node x node matrix.
Eigen::MatrixXd pair_form(const Mesh& m, double s, const QuadratureSpec& q, double c,
                          const Field* weight) {
  const auto& els = m.elements();
  const std::size_t n = m.n_nodes();
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(static_cast<long>(n), static_cast<long>(n));
  PairIntegrator pi(s, q);
  std::vector<Lin> wlin;
  if (weight) {
    for (const auto& e : els) {
      const double xl = m.x(e.left), xr = m.x(e.right);
      const double ul = weight->node_value(e.left), ur = weight->node_value(e.right);
      const double b = (ur - ul) / (xr - xl);
      wlin.push_back({ul - b * xl, b});
    }
  }
  for (std::size_t ek = 0; ek < els.size(); ++ek) {
    const Element& K_el = els[ek];
    if (K_el.region != Region::Omega) continue;
    const Span K{m.x(K_el.left), m.x(K_el.right)};
    for (std::size_t el = 0; el < els.size(); ++el) {
      const Element& L_el = els[el];
      if (L_el.region == Region::Omega && el < ek) continue;
      const Span L{m.x(L_el.left), m.x(L_el.right)};
      const bool identical = (el == ek);
      const double factor = identical ? c : 2.0 * c;
      std::array<std::size_t, 4> nodes_of{K_el.left, K_el.right, L_el.left, L_el.right};
      std::array<int, 4> slot{0, 1, 2, 3};
      std::array<std::size_t, 4> slot_node{K_el.left, K_el.right, L_el.left, L_el.right};
      int used = 2;
      for (int a = 2; a < 4; ++a) {
        int found = -1;
        for (int b = 0; b < 2; ++b)
          if (nodes_of[a] == nodes_of[b]) found = b;
        if (found >= 0) {
          slot[a] = found;
        } else {
          slot[a] = used;
          slot_node[used] = nodes_of[a];
          ++used;
        }
      }
      const Local loc = weight ? pi.integrate(K, L, slot, identical, &wlin[ek], &wlin[el])
                               : pi.integrate(K, L, slot, identical);
      for (int a = 0; a < used; ++a)
        for (int b = 0; b < used; ++b)
          G(static_cast<long>(slot_node[a]), static_cast<long>(slot_node[b])) += factor * loc(a, b);
    }
  }
  return G;
}

Eigen::MatrixXd restrict(const Eigen::MatrixXd& K, const std::vector<std::size_t>& rows,
                         const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(static_cast<long>(rows.size()), static_cast<long>(cols.size()));
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < cols.size(); ++j)
      out(static_cast<long>(i), static_cast<long>(j)) =
          K(static_cast<long>(rows[i]), static_cast<long>(cols[j]));
  return out;
}

}  // namespace

OperatorSet assemble_stiffness(std::shared_ptr<const Mesh> mesh, const KernelParams& k,
                               const QuadratureSpec& q) {
  if (k.dim != mesh->partition().dim) throw ConsistencyError("mesh and kernel dimensions differ");
  if (k.s != mesh->s()) throw ConsistencyError("mesh and kernel orders differ");
  const Mesh& m = *mesh;
  const double s = k.s;
  Eigen::MatrixXd K = pair_form(m, s, q, 0.5 * k.a_ns, nullptr);

  // Omega x Sigma1: a_ns int_Omega phi_i phi_j T(x), T the Sigma1 tail integral.
  std::vector<Point> pts;
  for (const auto& el : m.elements()) {
    if (el.region != Region::Omega) continue;
    const double xl = m.x(el.left), xr = m.x(el.right);
    const Lin h0 = hat_left(xl, xr), h1 = hat_right(xl, xr);
    Eigen::Matrix2d loc = Eigen::Matrix2d::Zero();
    for (const auto& I : m.partition().sigma1) {
      pts.clear();
      tail_rule({xl, xr}, I, s, q, 0, pts);
      for (const auto& p : pts) {
        const double a = h0(p.x), b = h1(p.x);
        loc(0, 0) += p.w * a * a;
        loc(0, 1) += p.w * a * b;
        loc(1, 1) += p.w * b * b;
      }
    }
    loc(1, 0) = loc(0, 1);
    const std::size_t nd[2] = {el.left, el.right};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        if (m.dof(nd[a]) < 0 && m.dof(nd[b]) < 0) continue;
        K(static_cast<long>(nd[a]), static_cast<long>(nd[b])) += k.a_ns * loc(a, b);
      }
  }

  OperatorSet ops;
  ops.mesh = mesh;
  ops.kernel = k;
  ops.quad = q;
  ops.A = restrict(K, m.active_nodes(), m.active_nodes());
  ops.A = 0.5 * (ops.A + ops.A.transpose()).eval();
  ops.A_lift = restrict(K, m.active_nodes(), m.eliminated_nodes());
  ops.M_omega = assemble_mass(m, MassRegion::Omega);
  ops.M_full = assemble_mass(m, MassRegion::Full);
  ops.M_lumped = ops.M_omega.rowwise().sum();
  ops.mesh_hash = m.hash();
  for (long i = 0; i < ops.A.size(); ++i)
    if (!std::isfinite(ops.A.data()[i])) throw QuadratureError("non-finite stiffness entry");
  return ops;
}

Eigen::MatrixXd assemble_mass(const Mesh& m, MassRegion region) {
  const long n = static_cast<long>(m.n_active());
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n, n);
  for (const auto& el : m.elements()) {
    if (region == MassRegion::Omega && el.region != Region::Omega) continue;
    const double h = m.length(el);
    const long d[2] = {m.dof(el.left), m.dof(el.right)};
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) {
        if (d[a] < 0 || d[b] < 0) continue;
        M(d[a], d[b]) += h / 6.0 * (a == b ? 2.0 : 1.0);
      }
  }
  return M;
}

LoadVector assemble_load(const Mesh& m, const std::function<double(double)>& f, std::string source) {
  LoadVector F{Eigen::VectorXd::Zero(static_cast<long>(m.n_active())), std::move(source)};
  const Rule& g = gauss_legendre(8);
  for (const auto& el : m.elements()) {
    if (el.region != Region::Omega) continue;
    const double xl = m.x(el.left), xr = m.x(el.right), h = xr - xl;
    double fl = 0.0, fr = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double t = g.nodes[k];
      const double v = g.weights[k] * h * f(xl + h * t);
      fl += v * (1.0 - t);
      fr += v * t;
    }
    if (m.dof(el.left) >= 0) F.values(m.dof(el.left)) += fl;
    if (m.dof(el.right) >= 0) F.values(m.dof(el.right)) += fr;
  }
  return F;
}

Eigen::MatrixXd assemble_weighted_form(const Field& u, const QuadratureSpec& q) {
  const Mesh& m = u.mesh();
  Eigen::MatrixXd K = pair_form(m, m.s(), q, 1.0, &u);
  Eigen::MatrixXd W = restrict(K, m.active_nodes(), m.active_nodes());
  W = 0.5 * (W + W.transpose()).eval();
  if (!W.allFinite()) throw QuadratureError("non-finite entry in the weighted form");
  return W;
}

LiftResult dirichlet_lift(const OperatorSet& ops, const LoadVector& F, const Sigma1Data& h) {
  const Mesh& m = *ops.mesh;
  const double s = m.s();
  LiftResult r{F, Field(ops.mesh, Eigen::VectorXd::Zero(static_cast<long>(m.n_active())))};
  if (h.bins.size() != h.values.size()) throw ConfigError("sigma1 datum has mismatched bins");
  r.load.source = F.source + "+lift";
  std::vector<Point> pts;
  for (const auto& el : m.elements()) {
    if (el.region != Region::Omega) continue;
    const double xl = m.x(el.left), xr = m.x(el.right);
    const Lin h0 = hat_left(xl, xr), h1 = hat_right(xl, xr);
    double c0 = 0.0, c1 = 0.0;
    for (std::size_t b = 0; b < h.bins.size(); ++b) {
      if (h.values[b] == 0.0) continue;
      pts.clear();
      tail_rule({xl, xr}, h.bins[b], s, ops.quad, 0, pts);
      for (const auto& p : pts) {
        c0 += h.values[b] * p.w * h0(p.x);
        c1 += h.values[b] * p.w * h1(p.x);
      }
    }
    if (m.dof(el.left) >= 0) r.load.values(m.dof(el.left)) += ops.kernel.a_ns * c0;
    if (m.dof(el.right) >= 0) r.load.values(m.dof(el.right)) += ops.kernel.a_ns * c1;
  }
  const auto& elim = m.eliminated_nodes();
  Eigen::VectorXd hb(static_cast<long>(elim.size()));
  for (std::size_t b = 0; b < elim.size(); ++b) hb(static_cast<long>(b)) = h.adjacent_value(m.x(elim[b]));
  r.load.values -= ops.A_lift * hb;
  r.boundary = Field(ops.mesh, Eigen::VectorXd::Zero(static_cast<long>(m.n_active())), hb, h);
  return r;
}

void dump_operators(const OperatorSet& ops, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write " + path);
  os << std::setprecision(17);
  os << "# mesh_hash=" << ops.mesh_hash << " s=" << ops.kernel.s << " a_ns=" << ops.kernel.a_ns
     << " form_factor=" << ops.form_factor() << "\n";
  auto block = [&](const char* name, const Eigen::MatrixXd& M) {
    os << "# " << name << " " << M.rows() << " " << M.cols() << "\n";
    for (long i = 0; i < M.rows(); ++i) {
      for (long j = 0; j < M.cols(); ++j) os << (j ? "," : "") << M(i, j);
      os << "\n";
    }
  };
  block("A", ops.A);
  block("M_omega", ops.M_omega);
  block("M_full", ops.M_full);
}

}  // namespace fracmix
