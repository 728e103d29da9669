#include "fracmix/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>
#include <sstream>

#include "fracmix/errors.hpp"

namespace fracmix {

namespace {

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

bool any_contains_closed(const std::vector<Interval>& list, double x) {
  for (const auto& I : list)
    if (I.contains_closed(x)) return true;
  return false;
}

bool any_contains(const std::vector<Interval>& list, double x) {
  for (const auto& I : list)
    if (I.contains(x)) return true;
  return false;
}

bool overlap(const Interval& a, const Interval& b) {
  return std::max(a.lo, b.lo) < std::min(a.hi, b.hi);
}

// Largest-remainder split of n over weights, each share at least min_each.
std::vector<int> distribute(int n, const std::vector<double>& weights, int min_each) {
  const std::size_t k = weights.size();
  if (n < static_cast<int>(k) * min_each) throw ConfigError("too few elements for the number of components");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  std::vector<int> out(k);
  std::vector<std::pair<double, std::size_t>> rem;
  int used = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double share = n * weights[i] / total;
    out[i] = static_cast<int>(std::floor(share));
    used += out[i];
    rem.push_back({share - out[i], i});
  }
  std::stable_sort(rem.begin(), rem.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  for (int j = 0; j < n - used; ++j) out[rem[j].second] += 1;
  // raise short components, taking from the largest
  for (std::size_t i = 0; i < k; ++i)
    while (out[i] < min_each) {
      const auto big = static_cast<std::size_t>(std::max_element(out.begin(), out.end()) - out.begin());
      --out[big];
      ++out[i];
    }
  return out;
}

// Points lo..hi with m cells, widths growing geometrically away from lo.
std::vector<double> graded_from_lo(double lo, double hi, int m, const Grading& g) {
  std::vector<double> w(m);
  const int layers = g.layers > 0 ? g.layers : m;
  for (int k = 0; k < m; ++k) w[k] = std::pow(g.ratio, -std::min(k, layers - 1));
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  std::vector<double> pts(m + 1);
  pts[0] = lo;
  double acc = 0.0;
  for (int k = 0; k < m; ++k) {
    acc += w[k];
    pts[k + 1] = lo + (hi - lo) * acc / total;
  }
  pts[m] = hi;
  return pts;
}

std::vector<double> uniform_points(double lo, double hi, int m) {
  std::vector<double> pts(m + 1);
  for (int k = 0; k <= m; ++k) pts[k] = lo + (hi - lo) * k / m;
  pts[m] = hi;
  return pts;
}

std::vector<double> omega_points(const DomainPartition& p, const Interval& I, int m,
                                 const Grading& g) {
  if (g.kind == Grading::Kind::Uniform || g.ratio == 1.0) return uniform_points(I.lo, I.hi, m);
  const bool at_lo = p.in_sigma1_closure(I.lo);
  const bool at_hi = p.in_sigma1_closure(I.hi);
  if (at_lo && at_hi) {
    const int m1 = m / 2;
    const double mid = 0.5 * (I.lo + I.hi);
    auto left = graded_from_lo(I.lo, mid, m1, g);
    auto right = graded_from_lo(-I.hi, -mid, m - m1, g);
    for (auto it = right.rbegin() + 1; it != right.rend(); ++it) left.push_back(-*it);
    left.back() = I.hi;
    return left;
  }
  if (at_lo) return graded_from_lo(I.lo, I.hi, m, g);
  if (at_hi) {
    auto pts = graded_from_lo(-I.hi, -I.lo, m, g);
    std::vector<double> out;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) out.push_back(-*it);
    out.front() = I.lo;
    out.back() = I.hi;
    return out;
  }
  return uniform_points(I.lo, I.hi, m);
}

}  // namespace

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t fnv1a(const std::string& s, std::uint64_t h) { return fnv1a(s.data(), s.size(), h); }

double DomainPartition::omega_measure() const {
  double m = 0.0;
  for (const auto& I : omega) m += I.length();
  return m;
}

double DomainPartition::sigma2_measure() const {
  double m = 0.0;
  for (const auto& I : sigma2) m += I.length();
  return m;
}

bool DomainPartition::in_omega_closure(double x) const { return any_contains_closed(omega, x); }
bool DomainPartition::in_sigma1_closure(double x) const { return any_contains_closed(sigma1, x); }
bool DomainPartition::in_sigma2(double x) const { return any_contains(sigma2, x); }
bool DomainPartition::in_sigma1(double x) const { return any_contains(sigma1, x); }

std::string DomainPartition::describe() const {
  std::ostringstream os;
  auto list = [&](const char* name, const std::vector<Interval>& v) {
    os << name << "=";
    for (std::size_t i = 0; i < v.size(); ++i)
      os << (i ? "," : "") << fmt(v[i].lo) << ":" << fmt(v[i].hi);
    os << ";";
  };
  list("omega", omega);
  list("sigma1", sigma1);
  list("sigma2", sigma2);
  os << "s=" << fmt(s) << ";dim=" << dim;
  return os.str();
}

DomainPartition validate_partition(const DomainPartition& p) {
  if (p.dim != 1) throw ConfigError("only dimension 1 is supported");
  if (!(p.s > 0.0 && p.s < 1.0)) throw DomainError("s must lie in (0,1), got " + fmt(p.s));
  if (p.omega.empty()) throw MeasureError("omega is empty");
  if (p.sigma1.empty()) throw MeasureError("sigma1 is empty");
  if (p.sigma2.empty()) throw MeasureError("sigma2 is empty");

  auto check_intervals = [](const std::vector<Interval>& v, const char* name) {
    for (const auto& I : v) {
      if (std::isnan(I.lo) || std::isnan(I.hi)) throw ConfigError(std::string(name) + " has NaN");
      if (!(I.lo < I.hi))
        throw MeasureError(std::string(name) + " interval " + fmt(I.lo) + ":" + fmt(I.hi) +
                           " has zero measure");
    }
  };
  check_intervals(p.omega, "omega");
  check_intervals(p.sigma1, "sigma1");
  check_intervals(p.sigma2, "sigma2");
  for (const auto& I : p.omega)
    if (!I.bounded()) throw ConfigError("omega components must be bounded");
  for (const auto& I : p.sigma2)
    if (!I.bounded()) throw UnboundedSigma2Error("sigma2 component " + fmt(I.lo) + ":" +
                                                 fmt(I.hi) + " is unbounded");

  struct Tagged {
    Interval I;
    int region;  // 0 omega, 1 sigma1, 2 sigma2
  };
  std::vector<Tagged> all;
  for (const auto& I : p.omega) all.push_back({I, 0});
  for (const auto& I : p.sigma1) all.push_back({I, 1});
  for (const auto& I : p.sigma2) all.push_back({I, 2});
  static const char* names[] = {"omega", "sigma1", "sigma2"};
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i + 1; j < all.size(); ++j)
      if (overlap(all[i].I, all[j].I))
        throw OverlapError(std::string(names[all[i].region]) + " " + fmt(all[i].I.lo) + ":" +
                           fmt(all[i].I.hi) + " overlaps " + names[all[j].region] + " " +
                           fmt(all[j].I.lo) + ":" + fmt(all[j].I.hi));

  std::sort(all.begin(), all.end(), [](const Tagged& a, const Tagged& b) { return a.I.lo < b.I.lo; });
  if (all.front().I.lo != -kInf) throw CoverageError("(-inf, " + fmt(all.front().I.lo) + ") not covered");
  if (all.back().I.hi != kInf) throw CoverageError("(" + fmt(all.back().I.hi) + ", inf) not covered");
  for (std::size_t i = 1; i < all.size(); ++i) {
    if (all[i].I.lo > all[i - 1].I.hi)
      throw CoverageError("gap (" + fmt(all[i - 1].I.hi) + ", " + fmt(all[i].I.lo) + ") not covered");
    if (all[i].region == 0 && all[i - 1].region == 0)
      throw CoverageError("point " + fmt(all[i].I.lo) + " between omega components is not exterior");
  }
  return p;
}

const char* to_string(DofClass c) {
  switch (c) {
    case DofClass::Interior: return "INTERIOR";
    case DofClass::NeumannExt: return "NEUMANN_EXT";
    case DofClass::Eliminated: return "ELIMINATED";
  }
  return "?";
}

std::string Grading::describe() const {
  if (kind == Kind::Uniform) return "uniform";
  std::ostringstream os;
  os.precision(17);
  os << "geometric(" << ratio << "," << layers << ")";
  return os.str();
}

Mesh::Mesh(DomainPartition p, std::vector<double> nodes, std::vector<Element> elements,
           Grading grading)
    : partition_(std::move(p)),
      nodes_(std::move(nodes)),
      elements_(std::move(elements)),
      grading_(grading) {
  const std::size_t n = nodes_.size();
  classes_.resize(n);
  dof_of_node_.assign(n, -1);
  omega_closure_.resize(n);
  omega_boundary_.assign(n, false);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = nodes_[i];
    omega_closure_[i] = partition_.in_omega_closure(x);
    for (const auto& I : partition_.omega)
      if (x == I.lo || x == I.hi) omega_boundary_[i] = true;
    if (omega_closure_[i] && partition_.in_sigma1_closure(x))
      classes_[i] = DofClass::Eliminated;
    else if (omega_closure_[i])
      classes_[i] = DofClass::Interior;
    else
      classes_[i] = DofClass::NeumannExt;
    if (classes_[i] == DofClass::Eliminated) {
      eliminated_.push_back(i);
    } else {
      dof_of_node_[i] = static_cast<long>(active_.size());
      active_.push_back(i);
    }
  }
  std::uint64_t h = fnv1a(nodes_.data(), nodes_.size() * sizeof(double));
  for (auto c : classes_) {
    const int v = static_cast<int>(c);
    h = fnv1a(&v, sizeof v, h);
  }
  h = fnv1a(&partition_.s, sizeof(double), h);
  hash_ = h;
}

std::vector<std::size_t> Mesh::dirichlet_dofs() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < active_.size(); ++d)
    if (strictly_inside_omega(active_[d])) out.push_back(d);
  return out;
}

std::vector<std::size_t> Mesh::omega_dofs() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < active_.size(); ++d)
    if (classes_[active_[d]] == DofClass::Interior) out.push_back(d);
  return out;
}

std::vector<std::size_t> Mesh::exterior_dofs() const {
  std::vector<std::size_t> out;
  for (std::size_t d = 0; d < active_.size(); ++d)
    if (classes_[active_[d]] == DofClass::NeumannExt) out.push_back(d);
  return out;
}

long Mesh::locate(double x) const {
  auto it = std::upper_bound(nodes_.begin(), nodes_.end(), x);
  long hi = static_cast<long>(it - nodes_.begin());
  for (long cand : {hi, hi - 1}) {
    if (cand < 1 || cand >= static_cast<long>(nodes_.size())) continue;
    const std::size_t l = static_cast<std::size_t>(cand - 1);
    if (!(nodes_[l] <= x && x <= nodes_[l + 1])) continue;
    // elements are stored in node order and join consecutive nodes
    auto eit = std::lower_bound(elements_.begin(), elements_.end(), l,
                                [](const Element& el, std::size_t v) { return el.left < v; });
    if (eit != elements_.end() && eit->left == l) return static_cast<long>(eit - elements_.begin());
  }
  return -1;
}

Mesh build_mesh(const DomainPartition& p_in, int n_omega, int n_sigma2, const Grading& grading) {
  const DomainPartition p = validate_partition(p_in);
  if (n_omega < 4) throw ConfigError("n_omega must be at least 4");
  if (n_sigma2 < 2) throw ConfigError("n_sigma2 must be at least 2");
  if (grading.kind == Grading::Kind::Geometric && !(grading.ratio > 0.0 && grading.ratio <= 1.0))
    throw ConfigError("geometric grading ratio must lie in (0,1]");

  std::vector<double> om_len, s2_len;
  for (const auto& I : p.omega) om_len.push_back(I.length());
  for (const auto& I : p.sigma2) s2_len.push_back(I.length());
  const auto om_n = distribute(n_omega, om_len, 2);
  const auto s2_n = distribute(n_sigma2, s2_len, 1);

  struct Piece {
    std::vector<double> pts;
    Region region;
  };
  std::vector<Piece> pieces;
  for (std::size_t i = 0; i < p.omega.size(); ++i)
    pieces.push_back({omega_points(p, p.omega[i], om_n[i], grading), Region::Omega});
  for (std::size_t i = 0; i < p.sigma2.size(); ++i)
    pieces.push_back({uniform_points(p.sigma2[i].lo, p.sigma2[i].hi, s2_n[i]), Region::Sigma2});
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.pts.front() < b.pts.front(); });

  std::vector<double> nodes;
  std::vector<Element> elements;
  for (const auto& pc : pieces) {
    std::size_t start = 0;
    if (!nodes.empty() && nodes.back() == pc.pts.front()) {
      start = 1;
    }
    std::size_t base = nodes.size();
    if (start == 1) base -= 1;
    for (std::size_t k = start; k < pc.pts.size(); ++k) nodes.push_back(pc.pts[k]);
    for (std::size_t k = 0; k + 1 < pc.pts.size(); ++k)
      elements.push_back({base + k, base + k + 1, pc.region});
  }
  for (const auto& e : elements)
    if (!(nodes[e.right] > nodes[e.left])) throw ConfigError("degenerate element in mesh");
  return Mesh(p, std::move(nodes), std::move(elements), grading);
}

double boundary_distance(const DomainPartition& p, double x) {
  for (const auto& I : p.omega)
    if (I.contains_closed(x)) return std::min(x - I.lo, I.hi - x);
  throw DomainError("point " + fmt(x) + " is not in the closure of omega");
}

double boundary_distance(const Mesh& m, double x) { return boundary_distance(m.partition(), x); }

}  // namespace fracmix
