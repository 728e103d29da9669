#include "fracmix/walker.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "fracmix/errors.hpp"

namespace fracmix {
namespace {

constexpr std::size_t kBatch = 4096;
constexpr std::size_t kStepCap = 1000000;

std::vector<double> cumulative(const Eigen::RowVectorXd& a, const Eigen::RowVectorXd& b,
                               const Eigen::RowVectorXd& c) {
  std::vector<double> out;
  double acc = 0.0;
  for (const auto* r : {&a, &b, &c})
    for (long j = 0; j < r->size(); ++j) {
      acc += (*r)(j);
      out.push_back(acc);
    }
  for (auto& v : out) v /= acc;
  return out;
}

std::size_t draw(const std::vector<double>& cdf, double u) {
  auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
  if (it == cdf.end()) --it;
  return static_cast<std::size_t>(it - cdf.begin());
}

}  // namespace

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

Eigen::VectorXd JumpChain::absorber_payoff(const Eigen::VectorXd& bin_payoff) const {
  if (static_cast<std::size_t>(bin_payoff.size()) != bins.size())
    throw ConfigError("payoff needs one value per sigma1 bin");
  Eigen::VectorXd g(static_cast<long>(n_absorbers()));
  for (std::size_t b = 0; b < bins.size(); ++b) g(static_cast<long>(b)) = bin_payoff(static_cast<long>(b));
  for (std::size_t j = 0; j < boundary_x.size(); ++j)
    g(static_cast<long>(bins.size() + j)) = bin_payoff(static_cast<long>(boundary_bin[j]));
  return g;
}

long JumpChain::omega_state(double x) const {
  for (std::size_t i = 0; i < omega_x.size(); ++i)
    if (omega_x[i] == x) return static_cast<long>(i);
  return -1;
}

JumpChain build_chain(const Mesh& m, const KernelParams& k, double sigma1_window, int n_bins) {
  const DomainPartition& p = m.partition();
  const double s = k.s;
  JumpChain c;
  c.bins = make_sigma1_bins(p, sigma1_window, n_bins);

  // Dual cell of every node: halves of the adjacent elements.
  const std::size_t n = m.n_nodes();
  std::vector<double> lo(n), hi(n);
  for (std::size_t i = 0; i < n; ++i) lo[i] = hi[i] = m.x(i);
  for (const auto& e : m.elements()) {
    const double mid = 0.5 * (m.x(e.left) + m.x(e.right));
    hi[e.left] = mid;
    lo[e.right] = mid;
  }

  struct Cell {
    Interval span;
    Interval omega_part;  // empty when lo == hi
  };
  std::vector<Cell> om_cells, s2_cells, bd_cells;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = m.x(i);
    Interval span{lo[i], hi[i]};
    Interval op{x, x};
    for (const auto& I : p.omega) {
      if (!(I.contains_closed(x))) continue;
      op = {std::max(lo[i], I.lo), std::min(hi[i], I.hi)};
    }
    if (m.dof_class(i) == DofClass::Interior) {
      c.omega_x.push_back(x);
      c.omega_dof.push_back(static_cast<std::size_t>(m.dof(i)));
      om_cells.push_back({span, op});
    } else if (m.dof_class(i) == DofClass::NeumannExt) {
      c.sigma2_x.push_back(x);
      s2_cells.push_back({span, op});
    } else {
      c.boundary_x.push_back(x);
      long bin = -1;
      for (std::size_t b = 0; b < c.bins.size(); ++b)
        if (c.bins[b].contains_closed(x)) bin = static_cast<long>(b);
      if (bin < 0) throw ConsistencyError("boundary node without an adjacent sigma1 bin");
      c.boundary_bin.push_back(static_cast<std::size_t>(bin));
      bd_cells.push_back({span, op});
    }
  }

  const long no = static_cast<long>(om_cells.size()), ns = static_cast<long>(s2_cells.size());
  const long na = static_cast<long>(c.n_absorbers());
  auto mass = [&](double x, const Interval& I) {
    if (!(I.hi > I.lo)) return 0.0;
    return tail_integral(s, x, I);
  };
  c.P_oo = Eigen::MatrixXd::Zero(no, no);
  c.P_os = Eigen::MatrixXd::Zero(no, ns);
  c.P_oa = Eigen::MatrixXd::Zero(no, na);
  for (long i = 0; i < no; ++i) {
    const double x = c.omega_x[i];
    for (long j = 0; j < no; ++j)
      if (j != i) c.P_oo(i, j) = mass(x, om_cells[j].span);
    for (long j = 0; j < ns; ++j) c.P_os(i, j) = mass(x, s2_cells[j].span);
    for (std::size_t b = 0; b < c.bins.size(); ++b) c.P_oa(i, static_cast<long>(b)) = mass(x, c.bins[b]);
    for (std::size_t j = 0; j < bd_cells.size(); ++j)
      c.P_oa(i, static_cast<long>(c.bins.size() + j)) = mass(x, bd_cells[j].span);
    const double tot = c.P_oo.row(i).sum() + c.P_os.row(i).sum() + c.P_oa.row(i).sum();
    c.P_oo.row(i) /= tot;
    c.P_os.row(i) /= tot;
    c.P_oa.row(i) /= tot;
  }
  c.R_so = Eigen::MatrixXd::Zero(ns, no);
  c.R_sa = Eigen::MatrixXd::Zero(ns, na);
  for (long e = 0; e < ns; ++e) {
    const double x = c.sigma2_x[e];
    for (long j = 0; j < no; ++j) c.R_so(e, j) = mass(x, om_cells[j].omega_part);
    for (std::size_t j = 0; j < bd_cells.size(); ++j)
      c.R_sa(e, static_cast<long>(c.bins.size() + j)) = mass(x, bd_cells[j].omega_part);
    const double tot = c.R_so.row(e).sum() + c.R_sa.row(e).sum();
    const double cx = reflect_normalizer(p, x);
    c.sigma2_mass.push_back(tot);
    c.sigma2_normalizer.push_back(cx);
    c.R_so.row(e) *= cx;
    c.R_sa.row(e) *= cx;
  }
  return c;
}

Eigen::VectorXd solve_chain(const JumpChain& c, const Eigen::VectorXd& bin_payoff) {
  const Eigen::VectorXd g = c.absorber_payoff(bin_payoff);
  const long no = c.P_oo.rows();
  Eigen::MatrixXd T = Eigen::MatrixXd::Identity(no, no) - c.P_oo;
  Eigen::VectorXd rhs = c.P_oa * g;
  if (c.R_so.rows() > 0) {
    T -= c.P_os * c.R_so;
    rhs += c.P_os * (c.R_sa * g);
  }
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(T);
  return lu.solve(rhs);
}

WalkEstimate estimate_payoff(const JumpChain& c, std::size_t start, const Eigen::VectorXd& bin_payoff,
                             std::size_t n_walkers, std::uint64_t seed) {
  if (start >= c.omega_x.size()) throw ConfigError("walk start is not an Omega state");
  if (n_walkers == 0) throw ConfigError("walker count must be positive");
  const Eigen::VectorXd g = c.absorber_payoff(bin_payoff);
  const std::size_t no = c.omega_x.size(), ns = c.sigma2_x.size();
  std::vector<std::vector<double>> om_cdf(no), s2_cdf(ns);
  for (std::size_t i = 0; i < no; ++i)
    om_cdf[i] = cumulative(c.P_oo.row(static_cast<long>(i)), c.P_os.row(static_cast<long>(i)),
                           c.P_oa.row(static_cast<long>(i)));
  const Eigen::RowVectorXd none(0);
  for (std::size_t e = 0; e < ns; ++e)
    s2_cdf[e] = cumulative(c.R_so.row(static_cast<long>(e)), none, c.R_sa.row(static_cast<long>(e)));

  double sum = 0.0, sumsq = 0.0;
  const std::size_t batches = (n_walkers + kBatch - 1) / kBatch;
  for (std::size_t b = 0; b < batches; ++b) {
    std::mt19937_64 rng(splitmix64(seed ^ splitmix64(b)));
    auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
    const std::size_t count = std::min(kBatch, n_walkers - b * kBatch);
    double bs = 0.0, bq = 0.0;
    for (std::size_t w = 0; w < count; ++w) {
      std::size_t state = start;
      double payoff = 0.0;
      std::size_t steps = 0;
      for (;;) {
        if (++steps > kStepCap) throw NonterminationError("walk exceeded the step cap");
        const std::size_t j = draw(om_cdf[state], uniform());
        if (j < no) {
          state = j;
          continue;
        }
        if (j < no + ns) {
          const std::size_t r = draw(s2_cdf[j - no], uniform());
          if (r < no) {
            state = r;
            continue;
          }
          payoff = g(static_cast<long>(r - no));
          break;
        }
        payoff = g(static_cast<long>(j - no - ns));
        break;
      }
      bs += payoff;
      bq += payoff * payoff;
    }
    sum += bs;
    sumsq += bq;
  }
  WalkEstimate est;
  est.start = start;
  est.x = c.omega_x[start];
  est.count = n_walkers;
  est.seed = seed;
  const double nw = static_cast<double>(n_walkers);
  est.estimate = sum / nw;
  const double var = n_walkers > 1 ? std::max(0.0, (sumsq - sum * sum / nw) / (nw - 1.0)) : 0.0;
  est.std_error = std::sqrt(var / nw);
  return est;
}

}  // namespace fracmix
