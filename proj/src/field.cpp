#include "fracmix/field.hpp"

#include <algorithm>
#include <cmath>

#include "fracmix/errors.hpp"

namespace fracmix {

double Sigma1Data::value_at(double x) const {
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (bins[i].contains(x)) return values[i];
  return 0.0;
}

double Sigma1Data::adjacent_value(double x) const {
  for (std::size_t i = 0; i < bins.size(); ++i)
    if (bins[i].contains_closed(x)) return values[i];
  return 0.0;
}

std::vector<Interval> make_sigma1_bins(const DomainPartition& p, double window, int n_bins) {
  if (n_bins < 1) throw ConfigError("n_bins must be positive");
  if (!(window > 0.0)) throw ConfigError("sigma1 window must be positive");
  std::vector<Interval> bins;
  for (const auto& I : p.sigma1) {
    if (I.bounded()) {
      for (int k = 0; k < n_bins; ++k) {
        const double a = I.lo + I.length() * k / n_bins;
        const double b = k + 1 == n_bins ? I.hi : I.lo + I.length() * (k + 1) / n_bins;
        bins.push_back({a, b});
      }
    } else if (I.hi < kInf) {
      const double end = I.hi;
      bins.push_back({-kInf, end - window});
      for (int k = n_bins - 1; k >= 0; --k)
        bins.push_back({end - window * (k + 1) / n_bins, k == 0 ? end : end - window * k / n_bins});
    } else if (I.lo > -kInf) {
      const double end = I.lo;
      for (int k = 0; k < n_bins; ++k)
        bins.push_back({k == 0 ? end : end + window * k / n_bins, end + window * (k + 1) / n_bins});
      bins.push_back({end + window, kInf});
    } else {
      throw ConfigError("sigma1 cannot be the whole line");
    }
  }
  std::sort(bins.begin(), bins.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  return bins;
}

Sigma1Data sample_sigma1(const std::vector<Interval>& bins, const std::function<double(double)>& h,
                         std::optional<double> far_left, std::optional<double> far_right) {
  Sigma1Data d;
  d.bins = bins;
  for (const auto& b : bins) {
    if (b.lo == -kInf) {
      if (!far_left) throw ConfigError("far-field value on the left of sigma1 is missing");
      d.values.push_back(*far_left);
    } else if (b.hi == kInf) {
      if (!far_right) throw ConfigError("far-field value on the right of sigma1 is missing");
      d.values.push_back(*far_right);
    } else {
      d.values.push_back(h(0.5 * (b.lo + b.hi)));
    }
  }
  return d;
}

Field::Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd coeffs)
    : mesh_(std::move(mesh)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != mesh_->n_active())
    throw ConsistencyError("coefficient count does not match active DoFs");
  boundary_ = Eigen::VectorXd::Zero(static_cast<long>(mesh_->eliminated_nodes().size()));
}

Field::Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd coeffs, Eigen::VectorXd boundary,
             Sigma1Data datum)
    : mesh_(std::move(mesh)),
      coeffs_(std::move(coeffs)),
      boundary_(std::move(boundary)),
      datum_(std::move(datum)) {
  if (static_cast<std::size_t>(coeffs_.size()) != mesh_->n_active())
    throw ConsistencyError("coefficient count does not match active DoFs");
  if (static_cast<std::size_t>(boundary_.size()) != mesh_->eliminated_nodes().size())
    throw ConsistencyError("boundary value count does not match eliminated nodes");
}

double Field::node_value(std::size_t node) const {
  const long d = mesh_->dof(node);
  if (d >= 0) return coeffs_(d);
  const auto& el = mesh_->eliminated_nodes();
  const auto it = std::lower_bound(el.begin(), el.end(), node);
  return boundary_(static_cast<long>(it - el.begin()));
}

Eigen::VectorXd Field::nodal_values() const {
  Eigen::VectorXd v(static_cast<long>(mesh_->n_nodes()));
  for (std::size_t i = 0; i < mesh_->n_nodes(); ++i) v(static_cast<long>(i)) = node_value(i);
  return v;
}

double Field::operator()(double x) const {
  const long e = mesh_->locate(x);
  if (e < 0) return datum_.value_at(x);
  const auto& el = mesh_->elements()[static_cast<std::size_t>(e)];
  const double xl = mesh_->x(el.left), xr = mesh_->x(el.right);
  const double t = (x - xl) / (xr - xl);
  return (1.0 - t) * node_value(el.left) + t * node_value(el.right);
}

FunctionView Field::view() const {
  FunctionView v;
  v.value = [self = *this](double x) { return self(x); };
  v.breakpoints = mesh_->nodes();
  for (const auto& b : datum_.bins) {
    if (b.lo > -kInf) v.breakpoints.push_back(b.lo);
    if (b.hi < kInf) v.breakpoints.push_back(b.hi);
  }
  std::sort(v.breakpoints.begin(), v.breakpoints.end());
  v.breakpoints.erase(std::unique(v.breakpoints.begin(), v.breakpoints.end()), v.breakpoints.end());
  for (std::size_t i = 0; i < datum_.bins.size(); ++i) {
    if (datum_.bins[i].lo == -kInf) v.exterior_left = datum_.values[i];
    if (datum_.bins[i].hi == kInf) v.exterior_right = datum_.values[i];
  }
  return v;
}

Field interpolate(std::shared_ptr<const Mesh> mesh, const std::function<double(double)>& f) {
  Eigen::VectorXd c(static_cast<long>(mesh->n_active()));
  for (std::size_t d = 0; d < mesh->n_active(); ++d)
    c(static_cast<long>(d)) = f(mesh->x(mesh->active_nodes()[d]));
  return Field(std::move(mesh), std::move(c));
}

double pv_fractional_laplacian(const KernelParams& k, const Field& u, double x,
                               const QuadratureSpec& q) {
  return pv_fractional_laplacian(k, u.view(), x, q);
}

double neumann_derivative(const KernelParams& k, const Field& u, double x, const QuadratureSpec& q) {
  return neumann_derivative(k, u.view(), u.mesh().partition(), x, q);
}

}  // namespace fracmix
