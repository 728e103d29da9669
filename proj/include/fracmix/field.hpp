#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fracmix/domain.hpp"
#include "fracmix/kernel.hpp"

namespace fracmix {

/// Piecewise-constant Dirichlet datum on Sigma1, one value per bin.
struct Sigma1Data {
  std::vector<Interval> bins;
  std::vector<double> values;

  double value_at(double x) const;  // 0 off the bins
  bool empty() const { return bins.empty(); }
  /// Value of the bin whose closure holds x (boundary nodes), 0 if none.
  double adjacent_value(double x) const;
};

/// Bins over Sigma1: bounded components are cut into n_bins pieces; an unbounded
/// component gets n_bins pieces over a window of the given width next to its finite
/// end, then one tail bin out to infinity.
std::vector<Interval> make_sigma1_bins(const DomainPartition& p, double window, int n_bins);

/// Samples h at bin midpoints. Tail bins take the far-field constants, which are
/// required whenever Sigma1 is unbounded on that side.
Sigma1Data sample_sigma1(const std::vector<Interval>& bins, const std::function<double(double)>& h,
                         std::optional<double> far_left, std::optional<double> far_right);

/// Piecewise-linear field over a mesh. Coefficients live on active DoFs; eliminated
/// nodes carry boundary values (zero unless a lift is active) and Sigma1 carries a datum.
class Field {
 public:
  Field() = default;
  Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd coeffs);
  Field(std::shared_ptr<const Mesh> mesh, Eigen::VectorXd coeffs, Eigen::VectorXd boundary,
        Sigma1Data datum);

  const Mesh& mesh() const { return *mesh_; }
  const std::shared_ptr<const Mesh>& mesh_ptr() const { return mesh_; }
  const Eigen::VectorXd& coeffs() const { return coeffs_; }
  const Eigen::VectorXd& boundary_values() const { return boundary_; }
  const Sigma1Data& datum() const { return datum_; }

  double node_value(std::size_t node) const;
  Eigen::VectorXd nodal_values() const;
  double operator()(double x) const;
  FunctionView view() const;

 private:
  std::shared_ptr<const Mesh> mesh_;
  Eigen::VectorXd coeffs_;
  Eigen::VectorXd boundary_;
  Sigma1Data datum_;
};

/// Nodal interpolant of f on the active DoFs; eliminated nodes get zero.
Field interpolate(std::shared_ptr<const Mesh> mesh, const std::function<double(double)>& f);

double pv_fractional_laplacian(const KernelParams& k, const Field& u, double x,
                               const QuadratureSpec& q = {});
double neumann_derivative(const KernelParams& k, const Field& u, double x,
                          const QuadratureSpec& q = {});

}  // namespace fracmix
