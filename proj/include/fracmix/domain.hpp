#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

namespace fracmix {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double length() const { return hi - lo; }
  bool bounded() const { return lo > -kInf && hi < kInf; }
  bool contains(double x) const { return lo < x && x < hi; }
  bool contains_closed(double x) const { return lo <= x && x <= hi; }
};

/// Omega, Sigma1 (Dirichlet exterior) and Sigma2 (Neumann exterior) on the line.
struct DomainPartition {
  std::vector<Interval> omega;
  std::vector<Interval> sigma1;
  std::vector<Interval> sigma2;
  double s = 0.5;
  int dim = 1;

  double omega_measure() const;
  double sigma2_measure() const;
  bool in_omega_closure(double x) const;
  bool in_sigma1_closure(double x) const;
  bool in_sigma2(double x) const;
  bool in_sigma1(double x) const;
  std::string describe() const;
};

/// Returns p unchanged when all covering conditions hold, throws otherwise.
DomainPartition validate_partition(const DomainPartition& p);

enum class Region { Omega, Sigma2 };
enum class DofClass { Interior, NeumannExt, Eliminated };

const char* to_string(DofClass c);

struct Grading {
  enum class Kind { Uniform, Geometric };
  Kind kind = Kind::Uniform;
  double ratio = 0.85;  // width ratio between consecutive elements, walking toward Sigma1
  int layers = 0;       // number of geometric layers; 0 grades the whole segment

  static Grading uniform() { return {}; }
  static Grading geometric(double ratio = 0.85, int layers = 0) {
    return {Kind::Geometric, ratio, layers};
  }
  std::string describe() const;
};

struct Element {
  std::size_t left = 0;
  std::size_t right = 0;
  Region region = Region::Omega;
};

class Mesh {
 public:
  Mesh(DomainPartition p, std::vector<double> nodes, std::vector<Element> elements,
       Grading grading);

  const DomainPartition& partition() const { return partition_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<Element>& elements() const { return elements_; }
  const Grading& grading() const { return grading_; }
  double s() const { return partition_.s; }

  std::size_t n_nodes() const { return nodes_.size(); }
  double x(std::size_t node) const { return nodes_[node]; }
  double length(const Element& e) const { return nodes_[e.right] - nodes_[e.left]; }

  DofClass dof_class(std::size_t node) const { return classes_[node]; }
  /// Active DoF index of a node, or -1 when eliminated.
  long dof(std::size_t node) const { return dof_of_node_[node]; }
  std::size_t n_active() const { return active_.size(); }
  const std::vector<std::size_t>& active_nodes() const { return active_; }
  const std::vector<std::size_t>& eliminated_nodes() const { return eliminated_; }

  bool in_omega_closure(std::size_t node) const { return omega_closure_[node]; }
  /// Node is an endpoint of some Omega component.
  bool on_omega_boundary(std::size_t node) const { return omega_boundary_[node]; }
  bool strictly_inside_omega(std::size_t node) const {
    return omega_closure_[node] && !omega_boundary_[node];
  }

  /// Active DoFs whose node lies strictly inside Omega (the pure Dirichlet space).
  std::vector<std::size_t> dirichlet_dofs() const;
  /// Active DoFs with INTERIOR class (nodes on closure of Omega).
  std::vector<std::size_t> omega_dofs() const;
  /// Active DoFs with NEUMANN_EXT class.
  std::vector<std::size_t> exterior_dofs() const;

  /// Element index containing x (closed elements), or -1.
  long locate(double x) const;

  std::uint64_t hash() const { return hash_; }

 private:
  DomainPartition partition_;
  std::vector<double> nodes_;
  std::vector<Element> elements_;
  Grading grading_;
  std::vector<DofClass> classes_;
  std::vector<long> dof_of_node_;
  std::vector<std::size_t> active_;
  std::vector<std::size_t> eliminated_;
  std::vector<bool> omega_closure_;
  std::vector<bool> omega_boundary_;
  std::uint64_t hash_ = 0;
};

/// Mesh of Omega and Sigma2. n_omega elements are spread over the Omega components
/// by length, n_sigma2 likewise over Sigma2 (always uniform).
Mesh build_mesh(const DomainPartition& p, int n_omega, int n_sigma2,
                const Grading& grading = Grading::uniform());

/// Distance to the nearest endpoint of the Omega component containing x.
double boundary_distance(const DomainPartition& p, double x);
double boundary_distance(const Mesh& m, double x);

/// FNV-1a, 64 bit.
std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 14695981039346656037ULL);
std::uint64_t fnv1a(const std::string& s, std::uint64_t h = 14695981039346656037ULL);

}  // namespace fracmix
