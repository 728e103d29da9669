#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fracmix/domain.hpp"
#include "fracmix/families.hpp"
#include "fracmix/kernel.hpp"
#include "fracmix/solve.hpp"

namespace fracmix {

struct MeshLevel {
  int n_omega = 64;
  int n_sigma2 = 32;
};

/// Flat `key = value` configuration with `[section]` headers. Keys are addressed as
/// `section.key`; anything unknown is rejected.
struct RunConfig {
  DomainPartition partition;
  std::vector<MeshLevel> sweep;
  Grading grading;
  QuadratureSpec quadrature;
  double eig_tol = 1e-11;

  FamilyKind family_kind = FamilyKind::RandomBumps;
  int family_count = 20;
  std::uint64_t family_seed = 7;

  std::vector<double> t_grid{0.1, 0.2, 0.4, 1.0, 2.0, 3.0};
  double dt_factor = 0.05;
  StepperSpec stepper;

  double walker_window = 2.0;
  int walker_bins = 32;
  std::size_t walker_count = 100000;
  std::uint64_t walker_seed = 1;
  std::vector<double> walker_starts{-0.5, 0.0, 0.5};

  double sobolev_r = 0.0;
  double sobolev_r_ceiling = 4.0;
  double linfty_p = 0.0;  // 0 picks 2/s
  double drift_limit = 0.25;
  std::vector<std::string> certificates;  // empty runs all

  std::string out_dir = "out";

  /// Canonical text: one `section.key = value` line per key, sorted.
  std::string canonical() const;
  std::uint64_t digest() const;
};

/// Names accepted in `verify.certificates`.
const std::vector<std::string>& certificate_names();

RunConfig default_config();
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

std::vector<Interval> parse_intervals(const std::string& text);
std::string format_intervals(const std::vector<Interval>& list);

/// Complement of the given intervals on the real line.
std::vector<Interval> complement(std::vector<Interval> taken);

}  // namespace fracmix
