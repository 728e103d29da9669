#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "fracmix/domain.hpp"

namespace fracmix {

enum class FamilyKind { RandomBumps, IndicatorMollifications, Eigenfunction, Constant };

const char* to_string(FamilyKind k);
FamilyKind family_kind_from_string(const std::string& s);

/// Nonnegative, nonzero functions supported in closure(Omega). An optional floor adds a
/// positive constant on Omega, which keeps ratios against the member finite.
struct FunctionFamily {
  FamilyKind kind = FamilyKind::RandomBumps;
  int count = 0;
  std::uint64_t seed = 0;
  double floor = 0.0;
  std::vector<std::function<double(double)>> members;

  std::string describe() const;
};

/// Eigenfunction families carry a single member set by the caller; this builds the rest.
FunctionFamily make_family(FamilyKind kind, int count, std::uint64_t seed, const DomainPartition& p,
                           double floor = 0.0);

/// Throws ConfigError unless every member is nonnegative, nonzero and vanishes off Omega.
void check_family(const FunctionFamily& f, const DomainPartition& p);

/// C-infinity bump of the given centre, half-width and height.
double smooth_bump(double x, double centre, double half_width, double height);

}  // namespace fracmix
