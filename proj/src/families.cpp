#include "fracmix/families.hpp"

#include <array>
#include <cmath>
#include <random>
#include <sstream>

#include "fracmix/errors.hpp"
#include "fracmix/walker.hpp"

namespace fracmix {
namespace {

double phi(double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; }

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  return phi(t) / (phi(t) + phi(1.0 - t));
}

}  // namespace

const char* to_string(FamilyKind k) {
  switch (k) {
    case FamilyKind::RandomBumps: return "random_bumps";
    case FamilyKind::IndicatorMollifications: return "indicator_mollifications";
    case FamilyKind::Eigenfunction: return "eigenfunction";
    case FamilyKind::Constant: return "constant";
  }
  return "?";
}

FamilyKind family_kind_from_string(const std::string& s) {
  if (s == "random_bumps" || s == "bumps") return FamilyKind::RandomBumps;
  if (s == "indicator_mollifications" || s == "indicators") return FamilyKind::IndicatorMollifications;
  if (s == "eigenfunction") return FamilyKind::Eigenfunction;
  if (s == "constant") return FamilyKind::Constant;
  throw ConfigError("unknown family kind '" + s + "'");
}

std::string FunctionFamily::describe() const {
  std::ostringstream os;
  os.precision(17);
  os << to_string(kind) << "(count=" << count << ",seed=" << seed << ",floor=" << floor << ")";
  return os.str();
}

double smooth_bump(double x, double centre, double half_width, double height) {
  const double r = (x - centre) / half_width;
  if (std::abs(r) >= 1.0) return 0.0;
  return height * std::exp(1.0 - 1.0 / (1.0 - r * r));
}

FunctionFamily make_family(FamilyKind kind, int count, std::uint64_t seed, const DomainPartition& p,
                           double floor) {
  if (count < 1) throw ConfigError("family count must be positive");
  if (floor < 0.0) throw ConfigError("family floor must be nonnegative");
  FunctionFamily fam;
  fam.kind = kind;
  fam.count = count;
  fam.seed = seed;
  fam.floor = floor;
  const auto omega = p.omega;
  auto on_omega = [omega](double x) {
    for (const auto& I : omega)
      if (I.contains_closed(x)) return true;
    return false;
  };
  std::mt19937_64 rng(splitmix64(seed));
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  double total = 0.0;
  for (const auto& I : omega) total += I.length();
  auto pick_component = [&]() -> const Interval& {
    double t = uniform() * total;
    for (const auto& I : omega) {
      if (t < I.length()) return I;
      t -= I.length();
    }
    return omega.back();
  };

  for (int k = 0; k < count; ++k) {
    std::function<double(double)> core;
    switch (kind) {
      case FamilyKind::RandomBumps: {
        const int nb = 1 + static_cast<int>(uniform() * 3.0);
        std::vector<std::array<double, 3>> bumps;
        for (int b = 0; b < nb; ++b) {
          const Interval& I = pick_component();
          const double w = I.length() * (0.05 + 0.15 * uniform());
          const double c = I.lo + w + (I.length() - 2.0 * w) * uniform();
          const double h = 0.5 + 1.5 * uniform();
          bumps.push_back({c, w, h});
        }
        core = [bumps](double x) {
          double v = 0.0;
          for (const auto& b : bumps) v += smooth_bump(x, b[0], b[1], b[2]);
          return v;
        };
        break;
      }
      case FamilyKind::IndicatorMollifications: {
        const Interval& I = pick_component();
        const double a = I.lo + 0.6 * I.length() * uniform();
        const double b = a + (I.hi - a) * (0.2 + 0.8 * uniform());
        const double eps = 0.25 * (b - a);
        core = [a, b, eps](double x) { return smooth_step((x - a) / eps) * smooth_step((b - x) / eps); };
        break;
      }
      case FamilyKind::Constant:
        core = [](double) { return 1.0; };
        break;
      case FamilyKind::Eigenfunction:
        throw ConfigError("eigenfunction families are built from a computed eigenpair");
    }
    fam.members.push_back([core, on_omega, floor](double x) {
      if (!on_omega(x)) return 0.0;
      return core(x) + floor;
    });
  }
  check_family(fam, p);
  return fam;
}

void check_family(const FunctionFamily& f, const DomainPartition& p) {
  for (const auto& m : f.members) {
    double peak = 0.0;
    for (const auto& I : p.omega)
      for (int k = 0; k <= 400; ++k) {
        const double v = m(I.lo + I.length() * k / 400.0);
        if (v < 0.0) throw ConfigError("family member is negative");
        peak = std::max(peak, v);
      }
    if (!(peak > 0.0)) throw ConfigError("family member vanishes identically");
    for (const auto& I : p.sigma2)
      for (int k = 1; k < 10; ++k)
        if (m(I.lo + I.length() * k / 10.0) != 0.0) throw ConfigError("family member leaves omega");
  }
}

}  // namespace fracmix
