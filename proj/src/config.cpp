#include "fracmix/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "fracmix/errors.hpp"

namespace fracmix {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::string fmt(double v) {
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double to_double(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t == "inf" || t == "+inf") return kInf;
  if (t == "-inf") return -kInf;
  try {
    std::size_t used = 0;
    const double d = std::stod(t, &used);
    if (used != t.size()) throw std::invalid_argument(t);
    return d;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not a number: '" + t + "'");
  }
}

long long to_int(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (!std::isfinite(d) || d != std::floor(d)) throw ConfigError(key + ": not an integer: '" + v + "'");
  return static_cast<long long>(d);
}

std::uint64_t to_seed(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const auto x = std::stoull(trim(v), &used);
    if (used != trim(v).size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::exception&) {
    throw ConfigError(key + ": not an unsigned integer: '" + v + "'");
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& item : split(v, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string list_text(const std::vector<double>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + fmt(v[i]);
  return s;
}

Scheme scheme_from(const std::string& v) {
  if (v == "implicit_euler") return Scheme::ImplicitEuler;
  if (v == "trapezoidal") return Scheme::Trapezoidal;
  throw ConfigError("time.scheme: expected implicit_euler or trapezoidal, got '" + v + "'");
}

MassKind mass_from(const std::string& v) {
  if (v == "lumped") return MassKind::Lumped;
  if (v == "consistent") return MassKind::Consistent;
  throw ConfigError("time.mass: expected lumped or consistent, got '" + v + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&, const std::string&)>;

struct Pending {
  std::vector<double> n_omega, n_sigma2;
  bool sigma1_given = false;
};

}  // namespace

const std::vector<std::string>& certificate_names() {
  static const std::vector<std::string> names{
      "poincare",        "hardy",          "weighted_sobolev", "linfty_ratio",    "elliptic_hopf",
      "eigen_comparison", "parabolic_hopf", "theta_monotone",   "delta_elliptic",  "delta_parabolic",
      "dirichlet_delta", "comparison",     "parabolic_positivity", "walker"};
  return names;
}

std::vector<Interval> parse_intervals(const std::string& text) {
  std::vector<Interval> out;
  for (const auto& item : split(text, ',')) {
    const auto colon = item.find(':', item.front() == '-' ? 1 : 0);
    if (colon == std::string::npos) throw ConfigError("interval '" + item + "' is not of the form lo:hi");
    out.push_back({to_double("interval", item.substr(0, colon)), to_double("interval", item.substr(colon + 1))});
  }
  return out;
}

std::string format_intervals(const std::vector<Interval>& list) {
  std::string s;
  for (std::size_t i = 0; i < list.size(); ++i) s += (i ? "," : "") + fmt(list[i].lo) + ":" + fmt(list[i].hi);
  return s;
}

std::vector<Interval> complement(std::vector<Interval> taken) {
  std::sort(taken.begin(), taken.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> out;
  double cur = -kInf;
  for (const auto& I : taken) {
    if (I.lo > cur) out.push_back({cur, I.lo});
    cur = std::max(cur, I.hi);
  }
  if (cur < kInf) out.push_back({cur, kInf});
  return out;
}

RunConfig default_config() {
  RunConfig c;
  c.partition.omega = {{-1.0, 1.0}};
  c.partition.sigma2 = {{1.0, 2.0}};
  c.partition.sigma1 = {{-kInf, -1.0}, {2.0, kInf}};
  c.partition.s = 0.5;
  c.sweep = {{64, 32}, {128, 64}, {256, 128}};
  return c;
}

std::string RunConfig::canonical() const {
  std::vector<std::string> lines;
  auto add = [&](const std::string& k, const std::string& v) { lines.push_back(k + " = " + v); };
  add("partition.omega", format_intervals(partition.omega));
  add("partition.sigma1", format_intervals(partition.sigma1));
  add("partition.sigma2", format_intervals(partition.sigma2));
  add("partition.s", fmt(partition.s));
  std::vector<double> no, ns;
  for (const auto& l : sweep) no.push_back(l.n_omega), ns.push_back(l.n_sigma2);
  add("mesh.n_omega", list_text(no));
  add("mesh.n_sigma2", list_text(ns));
  add("mesh.grading", grading.kind == Grading::Kind::Uniform ? "uniform" : "geometric");
  add("mesh.grading_ratio", fmt(grading.ratio));
  add("mesh.grading_layers", std::to_string(grading.layers));
  add("quadrature.gauss_order", std::to_string(quadrature.gauss_order));
  add("quadrature.singular_order", std::to_string(quadrature.singular_order));
  add("quadrature.admissibility", fmt(quadrature.admissibility));
  add("quadrature.near_radius", fmt(quadrature.near_radius));
  add("quadrature.pv_order", std::to_string(quadrature.pv_order));
  add("quadrature.refinement_cap", std::to_string(quadrature.refinement_cap));
  add("quadrature.tolerance", fmt(quadrature.tolerance));
  add("solver.eig_tol", fmt(eig_tol));
  add("family.kind", to_string(family_kind));
  add("family.count", std::to_string(family_count));
  add("family.seed", std::to_string(family_seed));
  add("time.grid", list_text(t_grid));
  add("time.dt_factor", fmt(dt_factor));
  add("time.scheme", stepper.scheme == Scheme::ImplicitEuler ? "implicit_euler" : "trapezoidal");
  add("time.mass", stepper.mass == MassKind::Lumped ? "lumped" : "consistent");
  add("walker.window", fmt(walker_window));
  add("walker.bins", std::to_string(walker_bins));
  add("walker.count", std::to_string(walker_count));
  add("walker.seed", std::to_string(walker_seed));
  add("walker.starts", list_text(walker_starts));
  add("verify.sobolev_r", fmt(sobolev_r));
  add("verify.sobolev_r_ceiling", fmt(sobolev_r_ceiling));
  add("verify.linfty_p", fmt(linfty_p));
  add("verify.drift_limit", fmt(drift_limit));
  std::string certs;
  for (std::size_t i = 0; i < certificates.size(); ++i) certs += (i ? "," : "") + certificates[i];
  add("verify.certificates", certs);
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

std::uint64_t RunConfig::digest() const { return fnv1a(canonical()); }

RunConfig parse_config(const std::string& text) {
  RunConfig cfg = default_config();
  Pending pending;
  const std::map<std::string, Setter> setters{
      {"partition.omega", [](RunConfig& c, const std::string&, const std::string& v) { c.partition.omega = parse_intervals(v); }},
      {"partition.sigma1",
       [&pending](RunConfig& c, const std::string&, const std::string& v) {
         pending.sigma1_given = v != "auto";
         if (pending.sigma1_given) c.partition.sigma1 = parse_intervals(v);
       }},
      {"partition.sigma2", [](RunConfig& c, const std::string&, const std::string& v) { c.partition.sigma2 = parse_intervals(v); }},
      {"partition.s", [](RunConfig& c, const std::string& k, const std::string& v) { c.partition.s = to_double(k, v); }},
      {"mesh.n_omega", [&pending](RunConfig&, const std::string& k, const std::string& v) { pending.n_omega = to_list(k, v); }},
      {"mesh.n_sigma2", [&pending](RunConfig&, const std::string& k, const std::string& v) { pending.n_sigma2 = to_list(k, v); }},
      {"mesh.grading",
       [](RunConfig& c, const std::string& k, const std::string& v) {
         if (v == "uniform") c.grading.kind = Grading::Kind::Uniform;
         else if (v == "geometric") c.grading.kind = Grading::Kind::Geometric;
         else throw ConfigError(k + ": expected uniform or geometric");
       }},
      {"mesh.grading_ratio", [](RunConfig& c, const std::string& k, const std::string& v) { c.grading.ratio = to_double(k, v); }},
      {"mesh.grading_layers", [](RunConfig& c, const std::string& k, const std::string& v) { c.grading.layers = static_cast<int>(to_int(k, v)); }},
      {"quadrature.gauss_order", [](RunConfig& c, const std::string& k, const std::string& v) { c.quadrature.gauss_order = static_cast<int>(to_int(k, v)); }},
      {"quadrature.singular_order", [](RunConfig& c, const std::string& k, const std::string& v) { c.quadrature.singular_order = static_cast<int>(to_int(k, v)); }},
      {"quadrature.admissibility", [](RunConfig& c, const std::string& k, const std::string& v) { c.quadrature.admissibility = to_double(k, v); }},
      {"quadrature.near_radius", [](RunConfig& c, const std::string& k, const std::string& v) { c.quadrature.near_radius = to_double(k, v); }},
      {"quadrature.pv_order", [](RunConfig& c, const std::string& k, const std::string& v) { c.quadrature.pv_order = static_cast<int>(to_int(k, v)); }},
      {"quadrature.refinement_cap", [](RunConfig& c, const std::string& k, const std::string& v) { c.quadrature.refinement_cap = static_cast<int>(to_int(k, v)); }},
      {"quadrature.tolerance", [](RunConfig& c, const std::string& k, const std::string& v) { c.quadrature.tolerance = to_double(k, v); }},
      {"solver.eig_tol", [](RunConfig& c, const std::string& k, const std::string& v) { c.eig_tol = to_double(k, v); }},
      {"family.kind", [](RunConfig& c, const std::string&, const std::string& v) { c.family_kind = family_kind_from_string(v); }},
      {"family.count", [](RunConfig& c, const std::string& k, const std::string& v) { c.family_count = static_cast<int>(to_int(k, v)); }},
      {"family.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.family_seed = to_seed(k, v); }},
      {"time.grid", [](RunConfig& c, const std::string& k, const std::string& v) { c.t_grid = to_list(k, v); }},
      {"time.dt_factor", [](RunConfig& c, const std::string& k, const std::string& v) { c.dt_factor = to_double(k, v); }},
      {"time.scheme", [](RunConfig& c, const std::string&, const std::string& v) { c.stepper.scheme = scheme_from(v); }},
      {"time.mass", [](RunConfig& c, const std::string&, const std::string& v) { c.stepper.mass = mass_from(v); }},
      {"walker.window", [](RunConfig& c, const std::string& k, const std::string& v) { c.walker_window = to_double(k, v); }},
      {"walker.bins", [](RunConfig& c, const std::string& k, const std::string& v) { c.walker_bins = static_cast<int>(to_int(k, v)); }},
      {"walker.count", [](RunConfig& c, const std::string& k, const std::string& v) { c.walker_count = static_cast<std::size_t>(to_int(k, v)); }},
      {"walker.seed", [](RunConfig& c, const std::string& k, const std::string& v) { c.walker_seed = to_seed(k, v); }},
      {"walker.starts", [](RunConfig& c, const std::string& k, const std::string& v) { c.walker_starts = to_list(k, v); }},
      {"verify.sobolev_r", [](RunConfig& c, const std::string& k, const std::string& v) { c.sobolev_r = to_double(k, v); }},
      {"verify.sobolev_r_ceiling", [](RunConfig& c, const std::string& k, const std::string& v) { c.sobolev_r_ceiling = to_double(k, v); }},
      {"verify.linfty_p", [](RunConfig& c, const std::string& k, const std::string& v) { c.linfty_p = to_double(k, v); }},
      {"verify.drift_limit", [](RunConfig& c, const std::string& k, const std::string& v) { c.drift_limit = to_double(k, v); }},
      {"verify.certificates",
       [](RunConfig& c, const std::string&, const std::string& v) {
         c.certificates = split(v, ',');
         if (c.certificates.size() == 1 && c.certificates[0] == "all") c.certificates.clear();
       }},
      {"output.dir", [](RunConfig& c, const std::string&, const std::string& v) { c.out_dir = v; }},
  };

  std::istringstream is(text);
  std::string line, section;
  bool sigma_edited = false;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(lineno) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = (section.empty() ? "" : section + ".") + trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError(where + "unknown key '" + key + "'");
    try {
      it->second(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + (e.what() + std::string("ConfigError: ").size()));
    }
    if (key == "partition.omega" || key == "partition.sigma2") sigma_edited = true;
  }

  if (!pending.sigma1_given && sigma_edited) {
    std::vector<Interval> taken = cfg.partition.omega;
    taken.insert(taken.end(), cfg.partition.sigma2.begin(), cfg.partition.sigma2.end());
    cfg.partition.sigma1 = complement(taken);
  }
  if (!pending.n_omega.empty()) {
    const double o_len = cfg.partition.omega_measure();
    const double s2_len = cfg.partition.sigma2_measure();
    if (!pending.n_sigma2.empty() && pending.n_sigma2.size() != pending.n_omega.size())
      throw ConfigError("mesh.n_sigma2 must list as many levels as mesh.n_omega");
    cfg.sweep.clear();
    for (std::size_t i = 0; i < pending.n_omega.size(); ++i) {
      MeshLevel l;
      l.n_omega = static_cast<int>(pending.n_omega[i]);
      l.n_sigma2 = pending.n_sigma2.empty()
                       ? std::max(2, static_cast<int>(std::lround(l.n_omega * s2_len / o_len)))
                       : static_cast<int>(pending.n_sigma2[i]);
      cfg.sweep.push_back(l);
    }
  } else if (!pending.n_sigma2.empty()) {
    throw ConfigError("mesh.n_sigma2 requires mesh.n_omega");
  }
  for (const auto& name : cfg.certificates)
    if (std::find(certificate_names().begin(), certificate_names().end(), name) == certificate_names().end())
      throw ConfigError("unknown certificate '" + name + "'");
  if (cfg.sweep.empty()) throw ConfigError("mesh sweep is empty");
  if (cfg.family_count < 1) throw ConfigError("family.count must be positive");
  if (cfg.t_grid.empty()) throw ConfigError("time.grid is empty");
  for (std::size_t i = 0; i < cfg.t_grid.size(); ++i)
    if (!(cfg.t_grid[i] > 0.0) || (i && cfg.t_grid[i] <= cfg.t_grid[i - 1]))
      throw ConfigError("time.grid must be positive and increasing");
  if (!(cfg.dt_factor > 0.0)) throw ConfigError("time.dt_factor must be positive");
  if (cfg.walker_count < 2) throw ConfigError("walker.count must be at least 2");
  cfg.partition = validate_partition(cfg.partition);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace fracmix
