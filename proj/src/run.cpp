#include "fracmix/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "fracmix/errors.hpp"

namespace fracmix {
namespace {

namespace fs = std::filesystem;

std::string hex(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

std::string join(const std::string& a, const std::string& b) {
  if (a.empty()) return b;
  return a + "/" + b;
}

void write_field(const fs::path& path, const Field& u) {
  std::ofstream out(path);
  out << std::setprecision(17) << "x,value\n";
  const Mesh& m = u.mesh();
  for (std::size_t i = 0; i < m.n_nodes(); ++i) out << m.x(i) << ',' << u.node_value(i) << '\n';
}

void write_trajectory(const fs::path& path, const Trajectory& tr, const std::vector<double>& times) {
  std::ofstream out(path);
  out << std::setprecision(17) << "x,value,t\n";
  for (double t : times) {
    const long n = std::lround(t / tr.dt);
    if (n < 0 || static_cast<std::size_t>(n) >= tr.states.size()) continue;
    const Field& u = tr.states[static_cast<std::size_t>(n)];
    const Mesh& m = u.mesh();
    for (std::size_t i = 0; i < m.n_nodes(); ++i) out << m.x(i) << ',' << u.node_value(i) << ',' << tr.times[n] << '\n';
  }
}

struct Level {
  std::shared_ptr<const Mesh> mesh;
  OperatorSet ops;
  std::string tag;
};

Level make_level(const RunConfig& cfg, const MeshLevel& l) {
  auto mesh = std::make_shared<const Mesh>(build_mesh(cfg.partition, l.n_omega, l.n_sigma2, cfg.grading));
  OperatorSet ops = assemble_stiffness(mesh, KernelParams::make(cfg.partition.s), cfg.quadrature);
  return {mesh, std::move(ops), "n" + std::to_string(l.n_omega)};
}

bool wants(const RunConfig& cfg, const std::string& name) {
  if (cfg.certificates.empty()) return true;
  return std::find(cfg.certificates.begin(), cfg.certificates.end(), name) != cfg.certificates.end();
}

ParabolicSetup parabolic_setup(const RunConfig& cfg) {
  ParabolicSetup s;
  s.stepper = cfg.stepper;
  s.dt_factor = cfg.dt_factor;
  s.t_grid = cfg.t_grid;
  return s;
}

// The eigenfunction family has one member, the mixed first eigenfunction of the level.
FunctionFamily family(const RunConfig& cfg, const Field& chi, double floor = 0.0) {
  if (cfg.family_kind != FamilyKind::Eigenfunction) {
    FunctionFamily f = make_family(cfg.family_kind, cfg.family_count, cfg.family_seed, cfg.partition, floor);
    check_family(f, cfg.partition);
    return f;
  }
  FunctionFamily f;
  f.kind = FamilyKind::Eigenfunction;
  f.count = 1;
  f.seed = cfg.family_seed;
  f.floor = floor;
  const DomainPartition p = cfg.partition;
  f.members.push_back([chi, p, floor](double x) { return p.in_omega_closure(x) ? std::max(0.0, chi(x)) + floor : 0.0; });
  return f;
}

FunctionFamily family(const RunConfig& cfg, const OperatorSet& ops) {
  if (cfg.family_kind != FamilyKind::Eigenfunction) return family(cfg, Field{});
  return family(cfg, solve_eigen(BoundaryMode::Mixed, ops, cfg.eig_tol).chi);
}

std::vector<Eigen::VectorXd> walker_payoffs(const RunConfig& cfg) {
  const auto bins = make_sigma1_bins(cfg.partition, cfg.walker_window, cfg.walker_bins);
  const long n = static_cast<long>(bins.size());
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n), left(n), smooth(n);
  for (long i = 0; i < n; ++i) {
    const Interval& b = bins[static_cast<std::size_t>(i)];
    const double mid = b.bounded() ? 0.5 * (b.lo + b.hi) : (b.lo == -kInf ? b.hi : b.lo);
    left(i) = mid < cfg.partition.omega.front().lo ? 1.0 : 0.0;
    smooth(i) = 1.0 / (1.0 + mid * mid);
  }
  return {ones, left, smooth};
}

Certificate eigen_order(const OperatorSet& ops, const Gauges& g, double eig_tol) {
  const EigenPair dir = solve_eigen(BoundaryMode::Dirichlet, ops, eig_tol);
  Certificate c;
  c.name = "eigen_order";
  c.inputs = describe_inputs(ops, "eig_tol=" + std::to_string(eig_tol));
  c.digest = fnv1a(c.inputs);
  c.tolerance = 1e-10;
  c.set("lambda1_mixed", g.chi.lambda1);
  c.set("lambda1_dirichlet", dir.lambda1);
  c.set("residual_mixed", g.chi.residual);
  c.set("residual_dirichlet", dir.residual);
  c.pass = g.chi.lambda1 > 0.0 && g.chi.lambda1 <= dir.lambda1 && g.chi.residual < c.tolerance &&
           dir.residual < c.tolerance;
  c.notes = "mixed first eigenvalue is positive and below the Dirichlet one";
  return c;
}

struct DriftKey {
  const char* cert;
  const char* key;
  double limit;  // < 0 uses the configured drift limit
};

const DriftKey kDriftKeys[] = {
    {"poincare", "lambda1", 0.10},         {"hardy", "hardy_sup", -1},
    {"weighted_sobolev", "sobolev_sup", -1}, {"linfty_ratio", "ratio_sup", -1},
    {"elliptic_hopf", "c_emp_min", -1},    {"eigen_comparison", "C_up", 0.15},
    {"eigen_comparison", "C_down", 0.15},  {"delta_elliptic", "bound_min", -1},
    {"delta_parabolic", "bound_min", -1},  {"dirichlet_delta", "ratio_min", -1},
};

std::vector<Certificate> verify_level(const RunConfig& cfg, const Level& lv, const fs::path& fields) {
  const OperatorSet& ops = lv.ops;
  const Gauges g = Gauges::compute(ops, cfg.eig_tol);
  write_field(fields / ("xi0_" + lv.tag + ".csv"), g.xi0);
  write_field(fields / ("chi1_" + lv.tag + ".csv"), g.chi.chi);
  const FunctionFamily fam = family(cfg, g.chi.chi);
  const ParabolicSetup ps = parabolic_setup(cfg);
  std::vector<Certificate> out;
  if (wants(cfg, "poincare")) {
    out.push_back(certify_poincare(ops, g, fam));
    out.push_back(eigen_order(ops, g, cfg.eig_tol));
  }
  if (wants(cfg, "hardy")) out.push_back(certify_hardy(ops, fam));
  if (wants(cfg, "weighted_sobolev"))
    out.push_back(certify_weighted_sobolev(ops, g.xi0, fam, cfg.sobolev_r, cfg.sobolev_r_ceiling));
  if (wants(cfg, "linfty_ratio"))
    out.push_back(certify_linfty_ratio(ops, g, fam, cfg.linfty_p > 0 ? cfg.linfty_p : 2.0 / cfg.partition.s));
  if (wants(cfg, "elliptic_hopf")) out.push_back(certify_elliptic_hopf(ops, g, fam));
  if (wants(cfg, "eigen_comparison")) out.push_back(certify_eigen_comparison(ops, g));
  if (wants(cfg, "parabolic_hopf")) out.push_back(certify_parabolic_hopf(ops, g, fam, ps));
  if (wants(cfg, "theta_monotone")) {
    const FunctionFamily lifted = family(cfg, g.chi.chi, 0.5);
    const double dt = cfg.dt_factor / g.chi.lambda1;
    const double t_end = cfg.t_grid.back() / g.chi.lambda1;
    const Trajectory v = solve_parabolic(ops, g.chi.chi, t_end, dt, cfg.stepper);
    Certificate worst;
    for (int k = 0; k < std::min(3, lifted.count); ++k) {
      const Field u0(lv.mesh, interpolate_on(*lv.mesh, lifted.members[k], lv.mesh->omega_dofs()));
      const Trajectory u = solve_parabolic(ops, u0, t_end, dt, cfg.stepper);
      Certificate c = monitor_theta(ops, u, v, {1, 2});
      if (k == 0 || !c.pass || c.constant("theta2_max_step_increase") > worst.constant("theta2_max_step_increase"))
        worst = c;
    }
    out.push_back(worst);
  }
  if (wants(cfg, "delta_elliptic")) out.push_back(certify_delta_lower_bounds(ops, g, fam, BoundMode::Elliptic));
  if (wants(cfg, "delta_parabolic"))
    out.push_back(certify_delta_lower_bounds(ops, g, fam, BoundMode::Parabolic, ps));
  if (wants(cfg, "dirichlet_delta")) out.push_back(certify_dirichlet_delta(ops));
  if (wants(cfg, "comparison")) out.push_back(certify_comparison(ops, fam));
  if (wants(cfg, "parabolic_positivity")) out.push_back(certify_parabolic_positivity(ops, g, fam, ps));
  return out;
}

WalkerSetup walker_setup(const RunConfig& cfg) {
  return {cfg.walker_window, cfg.walker_bins, cfg.walker_count, cfg.walker_seed};
}

}  // namespace

const char* to_string(Subcommand c) {
  switch (c) {
    case Subcommand::Solve: return "solve";
    case Subcommand::Eigen: return "eigen";
    case Subcommand::Parabolic: return "parabolic";
    case Subcommand::Walk: return "walk";
    case Subcommand::Verify: return "verify";
  }
  return "?";
}

Subcommand subcommand_from_string(const std::string& s) {
  for (auto c : {Subcommand::Solve, Subcommand::Eigen, Subcommand::Parabolic, Subcommand::Walk, Subcommand::Verify})
    if (s == to_string(c)) return c;
  throw ConfigError("unknown subcommand '" + s + "'");
}

bool Report::all_pass() const {
  for (const auto& r : runs)
    for (const auto& c : r.certificates)
      if (!c.pass) return false;
  return true;
}

nlohmann::json Report::to_json() const {
  nlohmann::json j;
  j["tool"] = "fracmix";
  j["version"] = kToolVersion;
  j["subcommand"] = subcommand;
  j["config_digest"] = hex(config_digest);
  j["all_pass"] = all_pass();
  j["runs"] = nlohmann::json::array();
  for (const auto& r : runs) {
    nlohmann::json jr;
    jr["label"] = r.label;
    jr["seconds"] = r.seconds;
    jr["certificates"] = nlohmann::json::array();
    for (const auto& c : r.certificates) {
      nlohmann::json jc;
      jc["name"] = c.name;
      jc["verdict"] = c.pass ? "PASS" : "FAIL";
      jc["tolerance"] = c.tolerance;
      jc["inputs_digest"] = hex(c.digest);
      jc["inputs"] = c.inputs;
      jc["notes"] = c.notes;
      nlohmann::json consts = nlohmann::json::object();
      for (const auto& [k, v] : c.constants) consts[k] = std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
      jc["constants"] = consts;
      jr["certificates"].push_back(jc);
    }
    j["runs"].push_back(jr);
  }
  return j;
}

std::string Report::summary_csv() const {
  std::ostringstream os;
  os << std::setprecision(17) << "run,certificate,constant,value,verdict\n";
  for (const auto& r : runs)
    for (const auto& c : r.certificates)
      for (const auto& [k, v] : c.constants)
        os << r.label << ',' << c.name << ',' << k << ',' << v << ',' << (c.pass ? "PASS" : "FAIL") << '\n';
  return os.str();
}

Report execute(Subcommand cmd, const RunConfig& cfg, const std::string& out_dir, const std::string& label) {
  Report rep;
  rep.config_digest = cfg.digest();
  rep.subcommand = to_string(cmd);
  const fs::path fields = fs::path(out_dir) / "fields";
  fs::create_directories(fields);
  using clock = std::chrono::steady_clock;

  if (cmd == Subcommand::Walk) {
    const auto t0 = clock::now();
    const Level lv = make_level(cfg, cfg.sweep.front());
    const auto payoffs = walker_payoffs(cfg);
    RunRecord r{join(label, lv.tag), {}, 0.0};
    r.certificates.push_back(certify_walker(lv.ops, payoffs, cfg.walker_starts, walker_setup(cfg)));
    const JumpChain chain = build_chain(*lv.mesh, lv.ops.kernel, cfg.walker_window, cfg.walker_bins);
    std::ofstream out(fields / ("walk_" + lv.tag + ".csv"));
    out << std::setprecision(17) << "x,value,payoff\n";
    for (std::size_t k = 0; k < payoffs.size(); ++k) {
      const Eigen::VectorXd u = solve_chain(chain, payoffs[k]);
      for (std::size_t i = 0; i < chain.omega_x.size(); ++i) out << chain.omega_x[i] << ',' << u(static_cast<long>(i)) << ',' << k << '\n';
    }
    r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rep.runs.push_back(std::move(r));
    return rep;
  }

  std::map<std::string, std::vector<Certificate>> per_name;
  for (const auto& l : cfg.sweep) {
    const auto t0 = clock::now();
    const Level lv = make_level(cfg, l);
    RunRecord r{join(label, lv.tag), {}, 0.0};
    switch (cmd) {
      case Subcommand::Solve: {
        const Field xi = solve_xi0(lv.ops);
        const Field xd = solve_elliptic(BoundaryMode::Dirichlet, lv.ops,
                                        assemble_load(*lv.mesh, [](double) { return 1.0; }, "f=1"));
        write_field(fields / ("solve_mixed_" + lv.tag + ".csv"), xi);
        write_field(fields / ("solve_dirichlet_" + lv.tag + ".csv"), xd);
        r.certificates.push_back(certify_comparison(lv.ops, family(cfg, lv.ops)));
        break;
      }
      case Subcommand::Eigen: {
        const Gauges g = Gauges::compute(lv.ops, cfg.eig_tol);
        write_field(fields / ("eigen_mixed_" + lv.tag + ".csv"), g.chi.chi);
        write_field(fields / ("eigen_dirichlet_" + lv.tag + ".csv"),
                    solve_eigen(BoundaryMode::Dirichlet, lv.ops, cfg.eig_tol).chi);
        r.certificates.push_back(certify_poincare(lv.ops, g, family(cfg, g.chi.chi)));
        r.certificates.push_back(eigen_order(lv.ops, g, cfg.eig_tol));
        r.certificates.push_back(certify_eigen_comparison(lv.ops, g));
        r.certificates.push_back(certify_dirichlet_delta(lv.ops));
        break;
      }
      case Subcommand::Parabolic: {
        const Gauges g = Gauges::compute(lv.ops, cfg.eig_tol);
        const FunctionFamily fam = family(cfg, g.chi.chi);
        const double lambda = g.chi.lambda1;
        const Field u0(lv.mesh, interpolate_on(*lv.mesh, fam.members.front(), lv.mesh->omega_dofs()));
        const Trajectory tr = solve_parabolic(lv.ops, u0, cfg.t_grid.back() / lambda, cfg.dt_factor / lambda, cfg.stepper);
        std::vector<double> times;
        for (double t : cfg.t_grid) times.push_back(t / lambda);
        write_trajectory(fields / ("parabolic_" + lv.tag + ".csv"), tr, times);
        const ParabolicSetup ps = parabolic_setup(cfg);
        r.certificates.push_back(certify_parabolic_hopf(lv.ops, g, fam, ps));
        r.certificates.push_back(certify_parabolic_positivity(lv.ops, g, fam, ps));
        break;
      }
      case Subcommand::Verify:
        r.certificates = verify_level(cfg, lv, fields);
        break;
      case Subcommand::Walk:
        break;
    }
    for (const auto& c : r.certificates) per_name[c.name].push_back(c);
    r.seconds = std::chrono::duration<double>(clock::now() - t0).count();
    rep.runs.push_back(std::move(r));
  }

  if (cmd == Subcommand::Verify) {
    RunRecord r{join(label, "refinement"), {}, 0.0};
    if (cfg.sweep.size() >= 2)
      for (const auto& d : kDriftKeys) {
        const auto it = per_name.find(d.cert);
        if (it == per_name.end()) continue;
        r.certificates.push_back(refine_stable(it->second, d.key, d.limit < 0 ? cfg.drift_limit : d.limit));
      }
    if (!r.certificates.empty()) rep.runs.push_back(std::move(r));
    if (wants(cfg, "walker")) {
      const auto t0 = clock::now();
      const Level lv = make_level(cfg, cfg.sweep.front());
      RunRecord w{join(label, "walker/" + lv.tag), {}, 0.0};
      w.certificates.push_back(certify_walker(lv.ops, walker_payoffs(cfg), cfg.walker_starts, walker_setup(cfg)));
      w.seconds = std::chrono::duration<double>(clock::now() - t0).count();
      rep.runs.push_back(std::move(w));
    }
  }
  return rep;
}

std::vector<std::pair<std::string, RunConfig>> default_suite(const RunConfig& base) {
  std::vector<std::pair<std::string, RunConfig>> out;
  for (double s : {0.25, 0.75}) {
    RunConfig c = base;
    c.partition.s = s;
    c.certificates.clear();
    c.sobolev_r = 0.0;
    out.emplace_back(s == 0.25 ? "s=0.25" : "s=0.75", c);
  }
  RunConfig c = base;
  c.partition.s = 0.4;
  c.certificates = {"weighted_sobolev"};
  c.sobolev_r = 1.0;
  out.emplace_back("s=0.4,r=1", c);
  return out;
}

void write_report(const Report& r, const std::string& out_dir) {
  fs::create_directories(out_dir);
  std::ofstream(fs::path(out_dir) / "report.json") << r.to_json().dump(2) << '\n';
  std::ofstream(fs::path(out_dir) / "summary.csv") << r.summary_csv();
}

int exit_status(const std::exception& e) {
  if (dynamic_cast<const InputError*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return 2;
  return 3;
}

}  // namespace fracmix
