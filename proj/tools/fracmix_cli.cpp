#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "fracmix/errors.hpp"
#include "fracmix/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Mixed Dirichlet/Neumann fractional Laplacian solver and certificate runner"};
  std::string command = "verify", config_path, out_dir, suite;
  std::optional<std::uint64_t> seed;
  app.add_option("command", command, "solve | eigen | parabolic | walk | verify")
      ->check(CLI::IsMember({"solve", "eigen", "parabolic", "walk", "verify"}));
  app.add_option("--config", config_path, "configuration file");
  app.add_option("--out", out_dir, "output directory (overrides output.dir)");
  app.add_option("--seed", seed, "overrides family.seed and walker.seed");
  app.add_option("--suite", suite, "named experiment")->check(CLI::IsMember({"paper"}));
  app.add_flag_callback("--version", [] {
    std::cout << "fracmix " << fracmix::kToolVersion << '\n';
    throw CLI::Success();
  });
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    fracmix::RunConfig cfg = config_path.empty() ? fracmix::default_config() : fracmix::load_config(config_path);
    if (seed) {
      cfg.family_seed = *seed;
      cfg.walker_seed = *seed;
    }
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    const auto cmd = fracmix::subcommand_from_string(command);

    fracmix::Report report;
    if (suite == "paper") {
      report.config_digest = cfg.digest();
      report.subcommand = std::string(fracmix::to_string(cmd)) + ":paper";
      for (const auto& [label, c] : fracmix::default_suite(cfg)) {
        const auto part = fracmix::execute(cmd, c, cfg.out_dir + "/" + label, label);
        report.runs.insert(report.runs.end(), part.runs.begin(), part.runs.end());
      }
    } else {
      report = fracmix::execute(cmd, cfg, cfg.out_dir);
    }
    fracmix::write_report(report, cfg.out_dir);
    for (const auto& r : report.runs)
      for (const auto& c : r.certificates)
        std::cout << (c.pass ? "PASS " : "FAIL ") << r.label << ' ' << c.name << '\n';
    std::cout << "report: " << cfg.out_dir << "/report.json\n";
    return report.all_pass() ? 0 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return fracmix::exit_status(e);
  }
}
