#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fracmix/config.hpp"
#include "fracmix/verify.hpp"

namespace fracmix {

inline constexpr const char* kToolVersion = "0.1.0";

enum class Subcommand { Solve, Eigen, Parabolic, Walk, Verify };

const char* to_string(Subcommand c);
Subcommand subcommand_from_string(const std::string& s);

struct RunRecord {
  std::string label;  // e.g. "s=0.25/n=128" or "s=0.25/refinement"
  std::vector<Certificate> certificates;
  double seconds = 0.0;
};

struct Report {
  std::uint64_t config_digest = 0;
  std::string subcommand;
  std::vector<RunRecord> runs;

  bool all_pass() const;
  nlohmann::json to_json() const;  // value-identical across reruns apart from "seconds"
  std::string summary_csv() const;
};

/// Runs one pipeline for one configuration and writes fields/*.csv under out_dir.
/// The label prefixes every run record.
Report execute(Subcommand cmd, const RunConfig& cfg, const std::string& out_dir,
               const std::string& label = "");

/// Configurations of the default experiment: all certificates at s = 0.25 and 0.75,
/// plus the r > 0 weighted Sobolev case at s = 0.4.
std::vector<std::pair<std::string, RunConfig>> default_suite(const RunConfig& base);

/// Writes report.json and summary.csv.
void write_report(const Report& r, const std::string& out_dir);

/// Maps an in-flight exception to the process exit status (2 input, 3 numerical).
int exit_status(const std::exception& e);

}  // namespace fracmix
