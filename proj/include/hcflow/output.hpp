// Persistence of runs: diagnostics CSV, final-profile CSV, and the
// summary JSON with the estimate verdict table and fitted constants.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "hcflow/monitors.hpp"
#include "hcflow/scenario.hpp"

namespace hcf {

struct VerdictRow {
  std::string id;       // Int14, Int18, Gre0, Gre1, Gre11, C2b22, c2g13, Con2, Unf2
  std::string verdict;  // PASS | FAIL | INCONCLUSIVE
  double lhs = 0.0;
  double rhs = 0.0;
  std::string note;
};

struct RunSummary {
  std::string command;
  std::string termination;
  double final_residual = 0.0;
  double final_time = 0.0;
  long steps = 0;
  double wall_seconds = 0.0;

  double C_fit = 0.0;       // boundary gradient bound coefficient
  double lambda_hat = 0.0;  // exponential envelope rate of max(F - sigma)

  double min_conv_run = 0.0;
  double min_res_run = 0.0;
  double max_w_badj_run = 0.0;
  double min_nu_run = 0.0;
  double max_kappa_run = 0.0;
  bool monotone_ok = true;

  std::vector<VerdictRow> rows;  // always the nine named estimates
  ScenarioConfig scenario;       // echoed configuration

  bool any_fail() const;
};

// Assembles the verdict table from a finished run.  `cmp` fills the Unf2
// row when a comparison was performed.
RunSummary build_run_summary(const Trajectory& traj, const std::vector<DiagnosticsRecord>& records,
                             const ScenarioConfig& scenario, const std::string& command,
                             double wall_seconds, const ComparisonResult* cmp = nullptr);

// <prefix>_diag.csv, <prefix>_final_u.csv and <prefix>_summary.json under
// the output directory; `suffix` distinguishes continuation levels.
struct WrittenFiles {
  std::string diag_csv;
  std::string final_u_csv;
  std::string summary_json;
};
WrittenFiles write_outputs(const Trajectory& traj, const std::vector<DiagnosticsRecord>& records,
                           const RunSummary& summary, const OutputSpec& output,
                           const std::string& suffix = "");

std::string summary_to_json(const RunSummary& summary);

// Diagnostic CSV column order (one name per DiagnosticsRecord field).
const std::vector<std::string>& diag_columns();

}  // namespace hcf
