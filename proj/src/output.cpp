#include "hcflow/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace hcf {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string num17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

double fit_lambda_hat(const Trajectory& traj) {
  // Smallest rate lam with max(F-sigma)(t) <= max(F-sigma)(0) e^{lam t}
  // over the stored snapshots.
  if (traj.snapshots.size() < 2) return 0.0;
  const double m0 = traj.snapshots.front().max_res;
  if (!(m0 > 0.0)) return 0.0;
  double lam = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const Snapshot& s = traj.snapshots[k];
    if (!(s.t > 0.0) || !(s.max_res > 0.0)) continue;
    lam = std::max(lam, (std::log(s.max_res) - std::log(m0)) / s.t);
  }
  return std::isfinite(lam) ? lam : 0.0;
}

VerdictRow row(const std::string& id, bool pass, double lhs, double rhs,
               const std::string& note = "") {
  return {id, pass ? "PASS" : "FAIL", lhs, rhs, note};
}

VerdictRow inconclusive(const std::string& id, double lhs, double rhs, const std::string& note) {
  return {id, "INCONCLUSIVE", lhs, rhs, note};
}

}  // namespace

bool RunSummary::any_fail() const {
  for (const auto& r : rows)
    if (r.verdict == "FAIL") return true;
  return false;
}

RunSummary build_run_summary(const Trajectory& traj, const std::vector<DiagnosticsRecord>& records,
                             const ScenarioConfig& scenario, const std::string& command,
                             double wall_seconds, const ComparisonResult* cmp) {
  const FlowConfig& cfg = traj.config;
  const double sigma = cfg.sigma;

  RunSummary s;
  s.command = command;
  s.termination = to_string(traj.reason);
  s.final_residual = traj.final_residual;
  s.final_time = traj.final_time;
  s.steps = traj.steps;
  s.wall_seconds = wall_seconds;
  s.scenario = scenario;
  s.min_conv_run = traj.min_conv_run;
  s.min_res_run = traj.min_res_run;
  s.max_w_badj_run = traj.max_w_badj_run;
  s.min_nu_run = traj.min_nu_run;
  s.max_kappa_run = traj.max_kappa_run;
  s.monotone_ok = traj.monotone_ok;
  s.lambda_hat = fit_lambda_hat(traj);
  s.C_fit = std::max(0.0, traj.max_w_badj_run - 1.0 / sigma) / cfg.epsilon;

  MonitorTolerances tols;

  // Int14: local strict convexity along the whole run, sign only.
  s.rows.push_back(row("Int14", traj.min_conv_run > 0.0, traj.min_conv_run, 0.0));

  // Int18: boundary-adjacent gradient bound w <= 1/sigma + 0.5.
  s.rows.push_back(row("Int18", traj.max_w_badj_run <= 1.0 / sigma + 0.5, traj.max_w_badj_run,
                       1.0 / sigma + 0.5));

  // Gre0 / Gre1 / c2g13: per-record checks must hold at every snapshot.
  double gre0_worst = -std::numeric_limits<double>::infinity();
  bool gre0_ok = true, gre1_ok = true, c2g13_ok = true;
  bool gre1_triggered = false;
  double gre1_lhs = 1.0;
  double gre1_trigger_max = -std::numeric_limits<double>::infinity();
  double c2g13_worst = 0.0;
  for (const auto& r : records) {
    gre0_ok = gre0_ok && r.ok_gre0;
    gre0_worst = std::max(gre0_worst, r.gre0_margin);
    gre1_ok = gre1_ok && r.ok_gre1;
    gre1_trigger_max = std::max(gre1_trigger_max, r.gre1_trigger);
    if (r.gre1_trigger > 0.0) {
      gre1_lhs = gre1_triggered ? std::min(gre1_lhs, r.gre1_nu) : r.gre1_nu;
      gre1_triggered = true;
    }
    c2g13_ok = c2g13_ok && r.ok_c2g13;
    if (r.c2g13_bound > 0.0)
      c2g13_worst = std::max(c2g13_worst, r.max_ratio_interior / r.c2g13_bound);
  }
  s.rows.push_back(row("Gre0", gre0_ok, gre0_worst, tols.tol));
  if (gre1_triggered) {
    s.rows.push_back(row("Gre1", gre1_ok, gre1_lhs, sigma / 3.0 - tols.tol));
  } else {
    s.rows.push_back(row("Gre1", true, gre1_trigger_max, 0.0,
                         "interior max of (sigma-nu)/u never exceeded its boundary max"));
  }

  // Gre11: on a ball the tangent-sphere bound collapses to sigma <= nu at
  // the boundary as epsilon -> 0.
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& r : records)
      worst = std::max(worst, sigma - 1.0 / r.w_at_boundary_adjacent);
    if (cfg.domain.kind == DomainKind::RadialBall) {
      const double tol_gre11 =
          1e-6 + cfg.epsilon * (1.0 + sigma) / (cfg.domain.extent * cfg.domain.extent);
      s.rows.push_back(row("Gre11", worst <= tol_gre11, worst, tol_gre11));
    } else {
      s.rows.push_back(inconclusive("Gre11", worst, 0.0,
                                    "tangent-sphere radii are infinite on an interval; "
                                    "boundary angle reported only"));
    }
  }

  // C2b22: sanity ceiling derived from the curvature and gradient bounds
  // (u |u''| = w^3 |k_r - nu| pointwise).
  {
    double worst = 0.0;
    for (const auto& r : records) worst = std::max(worst, r.max_uD2u_boundary);
    const double ceiling = 10.0 * (1.0 + traj.max_kappa_run) / (sigma * sigma * sigma);
    s.rows.push_back(row("C2b22", worst <= ceiling, worst, ceiling,
                         "ceiling derived from the run's curvature bound"));
  }

  // c2g13: interior ratio against max(4/a^3, boundary ratio).
  s.rows.push_back(row("c2g13", c2g13_ok, c2g13_worst, 1.0 + tols.tol_ratio));

  // Con2: node-wise height increment equals the dissipation integral.
  if (traj.snapshots.size() < 2) {
    s.rows.push_back(row("Con2", true, 0.0, 0.0, "no steps taken"));
  } else {
    const DissipationReport rep = dissipation_report(traj);
    if (rep.max_increment < 1e-12) {
      s.rows.push_back(row("Con2", rep.max_node_error <= 1e-12, rep.max_node_error, 1e-12,
                           "run barely moved; absolute tolerance"));
    } else {
      s.rows.push_back(
          row("Con2", rep.max_node_error <= 2e-2 * rep.max_increment, rep.max_node_error,
              2e-2 * rep.max_increment));
    }
  }

  // Unf2: graph ordering under the comparison hypothesis.
  if (cmp) {
    VerdictRow r;
    r.id = "Unf2";
    r.verdict = to_string(cmp->ordering);
    r.lhs = cmp->min_margin;
    r.rhs = -tols.tol_order;
    r.note = cmp->note;
    s.rows.push_back(r);
  } else {
    s.rows.push_back(inconclusive("Unf2", 0.0, 0.0, "single run; no comparison performed"));
  }

  return s;
}

const std::vector<std::string>& diag_columns() {
  static const std::vector<std::string> cols = {
      "t",
      "min_conv_eig",
      "min_F_minus_sigma",
      "max_F_minus_sigma",
      "max_w_interior",
      "w_at_boundary_adjacent",
      "min_nu_interior",
      "max_kappa",
      "max_ratio_interior",
      "boundary_ratio",
      "a_used",
      "max_uD2u_boundary",
      "monotone_ok",
      "dissipation_partial",
      "ok_gre0",
      "ok_gre1",
      "ok_c2g13",
  };
  return cols;
}

namespace {

void write_diag_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  const auto& cols = diag_columns();
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << "\n";
  for (const auto& r : records) {
    out << num17(r.t) << "," << num17(r.min_conv_eig) << "," << num17(r.min_F_minus_sigma) << ","
        << num17(r.max_F_minus_sigma) << "," << num17(r.max_w_interior) << ","
        << num17(r.w_at_boundary_adjacent) << "," << num17(r.min_nu_interior) << ","
        << num17(r.max_kappa) << "," << num17(r.max_ratio_interior) << ","
        << num17(r.boundary_ratio) << "," << num17(r.a_used) << ","
        << num17(r.max_uD2u_boundary) << "," << (r.monotone_ok ? 1 : 0) << ","
        << num17(r.dissipation_partial) << "," << (r.ok_gre0 ? 1 : 0) << ","
        << (r.ok_gre1 ? 1 : 0) << "," << (r.ok_c2g13 ? 1 : 0) << "\n";
  }
}

void write_final_u_csv(const std::string& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  GraphState state;
  state.u = traj.u_final();
  state.t = traj.final_time;
  state.epsilon = traj.config.epsilon;
  const std::vector<NodeGeometry> geo = evaluate_geometry(state, traj.config);
  out << "node,r_or_x,u,w,nu,kappa_max,kappa_min,F\n";
  for (std::size_t j = 0; j < geo.size(); ++j) {
    const NodeGeometry& g = geo[j];
    out << j << "," << num17(g.r) << "," << num17(g.u) << "," << num17(g.w) << ","
        << num17(g.nu) << "," << num17(g.k_max) << "," << num17(g.k_min) << "," << num17(g.F)
        << "\n";
  }
}

ordered_json scenario_to_json(const ScenarioConfig& sc) {
  const FlowConfig& f = sc.flow;
  ordered_json j;
  j["domain"] = {
      {"kind", f.domain.kind == DomainKind::RadialBall ? "ball" : "interval"},
      {"n", f.domain.n},
      {"extent", f.domain.extent},
      {"nodes", f.domain.node_count},
  };
  j["curvature"] = {{"family", f.fspec.name()}, {"l", f.fspec.l}};
  j["flow"] = {
      {"sigma", f.sigma},           {"sigma_init", f.sigma_init},
      {"epsilon", f.epsilon},       {"cfl_safety", f.cfl_safety},
      {"t_max", f.t_max},           {"steady_tol", f.steady_tol},
      {"diag_stride", f.diag_stride},
  };
  j["continuation"] = {{"levels", sc.levels}};
  j["output"] = {{"directory", sc.output.directory}, {"prefix", sc.output.prefix}};
  return j;
}

}  // namespace

std::string summary_to_json(const RunSummary& s) {
  ordered_json j;
  j["command"] = s.command;
  j["termination"] = s.termination;
  j["final_residual"] = s.final_residual;
  j["final_time"] = s.final_time;
  j["steps"] = s.steps;
  j["wall_seconds"] = s.wall_seconds;
  j["verdicts"] = ordered_json::array();
  for (const auto& r : s.rows) {
    ordered_json rowj;
    rowj["estimate"] = r.id;
    rowj["verdict"] = r.verdict;
    rowj["lhs"] = r.lhs;
    rowj["rhs"] = r.rhs;
    if (!r.note.empty()) rowj["note"] = r.note;
    j["verdicts"].push_back(rowj);
  }
  j["fitted"] = {{"C_fit", s.C_fit}, {"lambda_hat", s.lambda_hat}};
  j["extrema"] = {
      {"min_conv_eig", s.min_conv_run},      {"min_F_minus_sigma", s.min_res_run},
      {"max_w_boundary_adjacent", s.max_w_badj_run}, {"min_nu", s.min_nu_run},
      {"max_kappa", s.max_kappa_run},        {"monotone_ok", s.monotone_ok},
  };
  j["config"] = scenario_to_json(s.scenario);
  return j.dump(2) + "\n";
}

WrittenFiles write_outputs(const Trajectory& traj, const std::vector<DiagnosticsRecord>& records,
                           const RunSummary& summary, const OutputSpec& output,
                           const std::string& suffix) {
  namespace fs = std::filesystem;
  fs::create_directories(output.directory);
  const std::string base = (fs::path(output.directory) / output.prefix).string();

  WrittenFiles files;
  files.diag_csv = base + suffix + "_diag.csv";
  files.final_u_csv = base + "_final_u" + suffix + ".csv";
  files.summary_json = base + suffix + "_summary.json";

  write_diag_csv(files.diag_csv, records);
  write_final_u_csv(files.final_u_csv, traj);
  std::ofstream out(files.summary_json, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + files.summary_json);
  out << summary_to_json(summary);
  return files;
}

}  // namespace hcf
