// Run-time verification of the a priori estimates: per-snapshot
// diagnostics with pass/fail flags, the evolution-identity residuals, the
// comparison/uniqueness harness, and the dissipation integral.
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hcflow/flowcore.hpp"

namespace hcf {

// Running extrema over the parabolic boundary proxy (the initial slice
// plus the boundary-adjacent nodes at later times) that several of the
// estimate checks compare against.
struct RunningExtrema {
  bool seeded = false;
  double max_u = 0.0;
  double max_w_parabolic = 0.0;
  double max_ratio_boundary = 0.0;
  double max_sv_boundary = 0.0;  // (sigma - nu)/u
};

struct StepMeta {
  double dissipation_partial = 0.0;
  bool monotone_ok = true;
};

struct MonitorTolerances {
  double tol_ratio = 0.05;   // slack on the interior curvature-ratio bound
  double tol_order = 1e-10;  // slack on graph ordering in the comparison check
  double tol = 1e-8;         // arithmetic slack on the remaining checks
};

struct DiagnosticsRecord {
  double t = 0.0;
  double min_conv_eig = 0.0;
  double min_F_minus_sigma = 0.0;
  double max_F_minus_sigma = 0.0;
  double max_w_interior = 1.0;
  double w_at_boundary_adjacent = 1.0;
  double min_nu_interior = 1.0;
  double max_kappa = 0.0;
  double max_ratio_interior = 0.0;  // max kappa_max/(nu - a) away from the boundary
  double boundary_ratio = 0.0;      // running parabolic-boundary max of the same ratio
  double a_used = 0.0;
  double max_uD2u_boundary = 0.0;
  bool monotone_ok = true;
  double dissipation_partial = 0.0;

  bool ok_gre0 = true;
  bool ok_gre1 = true;
  bool ok_c2g13 = true;
  double gre0_margin = 0.0;   // max over nodes of w minus its bound
  double gre1_trigger = 0.0;  // interior max minus boundary max of (sigma-nu)/u
  double gre1_nu = 1.0;       // nu at the interior argmax of (sigma-nu)/u
  double c2g13_bound = 0.0;   // max(4/a^3, boundary_ratio)
};

// Fills one record from a state snapshot; `running` carries the
// trajectory's running boundary maxima and is updated in place.
// Requires a > 0 and 2a <= min nu over the state.
DiagnosticsRecord estimate_monitors(const GraphState& state, const FlowConfig& config, double a,
                                    RunningExtrema& running, const StepMeta& meta = {},
                                    const MonitorTolerances& tols = {});

// Records for every stored snapshot of a finished run, computed with
// a = (run minimum of nu)/2.
std::vector<DiagnosticsRecord> diagnostics_for(const Trajectory& traj,
                                               const MonitorTolerances& tols = {});

// Signed per-node residuals of the metric and normal-component evolution
// identities between two states dt apart, evaluated at the midpoint state
// in graph coordinates (the reparametrization transport between the
// normal flow and the vertical graph motion is accounted for).
struct IdentityFields {
  std::vector<double> e7;   // metric identity residual
  std::vector<double> e10;  // normal-component identity residual
};
IdentityFields evolution_identity_fields(const GraphState& before, const GraphState& after,
                                         double dt, const FlowConfig& config);

// Max-norm residual pair (res_e7, res_e10).
std::pair<double, double> evolution_identity_residuals(const GraphState& before,
                                                       const GraphState& after, double dt,
                                                       const FlowConfig& config);

// dt-refinement study of the identity residuals at fixed grid; residuals
// are floor-corrected per node with the small-dt limit before measuring
// orders.
struct IdentityOrderReport {
  double dt_base = 0.0;
  double dt_floor = 0.0;
  double h2 = 0.0;
  std::vector<double> dts;
  std::vector<double> res10;
  std::vector<double> res7;
  std::vector<double> orders10;
  std::vector<double> orders7;
  double floor10 = 0.0;
  double floor7 = 0.0;

  bool pass(double min_order = 0.9, double floor_factor = 10.0) const;
};
IdentityOrderReport identity_order_study(const FlowConfig& config, double dt_base = 0.05);

enum class CompareVerdict { Pass, Fail, Inconclusive };
std::string to_string(CompareVerdict v);

struct ComparisonResult {
  CompareVerdict ordering = CompareVerdict::Inconclusive;
  double min_margin = 0.0;  // min over valid pairs and nodes of u_low - u_high
  int pairs_checked = 0;    // matched snapshot pairs where the hypothesis held
  bool limits_applicable = false;
  double limit_diff = 0.0;  // sup |u_1(final) - u_2(final)|
  bool limits_ok = false;
  std::string note;
};

// traj_low_f evolves the surface with the smaller curvature values (the
// expected higher graph).  Verifies the hypothesis sup F_1 < inf F_2 on
// the initial pair, then checks graph ordering on every matched snapshot
// pair where the hypothesis holds, and compares the stationary limits.
ComparisonResult comparison_check(const Trajectory& traj_low_f, const Trajectory& traj_high_f,
                                  double tol_order = 1e-10, double tol_limit = 1e-3);

struct DissipationReport {
  double max_integral = 0.0;   // max over nodes of the accumulated integral
  double max_node_error = 0.0; // max |integral - (u(T) - u(0))|
  double max_increment = 0.0;  // max |u(T) - u(0)|
};
DissipationReport dissipation_report(const Trajectory& traj);
double dissipation_integral(const Trajectory& traj);

}  // namespace hcf
