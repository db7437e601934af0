#include "hcflow/monitors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace hcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct BoundaryAdjacent {
  std::vector<int> nodes;
};

BoundaryAdjacent boundary_adjacent(const DomainDescriptor& dom) {
  BoundaryAdjacent b;
  if (dom.kind == DomainKind::Interval1D) {
    b.nodes = {1, dom.node_count - 2};
  } else {
    b.nodes = {dom.node_count - 2};
  }
  return b;
}

bool is_badj(const BoundaryAdjacent& b, int j) {
  return std::find(b.nodes.begin(), b.nodes.end(), j) != b.nodes.end();
}

}  // namespace

DiagnosticsRecord estimate_monitors(const GraphState& state, const FlowConfig& config, double a,
                                    RunningExtrema& running, const StepMeta& meta,
                                    const MonitorTolerances& tols) {
  const DomainDescriptor& dom = config.domain;
  const double sigma = config.sigma;
  const std::vector<NodeGeometry> geo = evaluate_geometry(state, config);
  const BoundaryAdjacent badj = boundary_adjacent(dom);
  const int j0 = dom.first_interior();
  const int j1 = dom.last_interior();

  double min_nu_state = kInf;
  for (int j = j0; j <= j1; ++j) min_nu_state = std::min(min_nu_state, geo[j].nu);
  if (!(a > 0.0) || 2.0 * a > min_nu_state) {
    std::ostringstream os;
    os << "estimate_monitors: need 0 < 2a <= min nu, got a = " << a << ", min nu = "
       << min_nu_state;
    throw std::invalid_argument(os.str());
  }

  DiagnosticsRecord rec;
  rec.t = state.t;
  rec.a_used = a;
  rec.monotone_ok = meta.monotone_ok;
  rec.dissipation_partial = meta.dissipation_partial;

  rec.min_conv_eig = kInf;
  rec.min_F_minus_sigma = kInf;
  rec.max_F_minus_sigma = -kInf;
  rec.max_w_interior = 0.0;
  rec.min_nu_interior = kInf;
  rec.max_kappa = -kInf;
  rec.max_ratio_interior = -kInf;

  double interior_sv_max = -kInf;  // (sigma - nu)/u over strict interior
  double interior_sv_nu = 1.0;
  double badj_ratio = -kInf;
  double badj_sv = -kInf;
  double badj_w = 0.0;
  double badj_uD2u = 0.0;
  double max_u_state = 0.0;

  for (int j = 0; j < dom.node_count; ++j) max_u_state = std::max(max_u_state, state.u[j]);

  for (int j = j0; j <= j1; ++j) {
    const NodeGeometry& g = geo[j];
    rec.min_conv_eig = std::min(rec.min_conv_eig, g.conv_min);
    rec.min_F_minus_sigma = std::min(rec.min_F_minus_sigma, g.F - sigma);
    rec.max_F_minus_sigma = std::max(rec.max_F_minus_sigma, g.F - sigma);
    rec.max_w_interior = std::max(rec.max_w_interior, g.w);
    rec.min_nu_interior = std::min(rec.min_nu_interior, g.nu);
    rec.max_kappa = std::max(rec.max_kappa, g.k_max);

    const double ratio = g.k_max / (g.nu - a);
    const double sv = (sigma - g.nu) / g.u;
    if (is_badj(badj, j)) {
      badj_ratio = std::max(badj_ratio, ratio);
      badj_sv = std::max(badj_sv, sv);
      badj_w = std::max(badj_w, g.w);
      const double d2 = std::abs(g.d2u);
      const double ang = dom.kind == DomainKind::RadialBall && dom.n > 1
                             ? std::abs(g.du / g.r)
                             : 0.0;
      badj_uD2u = std::max(badj_uD2u, g.u * std::max(d2, ang));
    } else {
      rec.max_ratio_interior = std::max(rec.max_ratio_interior, ratio);
      if (sv > interior_sv_max) {
        interior_sv_max = sv;
        interior_sv_nu = g.nu;
      }
    }
  }
  rec.w_at_boundary_adjacent = badj_w;
  rec.max_uD2u_boundary = badj_uD2u;

  // Update the running parabolic-boundary maxima: the whole initial slice
  // seeds them, later snapshots contribute the boundary-adjacent nodes.
  if (!running.seeded) {
    running.seeded = true;
    running.max_u = max_u_state;
    running.max_w_parabolic = rec.max_w_interior;
    running.max_ratio_boundary = std::max(rec.max_ratio_interior, badj_ratio);
    running.max_sv_boundary = std::max(interior_sv_max, badj_sv);
  } else {
    running.max_u = std::max(running.max_u, max_u_state);
    running.max_w_parabolic = std::max(running.max_w_parabolic, badj_w);
    running.max_ratio_boundary = std::max(running.max_ratio_boundary, badj_ratio);
    running.max_sv_boundary = std::max(running.max_sv_boundary, badj_sv);
  }
  rec.boundary_ratio = running.max_ratio_boundary;

  // Interior curvature-ratio bound.
  rec.c2g13_bound = std::max(4.0 / (a * a * a), running.max_ratio_boundary);
  rec.ok_c2g13 = rec.max_ratio_interior <= rec.c2g13_bound * (1.0 + tols.tol_ratio);

  // Gradient bound via the height ratio: w <= max(max u / u, boundary w).
  double gre0_margin = -kInf;
  for (int j = j0; j <= j1; ++j) {
    const double bound = std::max(running.max_u / state.u[j], running.max_w_parabolic);
    gre0_margin = std::max(gre0_margin, geo[j].w - bound);
  }
  rec.gre0_margin = gre0_margin;
  rec.ok_gre0 = gre0_margin <= tols.tol;

  // Normal-angle bound: an interior maximum of (sigma - nu)/u above the
  // boundary maximum forces nu >= sigma/3 there.
  rec.gre1_trigger = interior_sv_max - running.max_sv_boundary;
  rec.gre1_nu = interior_sv_nu;
  rec.ok_gre1 = rec.gre1_trigger <= 0.0 || interior_sv_nu >= sigma / 3.0 - tols.tol;

  return rec;
}

std::vector<DiagnosticsRecord> diagnostics_for(const Trajectory& traj,
                                               const MonitorTolerances& tols) {
  const double a = 0.5 * traj.min_nu_run;
  RunningExtrema running;
  std::vector<DiagnosticsRecord> records;
  records.reserve(traj.snapshots.size());
  for (const Snapshot& snap : traj.snapshots) {
    GraphState state;
    state.t = snap.t;
    state.u = snap.u;
    state.epsilon = traj.config.epsilon;
    StepMeta meta{snap.dissipation_partial, snap.monotone_so_far};
    records.push_back(estimate_monitors(state, traj.config, a, running, meta, tols));
  }
  return records;
}

// ---------------------------------------------------------------------
// Evolution identities
// ---------------------------------------------------------------------

IdentityFields evolution_identity_fields(const GraphState& before, const GraphState& after,
                                         double dt, const FlowConfig& config) {
  const DomainDescriptor& dom = config.domain;
  const int N = dom.node_count;
  if (static_cast<int>(before.u.size()) != N || static_cast<int>(after.u.size()) != N)
    throw std::invalid_argument("evolution identities: grid mismatch");
  if (std::abs(before.epsilon - after.epsilon) > 1e-14)
    throw std::invalid_argument("evolution identities: boundary lifts differ");
  if (!(dt > 0.0)) throw std::invalid_argument("evolution identities: dt must be > 0");

  GraphState mid;
  mid.epsilon = before.epsilon;
  mid.t = before.t + 0.5 * dt;
  mid.u.resize(N);
  for (int j = 0; j < N; ++j) mid.u[j] = 0.5 * (before.u[j] + after.u[j]);

  const std::vector<NodeGeometry> geo = evaluate_geometry(mid, config);
  const DerivativeField der_b = discrete_derivatives(before, dom);
  const DerivativeField der_a = discrete_derivatives(after, dom);

  const double sigma = config.sigma;
  const double h = dom.h();
  const bool radial = dom.kind == DomainKind::RadialBall;

  // Nodal fields at the midpoint state.
  std::vector<double> p(N), xdot(N), gt(N), nu_mid(N);
  for (int j = 0; j < N; ++j) {
    const NodeGeometry& g = geo[j];
    p[j] = (g.F - sigma) * g.u;
    xdot[j] = -(g.F - sigma) * (g.u / g.w) * g.du;
    gt[j] = 1.0 + g.du * g.du;
    nu_mid[j] = g.nu;
  }

  auto central = [&](const std::vector<double>& f, int j, bool odd_about_axis) {
    if (radial && j == 0) {
      // Even fields have zero slope on the axis; odd fields reflect.
      return odd_about_axis ? f[1] / h : 0.0;
    }
    return (f[j + 1] - f[j - 1]) / (2.0 * h);
  };

  IdentityFields out;
  out.e7.assign(N, 0.0);
  out.e10.assign(N, 0.0);

  // The boundary-adjacent nodes are skipped: their time-difference
  // stencils straddle the Dirichlet corner, where the flow field u_t is
  // pinned to zero while its one-sided limit is eps * w * (F - sigma).
  const int j0 = dom.kind == DomainKind::Interval1D ? dom.first_interior() + 1
                                                    : dom.first_interior();
  const int j1 = dom.last_interior() - 1;
  for (int j = j0; j <= j1; ++j) {
    const NodeGeometry& g = geo[j];
    const double w2 = g.w * g.w;

    const double nu_b = 1.0 / std::sqrt(1.0 + der_b.du[j] * der_b.du[j]);
    const double nu_a = 1.0 / std::sqrt(1.0 + der_a.du[j] * der_a.du[j]);
    const double dp = central(p, j, false);
    const double dnu = central(nu_mid, j, false);
    out.e10[j] = (nu_a - nu_b) / dt + dp * g.du / w2 -
                 (g.F - sigma) * (g.u / g.w) * g.du * dnu;

    const double gt_b = 1.0 + der_b.du[j] * der_b.du[j];
    const double gt_a = 1.0 + der_a.du[j] * der_a.du[j];
    const double dgt = central(gt, j, false);
    const double dxdot = central(xdot, j, true);
    out.e7[j] = (gt_a - gt_b) / dt + xdot[j] * dgt + 2.0 * gt[j] * dxdot +
                2.0 * (g.F - sigma) * g.u * g.d2u / g.w;
  }
  return out;
}

std::pair<double, double> evolution_identity_residuals(const GraphState& before,
                                                       const GraphState& after, double dt,
                                                       const FlowConfig& config) {
  const IdentityFields f = evolution_identity_fields(before, after, dt, config);
  double r7 = 0.0, r10 = 0.0;
  for (double v : f.e7) r7 = std::max(r7, std::abs(v));
  for (double v : f.e10) r10 = std::max(r10, std::abs(v));
  return {r7, r10};
}

bool IdentityOrderReport::pass(double min_order, double floor_factor) const {
  for (double o : orders10)
    if (!(o >= min_order)) return false;
  return floor10 <= floor_factor * h2;
}

IdentityOrderReport identity_order_study(const FlowConfig& config, double dt_base) {
  config.validate();
  const GraphState state0 = initial_cap(config);
  const std::vector<double> rhs = flow_rhs(state0, config);
  const DomainDescriptor& dom = config.domain;
  const double h = dom.h();

  FlowEval eval;
  evaluate_flow(state0, config, eval);

  IdentityOrderReport rep;
  rep.dt_base = dt_base;
  rep.h2 = h * h;
  rep.dt_floor = config.cfl_safety * h * h / eval.dt_bound;
  rep.dts = {dt_base, 0.5 * dt_base, 0.25 * dt_base};

  auto stepped = [&](double dt) {
    GraphState s = state0;
    for (int j = 0; j < dom.node_count; ++j)
      if (!dom.is_boundary(j)) s.u[j] = state0.u[j] + dt * rhs[j];
    s.t = state0.t + dt;
    return s;
  };

  const IdentityFields base =
      evolution_identity_fields(state0, stepped(rep.dt_floor), rep.dt_floor, config);
  for (double v : base.e7) rep.floor7 = std::max(rep.floor7, std::abs(v));
  for (double v : base.e10) rep.floor10 = std::max(rep.floor10, std::abs(v));

  for (double dt : rep.dts) {
    const IdentityFields f = evolution_identity_fields(state0, stepped(dt), dt, config);
    double r7 = 0.0, r10 = 0.0;
    for (std::size_t j = 0; j < f.e10.size(); ++j) {
      r7 = std::max(r7, std::abs(f.e7[j] - base.e7[j]));
      r10 = std::max(r10, std::abs(f.e10[j] - base.e10[j]));
    }
    rep.res7.push_back(r7);
    rep.res10.push_back(r10);
  }
  for (std::size_t k = 0; k + 1 < rep.dts.size(); ++k) {
    rep.orders7.push_back(std::log2(rep.res7[k] / rep.res7[k + 1]));
    rep.orders10.push_back(std::log2(rep.res10[k] / rep.res10[k + 1]));
  }
  return rep;
}

// ---------------------------------------------------------------------
// Comparison principle
// ---------------------------------------------------------------------

std::string to_string(CompareVerdict v) {
  switch (v) {
    case CompareVerdict::Pass: return "PASS";
    case CompareVerdict::Fail: return "FAIL";
    case CompareVerdict::Inconclusive: return "INCONCLUSIVE";
  }
  return "?";
}

namespace {

struct FRange {
  double sup = -kInf;
  double inf = kInf;
};

FRange interior_F_range(const Snapshot& snap, const FlowConfig& config) {
  GraphState s;
  s.t = snap.t;
  s.u = snap.u;
  s.epsilon = config.epsilon;
  const std::vector<NodeGeometry> geo = evaluate_geometry(s, config);
  FRange r;
  for (int j = config.domain.first_interior(); j <= config.domain.last_interior(); ++j) {
    r.sup = std::max(r.sup, geo[j].F);
    r.inf = std::min(r.inf, geo[j].F);
  }
  return r;
}

}  // namespace

ComparisonResult comparison_check(const Trajectory& traj_low_f, const Trajectory& traj_high_f,
                                  double tol_order, double tol_limit) {
  const FlowConfig& c1 = traj_low_f.config;
  const FlowConfig& c2 = traj_high_f.config;
  if (c1.domain.kind != c2.domain.kind || c1.domain.node_count != c2.domain.node_count ||
      c1.domain.extent != c2.domain.extent || c1.domain.n != c2.domain.n)
    throw std::invalid_argument("comparison_check: trajectories live on different grids");
  if (c1.sigma != c2.sigma || c1.epsilon != c2.epsilon)
    throw std::invalid_argument("comparison_check: sigma/epsilon mismatch");

  ComparisonResult res;
  res.min_margin = kInf;

  // Stationary limits (uniqueness) are compared whenever both runs ended
  // steady.
  if (traj_low_f.reason == TerminationReason::Steady &&
      traj_high_f.reason == TerminationReason::Steady) {
    res.limits_applicable = true;
    const auto& a = traj_low_f.u_final();
    const auto& b = traj_high_f.u_final();
    for (std::size_t i = 0; i < a.size(); ++i)
      res.limit_diff = std::max(res.limit_diff, std::abs(a[i] - b[i]));
    res.limits_ok = res.limit_diff <= tol_limit;
  }

  const FRange f1_init = interior_F_range(traj_low_f.snapshots.front(), c1);
  const FRange f2_init = interior_F_range(traj_high_f.snapshots.front(), c2);
  if (!(f1_init.sup < f2_init.inf)) {
    res.ordering = CompareVerdict::Inconclusive;
    std::ostringstream os;
    os << "hypothesis sup F_1 < inf F_2 fails on the initial states (" << f1_init.sup
       << " vs " << f2_init.inf << ")";
    res.note = os.str();
    res.min_margin = 0.0;
    return res;
  }

  const int j0 = c1.domain.first_interior();
  const int j1 = c1.domain.last_interior();
  bool violated = false;
  std::size_t cursor = 0;
  for (const Snapshot& s1 : traj_low_f.snapshots) {
    // Nearest-in-time snapshot of the other run (times are increasing).
    while (cursor + 1 < traj_high_f.snapshots.size() &&
           std::abs(traj_high_f.snapshots[cursor + 1].t - s1.t) <=
               std::abs(traj_high_f.snapshots[cursor].t - s1.t))
      ++cursor;
    const Snapshot& s2 = traj_high_f.snapshots[cursor];

    const FRange f1 = interior_F_range(s1, c1);
    const FRange f2 = interior_F_range(s2, c2);
    if (!(f1.sup < f2.inf)) continue;

    ++res.pairs_checked;
    for (int j = j0; j <= j1; ++j)
      res.min_margin = std::min(res.min_margin, s1.u[j] - s2.u[j]);
    if (res.min_margin <= -tol_order) {
      violated = true;
      break;
    }
  }

  if (res.pairs_checked == 0) {
    res.ordering = CompareVerdict::Inconclusive;
    res.note = "hypothesis held on the initial pair only; no matched snapshot pair to check";
    res.min_margin = 0.0;
    return res;
  }
  res.ordering = violated ? CompareVerdict::Fail : CompareVerdict::Pass;
  return res;
}

DissipationReport dissipation_report(const Trajectory& traj) {
  if (traj.snapshots.size() < 2)
    throw std::invalid_argument("dissipation_report: trajectory needs at least two snapshots");
  const auto& u0 = traj.u_initial();
  const auto& uT = traj.u_final();
  DissipationReport rep;
  for (std::size_t j = 0; j < u0.size(); ++j) {
    const double inc = uT[j] - u0[j];
    rep.max_integral = std::max(rep.max_integral, std::abs(traj.dissipation_node[j]));
    rep.max_node_error = std::max(rep.max_node_error,
                                  std::abs(traj.dissipation_node[j] - inc));
    rep.max_increment = std::max(rep.max_increment, std::abs(inc));
  }
  return rep;
}

double dissipation_integral(const Trajectory& traj) { return dissipation_report(traj).max_integral; }

}  // namespace hcf
