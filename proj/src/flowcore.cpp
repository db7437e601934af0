#include "hcflow/flowcore.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>

namespace hcf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Closed-form value and partial derivatives of f on the radial curvature
// tuple (kr, ka, ..., ka).  fa is the derivative with respect to one
// angular component; the trace of F^{ij} is fr + (n-1) fa.
struct RadialF {
  CurvatureFamily family;
  int n = 1;
  int l = 0;
  double binom_nl = 1.0;
  std::vector<double> c_n1;  // C(n-1, k)
  std::vector<double> c_n2;  // C(n-2, k)

  static RadialF make(const CurvatureFunctionSpec& spec) {
    RadialF rf;
    rf.family = spec.family;
    rf.n = spec.n;
    rf.l = spec.family == CurvatureFamily::HessianQuotient ? spec.l : 0;
    auto binom_row = [](int m, std::vector<double>& row) {
      row.assign(std::max(m + 1, 1), 0.0);
      if (m >= 0) {
        row[0] = 1.0;
        for (int k = 1; k <= m; ++k) row[k] = row[k - 1] * (m - k + 1) / k;
      }
    };
    binom_row(rf.n - 1, rf.c_n1);
    binom_row(rf.n - 2, rf.c_n2);
    double b = 1.0;
    for (int i = 1; i <= rf.l; ++i) b = b * (rf.n - rf.l + i) / i;
    rf.binom_nl = b;
    return rf;
  }

  // e_k of (kr, ka x (n-1)) and the same with one variable removed.
  double e_full(int k, double kr, double ka) const {
    const double t1 = (k <= n - 1) ? c_n1[k] * std::pow(ka, k) : 0.0;
    const double t2 = (k >= 1) ? kr * c_n1[k - 1] * std::pow(ka, k - 1) : 0.0;
    return t1 + t2;
  }
  double e_minus_radial(int k, double ka) const {
    return (k <= n - 1) ? c_n1[k] * std::pow(ka, k) : 0.0;
  }
  double e_minus_angular(int k, double kr, double ka) const {
    const double t1 = (k <= n - 2) ? c_n2[k] * std::pow(ka, k) : 0.0;
    const double t2 = (k >= 1 && k - 1 <= n - 2) ? kr * c_n2[k - 1] * std::pow(ka, k - 1) : 0.0;
    return t1 + t2;
  }

  double eval(double kr, double ka, double& fr, double& fa) const {
    if (n == 1) {
      fr = 1.0;
      fa = 0.0;
      return kr;
    }
    switch (family) {
      case CurvatureFamily::MeanH1: {
        fr = fa = 1.0 / n;
        return (kr + (n - 1) * ka) / n;
      }
      case CurvatureFamily::GaussRoot:
        break;
      case CurvatureFamily::HessianQuotient:
        if (l != 0) {
          const double en = kr * std::pow(ka, n - 1);
          const double el = e_full(l, kr, ka);
          const double f =
              std::exp((std::log(en * binom_nl) - std::log(el)) / (n - l));
          const double den_r = e_minus_radial(l - 1, ka);
          const double den_a = e_minus_angular(l - 1, kr, ka);
          fr = f / (n - l) * (1.0 / kr - den_r / el);
          fa = f / (n - l) * (1.0 / ka - den_a / el);
          return f;
        }
        break;
    }
    // Geometric mean (quotient with l = 0 reduces to it).
    double f;
    if (n == 2)
      f = std::sqrt(kr * ka);
    else
      f = std::exp((std::log(kr) + (n - 1) * std::log(ka)) / n);
    fr = f / (n * kr);
    fa = f / (n * ka);
    return f;
  }
};

struct NodeDerivs {
  double du, d2u, slope_over_r;
};

// Interior-node stencil; the radial axis uses the even reflection.  The
// angular slope u'/r only exists on radial grids.
inline NodeDerivs node_derivs(const std::vector<double>& u, int j, double h, double r,
                              bool radial, bool radial_axis) {
  NodeDerivs d;
  if (radial_axis) {
    d.du = 0.0;
    d.d2u = 2.0 * (u[1] - u[0]) / (h * h);
    d.slope_over_r = d.d2u;
  } else {
    d.du = (u[j + 1] - u[j - 1]) / (2.0 * h);
    d.d2u = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / (h * h);
    d.slope_over_r = radial ? d.du / r : 0.0;
  }
  return d;
}

}  // namespace

void FlowConfig::validate() const {
  domain.validate();
  fspec.validate();
  if (fspec.n != domain.n)
    throw std::invalid_argument("config: curvature spec dimension must match the domain");
  if (!(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("config: sigma must lie in (0,1)");
  if (!(sigma_init > sigma && sigma_init < 1.0))
    throw std::invalid_argument(
        "config: sigma_init must lie in (sigma, 1); the initial cap needs f(kappa) > sigma");
  if (!(epsilon > 0.0)) throw std::invalid_argument("config: epsilon must be > 0");
  if (!(epsilon < domain.extent / 10.0))
    throw std::invalid_argument("config: epsilon must be below extent/10");
  if (!(cfl_safety > 0.0 && cfl_safety < 1.0))
    throw std::invalid_argument("config: cfl_safety must lie in (0,1)");
  if (!(t_max >= 0.0)) throw std::invalid_argument("config: t_max must be >= 0");
  if (!(steady_tol > 0.0)) throw std::invalid_argument("config: steady_tol must be > 0");
  if (diag_stride < 1) throw std::invalid_argument("config: diag_stride must be >= 1");
}

std::string to_string(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::Steady: return "Steady";
    case TerminationReason::TMaxReached: return "TMaxReached";
    case TerminationReason::AdmissibilityLost: return "AdmissibilityLost";
    case TerminationReason::StepUnderflow: return "StepUnderflow";
  }
  return "?";
}

void evaluate_flow(const GraphState& state, const FlowConfig& config, FlowEval& out) {
  const DomainDescriptor& dom = config.domain;
  const int N = dom.node_count;
  const double h = dom.h();
  const double sigma = config.sigma;
  const bool radial = dom.kind == DomainKind::RadialBall;
  const int n = dom.n;
  const RadialF rf = RadialF::make(config.fspec);
  const auto& u = state.u;

  out.rhs.assign(N, 0.0);
  out.max_abs_res = 0.0;
  out.min_res = kInf;
  out.max_res = -kInf;
  out.min_rhs = kInf;
  out.max_rhs = -kInf;
  out.dt_bound = 0.0;
  out.min_conv = kInf;
  out.min_nu = kInf;
  out.max_kappa = -kInf;
  out.max_w_interior = 0.0;
  out.w_badj = 0.0;
  out.admissible = true;
  out.worst_node = -1;
  out.worst_min_eig = kInf;

  const int j0 = dom.first_interior();
  const int j1 = dom.last_interior();

  for (int j = j0; j <= j1; ++j) {
    const double uj = u[j];
    if (!(uj > 0.0)) {
      out.admissible = false;
      if (uj < out.worst_min_eig) {
        out.worst_min_eig = uj;
        out.worst_node = j;
      }
      continue;
    }
    const double r = dom.coord(j);
    const bool axis = radial && j == 0;
    const NodeDerivs d = node_derivs(u, j, h, r, radial, axis);

    const double w2 = 1.0 + d.du * d.du;
    const double w = std::sqrt(w2);
    const double nu = 1.0 / w;

    const double kr = (1.0 + uj * d.d2u / w2) * nu;
    const double ka = (1.0 + uj * d.slope_over_r) * nu;

    const double conv_rad = w2 * w * kr;                       // 1 + u'^2 + u u''
    const double conv_ang = (n > 1) ? w * ka : conv_rad;       // 1 + u u'/r
    const double conv = std::min(conv_rad, conv_ang);
    out.min_conv = std::min(out.min_conv, conv);
    if (!(conv > 0.0)) {
      out.admissible = false;
      if (conv < out.worst_min_eig) {
        out.worst_min_eig = conv;
        out.worst_node = j;
      }
      continue;
    }

    double fr, fa;
    const double F = rf.eval(kr, ka, fr, fa);
    const double res = F - sigma;
    const double rhs = uj * w * res;
    out.rhs[j] = rhs;

    const double sumF = fr + (n - 1) * fa;
    out.dt_bound = std::max(out.dt_bound, uj * uj * sumF * nu);

    out.max_abs_res = std::max(out.max_abs_res, std::abs(res));
    out.min_res = std::min(out.min_res, res);
    out.max_res = std::max(out.max_res, res);
    out.min_rhs = std::min(out.min_rhs, rhs);
    out.max_rhs = std::max(out.max_rhs, rhs);
    out.min_nu = std::min(out.min_nu, nu);
    out.max_kappa = std::max(out.max_kappa, std::max(kr, n > 1 ? ka : kr));
    out.max_w_interior = std::max(out.max_w_interior, w);
    if (j == j1 || (!radial && j == j0)) out.w_badj = std::max(out.w_badj, w);
  }
}

std::vector<NodeGeometry> evaluate_geometry(const GraphState& state, const FlowConfig& config) {
  const DomainDescriptor& dom = config.domain;
  const int N = dom.node_count;
  const bool radial = dom.kind == DomainKind::RadialBall;
  const int n = dom.n;
  const RadialF rf = RadialF::make(config.fspec);
  const DerivativeField der = discrete_derivatives(state, dom);

  std::vector<NodeGeometry> out(N);
  for (int j = 0; j < N; ++j) {
    NodeGeometry& g = out[j];
    g.r = dom.coord(j);
    g.u = state.u[j];
    g.du = der.du[j];
    g.d2u = der.d2u[j];
    const double w2 = 1.0 + g.du * g.du;
    g.w = std::sqrt(w2);
    g.nu = 1.0 / g.w;
    const bool axis = radial && j == 0;
    const double slope_over_r =
        axis ? g.d2u : (radial ? g.du / g.r : 0.0);
    const double kr = (1.0 + g.u * g.d2u / w2) * g.nu;
    const double ka = radial && n > 1 ? (1.0 + g.u * slope_over_r) * g.nu : kr;
    g.k_max = std::max(kr, ka);
    g.k_min = std::min(kr, ka);
    const double conv_rad = w2 * g.w * kr;
    const double conv_ang = (radial && n > 1) ? g.w * ka : conv_rad;
    g.conv_min = std::min(conv_rad, conv_ang);
    if (kr > 0.0 && ka > 0.0) {
      double fr, fa;
      g.F = rf.eval(kr, ka, fr, fa);
    } else {
      g.F = std::numeric_limits<double>::quiet_NaN();
    }
  }
  return out;
}

GraphState initial_cap(const FlowConfig& config) {
  config.validate();
  const DomainDescriptor& dom = config.domain;
  const CapProfile cap = CapProfile::tangent(dom.extent, config.sigma_init);

  GraphState state;
  state.t = 0.0;
  state.epsilon = config.epsilon;
  state.u.resize(dom.node_count);
  for (int j = 0; j < dom.node_count; ++j) {
    if (dom.is_boundary(j)) {
      state.u[j] = config.epsilon;
    } else {
      state.u[j] = cap.value(std::abs(dom.coord(j))) + config.epsilon;
    }
  }

  FlowEval eval;
  evaluate_flow(state, config, eval);
  const double gate = config.sigma + 0.5 * (config.sigma_init - config.sigma);
  if (!eval.admissible || eval.min_res + config.sigma <= gate) {
    std::ostringstream os;
    os << "initial cap: discrete f(kappa) does not clear " << gate
       << " everywhere (min F = " << eval.min_res + config.sigma
       << "); refine the grid or move sigma_init away from sigma";
    throw std::runtime_error(os.str());
  }
  return state;
}

std::vector<double> flow_rhs(const GraphState& state, const FlowConfig& config) {
  state.validate(config.domain);
  FlowEval eval;
  evaluate_flow(state, config, eval);
  if (!eval.admissible) {
    std::ostringstream os;
    os << "flow_rhs: state not admissible at node " << eval.worst_node
       << " (convexity matrix eigenvalue " << eval.worst_min_eig << ")";
    throw AdmissibilityError(os.str(), eval.worst_node, eval.worst_min_eig);
  }
  return std::move(eval.rhs);
}

LinearizedCoeffs linearized_coefficients(const GraphState& state, const FlowConfig& config,
                                         int node) {
  const DomainDescriptor& dom = config.domain;
  if (node < dom.first_interior() || node > dom.last_interior())
    throw std::invalid_argument("linearized_coefficients: node must be interior");
  const int n = dom.n;
  const DerivativeField der = discrete_derivatives(state, dom);
  const double uj = state.u[node];
  const double r = dom.coord(node);
  const bool axis = dom.kind == DomainKind::RadialBall && node == 0;

  std::vector<double> Du(n, 0.0);
  SymMatrix D2u(n);
  Du[0] = axis ? 0.0 : der.du[node];
  D2u.at(0, 0) = der.d2u[node];
  const double slope_over_r = axis ? der.d2u[node] : (r != 0.0 ? der.du[node] / r : 0.0);
  for (int i = 1; i < n; ++i) D2u.at(i, i) = slope_over_r;
  if (dom.kind == DomainKind::Interval1D) Du[0] = der.du[node];

  const PointGeometry pg = hyperbolic_shape(uj, Du, D2u);
  if (!(pg.kappa.back() > 0.0)) {
    std::ostringstream os;
    os << "linearized_coefficients: state not admissible at node " << node;
    throw AdmissibilityError(os.str(), node, pg.conv_min_eig);
  }

  const SymMatrix Fij = F_matrix_derivative(config.fspec, pg.A);
  const double F = eval_f(config.fspec, pg.kappa);
  const SymMatrix gamma = gamma_matrix(Du);
  const double w = pg.w;

  LinearizedCoeffs lc;
  lc.G_kl = sym_product(sym_product(gamma, Fij), gamma);
  for (double& v : lc.G_kl.a) v *= -uj / w;

  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += Fij.at(i, i);
  lc.G_u = -2.0 * F / uj + config.sigma / uj + trace / (w * uj);
  lc.G_t = 1.0 / (uj * w);

  // G_s = sigma u_s / w^2 + (2/w) (gamma F A Du)_s - (2/w^2) (gamma F Du)_s
  const std::vector<double> FADu = mat_vec(Fij, mat_vec(pg.A, Du));
  const std::vector<double> FDu = mat_vec(Fij, Du);
  const std::vector<double> t1 = mat_vec(gamma, FADu);
  const std::vector<double> t2 = mat_vec(gamma, FDu);
  lc.G_s.resize(n);
  for (int i = 0; i < n; ++i)
    lc.G_s[i] = config.sigma * Du[i] / (w * w) + 2.0 / w * t1[i] - 2.0 / (w * w) * t2[i];
  return lc;
}

namespace {

struct StepAttempt {
  bool ok = false;
  double dt = 0.0;
};

StepAttempt attempt_step(const GraphState& state, const FlowConfig& config,
                         const FlowEval& cur, double dt0, GraphState& next, FlowEval& next_eval) {
  const DomainDescriptor& dom = config.domain;
  const int N = dom.node_count;
  next.t = state.t;
  next.epsilon = state.epsilon;
  next.u.resize(N);

  double dt = dt0;
  for (int halving = 0; halving <= 10; ++halving) {
    for (int j = 0; j < N; ++j)
      next.u[j] = dom.is_boundary(j) ? state.epsilon : state.u[j] + dt * cur.rhs[j];
    evaluate_flow(next, config, next_eval);
    if (next_eval.admissible) {
      next.t = state.t + dt;
      return {true, dt};
    }
    dt *= 0.5;
  }
  return {false, dt};
}

double stability_dt(const FlowConfig& config, const FlowEval& eval) {
  const double h = config.domain.h();
  return config.cfl_safety * h * h / std::max(eval.dt_bound, 1e-300);
}

}  // namespace

std::pair<GraphState, double> step_explicit(const GraphState& state, const FlowConfig& config) {
  state.validate(config.domain);
  FlowEval cur, next_eval;
  evaluate_flow(state, config, cur);
  if (!cur.admissible) {
    std::ostringstream os;
    os << "step_explicit: state not admissible at node " << cur.worst_node;
    throw AdmissibilityError(os.str(), cur.worst_node, cur.worst_min_eig);
  }
  GraphState next;
  const StepAttempt a = attempt_step(state, config, cur, stability_dt(config, cur), next, next_eval);
  if (!a.ok) {
    std::ostringstream os;
    os << "step_explicit: no admissible step after 10 halvings (dt reached " << a.dt << ")";
    throw std::runtime_error(os.str());
  }
  return {std::move(next), a.dt};
}

Trajectory run_flow(const FlowConfig& config) { return run_flow(config, initial_cap(config)); }

Trajectory run_flow(const FlowConfig& config, GraphState initial) {
  config.validate();
  initial.validate(config.domain);
  const int N = config.domain.node_count;

  Trajectory traj;
  traj.config = config;
  traj.dissipation_node.assign(N, 0.0);
  traj.min_conv_run = kInf;
  traj.min_res_run = kInf;
  traj.max_res_run = -kInf;
  traj.min_nu_run = kInf;
  traj.max_w_badj_run = 0.0;
  traj.max_kappa_run = 0.0;

  GraphState state = std::move(initial);
  GraphState next;
  FlowEval cur, next_eval;
  evaluate_flow(state, config, cur);

  double dissipation_partial = 0.0;

  auto absorb = [&](const FlowEval& e) {
    traj.min_conv_run = std::min(traj.min_conv_run, e.min_conv);
    traj.min_res_run = std::min(traj.min_res_run, e.min_res);
    traj.max_res_run = std::max(traj.max_res_run, e.max_res);
    traj.min_nu_run = std::min(traj.min_nu_run, e.min_nu);
    traj.max_w_badj_run = std::max(traj.max_w_badj_run, e.w_badj);
    traj.max_kappa_run = std::max(traj.max_kappa_run, e.max_kappa);
  };
  auto snapshot = [&](const FlowEval& e) {
    Snapshot s;
    s.t = state.t;
    s.u = state.u;
    s.max_res = e.max_res;
    s.dissipation_partial = dissipation_partial;
    s.monotone_so_far = traj.monotone_ok;
    traj.snapshots.push_back(std::move(s));
  };

  if (!cur.admissible) {
    absorb(cur);
    snapshot(cur);
    traj.reason = TerminationReason::AdmissibilityLost;
    traj.final_time = state.t;
    traj.final_residual = cur.max_abs_res;
    return traj;
  }

  absorb(cur);
  snapshot(cur);

  TerminationReason reason = TerminationReason::TMaxReached;
  while (true) {
    if (cur.max_abs_res <= config.steady_tol) {
      reason = TerminationReason::Steady;
      break;
    }
    const double t_rem = config.t_max - state.t;
    if (t_rem <= 0.0) {
      reason = TerminationReason::TMaxReached;
      break;
    }
    const double dt0 = std::min(stability_dt(config, cur), t_rem);
    const StepAttempt a = attempt_step(state, config, cur, dt0, next, next_eval);
    if (!a.ok) {
      reason = TerminationReason::StepUnderflow;
      break;
    }

    if (a.dt * cur.min_rhs < -1e-12) traj.monotone_ok = false;
    for (int j = 0; j < N; ++j)
      traj.dissipation_node[j] += 0.5 * a.dt * (cur.rhs[j] + next_eval.rhs[j]);
    traj.dissipation_max_integrand += 0.5 * a.dt * (cur.max_rhs + next_eval.max_rhs);
    dissipation_partial = traj.dissipation_max_integrand;

    std::swap(state, next);
    std::swap(cur, next_eval);
    ++traj.steps;
    absorb(cur);
    if (traj.steps % config.diag_stride == 0) snapshot(cur);
  }

  traj.reason = reason;
  traj.final_time = state.t;
  traj.final_residual = cur.max_abs_res;
  if (traj.snapshots.empty() || traj.snapshots.back().t != state.t) snapshot(cur);
  return traj;
}

GraphState solve_stationary(const FlowConfig& config, Trajectory* trajectory_out) {
  Trajectory traj = run_flow(config);
  if (traj.reason != TerminationReason::Steady) {
    std::ostringstream os;
    os << "solve_stationary: flow terminated with " << to_string(traj.reason)
       << " at t = " << traj.final_time << " with residual " << traj.final_residual;
    throw NotSteadyError(os.str(), std::move(traj));
  }
  GraphState out;
  out.u = traj.u_final();
  out.t = traj.final_time;
  out.epsilon = config.epsilon;
  if (trajectory_out) *trajectory_out = std::move(traj);
  return out;
}

ContinuationResult epsilon_continuation(const FlowConfig& config, int k_max) {
  if (k_max < 1) throw std::invalid_argument("epsilon_continuation: k_max must be >= 1");
  config.validate();

  ContinuationResult result;
  std::vector<std::future<Trajectory>> jobs;
  for (int k = 0; k < k_max; ++k) {
    FlowConfig level = config;
    level.epsilon = config.epsilon * std::pow(0.5, k);
    result.epsilons.push_back(level.epsilon);
    jobs.push_back(std::async(std::launch::async, [level]() {
      Trajectory traj;
      (void)solve_stationary(level, &traj);
      return traj;
    }));
  }
  for (auto& j : jobs) result.levels.push_back(j.get());

  for (int k = 0; k + 1 < k_max; ++k) {
    const auto& a = result.levels[k].u_final();
    const auto& b = result.levels[k + 1].u_final();
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
    result.d.push_back(d);
  }
  return result;
}

}  // namespace hcf
