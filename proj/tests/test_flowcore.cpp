#include "doctest.h"

#include <cmath>
#include <stdexcept>

#include "hcflow/flowcore.hpp"

using namespace hcf;

namespace {

FlowConfig ball_config(int nodes, double steady_tol = 1e-6) {
  FlowConfig c;
  c.domain.kind = DomainKind::RadialBall;
  c.domain.n = 2;
  c.domain.extent = 1.0;
  c.domain.node_count = nodes;
  c.fspec = {CurvatureFamily::GaussRoot, 2, 0};
  c.sigma = 0.6;
  c.sigma_init = 0.8;
  c.epsilon = 1e-3;
  c.t_max = 200.0;
  c.steady_tol = steady_tol;
  c.diag_stride = 200;
  return c;
}

GraphState lifted_cap_state(const FlowConfig& cfg) {
  const CapProfile cap = CapProfile::lifted(cfg.domain.extent, cfg.sigma, cfg.epsilon);
  GraphState s;
  s.epsilon = cfg.epsilon;
  s.u.resize(cfg.domain.node_count);
  for (int j = 0; j < cfg.domain.node_count; ++j) {
    s.u[j] = cfg.domain.is_boundary(j) ? cfg.epsilon
                                       : cap.value(std::abs(cfg.domain.coord(j)));
  }
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  FlowConfig c = ball_config(100);
  CHECK_NOTHROW(c.validate());
  FlowConfig bad = c;
  bad.sigma = 1.2;
  CHECK_THROWS_WITH_AS(bad.validate(), doctest::Contains("sigma must lie in (0,1)"),
                       std::invalid_argument);
  bad = c;
  bad.sigma_init = 0.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.epsilon = 0.2;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = c;
  bad.fspec.n = 3;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("initial cap") {
  const FlowConfig cfg = ball_config(400);
  const GraphState s = initial_cap(cfg);

  // Closed form at the axis: (1 - 0.8)/0.6 + epsilon.
  CHECK(s.u[0] == doctest::Approx(0.2 / 0.6 + 1e-3).epsilon(1e-12));
  CHECK(s.u[cfg.domain.node_count - 1] == 1e-3);

  FlowEval eval;
  evaluate_flow(s, cfg, eval);
  CHECK(eval.admissible);
  // Discrete curvature sits at sigma_init up to discretization error.
  CHECK(eval.min_res + cfg.sigma == doctest::Approx(0.8).epsilon(5e-3));
  CHECK(eval.max_res + cfg.sigma == doctest::Approx(0.8).epsilon(5e-3));
  CHECK(eval.min_res + cfg.sigma > cfg.sigma + 0.5 * (cfg.sigma_init - cfg.sigma));
}

TEST_CASE("flow right-hand side on a horosphere slice") {
  FlowConfig cfg;
  cfg.domain.kind = DomainKind::Interval1D;
  cfg.domain.n = 1;
  cfg.domain.extent = 10.0;
  cfg.domain.node_count = 21;
  cfg.fspec = {CurvatureFamily::GaussRoot, 1, 0};
  cfg.sigma = 0.6;
  cfg.sigma_init = 0.8;
  cfg.epsilon = 0.5;
  GraphState s;
  s.epsilon = 0.5;
  s.u.assign(21, 0.5);

  const std::vector<double> rhs = flow_rhs(s, cfg);
  CHECK(rhs[0] == 0.0);
  CHECK(rhs[20] == 0.0);
  for (int j = 1; j < 20; ++j) CHECK(rhs[j] == doctest::Approx(0.2).epsilon(1e-14));
}

TEST_CASE("flow right-hand side vanishes at second order on the steady cap") {
  std::vector<double> errs;
  for (int nodes : {100, 200, 400}) {
    const FlowConfig cfg = ball_config(nodes);
    const GraphState s = lifted_cap_state(cfg);
    const std::vector<double> rhs = flow_rhs(s, cfg);
    double err = 0.0;
    for (double v : rhs) err = std::max(err, std::abs(v));
    errs.push_back(err);
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.9);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.9);
}

TEST_CASE("radial fast path agrees with the general curvature evaluator") {
  // The stepper computes f and its trace on (k_rad, k_ang, ..., k_ang)
  // tuples in closed form; pin it against the generic route.
  for (const CurvatureFunctionSpec spec :
       {CurvatureFunctionSpec{CurvatureFamily::HessianQuotient, 3, 1},
        CurvatureFunctionSpec{CurvatureFamily::HessianQuotient, 3, 2},
        CurvatureFunctionSpec{CurvatureFamily::GaussRoot, 3, 0},
        CurvatureFunctionSpec{CurvatureFamily::MeanH1, 3, 0}}) {
    FlowConfig cfg;
    cfg.domain.kind = DomainKind::RadialBall;
    cfg.domain.n = 3;
    cfg.domain.extent = 1.0;
    cfg.domain.node_count = 64;
    cfg.fspec = spec;
    cfg.sigma = 0.6;
    cfg.sigma_init = 0.8;
    cfg.epsilon = 1e-3;

    const GraphState s = initial_cap(cfg);
    const std::vector<double> rhs = flow_rhs(s, cfg);
    const DerivativeField der = discrete_derivatives(s, cfg.domain);

    FlowEval eval;
    evaluate_flow(s, cfg, eval);
    double expected_bound = 0.0;
    for (int j = cfg.domain.first_interior(); j <= cfg.domain.last_interior(); ++j) {
      const RadialCurvatures rc =
          radial_curvatures(s.u[j], der.du[j], der.d2u[j], cfg.domain.coord(j), 3);
      const std::vector<double> lam{rc.k_rad, rc.k_ang, rc.k_ang};
      std::vector<double> grad(3);
      const double f = eval_f_grad(cfg.fspec, lam, grad);
      CHECK(rhs[j] ==
            doctest::Approx(s.u[j] * rc.w * (f - cfg.sigma)).epsilon(1e-12));
      const double sum = grad[0] + grad[1] + grad[2];
      expected_bound = std::max(expected_bound, s.u[j] * s.u[j] * sum / rc.w);
    }
    CHECK(eval.dt_bound == doctest::Approx(expected_bound).epsilon(1e-12));
  }
}

TEST_CASE("admissibility violations carry the worst node") {
  FlowConfig cfg;
  cfg.domain.kind = DomainKind::Interval1D;
  cfg.domain.n = 1;
  cfg.domain.extent = 10.0;
  cfg.domain.node_count = 41;
  cfg.fspec = {CurvatureFamily::GaussRoot, 1, 0};
  cfg.sigma = 0.6;
  cfg.sigma_init = 0.8;
  cfg.epsilon = 0.9;

  // Steep concave bump: u'' is far too negative in the middle.
  GraphState s;
  s.epsilon = 0.9;
  s.u.resize(41);
  for (int j = 0; j < 41; ++j) {
    const double x = cfg.domain.coord(j);
    s.u[j] = 0.9 + 2.0 * (1.0 - (x / 10.0) * (x / 10.0)) - 2.0 * 0.0;
  }
  s.u[0] = s.u[40] = 0.9;
  // Sharpen the crown so that 1 + u'^2 + u u'' < 0 there.
  s.u[20] += 1.5;

  try {
    (void)flow_rhs(s, cfg);
    FAIL("expected an admissibility error");
  } catch (const AdmissibilityError& e) {
    CHECK(e.node >= 0);
    CHECK(e.min_eig < 0.0);
  }
}

TEST_CASE("linearized operator coefficients") {
  // Horosphere over a wide ball: closed forms.
  FlowConfig cfg;
  cfg.domain.kind = DomainKind::RadialBall;
  cfg.domain.n = 2;
  cfg.domain.extent = 6.0;
  cfg.domain.node_count = 61;
  cfg.fspec = {CurvatureFamily::GaussRoot, 2, 0};
  cfg.sigma = 0.6;
  cfg.sigma_init = 0.8;
  cfg.epsilon = 0.5;
  GraphState s;
  s.epsilon = 0.5;
  s.u.assign(61, 0.5);

  const LinearizedCoeffs lc = linearized_coefficients(s, cfg, 30);
  CHECK(lc.G_t == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(lc.G_kl.at(0, 0) == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(lc.G_kl.at(1, 1) == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(lc.G_kl.at(0, 1) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(lc.G_s[0] == doctest::Approx(0.0).epsilon(1e-12));
  // -2F/u + sigma/u + sum F^{ii}/(w u) at F = 1, sum = 1.
  CHECK(lc.G_u == doctest::Approx(-0.8).epsilon(1e-10));

  // Finite-difference consistency on a curved state.
  const FlowConfig ccfg = ball_config(200);
  const GraphState cap = initial_cap(ccfg);
  const int node = 120;
  const LinearizedCoeffs lcc = linearized_coefficients(cap, ccfg, node);

  // Rebuild the pointwise arguments the way the operator sees them.
  const DerivativeField der = discrete_derivatives(cap, ccfg.domain);
  const double uj = cap.u[node];
  const double r = ccfg.domain.coord(node);
  std::vector<double> Du{der.du[node], 0.0};
  SymMatrix D2u(2);
  D2u.at(0, 0) = der.d2u[node];
  D2u.at(1, 1) = der.du[node] / r;

  auto G_of = [&](double u_val, const std::vector<double>& Du_val, const SymMatrix& D2u_val,
                  double ut_val) {
    const PointGeometry g = hyperbolic_shape(u_val, Du_val, D2u_val);
    return ut_val / (u_val * g.w) - F_value(ccfg.fspec, g.A);
  };
  const PointGeometry base = hyperbolic_shape(uj, Du, D2u);
  const double F0 = F_value(ccfg.fspec, base.A);
  const double ut0 = uj * base.w * (F0 - ccfg.sigma);  // frozen

  const double h = 1e-6;
  for (int k = 0; k < 2; ++k)
    for (int l = k; l < 2; ++l) {
      SymMatrix Dp = D2u, Dm = D2u;
      Dp.at(k, l) += h;
      Dm.at(k, l) -= h;
      if (k != l) {
        Dp.at(l, k) += h;
        Dm.at(l, k) -= h;
      }
      double fd = (G_of(uj, Du, Dp, ut0) - G_of(uj, Du, Dm, ut0)) / (2.0 * h);
      if (k != l) fd *= 0.5;
      CHECK(lcc.G_kl.at(k, l) == doctest::Approx(fd).epsilon(1e-4));
    }
  {
    const double fd = (G_of(uj + h, Du, D2u, ut0) - G_of(uj - h, Du, D2u, ut0)) / (2.0 * h);
    CHECK(lcc.G_u == doctest::Approx(fd).epsilon(1e-4));
  }
  for (int sidx = 0; sidx < 2; ++sidx) {
    auto Dp = Du, Dm = Du;
    Dp[sidx] += h;
    Dm[sidx] -= h;
    const double fd = (G_of(uj, Dp, D2u, ut0) - G_of(uj, Dm, D2u, ut0)) / (2.0 * h);
    CHECK(lcc.G_s[sidx] == doctest::Approx(fd).epsilon(1e-4));
  }

  // Parabolicity: the second-order coefficient matrix is negative definite.
  CHECK(sym_eigen(lcc.G_kl).values.front() < 0.0);
}

TEST_CASE("explicit step") {
  const FlowConfig cfg = ball_config(200);
  const GraphState s0 = initial_cap(cfg);
  const auto [s1, dt] = step_explicit(s0, cfg);
  CHECK(dt > 0.0);

  FlowEval eval;
  evaluate_flow(s1, cfg, eval);
  CHECK(eval.admissible);
  CHECK(eval.min_conv > 0.0);
  for (int j = 0; j <= cfg.domain.last_interior(); ++j) CHECK(s1.u[j] > s0.u[j]);

  // Stationary start barely moves: |u_new - u| <= dt * O(h^2).
  const GraphState cap = lifted_cap_state(cfg);
  const auto [cap1, dtc] = step_explicit(cap, cfg);
  const double h2 = cfg.domain.h() * cfg.domain.h();
  for (std::size_t j = 0; j < cap.u.size(); ++j)
    CHECK(std::abs(cap1.u[j] - cap.u[j]) <= dtc * 50.0 * h2);
}

TEST_CASE("flow converges to the lifted cap") {
  const FlowConfig cfg = ball_config(100);
  const Trajectory traj = run_flow(cfg);
  CHECK(traj.reason == TerminationReason::Steady);
  CHECK(traj.final_residual <= cfg.steady_tol);

  // Steady-state detection doubles as a bound on u_t.
  FlowEval eval;
  GraphState fin;
  fin.u = traj.u_final();
  fin.epsilon = cfg.epsilon;
  evaluate_flow(fin, cfg, eval);
  double uwmax = 0.0;
  for (int j = 0; j <= cfg.domain.last_interior(); ++j) {
    const double rhs = std::abs(eval.rhs[j]);
    uwmax = std::max(uwmax, rhs);
  }
  CHECK(uwmax <= cfg.steady_tol * (1.0 / cfg.sigma) * 1.0);  // |u_t| <= tol * max(uw)

  const CapProfile cap = CapProfile::lifted(1.0, 0.6, cfg.epsilon);
  double err = 0.0;
  for (int j = 0; j < cfg.domain.node_count; ++j)
    err = std::max(err, std::abs(traj.u_final()[j] - cap.value(cfg.domain.coord(j))));
  CHECK(err <= 2e-3);

  // Preservation along the run, tracked densely.
  CHECK(traj.min_conv_run > 0.0);
  CHECK(traj.min_res_run > 0.0);
  CHECK(traj.monotone_ok);

  // The max residual decays under an exponential envelope anchored at t=0.
  const double m0 = traj.snapshots.front().max_res;
  double lam = -1e300;
  for (std::size_t k = 1; k < traj.snapshots.size(); ++k) {
    const Snapshot& s = traj.snapshots[k];
    if (s.t > 0.0 && s.max_res > 0.0)
      lam = std::max(lam, (std::log(s.max_res) - std::log(m0)) / s.t);
  }
  CHECK(lam < 0.0);
}

TEST_CASE("stationary solve converges at order >= 1.5 under grid refinement") {
  std::vector<double> errs;
  for (int nodes : {50, 100, 200}) {
    FlowConfig cfg = ball_config(nodes, 1e-9);
    const GraphState fin = solve_stationary(cfg);
    const CapProfile cap = CapProfile::lifted(1.0, 0.6, cfg.epsilon);
    double err = 0.0;
    for (int j = 0; j < cfg.domain.node_count; ++j)
      err = std::max(err, std::abs(fin.u[j] - cap.value(cfg.domain.coord(j))));
    errs.push_back(err);
  }
  CHECK(std::log2(errs[0] / errs[1]) >= 1.5);
  CHECK(std::log2(errs[1] / errs[2]) >= 1.5);
}

TEST_CASE("degenerate horizons of the run loop") {
  FlowConfig cfg = ball_config(100);
  cfg.t_max = 0.0;
  const Trajectory traj = run_flow(cfg);
  CHECK(traj.reason == TerminationReason::TMaxReached);
  CHECK(traj.steps == 0);
  CHECK(traj.snapshots.size() == 1);

  // Starting on the discrete steady state terminates immediately.
  FlowConfig loose = ball_config(200, 1e-4);
  const Trajectory steady = run_flow(loose, lifted_cap_state(loose));
  CHECK(steady.reason == TerminationReason::Steady);
  CHECK(steady.steps == 0);

  FlowConfig hopeless = ball_config(100);
  hopeless.t_max = 1e-7;
  CHECK_THROWS_AS((void)solve_stationary(hopeless), NotSteadyError);
  try {
    (void)solve_stationary(hopeless);
  } catch (const NotSteadyError& e) {
    CHECK(e.trajectory().reason == TerminationReason::TMaxReached);
  }
}

TEST_CASE("every curvature family flows to the same umbilic cap") {
  // f(sigma, ..., sigma) = sigma for all normalized degree-one families,
  // so the stationary profile does not depend on the family.
  for (const CurvatureFunctionSpec spec :
       {CurvatureFunctionSpec{CurvatureFamily::HessianQuotient, 2, 1},
        CurvatureFunctionSpec{CurvatureFamily::MeanH1, 2, 0},
        CurvatureFunctionSpec{CurvatureFamily::HessianQuotient, 3, 1}}) {
    FlowConfig cfg = ball_config(100);
    cfg.domain.n = spec.n;
    cfg.fspec = spec;
    const Trajectory traj = run_flow(cfg);
    CHECK(traj.reason == TerminationReason::Steady);
    CHECK(traj.monotone_ok);
    CHECK(traj.min_res_run > 0.0);
    const CapProfile cap = CapProfile::lifted(1.0, 0.6, cfg.epsilon);
    double err = 0.0;
    for (int j = 0; j < cfg.domain.node_count; ++j)
      err = std::max(err, std::abs(traj.u_final()[j] - cap.value(cfg.domain.coord(j))));
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("step halving keeps aggressive runs admissible") {
  // Far above the stable ratio the iteration oscillates and stops
  // converging, but the halving guard still rejects every step that would
  // leave the convex cone.
  FlowConfig cfg = ball_config(64);
  cfg.cfl_safety = 0.95;
  cfg.t_max = 5.0;
  const Trajectory traj = run_flow(cfg);
  CHECK(traj.min_conv_run > 0.0);
  FlowEval eval;
  GraphState fin;
  fin.u = traj.u_final();
  fin.epsilon = cfg.epsilon;
  evaluate_flow(fin, cfg, eval);
  CHECK(eval.admissible);
}

TEST_CASE("interval flow converges to the one-dimensional cap") {
  FlowConfig cfg;
  cfg.domain.kind = DomainKind::Interval1D;
  cfg.domain.n = 1;
  cfg.domain.extent = 1.0;
  cfg.domain.node_count = 100;
  cfg.fspec = {CurvatureFamily::GaussRoot, 1, 0};
  cfg.sigma = 0.6;
  cfg.sigma_init = 0.8;
  cfg.epsilon = 1e-3;
  cfg.t_max = 200.0;
  cfg.steady_tol = 1e-6;
  cfg.diag_stride = 500;

  const Trajectory traj = run_flow(cfg);
  CHECK(traj.reason == TerminationReason::Steady);
  CHECK(traj.monotone_ok);
  CHECK(traj.min_conv_run > 0.0);
  CHECK(traj.min_res_run > 0.0);

  const CapProfile cap = CapProfile::lifted(1.0, 0.6, cfg.epsilon);
  double err = 0.0;
  for (int j = 0; j < cfg.domain.node_count; ++j)
    err = std::max(err, std::abs(traj.u_final()[j] - cap.value(cfg.domain.coord(j))));
  CHECK(err <= 2e-3);
}

TEST_CASE("a non-admissible start terminates immediately") {
  FlowConfig cfg;
  cfg.domain.kind = DomainKind::Interval1D;
  cfg.domain.n = 1;
  cfg.domain.extent = 10.0;
  cfg.domain.node_count = 41;
  cfg.fspec = {CurvatureFamily::GaussRoot, 1, 0};
  cfg.sigma = 0.6;
  cfg.sigma_init = 0.8;
  cfg.epsilon = 0.9;

  GraphState s;
  s.epsilon = 0.9;
  s.u.assign(41, 0.9);
  s.u[20] = 3.0;  // sharp spike: concave crown next to it

  const Trajectory traj = run_flow(cfg, s);
  CHECK(traj.reason == TerminationReason::AdmissibilityLost);
  CHECK(traj.steps == 0);
}

TEST_CASE("epsilon continuation contracts at the rate of the lift") {
  FlowConfig cfg = ball_config(100);
  cfg.epsilon = 4e-3;
  const ContinuationResult cont = epsilon_continuation(cfg, 3);
  REQUIRE(cont.levels.size() == 3);
  REQUIRE(cont.d.size() == 2);
  CHECK(cont.epsilons[0] == doctest::Approx(4e-3));
  CHECK(cont.epsilons[2] == doctest::Approx(1e-3));
  CHECK(cont.d[0] > cont.d[1]);
  for (std::size_t k = 0; k < cont.d.size(); ++k) {
    CHECK(cont.d[k] > 0.0);
    CHECK(cont.d[k] <= 2.0 * cont.epsilons[k]);
  }

  // Boundary slope climbs toward 1/sigma as the lift decreases.
  CHECK(cont.levels[2].max_w_badj_run >= cont.levels[0].max_w_badj_run - 1e-9);
  CHECK(cont.levels[2].max_w_badj_run < 1.0 / cfg.sigma + 0.5);

  CHECK_THROWS_AS((void)epsilon_continuation(cfg, 0), std::invalid_argument);
}
