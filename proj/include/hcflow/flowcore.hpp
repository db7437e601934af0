// Time integration of the lifted Dirichlet flow u_t = u w (F - sigma):
// cap initial data, explicit stepping with a linearization-scaled step
// bound, flow-to-steady-state solves, and continuation in the boundary
// lift epsilon.
#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hcflow/graphgeom.hpp"
#include "hcflow/symfunc.hpp"

namespace hcf {

struct FlowConfig {
  DomainDescriptor domain;
  CurvatureFunctionSpec fspec;
  double sigma = 0.6;
  double epsilon = 1e-3;
  double sigma_init = 0.8;  // curvature of the initial cap, in (sigma, 1)
  double cfl_safety = 0.2;
  double t_max = 500.0;
  double steady_tol = 1e-8;  // on max interior |F - sigma|
  int diag_stride = 2000;    // accepted steps between stored snapshots

  void validate() const;
  bool operator==(const FlowConfig&) const = default;
};

enum class TerminationReason { Steady, TMaxReached, AdmissibilityLost, StepUnderflow };
std::string to_string(TerminationReason reason);

struct Snapshot {
  double t = 0.0;
  std::vector<double> u;
  double max_res = 0.0;  // max interior (F - sigma) at this time
  double dissipation_partial = 0.0;
  bool monotone_so_far = true;
};

struct Trajectory {
  FlowConfig config;
  std::vector<Snapshot> snapshots;  // initial, every diag_stride steps, final
  TerminationReason reason = TerminationReason::TMaxReached;
  long steps = 0;
  double final_time = 0.0;
  double final_residual = 0.0;  // max interior |F - sigma| at the end

  // Trapezoidal accumulators over every accepted step.
  std::vector<double> dissipation_node;    // per node: integral of (F-sigma) u w dt
  double dissipation_max_integrand = 0.0;  // integral of max_x (F-sigma) u w dt

  // Extrema tracked densely (every accepted state).
  double min_conv_run = 0.0;
  double min_res_run = 0.0;
  double max_res_run = 0.0;
  double min_nu_run = 1.0;
  double max_w_badj_run = 1.0;
  double max_kappa_run = 0.0;
  bool monotone_ok = true;

  const std::vector<double>& u_initial() const { return snapshots.front().u; }
  const std::vector<double>& u_final() const { return snapshots.back().u; }
};

// One fused sweep over the grid: right-hand side plus the aggregates the
// stepper and run-level monitors need.
struct FlowEval {
  std::vector<double> rhs;  // full length, zero on boundary nodes
  double max_abs_res = 0.0;
  double min_res = 0.0;
  double max_res = 0.0;
  double min_rhs = 0.0;
  double max_rhs = 0.0;
  double dt_bound = 0.0;  // max over nodes of u^2 (sum_i F^{ii}) / w
  double min_conv = 0.0;
  double min_nu = 1.0;
  double max_kappa = 0.0;
  double max_w_interior = 1.0;
  double w_badj = 1.0;
  bool admissible = true;
  int worst_node = -1;
  double worst_min_eig = 0.0;
};

void evaluate_flow(const GraphState& state, const FlowConfig& config, FlowEval& out);

// Per-node geometry for reporting and monitors; boundary rows carry
// one-sided derivative values.
struct NodeGeometry {
  double r = 0.0, u = 0.0, du = 0.0, d2u = 0.0;
  double w = 1.0, nu = 1.0;
  double k_max = 0.0, k_min = 0.0;
  double F = 0.0;
  double conv_min = 0.0;
};
std::vector<NodeGeometry> evaluate_geometry(const GraphState& state, const FlowConfig& config);

class AdmissibilityError : public std::runtime_error {
 public:
  AdmissibilityError(const std::string& msg, int node, double min_eig)
      : std::runtime_error(msg), node(node), min_eig(min_eig) {}
  int node;
  double min_eig;
};

class NotSteadyError : public std::runtime_error {
 public:
  NotSteadyError(const std::string& msg, Trajectory traj)
      : std::runtime_error(msg), traj_(std::make_shared<Trajectory>(std::move(traj))) {}
  const Trajectory& trajectory() const { return *traj_; }

 private:
  std::shared_ptr<Trajectory> traj_;
};

// Cap of curvature sigma_init lifted by epsilon; fails with a grid advice
// when the discrete curvature does not clear sigma + (sigma_init-sigma)/2.
GraphState initial_cap(const FlowConfig& config);

std::vector<double> flow_rhs(const GraphState& state, const FlowConfig& config);

// Coefficients of the linearized operator G = u_t/(uw) - F at one node:
// G_kl = dG/du_kl, G_s = dG/du_s, G_u = dG/du, G_t = dG/du_t.
struct LinearizedCoeffs {
  SymMatrix G_kl;
  std::vector<double> G_s;
  double G_u = 0.0;
  double G_t = 0.0;
};
LinearizedCoeffs linearized_coefficients(const GraphState& state, const FlowConfig& config,
                                         int node);

// One forward-Euler step; dt starts at cfl_safety h^2 / dt_bound and is
// halved up to 10 times until the stepped state is admissible.
std::pair<GraphState, double> step_explicit(const GraphState& state, const FlowConfig& config);

Trajectory run_flow(const FlowConfig& config);
Trajectory run_flow(const FlowConfig& config, GraphState initial);

GraphState solve_stationary(const FlowConfig& config, Trajectory* trajectory_out = nullptr);

struct ContinuationResult {
  std::vector<double> epsilons;
  std::vector<Trajectory> levels;
  std::vector<double> d;  // sup norm of consecutive level differences
};
ContinuationResult epsilon_continuation(const FlowConfig& config, int k_max);

}  // namespace hcf
