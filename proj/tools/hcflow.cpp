// Command-line front end: flow and stationary solves, continuation in the
// boundary lift, the curvature-function certifier, the evolution-identity
// order study, and the comparison harness.
//
// Exit codes: 0 all checks pass, 2 at least one estimate verdict failed,
// 1 execution error, 64 usage error.
#include <chrono>
#include <cstdio>
#include <future>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "hcflow/monitors.hpp"
#include "hcflow/output.hpp"
#include "hcflow/scenario.hpp"
#include "hcflow/symfunc.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ordered_json report_to_json(const hcf::StructureReport& rep) {
  ordered_json j;
  j["family"] = rep.spec.name();
  j["n"] = rep.spec.n;
  j["l"] = rep.spec.l;
  j["samples"] = rep.samples;
  j["seed"] = rep.seed;
  j["all_pass"] = rep.all_pass();
  j["conditions"] = ordered_json::array();
  for (const auto& c : rep.conditions) {
    ordered_json cj;
    cj["id"] = c.id;
    cj["pass"] = c.pass;
    if (c.tight) cj["tight"] = true;
    if (c.has_witness) {
      cj["witness"] = c.witness;
      cj["lhs"] = c.lhs;
      cj["rhs"] = c.rhs;
    }
    if (!c.note.empty()) cj["note"] = c.note;
    j["conditions"].push_back(cj);
  }
  return j;
}

int run_single(const std::string& path, const std::string& command) {
  const auto t0 = std::chrono::steady_clock::now();
  const hcf::ScenarioConfig sc = hcf::parse_scenario(path);
  hcf::Trajectory traj;
  if (command == "stationary") {
    (void)hcf::solve_stationary(sc.flow, &traj);
  } else {
    traj = hcf::run_flow(sc.flow);
  }
  const auto records = hcf::diagnostics_for(traj);
  const hcf::RunSummary summary =
      hcf::build_run_summary(traj, records, sc, command, seconds_since(t0));
  hcf::write_outputs(traj, records, summary, sc.output);
  std::cout << hcf::summary_to_json(summary);
  return summary.any_fail() ? 2 : 0;
}

int run_continuation(const std::string& path) {
  const auto t0 = std::chrono::steady_clock::now();
  const hcf::ScenarioConfig sc = hcf::parse_scenario(path);
  const hcf::ContinuationResult cont = hcf::epsilon_continuation(sc.flow, sc.levels);

  bool any_fail = false;
  ordered_json levels = ordered_json::array();
  for (std::size_t k = 0; k < cont.levels.size(); ++k) {
    const hcf::Trajectory& traj = cont.levels[k];
    const auto records = hcf::diagnostics_for(traj);
    hcf::ScenarioConfig level_sc = sc;
    level_sc.flow.epsilon = cont.epsilons[k];
    const hcf::RunSummary summary = hcf::build_run_summary(
        traj, records, level_sc, "continuation", seconds_since(t0));
    const std::string suffix = "_k" + std::to_string(k);
    hcf::write_outputs(traj, records, summary, sc.output, suffix);
    any_fail = any_fail || summary.any_fail();

    ordered_json lj;
    lj["epsilon"] = cont.epsilons[k];
    lj["termination"] = hcf::to_string(traj.reason);
    lj["final_residual"] = traj.final_residual;
    lj["C_fit"] = summary.C_fit;
    lj["max_w_boundary_adjacent"] = traj.max_w_badj_run;
    levels.push_back(lj);
  }

  ordered_json j;
  j["command"] = "continuation";
  j["levels"] = levels;
  j["differences"] = cont.d;
  ordered_json ratios = ordered_json::array();
  for (std::size_t k = 0; k < cont.d.size(); ++k) ratios.push_back(cont.d[k] / cont.epsilons[k]);
  j["difference_over_epsilon"] = ratios;
  j["wall_seconds"] = seconds_since(t0);
  std::cout << j.dump(2) << "\n";
  return any_fail ? 2 : 0;
}

int run_identities(const std::string& path) {
  const hcf::ScenarioConfig sc = hcf::parse_scenario(path);
  const hcf::IdentityOrderReport rep = hcf::identity_order_study(sc.flow);
  ordered_json j;
  j["command"] = "identities";
  j["dt_base"] = rep.dt_base;
  j["dt_floor"] = rep.dt_floor;
  j["dts"] = rep.dts;
  j["res_normal_component"] = rep.res10;
  j["res_metric"] = rep.res7;
  j["orders_normal_component"] = rep.orders10;
  j["orders_metric"] = rep.orders7;
  j["floor_normal_component"] = rep.floor10;
  j["floor_metric"] = rep.floor7;
  j["h_squared"] = rep.h2;
  const bool ok = rep.pass();
  j["pass"] = ok;
  std::cout << j.dump(2) << "\n";
  return ok ? 0 : 2;
}

int run_compare(const std::string& path_a, const std::string& path_b) {
  const auto t0 = std::chrono::steady_clock::now();
  const hcf::ScenarioConfig sa = hcf::parse_scenario(path_a);
  const hcf::ScenarioConfig sb = hcf::parse_scenario(path_b);

  auto fa = std::async(std::launch::async, [&] { return hcf::run_flow(sa.flow); });
  hcf::Trajectory tb = hcf::run_flow(sb.flow);
  hcf::Trajectory ta = fa.get();

  // The surface with the smaller initial curvature values is the expected
  // higher graph.
  auto initial_sup_F = [](const hcf::Trajectory& t) {
    hcf::GraphState s;
    s.u = t.u_initial();
    s.epsilon = t.config.epsilon;
    double sup = 0.0;
    const auto geo = hcf::evaluate_geometry(s, t.config);
    for (int j = t.config.domain.first_interior(); j <= t.config.domain.last_interior(); ++j)
      sup = std::max(sup, geo[j].F);
    return sup;
  };
  const bool a_low = initial_sup_F(ta) <= initial_sup_F(tb);
  const hcf::Trajectory& low = a_low ? ta : tb;
  const hcf::Trajectory& high = a_low ? tb : ta;
  const hcf::ComparisonResult cmp = hcf::comparison_check(low, high);

  bool any_fail = cmp.ordering == hcf::CompareVerdict::Fail ||
                  (cmp.limits_applicable && !cmp.limits_ok);
  ordered_json j;
  j["command"] = "compare";
  j["lower_f_run"] = a_low ? path_a : path_b;
  j["higher_f_run"] = a_low ? path_b : path_a;

  const hcf::ScenarioConfig& slow = a_low ? sa : sb;
  const hcf::ScenarioConfig& shigh = a_low ? sb : sa;
  const bool same_prefix = slow.output.prefix == shigh.output.prefix &&
                           slow.output.directory == shigh.output.directory;
  auto emit = [&](const hcf::Trajectory& traj, const hcf::ScenarioConfig& sc,
                  const std::string& suffix) {
    const auto records = hcf::diagnostics_for(traj);
    const hcf::RunSummary summary =
        hcf::build_run_summary(traj, records, sc, "compare", seconds_since(t0), &cmp);
    hcf::write_outputs(traj, records, summary, sc.output, suffix);
    any_fail = any_fail || summary.any_fail();
  };
  emit(low, slow, same_prefix ? "_low" : "");
  emit(high, shigh, same_prefix ? "_high" : "");

  j["ordering"] = hcf::to_string(cmp.ordering);
  j["min_margin"] = cmp.min_margin;
  j["pairs_checked"] = cmp.pairs_checked;
  j["limits_applicable"] = cmp.limits_applicable;
  j["limit_diff"] = cmp.limit_diff;
  j["limits_ok"] = cmp.limits_ok;
  if (!cmp.note.empty()) j["note"] = cmp.note;
  j["wall_seconds"] = seconds_since(t0);
  std::cout << j.dump(2) << "\n";
  return any_fail ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Curvature flow of convex graphs over the hyperbolic half-space model"};
  app.require_subcommand(1);

  std::string scenario_path, scenario_b;
  std::string family = "gaussroot";
  int n = 2, l = 0, samples = 10000;
  std::uint64_t seed = 12345;

  CLI::App* cmd_flow = app.add_subcommand("flow", "advance the flow and write diagnostics");
  cmd_flow->add_option("scenario", scenario_path, "scenario file")->required();
  CLI::App* cmd_stat =
      app.add_subcommand("stationary", "flow to the steady state f(kappa) = sigma");
  cmd_stat->add_option("scenario", scenario_path, "scenario file")->required();
  CLI::App* cmd_cont =
      app.add_subcommand("continuation", "solve for a decreasing sequence of boundary lifts");
  cmd_cont->add_option("scenario", scenario_path, "scenario file")->required();
  CLI::App* cmd_ident =
      app.add_subcommand("identities", "evolution-identity residual order study");
  cmd_ident->add_option("scenario", scenario_path, "scenario file")->required();
  CLI::App* cmd_cmp = app.add_subcommand("compare", "ordering and uniqueness of two runs");
  cmd_cmp->add_option("scenarioA", scenario_path, "first scenario")->required();
  cmd_cmp->add_option("scenarioB", scenario_b, "second scenario")->required();
  CLI::App* cmd_checkf = app.add_subcommand("check-f", "certify the curvature function");
  cmd_checkf->add_option("--family", family, "mean | gaussroot | quotient")->required();
  cmd_checkf->add_option("--n", n, "number of principal curvatures");
  cmd_checkf->add_option("--l", l, "quotient denominator index");
  cmd_checkf->add_option("--samples", samples, "cone samples");
  cmd_checkf->add_option("--seed", seed, "sampling seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n" << app.help();
    return 64;
  }

  try {
    if (*cmd_flow) return run_single(scenario_path, "flow");
    if (*cmd_stat) return run_single(scenario_path, "stationary");
    if (*cmd_cont) return run_continuation(scenario_path);
    if (*cmd_ident) return run_identities(scenario_path);
    if (*cmd_cmp) return run_compare(scenario_path, scenario_b);
    if (*cmd_checkf) {
      hcf::CurvatureFunctionSpec spec;
      if (family == "mean")
        spec.family = hcf::CurvatureFamily::MeanH1;
      else if (family == "gaussroot")
        spec.family = hcf::CurvatureFamily::GaussRoot;
      else if (family == "quotient")
        spec.family = hcf::CurvatureFamily::HessianQuotient;
      else {
        std::cerr << "unknown family '" << family << "'\n";
        return 64;
      }
      spec.n = n;
      spec.l = l;
      hcf::ConeSampleSpec sampler;
      sampler.samples = samples;
      sampler.seed = seed;
      const hcf::StructureReport rep = hcf::check_structure(spec, sampler);
      std::cout << report_to_json(rep).dump(2) << "\n";
      return rep.all_pass() ? 0 : 2;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
