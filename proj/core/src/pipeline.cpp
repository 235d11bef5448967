#include "ucscreen/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>

#include "ucscreen/cost_bound.hpp"
#include "ucscreen/grid.hpp"
#include "ucscreen/oracle.hpp"
#include "ucscreen/scenarios.hpp"
#include "ucscreen/uc.hpp"
#include "ucscreen/uncertainty.hpp"

namespace ucs {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void stage_fail(const std::string& stage, const std::exception& e) {
  throw std::runtime_error("pipeline stage '" + stage + "': " + e.what());
}

ScreeningResult screen_with(const ScreeningProblem& problem, const RunConfig& cfg,
                            SolverConfig solver) {
  solver.threads = cfg.workers;
  if (problem.method == Method::Benchmark) return screen_benchmark(problem, solver);
  if (cfg.blocks > 1) {
    ScreeningProblem decomposed = problem;
    decomposed.partition = partition_even(problem.net->num_lines(), cfg.blocks);
    return screen_decomposed(decomposed, solver);
  }
  return discover_umbrella(problem, solver);
}

}  // namespace

void run_pipeline(const RunConfig& cfg) {
  cfg.validate();
  fs::create_directories(cfg.out_dir);
  const fs::path out(cfg.out_dir);

  // Network.
  Network net;
  try {
    net = load_network(cfg.network_path);
    build_ptdf(net);
  } catch (const std::exception& e) {
    stage_fail("network", e);
  }
  const int n = net.num_buses();

  // Data: generate the synthetic correlated series, or reuse a directory.
  ScenarioSet scen;
  try {
    if (cfg.scenarios_dir.empty()) {
      CorrelationSpec spec{cfg.eta, cfg.seed, cfg.samples};
      scen = generate_correlated(net, spec);
      write_scenarios((out / "scenarios").string(), scen);
    } else {
      scen = read_scenarios(cfg.scenarios_dir, &net);
    }
  } catch (const std::exception& e) {
    stage_fail("data", e);
  }

  ScenarioSet train, test;
  try {
    std::tie(train, test) = split(scen, cfg.train_fraction, cfg.seed);
  } catch (const std::exception& e) {
    stage_fail("split", e);
  }

  // Uncertainty set for the configured method.
  PcaModel pca;
  UncertaintySet uset;
  try {
    pca = fit_pca(train);
    if (cfg.set_kind == SetKind::Box) {
      uset = box_from_data(net, train);
    } else {
      const int k = cfg.k_retained > 0 ? cfg.k_retained : n;
      uset = build_set(pca, net.forecast(), k, cfg.set_kind);
    }
    save_set(uset, (out / "set.json").string());
  } catch (const std::exception& e) {
    stage_fail("uncertainty", e);
  }

  // Production-cost history from full UC solves on training rows; this is
  // both the regression input and the Fig.-2 style scatter.
  std::vector<double> loads, costs;
  try {
    const std::vector<DirRef> full = all_directions(net);
    const int rows = std::min(cfg.bound_fit_instances, train.num_samples());
    for (int t = 0; t < rows; ++t) {
      const Eigen::VectorXd demand = train.observed.row(t).transpose();
      UcInstance inst{&net, demand, full};
      const UcSolution sol = solve_uc(inst, cfg.solver);
      if (sol.status != SolveStatus::Optimal) continue;
      loads.push_back(demand.sum());
      costs.push_back(sol.total_cost);
    }
    if (loads.size() < 2)
      throw std::runtime_error("not enough feasible training UC solves for the cost fit");
    write_uc_log((out / "uc_log.csv").string(), loads, costs);
    write_uc_log((out / "fig2_cost_scatter.csv").string(), loads, costs);
  } catch (const std::exception& e) {
    stage_fail("uc-log", e);
  }

  CostBound bound;
  try {
    bound = fit_cost_bound(loads, costs, cfg.breakpoints, cfg.delta, cfg.gamma,
                           cfg.bound_mode);
    save_bound(bound, (out / "bound.json").string());
  } catch (const std::exception& e) {
    stage_fail("cost-bound", e);
  }

  // Headline screening run.
  ScreeningResult screening;
  try {
    ScreeningProblem problem;
    problem.net = &net;
    problem.method = cfg.method;
    problem.uset = uset;
    if (method_uses_bound(cfg.method)) problem.bound = bound;
    screening = screen_with(problem, cfg, cfg.solver);
    save_screening_result(screening, (out / "result.json").string());
  } catch (const std::exception& e) {
    stage_fail("screening", e);
  }

  // Evaluation protocol on the test split, reusing the screening above.
  try {
    EvalOptions opts;
    opts.method = cfg.method;
    opts.k_retained = cfg.k_retained;
    opts.train_fraction = cfg.train_fraction;
    opts.seed = cfg.seed;
    opts.max_test_instances = cfg.test_instances;
    if (method_uses_bound(cfg.method)) opts.bound = bound;
    opts.precomputed_screening = &screening;
    const EvalReport report = evaluate(net, scen, opts, cfg.solver);
    save_report(report, (out / "report.json").string());
  } catch (const std::exception& e) {
    stage_fail("evaluate", e);
  }

  // Fig. 3 sweep: retained constraints against the share of kept components.
  try {
    const Method sweep_method =
        method_set_kind(cfg.method) == SetKind::Box ? Method::D1Ucd : cfg.method;
    std::ofstream fig3((out / "fig3_k_sweep.csv").string());
    fig3 << "k,components_pct,retained_count,screening_wall_ms\n";
    std::set<int> seen;
    for (double pct : cfg.sweep_k_percent) {
      const int k = std::clamp(static_cast<int>(std::lround(pct / 100.0 * n)), 1, n);
      if (!seen.insert(k).second) continue;
      ScreeningProblem problem;
      problem.net = &net;
      problem.method = sweep_method;
      problem.uset = build_set(pca, net.forecast(), k, method_set_kind(sweep_method));
      if (method_uses_bound(sweep_method)) problem.bound = bound;
      const ScreeningResult r = screen_with(problem, cfg, cfg.solver);
      char buf[128];
      std::snprintf(buf, sizeof(buf), "%d,%.6g,%d,%.6g\n", k, pct, r.umbrella_count(),
                    r.total_wall_ms);
      fig3 << buf;
    }
  } catch (const std::exception& e) {
    stage_fail("k-sweep", e);
  }

  // Fig. 4 sweep: retained count of the economics-augmented P1 screening as
  // the conservativeness factor grows.
  try {
    const int k = cfg.k_retained > 0 ? cfg.k_retained : n;
    const UncertaintySet p1 = build_set(pca, net.forecast(), k, SetKind::P1);
    std::ofstream fig4((out / "fig4_gamma_sweep.csv").string());
    fig4 << "gamma,retained_count,fallback\n";
    for (double gamma : cfg.sweep_gamma) {
      CostBound swept = bound;
      swept.gamma = gamma;
      ScreeningProblem problem;
      problem.net = &net;
      problem.method = Method::EdD1Ucd;
      problem.uset = p1;
      problem.bound = swept;
      const ScreeningResult r = screen_with(problem, cfg, cfg.solver);
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.6g,%d,%d\n", gamma, r.umbrella_count(),
                    r.fallback ? 1 : 0);
      fig4 << buf;
    }
  } catch (const std::exception& e) {
    stage_fail("gamma-sweep", e);
  }
}

}  // namespace ucs
