#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ucscreen/cost_bound.hpp"
#include "ucscreen/grid.hpp"
#include "ucscreen/model.hpp"
#include "ucscreen/scenarios.hpp"
#include "ucscreen/screening.hpp"

namespace ucs {

struct UcInstance {
  const Network* net = nullptr;
  Eigen::VectorXd demand;          // MW per bus position
  std::vector<DirRef> retained;    // line directions to enforce

  void validate() const;
};

struct UcSolution {
  SolveStatus status = SolveStatus::NumericFailure;
  std::vector<char> commitment;  // u per generator position
  Eigen::VectorXd dispatch;      // g, MW
  Eigen::VectorXd injections;    // q, MW
  double total_cost = 0.0;
  double wall_s = 0.0;
};

// Every (line, direction) pair, the full constraint set.
std::vector<DirRef> all_directions(const Network& net);

// Single-period UC MILP with only the retained line directions enforced.
// `warm` seeds the incumbent from a previous commitment vector.
UcSolution solve_uc(const UcInstance& inst, const SolverConfig& cfg,
                    const UcSolution* warm = nullptr);

struct Violation {
  int line = 0;  // line position
  Direction dir = Direction::Plus;
  double magnitude_mw = 0.0;  // overshoot beyond the limit
};

// Checks all 2L directions regardless of what was enforced. Empty result
// means the solution is feasible for the full problem.
std::vector<Violation> verify_full_feasibility(const UcSolution& sol, const Network& net);

struct EvalOptions {
  Method method = Method::BUcd;
  int k_retained = 0;              // 0 keeps all principal components
  double train_fraction = 7200.0 / 8640.0;
  std::uint64_t seed = 0;
  int max_test_instances = 0;      // 0 = every test row
  std::optional<CostBound> bound;  // required for ED methods
  bool warm_start_full = true;     // step 4 warm start from step 3 binaries
  // Reuse an existing screening run instead of re-screening on the train
  // split. Must match the network and method.
  const ScreeningResult* precomputed_screening = nullptr;
};

struct EvalInstanceRecord {
  std::int64_t timestamp = 0;
  double cost_full = 0.0;
  double cost_reduced = 0.0;
  double time_full_s = 0.0;
  double time_reduced_s = 0.0;
  bool reduced_violates_dropped = false;
};

struct EvalReport {
  std::string method;
  double retained_pct = 0.0;
  double screening_time_s = 0.0;
  double uc_time_full_s = 0.0;        // median over instances
  double uc_time_reduced_s = 0.0;     // median over instances
  double uc_time_reduction_pct = 0.0; // median of per-instance 1 - reduced/full
  int n_infeasible = 0;               // reduced solution violates a dropped limit
  std::vector<double> cost_delta;     // per instance, reduced - full
  std::vector<EvalInstanceRecord> instances;
  bool screening_fallback = false;
  int slack_bus_id = 0;
  std::uint64_t seed = 0;
};

// The five-step evaluation protocol: screen on train-derived sets, time the
// screening, solve the reduced UC per test instance, warm-start the full UC
// from its binaries, and report the aggregate metrics.
EvalReport evaluate(const Network& net, const ScenarioSet& scenarios, const EvalOptions& opts,
                    const SolverConfig& cfg);

void save_report(const EvalReport& report, const std::string& path);

}  // namespace ucs
