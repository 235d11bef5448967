#pragma once

#include <string>
#include <vector>

#include "ucscreen/model.hpp"

namespace ucs {

// Solver-internal LP form: min cost.x subject to rows and variable bounds.
// Rows keep their sense; slacks and artificials are added inside solve_lp.
struct LpData {
  struct Row {
    std::vector<int> idx;
    std::vector<double> val;
    RowSense sense = RowSense::Le;
    double rhs = 0.0;
  };

  int num_vars = 0;
  std::vector<double> cost;   // size num_vars
  std::vector<double> lower;  // size num_vars, -inf allowed
  std::vector<double> upper;  // size num_vars, +inf allowed
  std::vector<Row> rows;
};

enum class LpStatus { Optimal, Infeasible, Unbounded, NumericFailure };

struct LpSolution {
  LpStatus status = LpStatus::NumericFailure;
  double objective = 0.0;
  std::vector<double> x;  // structural values, present for Optimal only
  int iterations = 0;
  std::string message;
};

// Two-phase bounded-variable primal simplex. Deterministic: Dantzig pricing
// with fixed tie-breaks, Bland's rule after a degeneracy stall.
LpSolution solve_lp(const LpData& lp);

// LpData view of a ModelBuilder. Binaries become their [lb, ub] box; the
// branch-and-bound layer is responsible for integrality.
LpData lp_from_model(const ModelBuilder& model);

}  // namespace ucs
