#include "ucscreen/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <queue>

#include "ucscreen/simplex.hpp"
#include "ucscreen/tolerances.hpp"

namespace ucs {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

SolveStatus map_lp_status(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return SolveStatus::Optimal;
    case LpStatus::Infeasible: return SolveStatus::Infeasible;
    case LpStatus::Unbounded: return SolveStatus::Unbounded;
    case LpStatus::NumericFailure: return SolveStatus::NumericFailure;
  }
  return SolveStatus::NumericFailure;
}

void round_binaries(const ModelBuilder& model, std::vector<double>& x) {
  for (int v = 0; v < model.num_vars(); ++v) {
    if (model.var_type(v) != VarType::Binary) continue;
    double& val = x[static_cast<std::size_t>(v)];
    if (std::abs(val) <= tol::kBinaryRound) val = 0.0;
    else if (std::abs(val - 1.0) <= tol::kBinaryRound) val = 1.0;
  }
}

struct Node {
  double bound = 0.0;
  std::uint64_t id = 0;
  std::vector<std::pair<int, double>> fixings;  // binary var -> 0/1
  std::vector<double> x;                        // relaxation solution
};

struct NodeOrder {
  bool operator()(const std::shared_ptr<Node>& a, const std::shared_ptr<Node>& b) const {
    if (a->bound != b->bound) return a->bound > b->bound;  // min-bound first
    return a->id > b->id;                                  // then FIFO
  }
};

LpSolution solve_with_fixings(LpData lp, const std::vector<std::pair<int, double>>& fixings) {
  for (const auto& [v, val] : fixings) {
    lp.lower[static_cast<std::size_t>(v)] = val;
    lp.upper[static_cast<std::size_t>(v)] = val;
  }
  return solve_lp(lp);
}

// Most fractional binary, ties resolved by lowest index. Returns -1 when the
// point is integral within the rounding tolerance.
int pick_branch_var(const ModelBuilder& model, const std::vector<double>& x) {
  int best = -1;
  double best_dist = tol::kBinaryRound;
  for (int v = 0; v < model.num_vars(); ++v) {
    if (model.var_type(v) != VarType::Binary) continue;
    const double val = x[static_cast<std::size_t>(v)];
    const double dist = std::abs(val - std::round(val));
    if (dist > best_dist + 1e-12) {
      best_dist = dist;
      best = v;
    }
  }
  return best;
}

}  // namespace

SolveOutcome solve_lp_relaxation(const ModelBuilder& model, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  LpSolution sol = solve_lp(lp_from_model(model));
  SolveOutcome out;
  out.status = map_lp_status(sol.status);
  out.wall_s = elapsed_s(start);
  out.message = sol.message;
  if (sol.status == LpStatus::Optimal) {
    out.objective = sol.objective;
    out.values = std::move(sol.x);
    out.gap = 0.0;
  }
  return out;
}

SolveOutcome solve(const ModelBuilder& model, const SolverConfig& cfg) {
  cfg.validate();
  const auto start = Clock::now();
  const double time_limit = cfg.time_limit_s > 0.0 ? cfg.time_limit_s : kInf;

  std::vector<int> binaries;
  for (int v = 0; v < model.num_vars(); ++v) {
    if (model.var_type(v) == VarType::Binary) binaries.push_back(v);
  }

  const LpData base = lp_from_model(model);

  if (binaries.empty()) {
    LpSolution sol = solve_lp(base);
    SolveOutcome out;
    out.status = map_lp_status(sol.status);
    out.wall_s = elapsed_s(start);
    out.message = sol.message;
    if (sol.status == LpStatus::Optimal) {
      out.objective = sol.objective;
      out.values = std::move(sol.x);
      out.gap = 0.0;
    }
    return out;
  }

  bool have_incumbent = false;
  double inc_obj = kInf;
  std::vector<double> inc_x;

  auto try_incumbent = [&](const std::vector<std::pair<int, double>>& fixings) {
    LpSolution sol = solve_with_fixings(base, fixings);
    if (sol.status != LpStatus::Optimal) return;
    if (!have_incumbent || sol.objective < inc_obj - 1e-12) {
      have_incumbent = true;
      inc_obj = sol.objective;
      inc_x = std::move(sol.x);
    }
  };

  // Warm-start hint: fix binaries to the hinted 0/1 values and check the LP.
  // A hint that is incomplete, fractional, or infeasible is simply ignored.
  if (!model.hint().empty()) {
    std::vector<std::pair<int, double>> fix;
    bool usable = true;
    for (int v : binaries) {
      double hv = std::numeric_limits<double>::quiet_NaN();
      for (const auto& [hvar, hval] : model.hint()) {
        if (hvar == v) {
          hv = hval;
          break;
        }
      }
      if (std::isnan(hv)) continue;
      const double r = std::round(hv);
      if (std::abs(hv - r) > tol::kBinaryRound || (r != 0.0 && r != 1.0)) {
        usable = false;
        break;
      }
      if (r < model.lower(v) - tol::kBinaryRound || r > model.upper(v) + tol::kBinaryRound) {
        usable = false;
        break;
      }
      fix.emplace_back(v, r);
    }
    if (usable && fix.size() == binaries.size()) try_incumbent(fix);
  }

  // Root relaxation.
  LpSolution root = solve_lp(base);
  if (root.status != LpStatus::Optimal) {
    SolveOutcome out;
    out.status = map_lp_status(root.status);
    // The hint may have proven feasibility; an infeasible relaxation
    // overrides it only if we truly never found a point.
    if (root.status == LpStatus::Infeasible && have_incumbent)
      out.status = SolveStatus::NumericFailure;
    out.wall_s = elapsed_s(start);
    out.message = root.message;
    return out;
  }

  std::uint64_t next_id = 0;
  std::priority_queue<std::shared_ptr<Node>, std::vector<std::shared_ptr<Node>>, NodeOrder> open;
  {
    auto node = std::make_shared<Node>();
    node->bound = root.objective;
    node->id = next_id++;
    node->x = std::move(root.x);
    open.push(std::move(node));
  }

  // Rounding heuristic on the root relaxation for an early incumbent.
  {
    std::vector<std::pair<int, double>> fix;
    fix.reserve(binaries.size());
    for (int v : binaries)
      fix.emplace_back(v, std::round(open.top()->x[static_cast<std::size_t>(v)]));
    try_incumbent(fix);
  }

  double best_bound = open.top()->bound;
  const double int_eps = 1e-9;

  auto rel_gap = [&]() {
    if (!have_incumbent) return kInf;
    return (inc_obj - best_bound) / std::max(1e-10, std::abs(inc_obj));
  };

  auto finish = [&](SolveStatus status) {
    SolveOutcome out;
    out.status = status;
    out.wall_s = elapsed_s(start);
    if (have_incumbent) {
      out.objective = inc_obj;
      out.values = inc_x;
      round_binaries(model, out.values);
      out.gap = std::max(0.0, rel_gap());
    }
    return out;
  };

  while (!open.empty()) {
    if (elapsed_s(start) > time_limit) return finish(SolveStatus::TimeLimit);

    auto node = open.top();
    open.pop();
    best_bound = node->bound;

    if (have_incumbent) {
      if (node->bound >= inc_obj - int_eps * std::max(1.0, std::abs(inc_obj))) {
        // Every remaining node is at least as bad: proven optimal.
        return finish(SolveStatus::Optimal);
      }
      if (cfg.mip_gap > 0.0 && rel_gap() <= cfg.mip_gap) {
        return finish(SolveStatus::GapLimit);
      }
    }

    int branch_var = pick_branch_var(model, node->x);
    if (branch_var < 0) {
      // Integral within tolerance: re-solve with exact 0/1 fixings so the
      // incumbent carries no relaxation noise.
      std::vector<std::pair<int, double>> fix;
      fix.reserve(binaries.size());
      for (int v : binaries)
        fix.emplace_back(v, std::round(node->x[static_cast<std::size_t>(v)]));
      try_incumbent(fix);
      if (have_incumbent &&
          inc_obj <= node->bound + 1e-6 * std::max(1.0, std::abs(node->bound))) {
        continue;  // the exact point matches the leaf's bound
      }
      // The exact re-fix failed or came out worse: the point only looked
      // integral. Branch on the least-integral binary no matter how small
      // its fractionality; an exactly-0/1 vertex never lands here.
      double worst = 0.0;
      for (int v : binaries) {
        const double val = node->x[static_cast<std::size_t>(v)];
        const double dist = std::abs(val - std::round(val));
        if (dist > worst) {
          worst = dist;
          branch_var = v;
        }
      }
      if (branch_var < 0) {
        // Fully integral vertex: feasible as-is.
        if (!have_incumbent || node->bound < inc_obj - 1e-12) {
          have_incumbent = true;
          inc_obj = node->bound;
          inc_x = node->x;
        }
        continue;
      }
    }

    for (const double side : {std::round(node->x[static_cast<std::size_t>(branch_var)]),
                              1.0 - std::round(node->x[static_cast<std::size_t>(branch_var)])}) {
      auto fixings = node->fixings;
      fixings.emplace_back(branch_var, side);
      LpSolution child = solve_with_fixings(base, fixings);
      if (child.status == LpStatus::Infeasible) continue;
      if (child.status != LpStatus::Optimal) {
        SolveOutcome out;
        out.status = SolveStatus::NumericFailure;
        out.wall_s = elapsed_s(start);
        out.message = child.message.empty() ? "node relaxation failed" : child.message;
        return out;
      }
      if (have_incumbent && child.objective >= inc_obj - 1e-12) continue;
      auto n = std::make_shared<Node>();
      n->bound = child.objective;
      n->id = next_id++;
      n->fixings = std::move(fixings);
      n->x = std::move(child.x);
      open.push(std::move(n));
    }
  }

  if (!have_incumbent) return finish(SolveStatus::Infeasible);
  return finish(SolveStatus::Optimal);
}

}  // namespace ucs
