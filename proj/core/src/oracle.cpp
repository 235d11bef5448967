#include "ucscreen/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "ucscreen/tolerances.hpp"

namespace ucs {

namespace {

constexpr double kRowMatch = 1e-9;

// Row of the direction's constraint as (coefficients over buses, rhs):
// +: h q <= f_max, -: -h q <= f_max.
Eigen::VectorXd direction_row(const Network& net, const DirRef& d) {
  Eigen::VectorXd row = net.ptdf.row(d.line).transpose();
  if (d.dir == Direction::Minus) row = -row;
  return row;
}

bool rows_match(const Eigen::VectorXd& a, double fa, const Eigen::VectorXd& b, double fb) {
  return std::abs(fa - fb) <= kRowMatch && (a - b).cwiseAbs().maxCoeff() <= kRowMatch;
}

// The oracle's own model of the relaxed region. Deliberately written from
// the set definitions rather than sharing the screening module's builder.
struct RegionModel {
  ModelBuilder mb;
  std::vector<int> q_vars;
};

RegionModel build_region(const Network& net, const UncertaintySet& uset,
                         const std::vector<DirRef>& enforced_dirs) {
  const int n = net.num_buses();
  const int m = net.num_generators();
  RegionModel region;
  ModelBuilder& mb = region.mb;

  std::vector<int> g_vars, u_vars, d_vars;
  for (int g = 0; g < m; ++g)
    g_vars.push_back(mb.add_continuous("g" + std::to_string(g), 0.0,
                                       net.generators[static_cast<std::size_t>(g)].g_max));
  for (int i = 0; i < n; ++i)
    region.q_vars.push_back(mb.add_continuous("q" + std::to_string(i), -kInf, kInf));
  for (int g = 0; g < m; ++g)
    u_vars.push_back(mb.add_continuous("u" + std::to_string(g), 0.0, 1.0));

  switch (uset.kind) {
    case SetKind::Box: {
      for (int i = 0; i < n; ++i)
        d_vars.push_back(mb.add_continuous("d" + std::to_string(i), uset.box_lo[i],
                                           uset.box_hi[i]));
      break;
    }
    case SetKind::P1: {
      // d_i = d0_i + sum_k (2 w_k - 1) sbar_k[i]
      std::vector<int> w;
      for (int k = 0; k < uset.retained; ++k)
        w.push_back(mb.add_continuous("w" + std::to_string(k), 0.0, 1.0));
      for (int i = 0; i < n; ++i) {
        d_vars.push_back(mb.add_continuous("d" + std::to_string(i), -kInf, kInf));
        std::vector<std::pair<int, double>> terms{{d_vars.back(), -1.0}};
        double rhs = -uset.d0[i];
        for (int k = 0; k < uset.retained; ++k) {
          terms.emplace_back(w[static_cast<std::size_t>(k)],
                             2.0 * uset.sbar[static_cast<std::size_t>(k)][i]);
          rhs += uset.sbar[static_cast<std::size_t>(k)][i];
        }
        mb.add_row(std::move(terms), RowSense::Eq, rhs);
      }
      break;
    }
    case SetKind::P2: {
      // d_i = sum_k (wp_k S+_k[i] + wm_k S-_k[i]), sum weights = 1
      std::vector<int> wp, wm;
      std::vector<std::pair<int, double>> simplex;
      for (int k = 0; k < uset.retained; ++k) {
        wp.push_back(mb.add_continuous("wp" + std::to_string(k), 0.0, 1.0));
        wm.push_back(mb.add_continuous("wm" + std::to_string(k), 0.0, 1.0));
        simplex.emplace_back(wp.back(), 1.0);
        simplex.emplace_back(wm.back(), 1.0);
      }
      mb.add_row(std::move(simplex), RowSense::Eq, 1.0);
      for (int i = 0; i < n; ++i) {
        d_vars.push_back(mb.add_continuous("d" + std::to_string(i), -kInf, kInf));
        std::vector<std::pair<int, double>> terms{{d_vars.back(), -1.0}};
        for (int k = 0; k < uset.retained; ++k) {
          terms.emplace_back(wp[static_cast<std::size_t>(k)],
                             uset.splus[static_cast<std::size_t>(k)][i]);
          terms.emplace_back(wm[static_cast<std::size_t>(k)],
                             uset.sminus[static_cast<std::size_t>(k)][i]);
        }
        mb.add_row(std::move(terms), RowSense::Eq, 0.0);
      }
      break;
    }
  }

  const auto by_bus = net.generators_by_bus();
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> terms{{region.q_vars[static_cast<std::size_t>(i)], 1.0},
                                              {d_vars[static_cast<std::size_t>(i)], 1.0}};
    for (int g : by_bus[static_cast<std::size_t>(i)])
      terms.emplace_back(g_vars[static_cast<std::size_t>(g)], -1.0);
    mb.add_row(std::move(terms), RowSense::Eq, 0.0);
  }
  {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < n; ++i)
      terms.emplace_back(region.q_vars[static_cast<std::size_t>(i)], 1.0);
    mb.add_row(std::move(terms), RowSense::Eq, 0.0);
  }
  for (int g = 0; g < m; ++g) {
    const auto& gen = net.generators[static_cast<std::size_t>(g)];
    mb.add_row({{g_vars[static_cast<std::size_t>(g)], 1.0},
                {u_vars[static_cast<std::size_t>(g)], -gen.g_min}},
               RowSense::Ge, 0.0);
    mb.add_row({{g_vars[static_cast<std::size_t>(g)], 1.0},
                {u_vars[static_cast<std::size_t>(g)], -gen.g_max}},
               RowSense::Le, 0.0);
  }

  for (const auto& d : enforced_dirs) {
    const Eigen::VectorXd row = direction_row(net, d);
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < n; ++i) {
      if (row[i] == 0.0) continue;
      terms.emplace_back(region.q_vars[static_cast<std::size_t>(i)], row[i]);
    }
    mb.add_row(std::move(terms), RowSense::Le,
               net.lines[static_cast<std::size_t>(d.line)].f_max);
  }
  return region;
}

}  // namespace

std::vector<std::vector<DirRef>> duplicate_direction_classes(const Network& net) {
  std::vector<DirRef> dirs = all_directions(net);
  std::vector<char> assigned(dirs.size(), 0);
  std::vector<std::vector<DirRef>> classes;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (assigned[i]) continue;
    std::vector<DirRef> cls{dirs[i]};
    assigned[i] = 1;
    const Eigen::VectorXd row_i = direction_row(net, dirs[i]);
    const double f_i = net.lines[static_cast<std::size_t>(dirs[i].line)].f_max;
    for (std::size_t j = i + 1; j < dirs.size(); ++j) {
      if (assigned[j] || dirs[j].line == dirs[i].line) continue;
      const Eigen::VectorXd row_j = direction_row(net, dirs[j]);
      const double f_j = net.lines[static_cast<std::size_t>(dirs[j].line)].f_max;
      if (rows_match(row_i, f_i, row_j, f_j)) {
        cls.push_back(dirs[j]);
        assigned[j] = 1;
      }
    }
    if (cls.size() > 1) classes.push_back(std::move(cls));
  }
  return classes;
}

Verdict exact_redundancy(const Network& net, const UncertaintySet& uset, const DirRef& target,
                         const std::vector<DirRef>* enforced) {
  if (target.line < 0 || target.line >= net.num_lines())
    throw std::invalid_argument("exact_redundancy: line out of range");

  // Rows identical to the target leave the region together with it.
  const Eigen::VectorXd target_row = direction_row(net, target);
  const double target_fmax = net.lines[static_cast<std::size_t>(target.line)].f_max;
  std::vector<DirRef> rows;
  const std::vector<DirRef> base = enforced != nullptr ? *enforced : all_directions(net);
  for (const auto& d : base) {
    if (d == target) continue;
    if (rows_match(direction_row(net, d), net.lines[static_cast<std::size_t>(d.line)].f_max,
                   target_row, target_fmax))
      continue;
    rows.push_back(d);
  }

  RegionModel region = build_region(net, uset, rows);
  std::vector<std::pair<int, double>> obj;
  for (int i = 0; i < net.num_buses(); ++i) {
    if (target_row[i] == 0.0) continue;
    obj.emplace_back(region.q_vars[static_cast<std::size_t>(i)], -target_row[i]);  // maximize
  }
  region.mb.set_objective(std::move(obj));

  const SolveOutcome out = solve_lp_relaxation(region.mb, SolverConfig{});
  if (out.status == SolveStatus::Infeasible)
    throw std::runtime_error("exact_redundancy: relaxed region is empty");
  if (out.status == SolveStatus::Unbounded) return Verdict::Irredundant;
  if (out.status != SolveStatus::Optimal)
    throw std::runtime_error("exact_redundancy: LP failed: " + to_string(out.status));
  const double max_flow = -out.objective;
  return max_flow <= target_fmax + tol::kOracleSlack ? Verdict::Redundant
                                                     : Verdict::Irredundant;
}

OracleVerdict classify_all(const Network& net, const UncertaintySet& uset) {
  OracleVerdict out;
  const int nl = net.num_lines();
  out.verdict_plus.assign(static_cast<std::size_t>(nl), Verdict::Redundant);
  out.verdict_minus.assign(static_cast<std::size_t>(nl), Verdict::Redundant);
  out.duplicate_classes = duplicate_direction_classes(net);

  auto in_class = [&](const DirRef& d) -> const std::vector<DirRef>* {
    for (const auto& cls : out.duplicate_classes) {
      if (std::find(cls.begin(), cls.end(), d) != cls.end()) return &cls;
    }
    return nullptr;
  };

  for (const auto& d : all_directions(net)) {
    const Verdict v = exact_redundancy(net, uset, d);
    Verdict member = v;
    if (v == Verdict::Irredundant) {
      // Only the class representative (lowest line id) carries the label.
      if (const auto* cls = in_class(d)) {
        const auto rep = *std::min_element(
            cls->begin(), cls->end(), [&](const DirRef& a, const DirRef& b) {
              const int ida = net.lines[static_cast<std::size_t>(a.line)].id;
              const int idb = net.lines[static_cast<std::size_t>(b.line)].id;
              if (ida != idb) return ida < idb;
              return a.dir == Direction::Plus && b.dir == Direction::Minus;
            });
        if (!(rep == d)) member = Verdict::Redundant;
      }
    }
    (d.dir == Direction::Plus ? out.verdict_plus
                              : out.verdict_minus)[static_cast<std::size_t>(d.line)] = member;
  }
  return out;
}

int max_simultaneous_active(const Network& net, const UncertaintySet& uset) {
  const int nl = net.num_lines();

  // Feasibility of "all chosen directions exactly at their limit".
  auto feasible = [&](const std::vector<DirRef>& active) {
    RegionModel region = build_region(net, uset, all_directions(net));
    for (const auto& d : active) {
      const Eigen::VectorXd row = direction_row(net, d);
      std::vector<std::pair<int, double>> terms;
      for (int i = 0; i < net.num_buses(); ++i) {
        if (row[i] == 0.0) continue;
        terms.emplace_back(region.q_vars[static_cast<std::size_t>(i)], row[i]);
      }
      region.mb.add_row(std::move(terms), RowSense::Eq,
                        net.lines[static_cast<std::size_t>(d.line)].f_max);
    }
    region.mb.set_objective({});
    return solve_lp_relaxation(region.mb, SolverConfig{}).status == SolveStatus::Optimal;
  };

  int best = 0;
  std::vector<DirRef> chosen;
  // Per line: skip, bind +, or bind -. Infeasible prefixes prune the subtree.
  auto dfs = [&](auto&& self, int line) -> void {
    if (line == nl) {
      best = std::max(best, static_cast<int>(chosen.size()));
      return;
    }
    if (static_cast<int>(chosen.size()) + (nl - line) <= best) return;  // cannot improve
    self(self, line + 1);
    for (const Direction dir : {Direction::Plus, Direction::Minus}) {
      chosen.push_back({line, dir});
      if (feasible(chosen)) self(self, line + 1);
      chosen.pop_back();
    }
  };
  dfs(dfs, 0);
  return best;
}

UcSolution brute_force_uc(const UcInstance& inst) {
  inst.validate();
  const Network& net = *inst.net;
  const int m = net.num_generators();
  if (m > 12) throw std::invalid_argument("brute_force_uc: M too large (max 12)");
  const int n = net.num_buses();

  UcSolution best;
  best.status = SolveStatus::Infeasible;

  for (unsigned mask = 0; mask < (1u << m); ++mask) {
    ModelBuilder mb;
    std::vector<int> g_vars, q_vars;
    std::vector<std::pair<int, double>> obj;
    for (int g = 0; g < m; ++g) {
      const auto& gen = net.generators[static_cast<std::size_t>(g)];
      const bool on = (mask >> g) & 1u;
      g_vars.push_back(mb.add_continuous("g" + std::to_string(g), on ? gen.g_min : 0.0,
                                         on ? gen.g_max : 0.0));
      obj.emplace_back(g_vars.back(), gen.cost);
    }
    for (int i = 0; i < n; ++i)
      q_vars.push_back(mb.add_continuous("q" + std::to_string(i), -kInf, kInf));

    const auto by_bus = net.generators_by_bus();
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, double>> terms{{q_vars[static_cast<std::size_t>(i)], 1.0}};
      for (int g : by_bus[static_cast<std::size_t>(i)])
        terms.emplace_back(g_vars[static_cast<std::size_t>(g)], -1.0);
      mb.add_row(std::move(terms), RowSense::Eq, -inst.demand[i]);
    }
    {
      std::vector<std::pair<int, double>> terms;
      for (int i = 0; i < n; ++i) terms.emplace_back(q_vars[static_cast<std::size_t>(i)], 1.0);
      mb.add_row(std::move(terms), RowSense::Eq, 0.0);
    }
    for (const auto& d : inst.retained) {
      std::vector<std::pair<int, double>> terms;
      for (int i = 0; i < n; ++i) {
        const double h = net.ptdf(d.line, i);
        if (h == 0.0) continue;
        terms.emplace_back(q_vars[static_cast<std::size_t>(i)],
                           d.dir == Direction::Plus ? h : -h);
      }
      mb.add_row(std::move(terms), RowSense::Le,
                 net.lines[static_cast<std::size_t>(d.line)].f_max);
    }
    mb.set_objective(obj);

    const SolveOutcome out = solve_lp_relaxation(mb, SolverConfig{});
    if (out.status != SolveStatus::Optimal) continue;
    if (best.status == SolveStatus::Optimal && out.objective >= best.total_cost) continue;

    best.status = SolveStatus::Optimal;
    best.total_cost = out.objective;
    best.commitment.resize(static_cast<std::size_t>(m));
    best.dispatch.resize(m);
    best.injections.resize(n);
    for (int g = 0; g < m; ++g) {
      best.commitment[static_cast<std::size_t>(g)] = (mask >> g) & 1u;
      best.dispatch[g] = out.values[static_cast<std::size_t>(g_vars[static_cast<std::size_t>(g)])];
    }
    for (int i = 0; i < n; ++i)
      best.injections[i] = out.values[static_cast<std::size_t>(q_vars[static_cast<std::size_t>(i)])];
  }
  return best;
}

}  // namespace ucs
