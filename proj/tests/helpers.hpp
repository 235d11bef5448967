#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "ucscreen/grid.hpp"
#include "ucscreen/model.hpp"
#include "ucscreen/rng.hpp"
#include "ucscreen/simplex.hpp"
#include "ucscreen/uc.hpp"

namespace ucs::test {

// Scratch directory, removed on destruction.
struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& tag) {
    path = std::filesystem::temp_directory_path() /
           ("ucscreen_" + tag + "_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  std::string str(const std::string& leaf = {}) const {
    return leaf.empty() ? path.string() : (path / leaf).string();
  }
};

struct BruteLpResult {
  bool feasible = false;
  double objective = 0.0;
  Eigen::VectorXd x;
};

// Independent LP oracle for box-bounded problems: enumerates every candidate
// vertex (n tight constraints drawn from rows-at-rhs and bounds), keeps the
// feasible ones, and returns the best objective. Exponential and exact;
// keep n and the row count tiny.
inline BruteLpResult brute_force_lp(const LpData& lp) {
  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());
  struct Constraint {
    Eigen::VectorXd a;
    double rhs;
    RowSense sense;
  };
  std::vector<Constraint> cons;
  for (const auto& row : lp.rows) {
    Constraint c;
    c.a = Eigen::VectorXd::Zero(n);
    for (std::size_t k = 0; k < row.idx.size(); ++k) c.a[row.idx[k]] = row.val[k];
    c.rhs = row.rhs;
    c.sense = row.sense;
    cons.push_back(std::move(c));
  }
  for (int j = 0; j < n; ++j) {
    Constraint lo;
    lo.a = Eigen::VectorXd::Zero(n);
    lo.a[j] = 1.0;
    lo.rhs = lp.lower[static_cast<std::size_t>(j)];
    lo.sense = RowSense::Ge;
    cons.push_back(lo);
    Constraint hi = lo;
    hi.rhs = lp.upper[static_cast<std::size_t>(j)];
    hi.sense = RowSense::Le;
    cons.push_back(hi);
  }

  const int total = static_cast<int>(cons.size());
  std::vector<int> pick(static_cast<std::size_t>(n));
  BruteLpResult best;

  auto satisfies_all = [&](const Eigen::VectorXd& x) {
    for (const auto& c : cons) {
      const double lhs = c.a.dot(x);
      const double tol = 1e-7 * (1.0 + std::abs(c.rhs));
      if (c.sense == RowSense::Le && lhs > c.rhs + tol) return false;
      if (c.sense == RowSense::Ge && lhs < c.rhs - tol) return false;
      if (c.sense == RowSense::Eq && std::abs(lhs - c.rhs) > tol) return false;
    }
    return true;
  };

  auto consider = [&](const Eigen::VectorXd& x) {
    if (!satisfies_all(x)) return;
    double obj = 0.0;
    for (int j = 0; j < n; ++j) obj += lp.cost[static_cast<std::size_t>(j)] * x[j];
    if (!best.feasible || obj < best.objective) {
      best.feasible = true;
      best.objective = obj;
      best.x = x;
    }
  };

  auto recurse = [&](auto&& self, int start, int depth) -> void {
    if (depth == n) {
      Eigen::MatrixXd a(n, n);
      Eigen::VectorXd b(n);
      for (int r = 0; r < n; ++r) {
        a.row(r) = cons[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].a;
        b[r] = cons[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].rhs;
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
      if (!lu.isInvertible()) return;
      consider(lu.solve(b));
      return;
    }
    for (int c = start; c < total; ++c) {
      pick[static_cast<std::size_t>(depth)] = c;
      self(self, c + 1, depth + 1);
    }
  };
  recurse(recurse, 0, 0);
  return best;
}

struct RandomNetOptions {
  int min_buses = 3;
  int max_buses = 6;
  int max_extra_lines = 3;  // beyond the spanning tree, capped at 8 total
  int max_generators = 4;
  double tight_line_share = 0.5;  // share of lines with limits near the nominal flow
};

// Random connected network with per-bus demand boxes, sized so that the
// nominal forecast admits a feasible dispatch. Line limits mix tight and
// slack multipliers of the nominal flows so both umbrella and removable
// directions occur.
inline Network random_network(Rng& rng, const RandomNetOptions& opt = {}) {
  Network net;
  const int n = opt.min_buses +
                static_cast<int>(rng.below(static_cast<std::uint64_t>(
                    opt.max_buses - opt.min_buses + 1)));
  for (int i = 0; i < n; ++i) {
    Bus b;
    b.id = i + 1;
    b.d0 = rng.uniform(20.0, 120.0);
    b.d_min = b.d0 * 0.7;
    b.d_max = b.d0 * 1.3;
    net.buses.push_back(b);
  }

  // Spanning tree, then extra chords without duplicating bus pairs.
  std::vector<std::pair<int, int>> pairs;
  int line_id = 1;
  for (int i = 1; i < n; ++i) {
    const int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i)));
    pairs.emplace_back(j, i);
  }
  const int max_total = std::min(8, n * (n - 1) / 2);
  const int extra = static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_extra_lines + 1)));
  for (int e = 0; e < extra && static_cast<int>(pairs.size()) < max_total; ++e) {
    const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    if (a == b) continue;
    const auto p = std::minmax(a, b);
    if (std::find(pairs.begin(), pairs.end(), std::make_pair(p.first, p.second)) != pairs.end())
      continue;
    pairs.emplace_back(p.first, p.second);
  }
  for (const auto& [a, b] : pairs) {
    Line l;
    l.id = line_id++;
    l.from = a + 1;
    l.to = b + 1;
    l.susceptance = rng.uniform(0.5, 2.5);
    l.f_max = 1.0;  // placeholder until the nominal flows are known
    net.lines.push_back(l);
  }

  const int m = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(opt.max_generators)));
  double total_dmax = 0.0;
  for (const auto& b : net.buses) total_dmax += *b.d_max;
  for (int g = 0; g < m; ++g) {
    Generator gen;
    gen.id = g + 1;
    gen.bus = 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
    gen.g_min = rng.uniform(0.0, 10.0);
    gen.g_max = gen.g_min + rng.uniform(0.5, 1.6) * total_dmax / static_cast<double>(m) +
                20.0;
    gen.cost = rng.uniform(5.0, 50.0);
    net.generators.push_back(gen);
  }
  net.slack_bus_id = 1;
  build_ptdf(net);

  // Nominal flows under a proportional dispatch of d0.
  const Eigen::VectorXd d0 = net.forecast();
  const double total = d0.sum();
  double gmax_total = 0.0;
  for (const auto& gen : net.generators) gmax_total += gen.g_max;
  Eigen::VectorXd q = -d0;
  for (const auto& gen : net.generators)
    q[net.bus_index(gen.bus)] += gen.g_max / gmax_total * total;
  const Eigen::VectorXd flows = net.ptdf * q;

  for (int l = 0; l < net.num_lines(); ++l) {
    const double base = std::max(std::abs(flows[l]), 0.15 * total / n);
    const bool tight = rng.uniform01() < opt.tight_line_share;
    const double factor = tight ? rng.uniform(1.02, 1.25) : rng.uniform(2.5, 6.0);
    net.lines[static_cast<std::size_t>(l)].f_max = base * factor;
  }
  return net;
}

// True when the relaxed box region of the network admits at least one point
// (demand in its box, dispatch within relaxed limits, flows legal).
inline bool box_region_feasible(const Network& net) {
  ModelBuilder mb;
  const int n = net.num_buses();
  std::vector<int> q_vars, g_vars;
  for (int g = 0; g < net.num_generators(); ++g)
    g_vars.push_back(mb.add_continuous("g", 0.0, net.generators[static_cast<std::size_t>(g)].g_max));
  for (int i = 0; i < n; ++i) q_vars.push_back(mb.add_continuous("q", -kInf, kInf));
  std::vector<int> d_vars;
  for (int i = 0; i < n; ++i) {
    const auto& b = net.buses[static_cast<std::size_t>(i)];
    d_vars.push_back(mb.add_continuous("d", b.d_min.value_or(b.d0), b.d_max.value_or(b.d0)));
  }
  const auto by_bus = net.generators_by_bus();
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> terms{{q_vars[static_cast<std::size_t>(i)], 1.0},
                                              {d_vars[static_cast<std::size_t>(i)], 1.0}};
    for (int g : by_bus[static_cast<std::size_t>(i)])
      terms.emplace_back(g_vars[static_cast<std::size_t>(g)], -1.0);
    mb.add_row(std::move(terms), RowSense::Eq, 0.0);
  }
  std::vector<std::pair<int, double>> bal;
  for (int i = 0; i < n; ++i) bal.emplace_back(q_vars[static_cast<std::size_t>(i)], 1.0);
  mb.add_row(std::move(bal), RowSense::Eq, 0.0);
  for (int l = 0; l < net.num_lines(); ++l) {
    std::vector<std::pair<int, double>> up, dn;
    for (int i = 0; i < n; ++i) {
      const double h = net.ptdf(l, i);
      if (h == 0.0) continue;
      up.emplace_back(q_vars[static_cast<std::size_t>(i)], h);
      dn.emplace_back(q_vars[static_cast<std::size_t>(i)], -h);
    }
    const double fmax = net.lines[static_cast<std::size_t>(l)].f_max;
    mb.add_row(std::move(up), RowSense::Le, fmax);
    mb.add_row(std::move(dn), RowSense::Le, fmax);
  }
  mb.set_objective({});
  return solve_lp_relaxation(mb, SolverConfig{}).status == SolveStatus::Optimal;
}

// Deterministic corpus for the oracle-equivalence style checks.
inline std::vector<Network> random_corpus(int count, std::uint64_t seed) {
  std::vector<Network> corpus;
  Rng rng(seed);
  while (static_cast<int>(corpus.size()) < count) {
    Network net = random_network(rng);
    if (box_region_feasible(net)) corpus.push_back(std::move(net));
  }
  return corpus;
}

// Small fixed 2-bus network: one generator feeding a remote load.
inline Network two_bus_network(double f_max, double g_max = 200.0, double demand = 80.0) {
  Network net;
  net.buses.push_back({1, 0.0, -10.0, 10.0});
  net.buses.push_back({2, demand, demand * 0.5, demand * 1.5});
  net.generators.push_back({1, 1, 0.0, g_max, 10.0});
  net.lines.push_back({1, 1, 2, 1.0, f_max});
  net.slack_bus_id = 1;
  build_ptdf(net);
  return net;
}

}  // namespace ucs::test
