#include "ucscreen/screening.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <numeric>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "ucscreen/parallel.hpp"
#include "ucscreen/tolerances.hpp"

namespace ucs {

using nlohmann::json;

std::string to_string(Method m) {
  switch (m) {
    case Method::BUcd: return "b-ucd";
    case Method::D1Ucd: return "d1-ucd";
    case Method::D2Ucd: return "d2-ucd";
    case Method::EdUcd: return "ed-ucd";
    case Method::EdD1Ucd: return "ed-d1-ucd";
    case Method::Benchmark: return "ba";
  }
  return "b-ucd";
}

Method method_from_string(const std::string& s) {
  if (s == "b-ucd") return Method::BUcd;
  if (s == "d1-ucd") return Method::D1Ucd;
  if (s == "d2-ucd") return Method::D2Ucd;
  if (s == "ed-ucd") return Method::EdUcd;
  if (s == "ed-d1-ucd") return Method::EdD1Ucd;
  if (s == "ba") return Method::Benchmark;
  throw std::invalid_argument("unknown screening method: " + s);
}

bool method_uses_bound(Method m) { return m == Method::EdUcd || m == Method::EdD1Ucd; }

SetKind method_set_kind(Method m) {
  switch (m) {
    case Method::BUcd:
    case Method::EdUcd:
    case Method::Benchmark:
      return SetKind::Box;
    case Method::D1Ucd:
    case Method::EdD1Ucd:
      return SetKind::P1;
    case Method::D2Ucd:
      return SetKind::P2;
  }
  return SetKind::Box;
}

void ScreeningProblem::validate() const {
  if (net == nullptr) throw std::invalid_argument("screening problem: network missing");
  if (!net->has_ptdf()) throw std::invalid_argument("screening problem: PTDF not computed");
  uset.validate();
  if (uset.dim() != net->num_buses())
    throw std::invalid_argument("screening problem: set dimension does not match network");
  if (uset.kind != method_set_kind(method))
    throw std::invalid_argument("method " + to_string(method) + " requires a " +
                                to_string(method_set_kind(method)) + " uncertainty set, got " +
                                to_string(uset.kind));
  if (method_uses_bound(method)) {
    if (!bound || bound->segments.empty())
      throw std::invalid_argument("method " + to_string(method) + " requires a cost bound");
  }
  if (partition) {
    std::vector<char> hit(static_cast<std::size_t>(net->num_lines()), 0);
    for (const auto& block : *partition) {
      if (block.empty()) throw std::invalid_argument("partition: empty block");
      for (int l : block) {
        if (l < 0 || l >= net->num_lines())
          throw std::invalid_argument("partition: line index out of range");
        if (hit[static_cast<std::size_t>(l)])
          throw std::invalid_argument("partition: blocks are not disjoint");
        hit[static_cast<std::size_t>(l)] = 1;
      }
    }
    if (std::count(hit.begin(), hit.end(), 1) != net->num_lines())
      throw std::invalid_argument("partition: blocks do not cover all lines");
  }
}

int ScreeningResult::umbrella_count() const {
  auto count = [](const std::vector<DirLabel>& v) {
    return static_cast<int>(std::count(v.begin(), v.end(), DirLabel::Umbrella));
  };
  return count(label_plus) + count(label_minus);
}

DirLabel ScreeningResult::label(const DirRef& d) const {
  return (d.dir == Direction::Plus ? label_plus : label_minus)[static_cast<std::size_t>(d.line)];
}

std::vector<DirRef> ScreeningResult::umbrella_directions() const {
  std::vector<DirRef> out;
  for (int l = 0; l < static_cast<int>(label_plus.size()); ++l) {
    if (label_plus[static_cast<std::size_t>(l)] == DirLabel::Umbrella)
      out.push_back({l, Direction::Plus});
    if (label_minus[static_cast<std::size_t>(l)] == DirLabel::Umbrella)
      out.push_back({l, Direction::Minus});
  }
  return out;
}

std::vector<DirRef> ScreeningResult::retained_directions() const { return umbrella_directions(); }

namespace {

struct BaseVars {
  std::vector<int> g, q, d, u;
  std::vector<int> weights;
  int d_total = -1;
};

// Shared base region of every screening formulation: injections, balance,
// relaxed commitments, both flow limits of every line, and the demand
// variables governed by the uncertainty set.
BaseVars add_base_region(ModelBuilder& mb, const Network& net, const UncertaintySet& uset) {
  const int n = net.num_buses();
  const int m = net.num_generators();
  const int nl = net.num_lines();
  BaseVars vars;

  for (int g = 0; g < m; ++g) {
    const auto& gen = net.generators[static_cast<std::size_t>(g)];
    vars.g.push_back(mb.add_continuous("g" + std::to_string(g), 0.0, gen.g_max));
  }
  for (int i = 0; i < n; ++i)
    vars.q.push_back(mb.add_continuous("q" + std::to_string(i), -kInf, kInf));
  for (int i = 0; i < n; ++i) {
    double lo = -kInf, hi = kInf;
    if (uset.kind == SetKind::Box) {
      lo = uset.box_lo[i];
      hi = uset.box_hi[i];
    }
    vars.d.push_back(mb.add_continuous("d" + std::to_string(i), lo, hi));
  }
  for (int g = 0; g < m; ++g)
    vars.u.push_back(mb.add_continuous("u" + std::to_string(g), 0.0, 1.0));

  const auto by_bus = net.generators_by_bus();
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> terms{{vars.q[static_cast<std::size_t>(i)], 1.0},
                                              {vars.d[static_cast<std::size_t>(i)], 1.0}};
    for (int g : by_bus[static_cast<std::size_t>(i)])
      terms.emplace_back(vars.g[static_cast<std::size_t>(g)], -1.0);
    mb.add_row(std::move(terms), RowSense::Eq, 0.0, "inj" + std::to_string(i));
  }
  {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < n; ++i) terms.emplace_back(vars.q[static_cast<std::size_t>(i)], 1.0);
    mb.add_row(std::move(terms), RowSense::Eq, 0.0, "balance");
  }
  for (int g = 0; g < m; ++g) {
    const auto& gen = net.generators[static_cast<std::size_t>(g)];
    mb.add_row({{vars.g[static_cast<std::size_t>(g)], 1.0},
                {vars.u[static_cast<std::size_t>(g)], -gen.g_min}},
               RowSense::Ge, 0.0, "gmin" + std::to_string(g));
    mb.add_row({{vars.g[static_cast<std::size_t>(g)], 1.0},
                {vars.u[static_cast<std::size_t>(g)], -gen.g_max}},
               RowSense::Le, 0.0, "gmax" + std::to_string(g));
  }
  for (int l = 0; l < nl; ++l) {
    const double fmax = net.lines[static_cast<std::size_t>(l)].f_max;
    std::vector<std::pair<int, double>> up, dn;
    for (int i = 0; i < n; ++i) {
      const double h = net.ptdf(l, i);
      if (h == 0.0) continue;
      up.emplace_back(vars.q[static_cast<std::size_t>(i)], h);
      dn.emplace_back(vars.q[static_cast<std::size_t>(i)], -h);
    }
    mb.add_row(std::move(up), RowSense::Le, fmax, "fup" + std::to_string(l));
    mb.add_row(std::move(dn), RowSense::Le, fmax, "fdn" + std::to_string(l));
  }

  if (uset.kind == SetKind::P1) {
    for (int k = 0; k < uset.retained; ++k)
      vars.weights.push_back(mb.add_continuous("w" + std::to_string(k), 0.0, 1.0));
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, double>> terms{{vars.d[static_cast<std::size_t>(i)], 1.0}};
      double rhs = uset.d0[i];
      for (int k = 0; k < uset.retained; ++k) {
        const double s = uset.sbar[static_cast<std::size_t>(k)][i];
        terms.emplace_back(vars.weights[static_cast<std::size_t>(k)], -2.0 * s);
        rhs -= s;
      }
      mb.add_row(std::move(terms), RowSense::Eq, rhs, "p1link" + std::to_string(i));
    }
  } else if (uset.kind == SetKind::P2) {
    std::vector<std::pair<int, double>> simplex;
    for (int k = 0; k < uset.retained; ++k) {
      vars.weights.push_back(mb.add_continuous("wp" + std::to_string(k), 0.0, 1.0));
      simplex.emplace_back(vars.weights.back(), 1.0);
    }
    for (int k = 0; k < uset.retained; ++k) {
      vars.weights.push_back(mb.add_continuous("wm" + std::to_string(k), 0.0, 1.0));
      simplex.emplace_back(vars.weights.back(), 1.0);
    }
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, double>> terms{{vars.d[static_cast<std::size_t>(i)], 1.0}};
      for (int k = 0; k < uset.retained; ++k) {
        terms.emplace_back(vars.weights[static_cast<std::size_t>(k)],
                           -uset.splus[static_cast<std::size_t>(k)][i]);
        terms.emplace_back(vars.weights[static_cast<std::size_t>(k + uset.retained)],
                           -uset.sminus[static_cast<std::size_t>(k)][i]);
      }
      mb.add_row(std::move(terms), RowSense::Eq, 0.0, "p2link" + std::to_string(i));
    }
    mb.add_row(std::move(simplex), RowSense::Eq, 1.0, "p2simplex");
  }
  return vars;
}

void add_economics_rows(ModelBuilder& mb, const Network& net, const CostBound& cb,
                        int segment, BaseVars& vars) {
  const auto& seg = cb.segments.at(static_cast<std::size_t>(segment));
  vars.d_total = mb.add_continuous("D", seg.d_min, seg.d_max);
  std::vector<std::pair<int, double>> link{{vars.d_total, 1.0}};
  for (int i = 0; i < static_cast<int>(vars.d.size()); ++i)
    link.emplace_back(vars.d[static_cast<std::size_t>(i)], -1.0);
  mb.add_row(std::move(link), RowSense::Eq, 0.0, "ed_link");

  std::vector<std::pair<int, double>> cost_row;
  for (int g = 0; g < net.num_generators(); ++g)
    cost_row.emplace_back(vars.g[static_cast<std::size_t>(g)],
                          net.generators[static_cast<std::size_t>(g)].cost);
  cost_row.emplace_back(vars.d_total, -(1.0 + cb.gamma) * seg.b0);
  const double rhs = cb.mode == BoundMode::Literal
                         ? (1.0 + cb.delta * cb.sigma) * seg.a0
                         : seg.a0 + cb.delta * cb.sigma;
  mb.add_row(std::move(cost_row), RowSense::Le, rhs, "ed_bound");
}

double omega_for(const Network& net, const SolverConfig& cfg) {
  double max_fmax = 0.0;
  for (const auto& l : net.lines) max_fmax = std::max(max_fmax, l.f_max);
  return cfg.big_m_multiplier * max_fmax;
}

UcdModel build_block_model(const ScreeningProblem& p, const SolverConfig& cfg,
                           const std::vector<int>& block_lines, const FixedDirections& fixed,
                           int ed_segment) {
  const Network& net = *p.net;
  UcdModel model;
  BaseVars vars = add_base_region(model.mb, net, p.uset);
  model.g_vars = vars.g;
  model.q_vars = vars.q;
  model.d_vars = vars.d;
  model.u_vars = vars.u;
  model.block_lines = block_lines;

  const double omega = omega_for(net, cfg);
  std::vector<std::pair<int, double>> objective;
  for (int l : block_lines) {
    const auto ls = static_cast<std::size_t>(l);
    const double fmax = net.lines[ls].f_max;
    const int zp = model.mb.add_continuous("zp" + std::to_string(l), 0.0, kInf);
    const int zm = model.mb.add_continuous("zm" + std::to_string(l), 0.0, kInf);
    const int vp = model.mb.add_binary("vp" + std::to_string(l));
    const int vm = model.mb.add_binary("vm" + std::to_string(l));
    model.z_plus.push_back(zp);
    model.z_minus.push_back(zm);
    model.v_plus.push_back(vp);
    model.v_minus.push_back(vm);

    std::vector<std::pair<int, double>> up{{zp, 1.0}}, dn{{zm, 1.0}};
    for (int i = 0; i < net.num_buses(); ++i) {
      const double h = net.ptdf(l, i);
      if (h == 0.0) continue;
      up.emplace_back(vars.q[static_cast<std::size_t>(i)], h);
      dn.emplace_back(vars.q[static_cast<std::size_t>(i)], -h);
    }
    model.mb.add_row(std::move(up), RowSense::Ge, fmax, "pairup" + std::to_string(l));
    model.mb.add_row(std::move(dn), RowSense::Ge, fmax, "pairdn" + std::to_string(l));
    model.mb.add_row({{vp, omega}, {zp, -1.0}}, RowSense::Ge, 0.0, "bigmup" + std::to_string(l));
    model.mb.add_row({{vm, omega}, {zm, -1.0}}, RowSense::Ge, 0.0, "bigmdn" + std::to_string(l));

    if (fixed.get({l, Direction::Plus})) model.mb.set_bounds(vp, 1.0, 1.0);
    if (fixed.get({l, Direction::Minus})) model.mb.set_bounds(vm, 1.0, 1.0);
    objective.emplace_back(vp, 1.0);
    objective.emplace_back(vm, 1.0);
  }

  if (method_uses_bound(p.method) && ed_segment >= 0) {
    add_economics_rows(model.mb, net, *p.bound, ed_segment, vars);
    model.d_total_var = vars.d_total;
  }
  model.weight_vars = vars.weights;
  model.mb.set_objective(std::move(objective));
  return model;
}

}  // namespace

UcdModel build_ucd_model(const ScreeningProblem& p, const SolverConfig& cfg,
                         const FixedDirections& fixed, int ed_segment) {
  p.validate();
  std::vector<int> all(static_cast<std::size_t>(p.net->num_lines()));
  std::iota(all.begin(), all.end(), 0);
  return build_block_model(p, cfg, all, fixed, ed_segment);
}

UcdModel build_ucd_block_model(const ScreeningProblem& p, const SolverConfig& cfg,
                               const std::vector<int>& block_lines,
                               const FixedDirections& fixed, int ed_segment) {
  p.validate();
  return build_block_model(p, cfg, block_lines, fixed, ed_segment);
}

namespace {

void enforce_zero_gap_for_medium(const Network& net, const SolverConfig& cfg) {
  if (net.num_buses() <= 200 && cfg.mip_gap > 0.0)
    throw std::invalid_argument(
        "screening: mip_gap must be 0 for networks with <= 200 buses; a nonzero "
        "gap can mislabel umbrella directions");
}

struct BlockRun {
  std::vector<DirRef> umbrella;
  std::vector<IterationTrace> iterations;
  double closing_wall_ms = 0.0;  // the final all-ones solve that ends the loop
  bool infeasible_first = false;
};

// Bound tightening before the MILP loop: a direction whose flow provably
// stays short of its limit over the relaxed region can never have v = 0, so
// its binary starts fixed at 1. One LP per direction, same region as the
// MILP (economics rows included). Returns false when the region is empty.
bool prefix_unattainable(const ScreeningProblem& p, const std::vector<int>& block_lines,
                         int ed_segment, FixedDirections& fixed) {
  const Network& net = *p.net;
  constexpr double kPrefixGap = 1e-7;
  for (const int l : block_lines) {
    for (const Direction dir : {Direction::Plus, Direction::Minus}) {
      ModelBuilder mb;
      BaseVars vars = add_base_region(mb, net, p.uset);
      if (method_uses_bound(p.method) && ed_segment >= 0)
        add_economics_rows(mb, net, *p.bound, ed_segment, vars);
      std::vector<std::pair<int, double>> obj;
      for (int i = 0; i < net.num_buses(); ++i) {
        const double h = net.ptdf(l, i);
        if (h == 0.0) continue;
        obj.emplace_back(vars.q[static_cast<std::size_t>(i)],
                         dir == Direction::Plus ? -h : h);  // maximize the reach
      }
      mb.set_objective(std::move(obj));
      const SolveOutcome out = solve_lp_relaxation(mb, SolverConfig{});
      if (out.status == SolveStatus::Infeasible) return false;
      if (out.status != SolveStatus::Optimal)
        throw std::runtime_error("attainability LP failed: " + to_string(out.status));
      const double reach = -out.objective;
      const double fmax = net.lines[static_cast<std::size_t>(l)].f_max;
      if (reach < fmax - kPrefixGap) fixed.set({l, dir});
    }
  }
  return true;
}

// Algorithm-1 loop over one block and one economics segment.
BlockRun run_block(const ScreeningProblem& p, const SolverConfig& cfg,
                   const std::vector<int>& block_lines, int ed_segment, bool warm_start) {
  const Network& net = *p.net;
  BlockRun run;
  FixedDirections fixed(net.num_lines());
  std::vector<double> prev_values;
  bool first = true;

  if (!prefix_unattainable(p, block_lines, ed_segment, fixed)) {
    run.infeasible_first = true;
    return run;
  }

  while (true) {
    int unfixed = 0;
    for (std::size_t bi = 0; bi < block_lines.size(); ++bi) {
      const int l = block_lines[bi];
      if (!fixed.get({l, Direction::Plus})) ++unfixed;
      if (!fixed.get({l, Direction::Minus})) ++unfixed;
    }
    if (unfixed == 0) break;
    UcdModel model = build_block_model(p, cfg, block_lines, fixed, ed_segment);

    if (warm_start && !prev_values.empty()) {
      std::vector<std::pair<int, double>> hint;
      hint.reserve(prev_values.size());
      for (int v = 0; v < model.mb.num_vars(); ++v)
        hint.emplace_back(v, prev_values[static_cast<std::size_t>(v)]);
      // Newly fixed binaries move to 1; the rest of the previous vertex is
      // feasible as-is.
      for (std::size_t bi = 0; bi < block_lines.size(); ++bi) {
        const int l = block_lines[bi];
        if (fixed.get({l, Direction::Plus}))
          hint[static_cast<std::size_t>(model.v_plus[bi])].second = 1.0;
        if (fixed.get({l, Direction::Minus}))
          hint[static_cast<std::size_t>(model.v_minus[bi])].second = 1.0;
      }
      model.mb.set_hint(std::move(hint));
    }

    SolveOutcome out = solve(model.mb, cfg);
    if (out.status == SolveStatus::Infeasible) {
      if (first) {
        run.infeasible_first = true;
        return run;
      }
      throw std::runtime_error("UCD iteration became infeasible after fixing directions");
    }
    if (out.status != SolveStatus::Optimal && out.status != SolveStatus::GapLimit)
      throw std::runtime_error("UCD iteration failed: " + to_string(out.status) +
                               (out.message.empty() ? "" : " (" + out.message + ")"));

    IterationTrace trace;
    trace.wall_ms = out.wall_s * 1000.0;
    trace.vertex_injection.resize(net.num_buses());
    for (int i = 0; i < net.num_buses(); ++i)
      trace.vertex_injection[i] = out.values[static_cast<std::size_t>(model.q_vars[static_cast<std::size_t>(i)])];

    for (std::size_t bi = 0; bi < block_lines.size(); ++bi) {
      const int l = block_lines[bi];
      const DirRef dp{l, Direction::Plus};
      const DirRef dm{l, Direction::Minus};
      if (!fixed.get(dp) &&
          out.values[static_cast<std::size_t>(model.v_plus[bi])] < 0.5)
        trace.found.push_back(dp);
      if (!fixed.get(dm) &&
          out.values[static_cast<std::size_t>(model.v_minus[bi])] < 0.5)
        trace.found.push_back(dm);
    }

    if (trace.found.empty()) {
      // Optimum is all-ones: search exhausted. The confirming solve still
      // counts toward screening time.
      run.closing_wall_ms = trace.wall_ms;
      break;
    }

    for (const auto& d : trace.found) {
      fixed.set(d);
      run.umbrella.push_back(d);
    }
    run.iterations.push_back(std::move(trace));
    prev_values = std::move(out.values);
    first = false;
  }
  return run;
}

ScreeningResult run_ucd(const ScreeningProblem& p, const SolverConfig& cfg,
                        const std::vector<std::vector<int>>& blocks, bool warm_start) {
  const Network& net = *p.net;
  cfg.validate();
  enforce_zero_gap_for_medium(net, cfg);

  // One independent Algorithm-1 loop per (block, segment) pair; all of them
  // can run concurrently.
  auto execute = [&](int segments, bool with_ed) {
    const int jobs = static_cast<int>(blocks.size()) * segments;
    std::vector<BlockRun> runs(static_cast<std::size_t>(jobs));
    parallel_for(jobs, cfg.threads, [&](int j) {
      const auto block = static_cast<std::size_t>(j / segments);
      const int segment = j % segments;
      runs[static_cast<std::size_t>(j)] =
          run_block(p, cfg, blocks[block], with_ed ? segment : -1, warm_start);
    });
    return runs;
  };

  std::vector<BlockRun> cells;
  bool fell_back = false;
  const auto any_infeasible = [](const std::vector<BlockRun>& runs) {
    return std::any_of(runs.begin(), runs.end(),
                       [](const BlockRun& r) { return r.infeasible_first; });
  };
  if (method_uses_bound(p.method)) {
    cells = execute(static_cast<int>(p.bound->segments.size()), true);
    if (any_infeasible(cells)) {
      // Miscalibrated bound: rerun the same variant without the economics
      // rows rather than reporting an empty umbrella set.
      fell_back = true;
      cells = execute(1, false);
    }
  } else {
    cells = execute(1, false);
  }
  if (any_infeasible(cells))
    throw std::runtime_error(
        "screening: relaxed base region is empty; check the uncertainty set "
        "and network data");

  ScreeningResult result;
  result.method = p.method;
  result.fallback = fell_back;
  result.line_ids.reserve(static_cast<std::size_t>(net.num_lines()));
  for (const auto& l : net.lines) result.line_ids.push_back(l.id);
  result.label_plus.assign(static_cast<std::size_t>(net.num_lines()), DirLabel::Removable);
  result.label_minus.assign(static_cast<std::size_t>(net.num_lines()), DirLabel::Removable);
  for (const auto& cell : cells) {
    for (const auto& d : cell.umbrella) {
      (d.dir == Direction::Plus ? result.label_plus
                                : result.label_minus)[static_cast<std::size_t>(d.line)] =
          DirLabel::Umbrella;
    }
    for (const auto& it : cell.iterations) {
      result.total_wall_ms += it.wall_ms;
      result.iterations.push_back(it);
    }
    result.total_wall_ms += cell.closing_wall_ms;
  }
  return result;
}

}  // namespace

ScreeningResult discover_umbrella(const ScreeningProblem& p, const SolverConfig& cfg,
                                  bool warm_start) {
  p.validate();
  if (p.method == Method::Benchmark)
    throw std::invalid_argument("discover_umbrella: use screen_benchmark for method ba");
  std::vector<int> all(static_cast<std::size_t>(p.net->num_lines()));
  std::iota(all.begin(), all.end(), 0);
  return run_ucd(p, cfg, {all}, warm_start);
}

ScreeningResult screen_decomposed(const ScreeningProblem& p, const SolverConfig& cfg,
                                  bool warm_start) {
  p.validate();
  if (p.method == Method::Benchmark)
    throw std::invalid_argument("screen_decomposed: use screen_benchmark for method ba");
  if (!p.partition) throw std::invalid_argument("screen_decomposed: partition missing");
  return run_ucd(p, cfg, *p.partition, warm_start);
}

ScreeningResult screen_benchmark(const ScreeningProblem& p, const SolverConfig& cfg) {
  p.validate();
  cfg.validate();
  if (p.method != Method::Benchmark)
    throw std::invalid_argument("screen_benchmark: method must be ba");
  const Network& net = *p.net;
  const int nl = net.num_lines();

  ScreeningResult result;
  result.method = p.method;
  result.line_ids.reserve(static_cast<std::size_t>(nl));
  for (const auto& l : net.lines) result.line_ids.push_back(l.id);
  result.label_plus.assign(static_cast<std::size_t>(nl), DirLabel::Removable);
  result.label_minus.assign(static_cast<std::size_t>(nl), DirLabel::Removable);

  std::vector<double> walls(static_cast<std::size_t>(2 * nl), 0.0);
  std::vector<char> retained(static_cast<std::size_t>(2 * nl), 0);

  parallel_for(2 * nl, cfg.threads, [&](int j) {
    const int l = j / 2;
    const bool upper = (j % 2) == 0;
    ModelBuilder mb;
    BaseVars vars = add_base_region(mb, net, p.uset);
    std::vector<std::pair<int, double>> obj;
    for (int i = 0; i < net.num_buses(); ++i) {
      const double h = net.ptdf(l, i);
      if (h == 0.0) continue;
      // Maximize the flow for the upper limit, minimize for the lower one.
      obj.emplace_back(vars.q[static_cast<std::size_t>(i)], upper ? -h : h);
    }
    mb.set_objective(std::move(obj));
    const SolveOutcome out = solve_lp_relaxation(mb, cfg);
    if (out.status == SolveStatus::Infeasible)
      throw std::runtime_error("benchmark screening: base region empty (box set empty?)");
    if (out.status != SolveStatus::Optimal)
      throw std::runtime_error("benchmark screening LP failed: " + to_string(out.status));
    const double extreme_flow = upper ? -out.objective : out.objective;
    const double fmax = net.lines[static_cast<std::size_t>(l)].f_max;
    const double reach = upper ? extreme_flow : -extreme_flow;
    retained[static_cast<std::size_t>(j)] = reach >= fmax - tol::kFlowFeasMw ? 1 : 0;
    walls[static_cast<std::size_t>(j)] = out.wall_s * 1000.0;
  });

  IterationTrace trace;
  for (int j = 0; j < 2 * nl; ++j) {
    const int l = j / 2;
    const bool upper = (j % 2) == 0;
    result.total_wall_ms += walls[static_cast<std::size_t>(j)];
    if (retained[static_cast<std::size_t>(j)]) {
      const DirRef d{l, upper ? Direction::Plus : Direction::Minus};
      (upper ? result.label_plus : result.label_minus)[static_cast<std::size_t>(l)] =
          DirLabel::Umbrella;
      trace.found.push_back(d);
    }
  }
  trace.wall_ms = result.total_wall_ms;
  result.iterations.push_back(std::move(trace));
  return result;
}

std::vector<std::vector<int>> partition_even(int num_lines, int num_blocks) {
  if (num_blocks < 1 || num_blocks > num_lines)
    throw std::invalid_argument("partition_even: invalid block count");
  std::vector<std::vector<int>> blocks(static_cast<std::size_t>(num_blocks));
  const int base = num_lines / num_blocks;
  const int extra = num_lines % num_blocks;
  int next = 0;
  for (int b = 0; b < num_blocks; ++b) {
    const int size = base + (b < extra ? 1 : 0);
    for (int i = 0; i < size; ++i) blocks[static_cast<std::size_t>(b)].push_back(next++);
  }
  return blocks;
}

std::vector<std::vector<int>> partition_fixed(int num_lines, int lines_per_block) {
  if (lines_per_block < 1) throw std::invalid_argument("partition_fixed: invalid block size");
  std::vector<std::vector<int>> blocks;
  for (int start = 0; start < num_lines; start += lines_per_block) {
    std::vector<int> block;
    for (int l = start; l < std::min(num_lines, start + lines_per_block); ++l)
      block.push_back(l);
    blocks.push_back(std::move(block));
  }
  return blocks;
}

void save_screening_result(const ScreeningResult& r, const std::string& path) {
  json doc;
  doc["method"] = to_string(r.method);
  doc["labels"] = json::array();
  for (int l = 0; l < static_cast<int>(r.line_ids.size()); ++l) {
    const int id = r.line_ids[static_cast<std::size_t>(l)];
    doc["labels"].push_back(json{
        {"line", id},
        {"dir", "+"},
        {"label", r.label_plus[static_cast<std::size_t>(l)] == DirLabel::Umbrella
                      ? "umbrella"
                      : "removable"}});
    doc["labels"].push_back(json{
        {"line", id},
        {"dir", "-"},
        {"label", r.label_minus[static_cast<std::size_t>(l)] == DirLabel::Umbrella
                      ? "umbrella"
                      : "removable"}});
  }
  doc["iterations"] = json::array();
  for (const auto& it : r.iterations) {
    json found = json::array();
    for (const auto& d : it.found) {
      found.push_back(json{{"line", r.line_ids[static_cast<std::size_t>(d.line)]},
                           {"dir", std::string(1, dir_char(d.dir))}});
    }
    doc["iterations"].push_back(json{{"found", found}, {"wall_ms", it.wall_ms}});
  }
  doc["fallback"] = r.fallback;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

ScreeningResult load_screening_result(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  in >> doc;

  ScreeningResult r;
  r.method = method_from_string(doc.at("method").get<std::string>());
  r.fallback = doc.value("fallback", false);

  std::vector<int> ids;
  for (const auto& rec : doc.at("labels")) {
    const int id = rec.at("line").get<int>();
    if (std::find(ids.begin(), ids.end(), id) == ids.end()) ids.push_back(id);
  }
  r.line_ids = ids;
  r.label_plus.assign(ids.size(), DirLabel::Removable);
  r.label_minus.assign(ids.size(), DirLabel::Removable);
  auto index_of = [&](int id) {
    return static_cast<std::size_t>(
        std::distance(ids.begin(), std::find(ids.begin(), ids.end(), id)));
  };
  for (const auto& rec : doc.at("labels")) {
    const auto idx = index_of(rec.at("line").get<int>());
    const bool umbrella = rec.at("label").get<std::string>() == "umbrella";
    if (rec.at("dir").get<std::string>() == "+") {
      r.label_plus[idx] = umbrella ? DirLabel::Umbrella : DirLabel::Removable;
    } else {
      r.label_minus[idx] = umbrella ? DirLabel::Umbrella : DirLabel::Removable;
    }
  }
  for (const auto& rec : doc.at("iterations")) {
    IterationTrace it;
    it.wall_ms = rec.at("wall_ms").get<double>();
    for (const auto& f : rec.at("found")) {
      DirRef d;
      d.line = static_cast<int>(index_of(f.at("line").get<int>()));
      d.dir = f.at("dir").get<std::string>() == "+" ? Direction::Plus : Direction::Minus;
      it.found.push_back(d);
    }
    r.iterations.push_back(std::move(it));
  }
  return r;
}

std::vector<DirRef> retained_for_network(const ScreeningResult& r, const Network& net) {
  std::vector<DirRef> out;
  for (int l = 0; l < static_cast<int>(r.line_ids.size()); ++l) {
    const int pos = net.line_index(r.line_ids[static_cast<std::size_t>(l)]);
    if (pos < 0)
      throw std::runtime_error("screening result references unknown line id " +
                               std::to_string(r.line_ids[static_cast<std::size_t>(l)]));
    if (r.label_plus[static_cast<std::size_t>(l)] == DirLabel::Umbrella)
      out.push_back({pos, Direction::Plus});
    if (r.label_minus[static_cast<std::size_t>(l)] == DirLabel::Umbrella)
      out.push_back({pos, Direction::Minus});
  }
  return out;
}

}  // namespace ucs
