#include "ucscreen/uc.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "ucscreen/tolerances.hpp"
#include "ucscreen/uncertainty.hpp"

namespace ucs {

using nlohmann::json;

void UcInstance::validate() const {
  if (net == nullptr) throw std::invalid_argument("uc instance: network missing");
  if (!net->has_ptdf()) throw std::invalid_argument("uc instance: PTDF not computed");
  if (demand.size() != net->num_buses())
    throw std::invalid_argument("uc instance: demand dimension mismatch");
  for (const auto& d : retained) {
    if (d.line < 0 || d.line >= net->num_lines())
      throw std::invalid_argument("uc instance: retained line out of range");
  }
}

std::vector<DirRef> all_directions(const Network& net) {
  std::vector<DirRef> out;
  out.reserve(static_cast<std::size_t>(2 * net.num_lines()));
  for (int l = 0; l < net.num_lines(); ++l) {
    out.push_back({l, Direction::Plus});
    out.push_back({l, Direction::Minus});
  }
  return out;
}

UcSolution solve_uc(const UcInstance& inst, const SolverConfig& cfg, const UcSolution* warm) {
  inst.validate();
  const Network& net = *inst.net;
  const int n = net.num_buses();
  const int m = net.num_generators();

  ModelBuilder mb;
  std::vector<int> u_vars, g_vars, q_vars;
  std::vector<std::pair<int, double>> objective;
  for (int g = 0; g < m; ++g) {
    const auto& gen = net.generators[static_cast<std::size_t>(g)];
    g_vars.push_back(mb.add_continuous("g" + std::to_string(g), 0.0, gen.g_max));
    objective.emplace_back(g_vars.back(), gen.cost);
  }
  for (int i = 0; i < n; ++i)
    q_vars.push_back(mb.add_continuous("q" + std::to_string(i), -kInf, kInf));
  for (int g = 0; g < m; ++g) u_vars.push_back(mb.add_binary("u" + std::to_string(g)));

  const auto by_bus = net.generators_by_bus();
  for (int i = 0; i < n; ++i) {
    std::vector<std::pair<int, double>> terms{{q_vars[static_cast<std::size_t>(i)], 1.0}};
    for (int g : by_bus[static_cast<std::size_t>(i)])
      terms.emplace_back(g_vars[static_cast<std::size_t>(g)], -1.0);
    mb.add_row(std::move(terms), RowSense::Eq, -inst.demand[i], "inj" + std::to_string(i));
  }
  {
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < n; ++i) terms.emplace_back(q_vars[static_cast<std::size_t>(i)], 1.0);
    mb.add_row(std::move(terms), RowSense::Eq, 0.0, "balance");
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
  for (const auto& d : inst.retained) {
    const double fmax = net.lines[static_cast<std::size_t>(d.line)].f_max;
    std::vector<std::pair<int, double>> terms;
    for (int i = 0; i < n; ++i) {
      const double h = net.ptdf(d.line, i);
      if (h == 0.0) continue;
      terms.emplace_back(q_vars[static_cast<std::size_t>(i)],
                         d.dir == Direction::Plus ? h : -h);
    }
    mb.add_row(std::move(terms), RowSense::Le, fmax);
  }
  mb.set_objective(std::move(objective));

  if (warm != nullptr && static_cast<int>(warm->commitment.size()) == m) {
    std::vector<std::pair<int, double>> hint;
    for (int g = 0; g < m; ++g)
      hint.emplace_back(u_vars[static_cast<std::size_t>(g)],
                        warm->commitment[static_cast<std::size_t>(g)] ? 1.0 : 0.0);
    mb.set_hint(std::move(hint));
  }

  const SolveOutcome out = solve(mb, cfg);
  UcSolution sol;
  sol.status = out.status;
  sol.wall_s = out.wall_s;
  if (!out.has_values()) return sol;

  sol.total_cost = out.objective;
  sol.commitment.resize(static_cast<std::size_t>(m));
  sol.dispatch.resize(m);
  sol.injections.resize(n);
  for (int g = 0; g < m; ++g) {
    sol.commitment[static_cast<std::size_t>(g)] =
        out.values[static_cast<std::size_t>(u_vars[static_cast<std::size_t>(g)])] > 0.5 ? 1 : 0;
    sol.dispatch[g] = out.values[static_cast<std::size_t>(g_vars[static_cast<std::size_t>(g)])];
  }
  for (int i = 0; i < n; ++i)
    sol.injections[i] = out.values[static_cast<std::size_t>(q_vars[static_cast<std::size_t>(i)])];
  return sol;
}

std::vector<Violation> verify_full_feasibility(const UcSolution& sol, const Network& net) {
  std::vector<Violation> out;
  if (sol.injections.size() != net.num_buses()) return out;
  const Eigen::VectorXd flows = net.ptdf * sol.injections;
  for (int l = 0; l < net.num_lines(); ++l) {
    const double fmax = net.lines[static_cast<std::size_t>(l)].f_max;
    if (flows[l] > fmax + tol::kFlowFeasMw)
      out.push_back({l, Direction::Plus, flows[l] - fmax});
    if (flows[l] < -fmax - tol::kFlowFeasMw)
      out.push_back({l, Direction::Minus, -fmax - flows[l]});
  }
  return out;
}

namespace {

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  if (v.size() % 2 == 1) return v[mid];
  return 0.5 * (v[mid - 1] + v[mid]);
}

UncertaintySet set_for_method(const Network& net, const ScenarioSet& train, Method method,
                              int k_retained) {
  const SetKind kind = method_set_kind(method);
  if (kind == SetKind::Box) return box_from_data(net, train);
  const PcaModel pca = fit_pca(train);
  const int k = k_retained > 0 ? k_retained : pca.dim();
  return build_set(pca, net.forecast(), k, kind);
}

}  // namespace

EvalReport evaluate(const Network& net, const ScenarioSet& scenarios, const EvalOptions& opts,
                    const SolverConfig& cfg) {
  check_bus_order(scenarios, net);
  if (method_uses_bound(opts.method) && !opts.bound)
    throw std::invalid_argument("evaluate: method " + to_string(opts.method) +
                                " needs a cost bound");

  auto [train, test] = split(scenarios, opts.train_fraction, opts.seed);

  // Step 1: screen on train-derived sets. Step 2: record the screening time.
  ScreeningResult screening;
  if (opts.precomputed_screening != nullptr) {
    screening = *opts.precomputed_screening;
  } else {
    ScreeningProblem problem;
    problem.net = &net;
    problem.method = opts.method;
    problem.uset = set_for_method(net, train, opts.method, opts.k_retained);
    problem.bound = opts.bound;
    screening = opts.method == Method::Benchmark ? screen_benchmark(problem, cfg)
                                                 : discover_umbrella(problem, cfg);
  }

  EvalReport report;
  report.method = to_string(opts.method);
  report.screening_time_s = screening.total_wall_ms / 1000.0;
  report.retained_pct = 100.0 * static_cast<double>(screening.umbrella_count()) /
                        static_cast<double>(2 * net.num_lines());
  report.screening_fallback = screening.fallback;
  report.slack_bus_id = net.slack_bus_id;
  report.seed = opts.seed;

  const std::vector<DirRef> retained = retained_for_network(screening, net);
  const std::vector<DirRef> full = all_directions(net);

  int count = test.num_samples();
  if (opts.max_test_instances > 0) count = std::min(count, opts.max_test_instances);

  // Steps 3-5, sequential for timing stability.
  for (int t = 0; t < count; ++t) {
    const Eigen::VectorXd demand = test.observed.row(t).transpose();

    UcInstance reduced_inst{&net, demand, retained};
    const UcSolution reduced = solve_uc(reduced_inst, cfg);

    UcInstance full_inst{&net, demand, full};
    const UcSolution full_sol =
        solve_uc(full_inst, cfg, opts.warm_start_full ? &reduced : nullptr);

    EvalInstanceRecord rec;
    rec.timestamp = test.timestamps[static_cast<std::size_t>(t)];
    rec.time_reduced_s = reduced.wall_s;
    rec.time_full_s = full_sol.wall_s;

    if (reduced.status == SolveStatus::Optimal) {
      rec.cost_reduced = reduced.total_cost;
      rec.reduced_violates_dropped = !verify_full_feasibility(reduced, net).empty();
    } else {
      rec.reduced_violates_dropped = true;  // reduced problem unusable
    }
    if (full_sol.status == SolveStatus::Optimal) rec.cost_full = full_sol.total_cost;

    if (rec.reduced_violates_dropped) ++report.n_infeasible;
    report.cost_delta.push_back(rec.cost_reduced - rec.cost_full);
    report.instances.push_back(rec);
  }

  std::vector<double> times_full, times_reduced, reductions;
  for (const auto& rec : report.instances) {
    times_full.push_back(rec.time_full_s);
    times_reduced.push_back(rec.time_reduced_s);
    if (rec.time_full_s > 0.0)
      reductions.push_back(100.0 * (1.0 - rec.time_reduced_s / rec.time_full_s));
  }
  report.uc_time_full_s = median(times_full);
  report.uc_time_reduced_s = median(times_reduced);
  report.uc_time_reduction_pct = median(reductions);
  return report;
}

void save_report(const EvalReport& report, const std::string& path) {
  json doc;
  doc["method"] = report.method;
  doc["retained_pct"] = report.retained_pct;
  doc["screening_time_s"] = report.screening_time_s;
  doc["uc_time_full_s"] = report.uc_time_full_s;
  doc["uc_time_reduced_s"] = report.uc_time_reduced_s;
  doc["uc_time_reduction_pct"] = report.uc_time_reduction_pct;
  doc["n_infeasible"] = report.n_infeasible;
  doc["cost_delta"] = report.cost_delta;
  doc["screening_fallback"] = report.screening_fallback;
  doc["slack_bus_id"] = report.slack_bus_id;
  doc["seed"] = report.seed;
  doc["instances"] = json::array();
  for (const auto& rec : report.instances) {
    doc["instances"].push_back(json{{"timestamp", rec.timestamp},
                                    {"cost_full", rec.cost_full},
                                    {"cost_reduced", rec.cost_reduced},
                                    {"time_full_s", rec.time_full_s},
                                    {"time_reduced_s", rec.time_reduced_s},
                                    {"reduced_violates_dropped", rec.reduced_violates_dropped}});
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

}  // namespace ucs
