#include "ucscreen/simplex.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ucscreen/tolerances.hpp"

namespace ucs {

namespace {

constexpr double kPhase1Feas = 1e-8;   // absolute infeasibility accepted as zero
constexpr double kRatioTie = 1e-10;    // mini-Harris tie window in the ratio test
constexpr int kRefactorPeriod = 128;

enum class VStat : unsigned char { Basic, AtLower, AtUpper, FreeZero };

struct Tableau {
  int m = 0;       // rows
  int ncols = 0;   // structurals + slacks + artificials
  int nstruct = 0;
  std::vector<std::vector<std::pair<int, double>>> cols;  // column-major A
  std::vector<double> lo, up, x, cost;
  std::vector<double> rhs;
  std::vector<int> basis;     // column basic in each row
  std::vector<VStat> stat;    // per column
  std::vector<char> retired;  // artificials barred from re-entering
  Eigen::MatrixXd binv;
};

double col_dot(const Tableau& t, int j, const Eigen::VectorXd& y) {
  double s = 0.0;
  for (const auto& [row, v] : t.cols[static_cast<std::size_t>(j)]) s += y[row] * v;
  return s;
}

Eigen::VectorXd ftran(const Tableau& t, int j) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(t.m);
  for (const auto& [row, v] : t.cols[static_cast<std::size_t>(j)]) u += v * t.binv.col(row);
  return u;
}

// Rebuild binv from scratch and recompute basic values from the nonbasics.
bool refactor(Tableau& t) {
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(t.m, t.m);
  for (int i = 0; i < t.m; ++i) {
    for (const auto& [row, v] : t.cols[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(i)])])
      b(row, i) = v;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(b);
  if (!lu.isInvertible()) return false;
  // binv maps row space back onto basis order: basis value i = (B^-1 r)_i.
  t.binv = lu.inverse();
  Eigen::VectorXd r = Eigen::Map<const Eigen::VectorXd>(t.rhs.data(), t.m);
  for (int j = 0; j < t.ncols; ++j) {
    if (t.stat[static_cast<std::size_t>(j)] == VStat::Basic) continue;
    const double xj = t.x[static_cast<std::size_t>(j)];
    if (xj == 0.0) continue;
    for (const auto& [row, v] : t.cols[static_cast<std::size_t>(j)]) r[row] -= v * xj;
  }
  Eigen::VectorXd xb = t.binv * r;
  for (int i = 0; i < t.m; ++i) t.x[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(i)])] = xb[i];
  return true;
}

struct IterResult {
  LpStatus status = LpStatus::Optimal;
  int iterations = 0;
  std::string message;
};

// Runs the simplex loop for the given cost vector until optimal (no eligible
// entering column), unbounded, or an iteration/numeric failure.
IterResult iterate(Tableau& t, bool phase1) {
  const int max_iters = 2000 + 200 * (t.m + t.ncols);
  int iters = 0;
  int degen_run = 0;
  bool bland = false;
  int since_refactor = 0;

  while (true) {
    if (++iters > max_iters) {
      return {LpStatus::NumericFailure, iters, "simplex iteration limit reached"};
    }
    if (++since_refactor >= kRefactorPeriod) {
      since_refactor = 0;
      if (!refactor(t)) return {LpStatus::NumericFailure, iters, "singular basis at refactor"};
    }

    // Pricing: y = (c_B^T B^-1)^T, reduced cost d_j = c_j - y.a_j.
    Eigen::VectorXd cb(t.m);
    for (int i = 0; i < t.m; ++i) cb[i] = t.cost[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(i)])];
    Eigen::VectorXd y = t.binv.transpose() * cb;

    int entering = -1;
    int dir = 0;  // +1 increase from lower/free, -1 decrease from upper/free
    double best_score = tol::kLpOpt;
    for (int j = 0; j < t.ncols; ++j) {
      const auto js = static_cast<std::size_t>(j);
      const VStat st = t.stat[js];
      if (st == VStat::Basic) continue;
      if (t.retired[js]) continue;
      if (t.lo[js] == t.up[js]) continue;  // fixed
      const double d = t.cost[js] - col_dot(t, j, y);
      int sigma = 0;
      if (st == VStat::AtLower && d < -tol::kLpOpt) sigma = 1;
      else if (st == VStat::AtUpper && d > tol::kLpOpt) sigma = -1;
      else if (st == VStat::FreeZero && std::abs(d) > tol::kLpOpt) sigma = d < 0 ? 1 : -1;
      if (sigma == 0) continue;
      if (bland) {
        entering = j;
        dir = sigma;
        break;
      }
      if (std::abs(d) > best_score) {
        best_score = std::abs(d);
        entering = j;
        dir = sigma;
      }
    }
    if (entering < 0) return {LpStatus::Optimal, iters, {}};

    const Eigen::VectorXd u = ftran(t, entering);

    // Ratio test: how far can the entering variable move before a basic
    // variable hits a bound or the entering variable flips to its other bound.
    const auto es = static_cast<std::size_t>(entering);
    double t_limit = std::numeric_limits<double>::infinity();
    const double range = t.up[es] - t.lo[es];
    if (std::isfinite(range)) t_limit = range;

    double t_min = std::numeric_limits<double>::infinity();
    std::vector<std::pair<int, double>> blockers;  // (row, ratio)
    for (int i = 0; i < t.m; ++i) {
      if (std::abs(u[i]) <= tol::kLpPivot) continue;
      const auto bi = static_cast<std::size_t>(t.basis[static_cast<std::size_t>(i)]);
      const double rate = -dir * u[i];
      double ratio = std::numeric_limits<double>::infinity();
      if (rate < 0.0 && std::isfinite(t.lo[bi])) {
        ratio = (t.x[bi] - t.lo[bi]) / (-rate);
      } else if (rate > 0.0 && std::isfinite(t.up[bi])) {
        ratio = (t.up[bi] - t.x[bi]) / rate;
      }
      if (!std::isfinite(ratio)) continue;
      if (ratio < 0.0) ratio = 0.0;  // fp drift past a bound
      if (ratio < t_min - kRatioTie) {
        t_min = ratio;
        blockers.clear();
        blockers.emplace_back(i, ratio);
      } else if (ratio <= t_min + kRatioTie) {
        t_min = std::min(t_min, ratio);
        blockers.emplace_back(i, ratio);
      }
    }

    const double step = std::min(t_limit, t_min);
    if (!std::isfinite(step)) {
      if (phase1) return {LpStatus::NumericFailure, iters, "phase-1 direction unbounded"};
      return {LpStatus::Unbounded, iters, {}};
    }

    // Apply the move.
    if (step > 0.0) {
      t.x[es] += dir * step;
      for (int i = 0; i < t.m; ++i) {
        if (u[i] == 0.0) continue;
        t.x[static_cast<std::size_t>(t.basis[static_cast<std::size_t>(i)])] -= dir * step * u[i];
      }
      degen_run = 0;
    } else if (++degen_run > 1000) {
      bland = true;
    }

    if (t_limit < t_min - kRatioTie || blockers.empty()) {
      // Bound flip, basis unchanged.
      t.stat[es] = t.stat[es] == VStat::AtLower ? VStat::AtUpper : VStat::AtLower;
      t.x[es] = t.stat[es] == VStat::AtLower ? t.lo[es] : t.up[es];
      continue;
    }

    // Pick the leaving row: largest pivot among the tied blockers, then the
    // lowest basic index (lowest index directly in Bland mode).
    int leave_row = -1;
    double best_pivot = -1.0;
    for (const auto& [row, ratio] : blockers) {
      (void)ratio;
      if (bland) {
        if (leave_row < 0 || t.basis[static_cast<std::size_t>(row)] < t.basis[static_cast<std::size_t>(leave_row)])
          leave_row = row;
        continue;
      }
      const double p = std::abs(u[row]);
      if (p > best_pivot + 1e-14 ||
          (std::abs(p - best_pivot) <= 1e-14 && leave_row >= 0 &&
           t.basis[static_cast<std::size_t>(row)] < t.basis[static_cast<std::size_t>(leave_row)])) {
        best_pivot = p;
        leave_row = row;
      }
    }
    const auto lr = static_cast<std::size_t>(leave_row);
    const auto leaving = static_cast<std::size_t>(t.basis[lr]);
    const double rate = -dir * u[leave_row];
    if (rate < 0.0) {
      t.stat[leaving] = VStat::AtLower;
      t.x[leaving] = t.lo[leaving];
    } else {
      t.stat[leaving] = VStat::AtUpper;
      t.x[leaving] = t.up[leaving];
    }
    if (t.retired[leaving]) t.up[leaving] = 0.0;  // artificial never returns

    t.basis[lr] = entering;
    t.stat[es] = VStat::Basic;

    // binv <- E binv with the standard pivot row elimination.
    const double pivot = u[leave_row];
    t.binv.row(leave_row) /= pivot;
    for (int i = 0; i < t.m; ++i) {
      if (i == leave_row) continue;
      const double f = u[i];
      if (f != 0.0) t.binv.row(i) -= f * t.binv.row(leave_row);
    }
  }
}

}  // namespace

LpData lp_from_model(const ModelBuilder& model) {
  LpData lp;
  lp.num_vars = model.num_vars();
  lp.cost.assign(static_cast<std::size_t>(lp.num_vars), 0.0);
  for (const auto& [v, c] : model.objective()) lp.cost[static_cast<std::size_t>(v)] += c;
  lp.lower.resize(static_cast<std::size_t>(lp.num_vars));
  lp.upper.resize(static_cast<std::size_t>(lp.num_vars));
  for (int v = 0; v < lp.num_vars; ++v) {
    lp.lower[static_cast<std::size_t>(v)] = model.lower(v);
    lp.upper[static_cast<std::size_t>(v)] = model.upper(v);
  }
  lp.rows.reserve(static_cast<std::size_t>(model.num_rows()));
  for (int r = 0; r < model.num_rows(); ++r) {
    LpData::Row row;
    row.sense = model.row_sense(r);
    row.rhs = model.row_rhs(r);
    const auto& terms = model.rows()[static_cast<std::size_t>(r)];
    row.idx.reserve(terms.size());
    row.val.reserve(terms.size());
    for (const auto& [v, c] : terms) {
      row.idx.push_back(v);
      row.val.push_back(c);
    }
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

LpSolution solve_lp(const LpData& lp) {
  const int m = static_cast<int>(lp.rows.size());
  const int n = lp.num_vars;

  for (int j = 0; j < n; ++j) {
    const auto js = static_cast<std::size_t>(j);
    if (lp.lower[js] > lp.upper[js])
      return {LpStatus::Infeasible, 0.0, {}, 0, "variable with lower > upper"};
  }

  Tableau t;
  t.m = m;
  t.nstruct = n;
  t.ncols = n + m;  // artificials appended below as needed
  t.cols.resize(static_cast<std::size_t>(n + 2 * m));
  t.lo.assign(static_cast<std::size_t>(n + 2 * m), 0.0);
  t.up.assign(static_cast<std::size_t>(n + 2 * m), 0.0);
  t.x.assign(static_cast<std::size_t>(n + 2 * m), 0.0);
  t.cost.assign(static_cast<std::size_t>(n + 2 * m), 0.0);
  t.stat.assign(static_cast<std::size_t>(n + 2 * m), VStat::AtLower);
  t.retired.assign(static_cast<std::size_t>(n + 2 * m), 0);
  t.rhs.resize(static_cast<std::size_t>(m));
  t.basis.assign(static_cast<std::size_t>(m), -1);

  for (int j = 0; j < n; ++j) {
    const auto js = static_cast<std::size_t>(j);
    t.lo[js] = lp.lower[js];
    t.up[js] = lp.upper[js];
    if (std::isfinite(t.lo[js])) {
      t.stat[js] = VStat::AtLower;
      t.x[js] = t.lo[js];
    } else if (std::isfinite(t.up[js])) {
      t.stat[js] = VStat::AtUpper;
      t.x[js] = t.up[js];
    } else {
      t.stat[js] = VStat::FreeZero;
      t.x[js] = 0.0;
    }
  }

  for (int i = 0; i < m; ++i) {
    const auto& row = lp.rows[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < row.idx.size(); ++k) {
      if (row.val[k] == 0.0) continue;
      t.cols[static_cast<std::size_t>(row.idx[k])].emplace_back(i, row.val[k]);
    }
    const auto sj = static_cast<std::size_t>(n + i);
    t.cols[sj].emplace_back(i, 1.0);
    switch (row.sense) {
      case RowSense::Le:
        t.lo[sj] = 0.0;
        t.up[sj] = kInf;
        t.stat[sj] = VStat::AtLower;
        break;
      case RowSense::Ge:
        t.lo[sj] = -kInf;
        t.up[sj] = 0.0;
        t.stat[sj] = VStat::AtUpper;
        break;
      case RowSense::Eq:
        t.lo[sj] = 0.0;
        t.up[sj] = 0.0;
        t.stat[sj] = VStat::AtLower;
        break;
    }
    t.x[sj] = 0.0;
    t.rhs[static_cast<std::size_t>(i)] = row.rhs;
  }

  // Residuals at the initial nonbasic point decide which rows start on their
  // slack and which need an artificial.
  std::vector<double> resid(static_cast<std::size_t>(m), 0.0);
  for (int i = 0; i < m; ++i) resid[static_cast<std::size_t>(i)] = t.rhs[static_cast<std::size_t>(i)];
  for (int j = 0; j < n; ++j) {
    const auto js = static_cast<std::size_t>(j);
    if (t.x[js] == 0.0) continue;
    for (const auto& [row, v] : t.cols[js]) resid[static_cast<std::size_t>(row)] -= v * t.x[js];
  }

  bool need_phase1 = false;
  t.binv = Eigen::MatrixXd::Zero(m, m);
  for (int i = 0; i < m; ++i) {
    const auto is = static_cast<std::size_t>(i);
    const auto sj = static_cast<std::size_t>(n + i);
    const double r = resid[is];
    if (r >= t.lo[sj] - tol::kLpFeas && r <= t.up[sj] + tol::kLpFeas) {
      t.basis[is] = n + i;
      t.stat[sj] = VStat::Basic;
      t.x[sj] = r;
      t.binv(i, i) = 1.0;
    } else {
      const int aj = t.ncols;
      const auto as = static_cast<std::size_t>(aj);
      const double sign = r >= 0.0 ? 1.0 : -1.0;
      t.cols[as].emplace_back(i, sign);
      t.lo[as] = 0.0;
      t.up[as] = kInf;
      t.x[as] = std::abs(r);
      t.stat[as] = VStat::Basic;
      t.retired[as] = 1;  // marks artificial; barred from pricing re-entry
      t.cost[as] = 1.0;
      t.basis[is] = aj;
      t.binv(i, i) = sign;
      ++t.ncols;
      need_phase1 = true;
    }
  }

  int total_iters = 0;
  if (need_phase1) {
    IterResult r1 = iterate(t, /*phase1=*/true);
    total_iters += r1.iterations;
    if (r1.status != LpStatus::Optimal)
      return {r1.status == LpStatus::Unbounded ? LpStatus::NumericFailure : r1.status, 0.0, {}, total_iters,
              r1.message.empty() ? "phase-1 failure" : r1.message};
    double infeas = 0.0;
    for (int j = n + m; j < t.ncols; ++j) infeas += t.x[static_cast<std::size_t>(j)];
    if (infeas > kPhase1Feas)
      return {LpStatus::Infeasible, infeas, {}, total_iters, "primal infeasible"};
    for (int j = n + m; j < t.ncols; ++j) t.up[static_cast<std::size_t>(j)] = 0.0;
  }

  for (int j = 0; j < t.ncols; ++j) t.cost[static_cast<std::size_t>(j)] = 0.0;
  for (int j = 0; j < n; ++j) t.cost[static_cast<std::size_t>(j)] = lp.cost[static_cast<std::size_t>(j)];

  if (!refactor(t)) return {LpStatus::NumericFailure, 0.0, {}, total_iters, "singular basis after phase 1"};
  IterResult r2 = iterate(t, /*phase1=*/false);
  total_iters += r2.iterations;
  if (r2.status != LpStatus::Optimal)
    return {r2.status, 0.0, {}, total_iters, r2.message};

  if (!refactor(t)) return {LpStatus::NumericFailure, 0.0, {}, total_iters, "singular basis at cleanup"};

  LpSolution sol;
  sol.status = LpStatus::Optimal;
  sol.iterations = total_iters;
  sol.x.assign(t.x.begin(), t.x.begin() + n);
  double obj = 0.0;
  for (int j = 0; j < n; ++j) obj += lp.cost[static_cast<std::size_t>(j)] * sol.x[static_cast<std::size_t>(j)];
  sol.objective = obj;
  return sol;
}

}  // namespace ucs
