#pragma once

#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ucs {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class VarType { Continuous, Binary };
enum class RowSense { Le, Eq, Ge };

enum class SolveStatus {
  Optimal,
  Infeasible,
  Unbounded,
  GapLimit,
  TimeLimit,
  NumericFailure,
};

std::string to_string(SolveStatus s);

struct SolverConfig {
  double mip_gap = 0.0;        // relative optimality gap accepted as done
  double time_limit_s = 0.0;   // 0 means no limit
  int threads = 1;             // outer-loop parallelism; node search is serial
  double big_m_multiplier = 100.0;  // Omega = multiplier * max_l f_l_max

  void validate() const {
    if (mip_gap < 0.0) throw std::invalid_argument("solver.mip_gap must be >= 0");
    if (big_m_multiplier < 10.0)
      throw std::invalid_argument("solver.big_m_multiplier must be >= 10");
    if (threads < 1) throw std::invalid_argument("solver.threads must be >= 1");
  }
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::NumericFailure;
  double objective = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> values;  // empty unless the status carries a point
  double wall_s = 0.0;
  double gap = std::numeric_limits<double>::quiet_NaN();
  std::string message;

  bool has_values() const { return !values.empty(); }
};

// Row-oriented in-memory model. Build once, hand to solve(); the builder
// owns no solver state, so independent builds can be solved concurrently.
class ModelBuilder {
 public:
  int add_continuous(std::string name, double lb, double ub);
  int add_binary(std::string name);

  // Terms are (variable index, coefficient). Returns the row index.
  int add_row(std::vector<std::pair<int, double>> terms, RowSense sense, double rhs,
              std::string name = {});

  // Minimization objective; variables not mentioned have coefficient zero.
  void set_objective(std::vector<std::pair<int, double>> terms);

  // Optional warm-start hint, variable index -> value. Binary hints seed
  // the incumbent search; they never affect the reported status.
  void set_hint(std::vector<std::pair<int, double>> hint);

  // Tighten a variable's bounds after creation (used to fix binaries).
  void set_bounds(int var, double lb, double ub);

  int num_vars() const { return static_cast<int>(types_.size()); }
  int num_rows() const { return static_cast<int>(row_rhs_.size()); }
  int num_binaries() const;
  VarType var_type(int v) const { return types_.at(static_cast<std::size_t>(v)); }
  double lower(int v) const { return lb_.at(static_cast<std::size_t>(v)); }
  double upper(int v) const { return ub_.at(static_cast<std::size_t>(v)); }
  const std::string& var_name(int v) const { return names_.at(static_cast<std::size_t>(v)); }
  // Index of a variable by exact name, -1 if absent.
  int find_var(const std::string& name) const;

  const std::vector<std::pair<int, double>>& objective() const { return objective_; }
  const std::vector<std::pair<int, double>>& hint() const { return hint_; }
  const std::vector<std::vector<std::pair<int, double>>>& rows() const { return row_terms_; }
  RowSense row_sense(int r) const { return row_sense_.at(static_cast<std::size_t>(r)); }
  double row_rhs(int r) const { return row_rhs_.at(static_cast<std::size_t>(r)); }
  const std::string& row_name(int r) const { return row_names_.at(static_cast<std::size_t>(r)); }

 private:
  void check_var(int v) const;

  std::vector<VarType> types_;
  std::vector<double> lb_, ub_;
  std::vector<std::string> names_;
  std::vector<std::vector<std::pair<int, double>>> row_terms_;
  std::vector<RowSense> row_sense_;
  std::vector<double> row_rhs_;
  std::vector<std::string> row_names_;
  std::vector<std::pair<int, double>> objective_;
  std::vector<std::pair<int, double>> hint_;
};

// Solves the model as given (binaries enforced integral).
SolveOutcome solve(const ModelBuilder& model, const SolverConfig& cfg);

// Solves with every binary relaxed to continuous [lb, ub].
SolveOutcome solve_lp_relaxation(const ModelBuilder& model, const SolverConfig& cfg);

}  // namespace ucs
