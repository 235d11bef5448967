#include "ucscreen/model.hpp"

#include <algorithm>
#include <cmath>

namespace ucs {

std::string to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Unbounded: return "unbounded";
    case SolveStatus::GapLimit: return "gap_limit";
    case SolveStatus::TimeLimit: return "time_limit";
    case SolveStatus::NumericFailure: return "numeric_failure";
  }
  return "unknown";
}

void ModelBuilder::check_var(int v) const {
  if (v < 0 || v >= num_vars()) throw std::out_of_range("variable index out of range");
}

int ModelBuilder::add_continuous(std::string name, double lb, double ub) {
  if (lb > ub) throw std::invalid_argument("variable '" + name + "': lower > upper");
  types_.push_back(VarType::Continuous);
  lb_.push_back(lb);
  ub_.push_back(ub);
  names_.push_back(std::move(name));
  return num_vars() - 1;
}

int ModelBuilder::add_binary(std::string name) {
  types_.push_back(VarType::Binary);
  lb_.push_back(0.0);
  ub_.push_back(1.0);
  names_.push_back(std::move(name));
  return num_vars() - 1;
}

int ModelBuilder::add_row(std::vector<std::pair<int, double>> terms, RowSense sense, double rhs,
                          std::string name) {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int, double>> merged;
  merged.reserve(terms.size());
  for (const auto& [v, c] : terms) {
    check_var(v);
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite row coefficient");
    if (!merged.empty() && merged.back().first == v) {
      merged.back().second += c;
    } else {
      merged.emplace_back(v, c);
    }
  }
  std::erase_if(merged, [](const auto& t) { return t.second == 0.0; });
  row_terms_.push_back(std::move(merged));
  row_sense_.push_back(sense);
  row_rhs_.push_back(rhs);
  row_names_.push_back(std::move(name));
  return num_rows() - 1;
}

void ModelBuilder::set_objective(std::vector<std::pair<int, double>> terms) {
  for (const auto& [v, c] : terms) {
    check_var(v);
    if (!std::isfinite(c)) throw std::invalid_argument("non-finite objective coefficient");
  }
  objective_ = std::move(terms);
}

void ModelBuilder::set_hint(std::vector<std::pair<int, double>> hint) {
  for (const auto& [v, val] : hint) {
    check_var(v);
    (void)val;
  }
  hint_ = std::move(hint);
}

void ModelBuilder::set_bounds(int var, double lb, double ub) {
  check_var(var);
  if (lb > ub) throw std::invalid_argument("set_bounds: lower > upper");
  lb_[static_cast<std::size_t>(var)] = lb;
  ub_[static_cast<std::size_t>(var)] = ub;
}

int ModelBuilder::num_binaries() const {
  return static_cast<int>(std::count(types_.begin(), types_.end(), VarType::Binary));
}

int ModelBuilder::find_var(const std::string& name) const {
  for (int v = 0; v < num_vars(); ++v) {
    if (names_[static_cast<std::size_t>(v)] == name) return v;
  }
  return -1;
}

}  // namespace ucs
