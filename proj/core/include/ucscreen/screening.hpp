#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ucscreen/cost_bound.hpp"
#include "ucscreen/grid.hpp"
#include "ucscreen/model.hpp"
#include "ucscreen/uncertainty.hpp"

namespace ucs {

enum class Method { BUcd, D1Ucd, D2Ucd, EdUcd, EdD1Ucd, Benchmark };

std::string to_string(Method m);
Method method_from_string(const std::string& s);
bool method_uses_bound(Method m);
SetKind method_set_kind(Method m);

enum class Direction { Plus, Minus };
inline char dir_char(Direction d) { return d == Direction::Plus ? '+' : '-'; }

struct DirRef {
  int line = 0;  // line position within Network::lines
  Direction dir = Direction::Plus;
  bool operator==(const DirRef&) const = default;
};

enum class DirLabel { Umbrella, Removable };

struct ScreeningProblem {
  const Network* net = nullptr;
  UncertaintySet uset;
  std::optional<CostBound> bound;
  Method method = Method::BUcd;
  std::optional<std::vector<std::vector<int>>> partition;  // line positions

  void validate() const;
};

struct IterationTrace {
  Eigen::VectorXd vertex_injection;  // q at the iteration optimum
  std::vector<DirRef> found;
  double wall_ms = 0.0;
};

struct ScreeningResult {
  Method method = Method::BUcd;
  std::vector<int> line_ids;          // label index -> line id
  std::vector<DirLabel> label_plus;   // per line position
  std::vector<DirLabel> label_minus;
  std::vector<IterationTrace> iterations;
  bool fallback = false;  // economics row dropped after an infeasible model
  double total_wall_ms = 0.0;

  int umbrella_count() const;
  DirLabel label(const DirRef& d) const;
  std::vector<DirRef> umbrella_directions() const;
  std::vector<DirRef> retained_directions() const;  // same as umbrella set
};

// One UCD MILP over the given line block, with previously found directions
// fixed at v = 1. Exposes the variable layout for tests and the loop.
struct UcdModel {
  ModelBuilder mb;
  std::vector<int> g_vars, q_vars, d_vars, u_vars;
  std::vector<int> block_lines;                 // line positions with pairing rows
  std::vector<int> v_plus, v_minus;             // aligned with block_lines
  std::vector<int> z_plus, z_minus;
  std::vector<int> weight_vars;                 // omega (P1) or omega+/omega- (P2)
  int d_total_var = -1;                         // ED aggregate demand
};

struct FixedDirections {
  std::vector<char> plus, minus;  // per line position

  explicit FixedDirections(int num_lines)
      : plus(static_cast<std::size_t>(num_lines), 0),
        minus(static_cast<std::size_t>(num_lines), 0) {}
  bool get(const DirRef& d) const {
    return (d.dir == Direction::Plus ? plus : minus)[static_cast<std::size_t>(d.line)] != 0;
  }
  void set(const DirRef& d) {
    (d.dir == Direction::Plus ? plus : minus)[static_cast<std::size_t>(d.line)] = 1;
  }
};

// Full-line-set model (the monolithic problem); `ed_segment` < 0 drops the
// economics rows even for ED methods.
UcdModel build_ucd_model(const ScreeningProblem& p, const SolverConfig& cfg,
                         const FixedDirections& fixed, int ed_segment = 0);

// Block-restricted variant used by the decomposition.
UcdModel build_ucd_block_model(const ScreeningProblem& p, const SolverConfig& cfg,
                               const std::vector<int>& block_lines,
                               const FixedDirections& fixed, int ed_segment);

// Algorithm-1 loop: iterate the UCD MILP, fixing each newly found umbrella
// direction, until an iteration finds nothing. ED methods run once per cost
// segment and union the labels; an infeasible first iteration falls back to
// the same variant without the economics rows and flags the result.
ScreeningResult discover_umbrella(const ScreeningProblem& p, const SolverConfig& cfg,
                                  bool warm_start = true);

// Per-block discovery with pairing rows only inside each block; the flow
// limits of every line stay global. Blocks run on cfg.threads workers and
// merge deterministically.
ScreeningResult screen_decomposed(const ScreeningProblem& p, const SolverConfig& cfg,
                                  bool warm_start = true);

// Roald-style benchmark: per direction, max/min the line flow over the LP
// relaxation with every line limit enforced; removable iff the optimum stays
// strictly below the limit by more than tol::kFlowFeasMw.
ScreeningResult screen_benchmark(const ScreeningProblem& p, const SolverConfig& cfg);

// Contiguous line blocks: `partition_even` splits into a given number of
// near-equal blocks, `partition_fixed` into fixed-size blocks plus remainder.
std::vector<std::vector<int>> partition_even(int num_lines, int num_blocks);
std::vector<std::vector<int>> partition_fixed(int num_lines, int lines_per_block);

void save_screening_result(const ScreeningResult& r, const std::string& path);
ScreeningResult load_screening_result(const std::string& path);

// Map a stored result onto a network, returning the retained (umbrella)
// directions as line positions.
std::vector<DirRef> retained_for_network(const ScreeningResult& r, const Network& net);

}  // namespace ucs
