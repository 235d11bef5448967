#pragma once

#include <optional>
#include <vector>

#include "ucscreen/grid.hpp"
#include "ucscreen/screening.hpp"
#include "ucscreen/uc.hpp"
#include "ucscreen/uncertainty.hpp"

namespace ucs {

enum class Verdict { Redundant, Irredundant };

struct OracleVerdict {
  std::vector<Verdict> verdict_plus;   // per line position
  std::vector<Verdict> verdict_minus;
  // Classes of directions whose constraint rows are identical (only classes
  // with more than one member are listed). The lowest line id is the class
  // representative and carries the member-level Irredundant label.
  std::vector<std::vector<DirRef>> duplicate_classes;
};

// Directions with identical (PTDF row, limit) pairs, including sign-flipped
// matches where +l duplicates -j.
std::vector<std::vector<DirRef>> duplicate_direction_classes(const Network& net);

// Exact redundancy of one direction: maximize its (signed) flow over the
// relaxed region with the direction's own row - and every duplicate of it -
// removed. Redundant iff the optimum stays within f_max + tol::kOracleSlack.
// `enforced` restricts which direction rows are present (defaults to all);
// the target's rows are always removed from it.
// The constraint rows are built here from the set definition, independent of
// the screening module's model builder.
Verdict exact_redundancy(const Network& net, const UncertaintySet& uset, const DirRef& target,
                         const std::vector<DirRef>* enforced = nullptr);

OracleVerdict classify_all(const Network& net, const UncertaintySet& uset);

// Largest number of line-flow limits that can be binding at one point of the
// relaxed region; exhaustive search over per-line {off, +, -} assignments.
int max_simultaneous_active(const Network& net, const UncertaintySet& uset);

// Exact UC optimum by enumerating all 2^M commitments with a dispatch LP
// for each. Guarded to M <= 12.
UcSolution brute_force_uc(const UcInstance& inst);

}  // namespace ucs
