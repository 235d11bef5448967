#pragma once

// Central numeric tolerance block. Every module pulls its constants from
// here so that MW-scale feasibility checks stay consistent across the
// screening, UC and oracle paths.
namespace ucs::tol {

// Injection vectors must sum to zero within this many MW.
inline constexpr double kBalanceMw = 1e-6;

// PTDF entries may exceed [-1, 1] by at most this much.
inline constexpr double kPtdfNumeric = 1e-9;

// LP membership tests on uncertainty sets (contains()).
inline constexpr double kMembership = 1e-7;

// A line direction "reaches its limit" when |flow - f_max| is below this.
inline constexpr double kFlowFeasMw = 1e-6;

// MILP binaries within this distance of {0,1} are rounded.
inline constexpr double kBinaryRound = 1e-6;

// Redundancy oracle: redundant iff optimum <= f_max + this.
inline constexpr double kOracleSlack = 1e-7;

// Internal simplex tolerances (absolute; all model data is MW-scale).
inline constexpr double kLpFeas = 1e-9;
inline constexpr double kLpOpt = 1e-9;
inline constexpr double kLpPivot = 1e-11;

}  // namespace ucs::tol
