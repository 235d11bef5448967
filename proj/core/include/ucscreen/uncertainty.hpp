#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ucscreen/scenarios.hpp"

namespace ucs {

// PCA of the spatial forecast-error covariance. Eigenvalues are sorted
// descending; tiny negative eigenvalues (>= -1e-9) are clamped to zero.
struct PcaModel {
  Eigen::MatrixXd sigma;         // N x N covariance, MW^2
  Eigen::MatrixXd eigenvectors;  // V, columns match eigenvalue order
  Eigen::VectorXd eigenvalues;   // descending
  Eigen::MatrixXd centered;      // Wc = W - mu, T x N

  int dim() const { return static_cast<int>(sigma.rows()); }
};

PcaModel fit_pca(const ScenarioSet& scen);

// Z_k = Wc V_k for component index in [0, N).
Eigen::VectorXd project(const PcaModel& model, int component);

// Extreme excursion along one component mapped back to bus coordinates:
// (max_t |Z_k(t)|) * V_k. Data is assumed to range symmetrically around 0.
Eigen::VectorXd extreme_vector(const PcaModel& model, int component);

enum class SetKind { Box, P1, P2 };

std::string to_string(SetKind k);
SetKind set_kind_from_string(const std::string& s);

// Tagged union over the three set shapes. For P1/P2 the set is described by
// the K component extremes; for Box by per-node bounds.
struct UncertaintySet {
  SetKind kind = SetKind::Box;
  Eigen::VectorXd d0;
  int retained = 0;                    // K
  std::vector<Eigen::VectorXd> sbar;   // K vectors in R^N
  std::vector<Eigen::VectorXd> splus;  // d0 + sbar_k, exact
  std::vector<Eigen::VectorXd> sminus; // d0 - sbar_k, exact
  Eigen::VectorXd box_lo, box_hi;      // Box only

  int dim() const { return static_cast<int>(d0.size()); }
  void validate() const;
};

// P1: d = d0 + sum_k (2 w_k - 1) sbar_k, w in [0,1]^K (box in PCA axes).
// P2: d = sum_k (w+_k S+_k + w-_k S-_k), simplex weights (hull of extrema).
UncertaintySet build_set(const PcaModel& model, const Eigen::VectorXd& d0, int k_retained,
                         SetKind kind);

UncertaintySet build_box_set(const Eigen::VectorXd& d0, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi);

// Box bounds from bus d_min/d_max when the file carries them, otherwise the
// column-wise min/max of the observed scenario matrix.
UncertaintySet box_from_data(const Network& net, const ScenarioSet& scen);

// LP membership test at tolerance tol::kMembership.
bool contains(const UncertaintySet& set, const Eigen::VectorXd& d);

// Fraction of scenario rows inside the set (reported for P2, which is not
// guaranteed to cover every historical point).
double empirical_coverage(const UncertaintySet& set, const ScenarioSet& scen);

void save_set(const UncertaintySet& set, const std::string& path);
UncertaintySet load_set(const std::string& path);

}  // namespace ucs
