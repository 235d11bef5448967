#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ucscreen/grid.hpp"

namespace ucs {

// Observed and forecast residual-demand time series, rows = time steps,
// columns follow bus_ids. Immutable once built.
struct ScenarioSet {
  Eigen::MatrixXd observed;   // W, T x N, MW
  Eigen::MatrixXd forecast;   // mu, T x N, MW
  std::vector<std::int64_t> timestamps;
  std::vector<int> bus_ids;

  int num_samples() const { return static_cast<int>(observed.rows()); }
  int num_buses() const { return static_cast<int>(observed.cols()); }

  void validate() const;
};

struct CorrelationSpec {
  double eta = 0.0;         // uncertainty level, >= 0
  std::uint64_t seed = 0;
  int samples = 8640;       // T
};

// Target covariance of the synthetic forecast errors: diagonal (eta*d0_n)^2,
// off-diagonal eta^2 * rho_nm * d0_n * d0_m with rho from a random
// C = Chat Chat^T, Chat ~ U[0,1]^(N x N), rescaled to unit diagonal.
// Deterministic in the seed and identical to what generate_correlated uses.
Eigen::MatrixXd generator_covariance(const Network& net, const CorrelationSpec& spec);

// T samples of W = d0 + Gaussian error with the covariance above; forecasts
// are the constant nominal row d0.
ScenarioSet generate_correlated(const Network& net, const CorrelationSpec& spec);

// Disjoint random partition; union of the two sides restores the rows.
std::pair<ScenarioSet, ScenarioSet> split(const ScenarioSet& scen, double train_fraction,
                                          std::uint64_t seed);

// Time-series CSV with header "timestamp,bus_<id1>,...,bus_<idN>".
void write_time_series_csv(const std::string& path, const Eigen::MatrixXd& data,
                           const std::vector<std::int64_t>& timestamps,
                           const std::vector<int>& bus_ids);
void write_scenarios(const std::string& dir, const ScenarioSet& scen);

// Reads observations plus an optional forecasts file. When no forecasts file
// exists, `net` must be provided and the forecast matrix is the constant
// nominal row. Column order mismatches against `net` are a hard error.
ScenarioSet read_scenarios(const std::string& dir, const Network* net = nullptr);

// Hard error if the scenario columns do not match the network's bus order.
void check_bus_order(const ScenarioSet& scen, const Network& net);

}  // namespace ucs
