#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string>
#include <vector>

namespace ucs {

struct Bus {
  int id = 0;
  double d0 = 0.0;  // forecast net demand, MW
  std::optional<double> d_min;
  std::optional<double> d_max;
};

struct Generator {
  int id = 0;
  int bus = 0;
  double g_min = 0.0;
  double g_max = 0.0;
  double cost = 0.0;  // incremental cost, currency per MWh
};

struct Line {
  int id = 0;
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // p.u.
  double f_max = 0.0;        // MW
};

// Immutable after construction; safe to share across solver workers.
struct Network {
  std::vector<Bus> buses;
  std::vector<Generator> generators;
  std::vector<Line> lines;
  int slack_bus_id = 0;
  Eigen::MatrixXd ptdf;  // L x N, rows follow lines, cols follow buses

  int num_buses() const { return static_cast<int>(buses.size()); }
  int num_lines() const { return static_cast<int>(lines.size()); }
  int num_generators() const { return static_cast<int>(generators.size()); }

  // Position of a bus/line id, -1 when unknown.
  int bus_index(int id) const;
  int line_index(int id) const;

  // Generator positions attached to each bus position.
  std::vector<std::vector<int>> generators_by_bus() const;

  Eigen::VectorXd forecast() const;  // d0 per bus position
  bool has_ptdf() const {
    return num_buses() > 0 && ptdf.rows() == num_lines() && ptdf.cols() == num_buses();
  }
};

// Reads and validates the network JSON schema:
// {"buses":[{"id","d0","d_min","d_max"}],
//  "generators":[{"id","bus","g_min","g_max","cost"}],
//  "lines":[{"id","from","to","susceptance","f_max"}],
//  "slack": id}
// d_min/d_max and slack are optional; slack defaults to the lowest bus id.
// The PTDF is left uncomputed.
Network load_network(const std::string& path);
Network network_from_json_text(const std::string& text);
void save_network(const Network& net, const std::string& path);

// PTDF via the reduced nodal susceptance matrix: factor once, one
// back-solve per line. The slack column is identically zero.
Eigen::MatrixXd compute_ptdf(const Network& net, int slack_bus_id);

// Computes and stores the PTDF for net.slack_bus_id.
void build_ptdf(Network& net);

// H * q for a balanced injection vector (|sum q| <= tol::kBalanceMw).
Eigen::VectorXd line_flow(const Network& net, const Eigen::VectorXd& injections);

}  // namespace ucs
