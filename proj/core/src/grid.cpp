#include "ucscreen/grid.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ucscreen/tolerances.hpp"

namespace ucs {

using nlohmann::json;

int Network::bus_index(int id) const {
  for (int i = 0; i < num_buses(); ++i)
    if (buses[static_cast<std::size_t>(i)].id == id) return i;
  return -1;
}

int Network::line_index(int id) const {
  for (int i = 0; i < num_lines(); ++i)
    if (lines[static_cast<std::size_t>(i)].id == id) return i;
  return -1;
}

std::vector<std::vector<int>> Network::generators_by_bus() const {
  std::vector<std::vector<int>> by_bus(static_cast<std::size_t>(num_buses()));
  for (int g = 0; g < num_generators(); ++g) {
    const int b = bus_index(generators[static_cast<std::size_t>(g)].bus);
    by_bus[static_cast<std::size_t>(b)].push_back(g);
  }
  return by_bus;
}

Eigen::VectorXd Network::forecast() const {
  Eigen::VectorXd d0(num_buses());
  for (int i = 0; i < num_buses(); ++i) d0[i] = buses[static_cast<std::size_t>(i)].d0;
  return d0;
}

namespace {

double require_number(const json& rec, const char* key, const std::string& where) {
  if (!rec.contains(key) || !rec[key].is_number())
    throw std::runtime_error(where + ": missing or non-numeric \"" + key + "\" in " + rec.dump());
  return rec[key].get<double>();
}

int require_int(const json& rec, const char* key, const std::string& where) {
  if (!rec.contains(key) || !rec[key].is_number_integer())
    throw std::runtime_error(where + ": missing or non-integer \"" + key + "\" in " + rec.dump());
  return rec[key].get<int>();
}

void validate(const Network& net) {
  std::set<int> bus_ids;
  for (const auto& b : net.buses) {
    if (!bus_ids.insert(b.id).second)
      throw std::runtime_error("duplicate bus id " + std::to_string(b.id));
    if (b.d_min && b.d_max) {
      if (*b.d_min > b.d0 || b.d0 > *b.d_max)
        throw std::runtime_error("bus " + std::to_string(b.id) +
                                 ": d_min <= d0 <= d_max violated");
    } else if (b.d_min.has_value() != b.d_max.has_value()) {
      throw std::runtime_error("bus " + std::to_string(b.id) +
                               ": d_min and d_max must be given together");
    }
  }
  if (net.buses.empty()) throw std::runtime_error("network has no buses");

  std::set<int> gen_ids;
  for (const auto& g : net.generators) {
    const std::string where = "generator " + std::to_string(g.id);
    if (!gen_ids.insert(g.id).second)
      throw std::runtime_error("duplicate generator id " + std::to_string(g.id));
    if (bus_ids.count(g.bus) == 0)
      throw std::runtime_error(where + ": dangling bus reference (bus " +
                               std::to_string(g.bus) + ")");
    if (g.g_min < 0.0 || g.g_min > g.g_max)
      throw std::runtime_error(where + ": needs 0 <= g_min <= g_max");
    if (g.cost < 0.0) throw std::runtime_error(where + ": negative cost");
  }

  std::set<int> line_ids;
  for (const auto& l : net.lines) {
    const std::string where = "line " + std::to_string(l.id);
    if (!line_ids.insert(l.id).second)
      throw std::runtime_error("duplicate line id " + std::to_string(l.id));
    if (l.from == l.to) throw std::runtime_error(where + ": from == to");
    if (bus_ids.count(l.from) == 0)
      throw std::runtime_error(where + ": dangling bus reference (bus " +
                               std::to_string(l.from) + ")");
    if (bus_ids.count(l.to) == 0)
      throw std::runtime_error(where + ": dangling bus reference (bus " +
                               std::to_string(l.to) + ")");
    if (l.susceptance <= 0.0) throw std::runtime_error(where + ": susceptance must be > 0");
    if (l.f_max <= 0.0) throw std::runtime_error(where + ": f_max must be > 0");
  }

  if (bus_ids.count(net.slack_bus_id) == 0)
    throw std::runtime_error("slack bus " + std::to_string(net.slack_bus_id) + " not found");
}

}  // namespace

Network network_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("network JSON parse error: ") + e.what());
  }

  Network net;
  if (!doc.contains("buses") || !doc["buses"].is_array())
    throw std::runtime_error("network JSON: missing \"buses\" array");
  for (const auto& rec : doc["buses"]) {
    Bus b;
    b.id = require_int(rec, "id", "bus");
    b.d0 = require_number(rec, "d0", "bus " + std::to_string(b.id));
    if (rec.contains("d_min")) b.d_min = rec["d_min"].get<double>();
    if (rec.contains("d_max")) b.d_max = rec["d_max"].get<double>();
    net.buses.push_back(b);
  }

  if (doc.contains("generators")) {
    for (const auto& rec : doc["generators"]) {
      Generator g;
      g.id = require_int(rec, "id", "generator");
      const std::string where = "generator " + std::to_string(g.id);
      g.bus = require_int(rec, "bus", where);
      g.g_min = require_number(rec, "g_min", where);
      g.g_max = require_number(rec, "g_max", where);
      g.cost = require_number(rec, "cost", where);
      net.generators.push_back(g);
    }
  }

  if (doc.contains("lines")) {
    for (const auto& rec : doc["lines"]) {
      Line l;
      l.id = require_int(rec, "id", "line");
      const std::string where = "line " + std::to_string(l.id);
      l.from = require_int(rec, "from", where);
      l.to = require_int(rec, "to", where);
      l.susceptance = require_number(rec, "susceptance", where);
      l.f_max = require_number(rec, "f_max", where);
      net.lines.push_back(l);
    }
  }

  if (doc.contains("slack")) {
    net.slack_bus_id = doc["slack"].get<int>();
  } else {
    int lowest = net.buses.empty() ? 0 : net.buses.front().id;
    for (const auto& b : net.buses) lowest = std::min(lowest, b.id);
    net.slack_bus_id = lowest;
  }

  validate(net);
  return net;
}

Network load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return network_from_json_text(ss.str());
}

void save_network(const Network& net, const std::string& path) {
  json doc;
  doc["buses"] = json::array();
  for (const auto& b : net.buses) {
    json rec{{"id", b.id}, {"d0", b.d0}};
    if (b.d_min) rec["d_min"] = *b.d_min;
    if (b.d_max) rec["d_max"] = *b.d_max;
    doc["buses"].push_back(rec);
  }
  doc["generators"] = json::array();
  for (const auto& g : net.generators) {
    doc["generators"].push_back(json{{"id", g.id},
                                     {"bus", g.bus},
                                     {"g_min", g.g_min},
                                     {"g_max", g.g_max},
                                     {"cost", g.cost}});
  }
  doc["lines"] = json::array();
  for (const auto& l : net.lines) {
    doc["lines"].push_back(json{{"id", l.id},
                                {"from", l.from},
                                {"to", l.to},
                                {"susceptance", l.susceptance},
                                {"f_max", l.f_max}});
  }
  doc["slack"] = net.slack_bus_id;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file: " + path);
  out << doc.dump(2) << "\n";
}

Eigen::MatrixXd compute_ptdf(const Network& net, int slack_bus_id) {
  const int n = net.num_buses();
  const int nl = net.num_lines();
  const int slack = net.bus_index(slack_bus_id);
  if (slack < 0)
    throw std::runtime_error("slack bus " + std::to_string(slack_bus_id) + " not found");

  // Connectivity check over the line graph.
  std::vector<std::vector<int>> adj(static_cast<std::size_t>(n));
  for (const auto& l : net.lines) {
    const int i = net.bus_index(l.from);
    const int j = net.bus_index(l.to);
    adj[static_cast<std::size_t>(i)].push_back(j);
    adj[static_cast<std::size_t>(j)].push_back(i);
  }
  std::vector<char> seen(static_cast<std::size_t>(n), 0);
  std::vector<int> stack{slack};
  seen[static_cast<std::size_t>(slack)] = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (!seen[static_cast<std::size_t>(w)]) {
        seen[static_cast<std::size_t>(w)] = 1;
        stack.push_back(w);
      }
    }
  }
  if (std::count(seen.begin(), seen.end(), 1) != n)
    throw std::runtime_error("islanded network: not all buses reach the slack");

  // Reduced nodal susceptance matrix over non-slack buses.
  std::vector<int> red(static_cast<std::size_t>(n), -1);
  int k = 0;
  for (int i = 0; i < n; ++i)
    if (i != slack) red[static_cast<std::size_t>(i)] = k++;
  Eigen::MatrixXd b_red = Eigen::MatrixXd::Zero(n - 1, n - 1);
  for (const auto& l : net.lines) {
    const int i = net.bus_index(l.from);
    const int j = net.bus_index(l.to);
    const int ri = red[static_cast<std::size_t>(i)];
    const int rj = red[static_cast<std::size_t>(j)];
    if (ri >= 0) b_red(ri, ri) += l.susceptance;
    if (rj >= 0) b_red(rj, rj) += l.susceptance;
    if (ri >= 0 && rj >= 0) {
      b_red(ri, rj) -= l.susceptance;
      b_red(rj, ri) -= l.susceptance;
    }
  }

  Eigen::LLT<Eigen::MatrixXd> llt(b_red);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("singular reduced susceptance matrix: numeric failure");

  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(nl, n);
  Eigen::VectorXd rhs(n - 1);
  for (int li = 0; li < nl; ++li) {
    const auto& l = net.lines[static_cast<std::size_t>(li)];
    const int i = net.bus_index(l.from);
    const int j = net.bus_index(l.to);
    rhs.setZero();
    if (red[static_cast<std::size_t>(i)] >= 0) rhs[red[static_cast<std::size_t>(i)]] = l.susceptance;
    if (red[static_cast<std::size_t>(j)] >= 0) rhs[red[static_cast<std::size_t>(j)]] = -l.susceptance;
    const Eigen::VectorXd y = llt.solve(rhs);
    for (int c = 0; c < n; ++c) {
      if (c == slack) continue;
      h(li, c) = y[red[static_cast<std::size_t>(c)]];
    }
  }

  if ((h.array().abs() > 1.0 + tol::kPtdfNumeric).any())
    throw std::runtime_error("PTDF entry outside [-1, 1]: numeric failure");
  return h;
}

void build_ptdf(Network& net) { net.ptdf = compute_ptdf(net, net.slack_bus_id); }

Eigen::VectorXd line_flow(const Network& net, const Eigen::VectorXd& injections) {
  if (!net.has_ptdf()) throw std::logic_error("line_flow: PTDF not computed");
  if (injections.size() != net.num_buses())
    throw std::invalid_argument("line_flow: injection vector has wrong dimension");
  const double imbalance = injections.sum();
  if (std::abs(imbalance) > tol::kBalanceMw) {
    std::ostringstream oss;
    oss << "unbalanced injection vector: sum = " << imbalance << " MW";
    throw std::invalid_argument(oss.str());
  }
  return net.ptdf * injections;
}

}  // namespace ucs
