#include "ucscreen/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ucs {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string unquote(const std::string& s) {
  if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                        (s.front() == '\'' && s.back() == '\'')))
    return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (...) {
    throw std::runtime_error("config: key \"" + key + "\": not a number: " + v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const int i = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (...) {
    throw std::runtime_error("config: key \"" + key + "\": not an integer: " + v);
  }
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(to_double(key, trim(cell)));
  return out;
}

}  // namespace

void RunConfig::validate() const {
  if (network_path.empty()) throw std::runtime_error("config: \"network\" is required");
  if (samples < 2) throw std::runtime_error("config: data.samples must be >= 2");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::runtime_error("config: data.train_fraction must be in (0, 1)");
  if (eta < 0.0) throw std::runtime_error("config: data.eta must be >= 0");
  if (workers < 1) throw std::runtime_error("config: workers must be >= 1");
  if (blocks < 1) throw std::runtime_error("config: screen.blocks must be >= 1");
  if (delta < 0.0 || gamma < 0.0)
    throw std::runtime_error("config: bound.delta and bound.gamma must be >= 0");
  if (bound_fit_instances < 2)
    throw std::runtime_error("config: bound.fit_instances must be >= 2");
  if (test_instances < 1) throw std::runtime_error("config: eval.test_instances must be >= 1");
  if (set_kind != method_set_kind(method))
    throw std::runtime_error("config: uncertainty.kind \"" + to_string(set_kind) +
                             "\" conflicts with screen.method \"" + to_string(method) +
                             "\" (requires " + to_string(method_set_kind(method)) + ")");
  solver.validate();
}

void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value) {
  const std::string v = unquote(trim(value));
  if (key == "network") cfg.network_path = v;
  else if (key == "out_dir") cfg.out_dir = v;
  else if (key == "scenarios_dir") cfg.scenarios_dir = v;
  else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(v));
  else if (key == "workers") cfg.workers = to_int(key, v);
  else if (key == "data.eta") cfg.eta = to_double(key, v);
  else if (key == "data.samples") cfg.samples = to_int(key, v);
  else if (key == "data.train_fraction") cfg.train_fraction = to_double(key, v);
  else if (key == "uncertainty.kind") cfg.set_kind = set_kind_from_string(v);
  else if (key == "uncertainty.k") cfg.k_retained = to_int(key, v);
  else if (key == "screen.method") cfg.method = method_from_string(v);
  else if (key == "screen.blocks") cfg.blocks = to_int(key, v);
  else if (key == "solver.mip_gap") cfg.solver.mip_gap = to_double(key, v);
  else if (key == "solver.time_limit_s") cfg.solver.time_limit_s = to_double(key, v);
  else if (key == "solver.big_m_multiplier") cfg.solver.big_m_multiplier = to_double(key, v);
  else if (key == "bound.delta") cfg.delta = to_double(key, v);
  else if (key == "bound.gamma") cfg.gamma = to_double(key, v);
  else if (key == "bound.mode") cfg.bound_mode = bound_mode_from_string(v);
  else if (key == "bound.breakpoints") cfg.breakpoints = to_list(key, v);
  else if (key == "bound.fit_instances") cfg.bound_fit_instances = to_int(key, v);
  else if (key == "eval.test_instances") cfg.test_instances = to_int(key, v);
  else if (key == "sweep.k_percent") cfg.sweep_k_percent = to_list(key, v);
  else if (key == "sweep.gamma") cfg.sweep_gamma = to_list(key, v);
  else throw std::runtime_error("config: unknown key \"" + key + "\"");
}

RunConfig parse_config_text(const std::string& text) {
  RunConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error("config line " + std::to_string(lineno) +
                               ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    apply_config_entry(cfg, key, line.substr(eq + 1));
  }
  return cfg;
}

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  RunConfig cfg = parse_config_text(ss.str());
  return cfg;
}

}  // namespace ucs
