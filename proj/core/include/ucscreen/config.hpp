#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ucscreen/cost_bound.hpp"
#include "ucscreen/model.hpp"
#include "ucscreen/screening.hpp"

namespace ucs {

// Flat key-value run configuration with dotted sections. Unknown keys are
// hard errors so a typo in bound.delta cannot silently change a run.
struct RunConfig {
  std::string network_path;
  std::string out_dir = "out";
  std::string scenarios_dir;  // empty: generate synthetic data
  std::uint64_t seed = 42;
  int workers = 1;

  double eta = 0.035;
  int samples = 960;
  double train_fraction = 7200.0 / 8640.0;

  SetKind set_kind = SetKind::P1;
  int k_retained = 0;  // 0 keeps all components

  Method method = Method::D1Ucd;
  int blocks = 1;

  SolverConfig solver;

  double delta = 3.0;
  double gamma = 0.0;
  BoundMode bound_mode = BoundMode::Literal;
  std::vector<double> breakpoints;
  int bound_fit_instances = 64;

  int test_instances = 24;

  std::vector<double> sweep_k_percent{20, 40, 60, 80, 100};
  std::vector<double> sweep_gamma{0.0, 0.05, 0.1, 0.2, 0.4};

  void validate() const;
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text);

// Applies one "key = value" pair; throws on unknown keys or bad values.
void apply_config_entry(RunConfig& cfg, const std::string& key, const std::string& value);

}  // namespace ucs
