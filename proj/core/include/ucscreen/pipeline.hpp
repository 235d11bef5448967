#pragma once

#include <string>

#include "ucscreen/config.hpp"

namespace ucs {

// End-to-end run: data generation (or reuse), set and bound fitting,
// screening, evaluation, and the figure-data sweeps. Writes set.json,
// bound.json, result.json, report.json, uc_log.csv and the fig*.csv files
// under cfg.out_dir. A failing stage throws with the stage name; artifacts
// written before the failure stay on disk.
void run_pipeline(const RunConfig& cfg);

}  // namespace ucs
