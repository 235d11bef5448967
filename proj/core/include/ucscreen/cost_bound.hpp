#pragma once

#include <string>
#include <vector>

namespace ucs {

struct CostSegment {
  double a0 = 0.0;     // currency
  double b0 = 0.0;     // currency per MWh
  double d_min = 0.0;  // MW, segment range
  double d_max = 0.0;
};

// eq. form of the bound. "literal" keeps (1 + delta*sigma) * a0; "additive"
// uses a0 + delta*sigma instead, which is the conventional shifted fit.
enum class BoundMode { Literal, Additive };

std::string to_string(BoundMode m);
BoundMode bound_mode_from_string(const std::string& s);

struct CostBound {
  std::vector<CostSegment> segments;  // ordered, contiguous ranges
  double sigma = 0.0;                 // pooled residual std, currency
  double delta = 0.0;
  double gamma = 0.0;
  BoundMode mode = BoundMode::Literal;

  // Index of the segment containing d, -1 if outside every range.
  int segment_for(double d) const;
};

// Per-segment least squares of cost against total net load. Breakpoints are
// interior cut points; outer edges come from the data range.
CostBound fit_cost_bound(const std::vector<double>& loads, const std::vector<double>& costs,
                         const std::vector<double>& breakpoints, double delta, double gamma,
                         BoundMode mode = BoundMode::Literal);

double upper_bound(const CostBound& cb, double total_load);

// Fraction of (load, cost) points at or below the bound.
double coverage(const CostBound& cb, const std::vector<double>& loads,
                const std::vector<double>& costs);

void save_bound(const CostBound& cb, const std::string& path);
CostBound load_bound(const std::string& path);

// CSV with header "total_net_load_mw,total_cost".
void write_uc_log(const std::string& path, const std::vector<double>& loads,
                  const std::vector<double>& costs);
std::pair<std::vector<double>, std::vector<double>> read_uc_log(const std::string& path);

}  // namespace ucs
