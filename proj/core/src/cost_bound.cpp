#include "ucscreen/cost_bound.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace ucs {

using nlohmann::json;

std::string to_string(BoundMode m) {
  return m == BoundMode::Literal ? "literal" : "additive";
}

BoundMode bound_mode_from_string(const std::string& s) {
  if (s == "literal") return BoundMode::Literal;
  if (s == "additive") return BoundMode::Additive;
  throw std::invalid_argument("unknown bound mode: " + s);
}

int CostBound::segment_for(double d) const {
  for (std::size_t i = 0; i < segments.size(); ++i) {
    const auto& s = segments[i];
    const bool last = i + 1 == segments.size();
    if (d >= s.d_min && (d < s.d_max || (last && d <= s.d_max))) return static_cast<int>(i);
  }
  return -1;
}

CostBound fit_cost_bound(const std::vector<double>& loads, const std::vector<double>& costs,
                         const std::vector<double>& breakpoints, double delta, double gamma,
                         BoundMode mode) {
  if (loads.size() != costs.size())
    throw std::invalid_argument("fit_cost_bound: loads/costs length mismatch");
  if (loads.size() < 2) throw std::invalid_argument("fit_cost_bound: needs at least 2 samples");
  if (delta < 0.0 || gamma < 0.0)
    throw std::invalid_argument("fit_cost_bound: delta and gamma must be >= 0");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end()))
    throw std::invalid_argument("fit_cost_bound: breakpoints must be sorted");

  const double lo = *std::min_element(loads.begin(), loads.end());
  const double hi = *std::max_element(loads.begin(), loads.end());
  std::vector<double> edges{lo};
  for (double bp : breakpoints) {
    if (bp > lo && bp < hi) edges.push_back(bp);
  }
  edges.push_back(hi);

  CostBound cb;
  cb.delta = delta;
  cb.gamma = gamma;
  cb.mode = mode;

  double ss_res = 0.0;
  std::size_t n_used = 0;
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double seg_lo = edges[s];
    const double seg_hi = edges[s + 1];
    const bool last = s + 2 == edges.size();

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < loads.size(); ++i) {
      const double x = loads[i];
      if (x < seg_lo || (last ? x > seg_hi : x >= seg_hi)) continue;
      sx += x;
      sy += costs[i];
      sxx += x * x;
      sxy += x * costs[i];
      ++count;
    }
    if (count < 2)
      throw std::runtime_error("fit_cost_bound: empty segment [" + std::to_string(seg_lo) +
                               ", " + std::to_string(seg_hi) + ")");
    const double denom = static_cast<double>(count) * sxx - sx * sx;
    if (std::abs(denom) < 1e-12 * std::max(1.0, sxx))
      throw std::runtime_error("fit_cost_bound: degenerate fit, zero variance in load");
    CostSegment seg;
    seg.b0 = (static_cast<double>(count) * sxy - sx * sy) / denom;
    seg.a0 = (sy - seg.b0 * sx) / static_cast<double>(count);
    seg.d_min = seg_lo;
    seg.d_max = seg_hi;
    cb.segments.push_back(seg);

    for (std::size_t i = 0; i < loads.size(); ++i) {
      const double x = loads[i];
      if (x < seg_lo || (last ? x > seg_hi : x >= seg_hi)) continue;
      const double r = costs[i] - (seg.a0 + seg.b0 * x);
      ss_res += r * r;
      ++n_used;
    }
  }

  const std::size_t dof = n_used > 2 * cb.segments.size() ? n_used - 2 * cb.segments.size() : 1;
  cb.sigma = std::sqrt(ss_res / static_cast<double>(dof));
  return cb;
}

double upper_bound(const CostBound& cb, double total_load) {
  const int s = cb.segment_for(total_load);
  if (s < 0)
    throw std::domain_error("upper_bound: load " + std::to_string(total_load) +
                            " outside all segments");
  const auto& seg = cb.segments[static_cast<std::size_t>(s)];
  if (cb.mode == BoundMode::Literal)
    return (1.0 + cb.delta * cb.sigma) * seg.a0 + (1.0 + cb.gamma) * seg.b0 * total_load;
  return seg.a0 + (1.0 + cb.gamma) * seg.b0 * total_load + cb.delta * cb.sigma;
}

double coverage(const CostBound& cb, const std::vector<double>& loads,
                const std::vector<double>& costs) {
  if (loads.empty() || loads.size() != costs.size())
    throw std::invalid_argument("coverage: bad data");
  std::size_t covered = 0;
  for (std::size_t i = 0; i < loads.size(); ++i) {
    if (costs[i] <= upper_bound(cb, loads[i]) + 1e-9) ++covered;
  }
  return static_cast<double>(covered) / static_cast<double>(loads.size());
}

void save_bound(const CostBound& cb, const std::string& path) {
  json doc;
  doc["segments"] = json::array();
  for (const auto& s : cb.segments) {
    doc["segments"].push_back(
        json{{"a0", s.a0}, {"b0", s.b0}, {"d_min", s.d_min}, {"d_max", s.d_max}});
  }
  doc["sigma"] = cb.sigma;
  doc["delta"] = cb.delta;
  doc["gamma"] = cb.gamma;
  doc["mode"] = to_string(cb.mode);
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

CostBound load_bound(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  in >> doc;
  CostBound cb;
  for (const auto& rec : doc.at("segments")) {
    CostSegment s;
    s.a0 = rec.at("a0").get<double>();
    s.b0 = rec.at("b0").get<double>();
    s.d_min = rec.at("d_min").get<double>();
    s.d_max = rec.at("d_max").get<double>();
    cb.segments.push_back(s);
  }
  cb.sigma = doc.at("sigma").get<double>();
  cb.delta = doc.at("delta").get<double>();
  cb.gamma = doc.at("gamma").get<double>();
  cb.mode = bound_mode_from_string(doc.at("mode").get<std::string>());
  return cb;
}

void write_uc_log(const std::string& path, const std::vector<double>& loads,
                  const std::vector<double>& costs) {
  if (loads.size() != costs.size())
    throw std::invalid_argument("write_uc_log: length mismatch");
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "total_net_load_mw,total_cost\n";
  char buf[90];
  for (std::size_t i = 0; i < loads.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.17g,%.17g\n", loads[i], costs[i]);
    out << buf;
  }
}

std::pair<std::vector<double>, std::vector<double>> read_uc_log(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line.rfind("total_net_load_mw,total_cost", 0) != 0)
    throw std::runtime_error(path + ": expected header total_net_load_mw,total_cost");
  std::vector<double> loads, costs;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::runtime_error(path + ": malformed row: " + line);
    loads.push_back(std::stod(a));
    costs.push_back(std::stod(b));
  }
  return {std::move(loads), std::move(costs)};
}

}  // namespace ucs
