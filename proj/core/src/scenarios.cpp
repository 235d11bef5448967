#include "ucscreen/scenarios.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "ucscreen/rng.hpp"

namespace ucs {

namespace fs = std::filesystem;

void ScenarioSet::validate() const {
  if (observed.rows() != forecast.rows() || observed.cols() != forecast.cols())
    throw std::invalid_argument("scenario set: W and mu must have identical shape");
  if (observed.rows() < 2) throw std::invalid_argument("scenario set: needs T >= 2");
  if (static_cast<int>(timestamps.size()) != num_samples())
    throw std::invalid_argument("scenario set: timestamp index length mismatch");
  if (static_cast<int>(bus_ids.size()) != num_buses())
    throw std::invalid_argument("scenario set: bus id list length mismatch");
  if (!observed.allFinite() || !forecast.allFinite())
    throw std::invalid_argument("scenario set: non-finite data");
}

namespace {

Eigen::MatrixXd covariance_from_rng(const Network& net, double eta, Rng& rng) {
  const int n = net.num_buses();
  Eigen::MatrixXd chat(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) chat(i, j) = rng.uniform01();
  const Eigen::MatrixXd c = chat * chat.transpose();

  const Eigen::VectorXd d0 = net.forecast();
  Eigen::MatrixXd sigma(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i == j) {
        sigma(i, j) = eta * eta * d0[i] * d0[i];
      } else {
        const double rho = c(i, j) / std::sqrt(c(i, i) * c(j, j));
        sigma(i, j) = eta * eta * rho * d0[i] * d0[j];
      }
    }
  }
  return sigma;
}

}  // namespace

Eigen::MatrixXd generator_covariance(const Network& net, const CorrelationSpec& spec) {
  if (spec.eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  Rng rng(spec.seed);
  return covariance_from_rng(net, spec.eta, rng);
}

ScenarioSet generate_correlated(const Network& net, const CorrelationSpec& spec) {
  if (spec.eta < 0.0) throw std::invalid_argument("eta must be >= 0");
  if (spec.samples < 2) throw std::invalid_argument("samples must be >= 2");
  const int n = net.num_buses();
  const int t = spec.samples;
  for (const auto& b : net.buses) {
    if (!std::isfinite(b.d0))
      throw std::invalid_argument("bus " + std::to_string(b.id) + ": d0 undefined");
  }

  Rng rng(spec.seed);
  const Eigen::MatrixXd sigma = covariance_from_rng(net, spec.eta, rng);
  const Eigen::VectorXd d0 = net.forecast();

  ScenarioSet scen;
  scen.forecast = d0.transpose().replicate(t, 1);
  scen.observed = scen.forecast;
  scen.timestamps.resize(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i) scen.timestamps[static_cast<std::size_t>(i)] = i;
  scen.bus_ids.reserve(static_cast<std::size_t>(n));
  for (const auto& b : net.buses) scen.bus_ids.push_back(b.id);

  if (spec.eta > 0.0) {
    Eigen::LLT<Eigen::MatrixXd> llt(sigma);
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("generated covariance is not positive definite");
    const Eigen::MatrixXd chol = llt.matrixL();
    Eigen::VectorXd xi(n);
    for (int row = 0; row < t; ++row) {
      for (int j = 0; j < n; ++j) xi[j] = rng.gaussian();
      scen.observed.row(row) += (chol * xi).transpose();
    }
  }
  scen.validate();
  return scen;
}

std::pair<ScenarioSet, ScenarioSet> split(const ScenarioSet& scen, double train_fraction,
                                          std::uint64_t seed) {
  scen.validate();
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw std::invalid_argument("train fraction must be in (0, 1)");
  const int t = scen.num_samples();
  const auto train_count =
      static_cast<int>(std::llround(train_fraction * static_cast<double>(t)));
  if (train_count <= 0 || train_count >= t)
    throw std::invalid_argument("degenerate partition: one side would be empty");

  std::vector<int> order(static_cast<std::size_t>(t));
  for (int i = 0; i < t; ++i) order[static_cast<std::size_t>(i)] = i;
  Rng rng(seed);
  rng.shuffle(order);

  auto take = [&](int begin, int count) {
    ScenarioSet out;
    out.bus_ids = scen.bus_ids;
    out.observed.resize(count, scen.num_buses());
    out.forecast.resize(count, scen.num_buses());
    out.timestamps.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) {
      const int src = order[static_cast<std::size_t>(begin + i)];
      out.observed.row(i) = scen.observed.row(src);
      out.forecast.row(i) = scen.forecast.row(src);
      out.timestamps[static_cast<std::size_t>(i)] =
          scen.timestamps[static_cast<std::size_t>(src)];
    }
    return out;
  };
  return {take(0, train_count), take(train_count, t - train_count)};
}

namespace {

std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_time_series_csv(const std::string& path, const Eigen::MatrixXd& data,
                           const std::vector<std::int64_t>& timestamps,
                           const std::vector<int>& bus_ids) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "timestamp";
  for (int id : bus_ids) out << ",bus_" << id;
  out << "\n";
  for (int r = 0; r < data.rows(); ++r) {
    out << timestamps[static_cast<std::size_t>(r)];
    for (int c = 0; c < data.cols(); ++c) out << "," << format_full(data(r, c));
    out << "\n";
  }
}

void write_scenarios(const std::string& dir, const ScenarioSet& scen) {
  fs::create_directories(dir);
  write_time_series_csv((fs::path(dir) / "observations.csv").string(), scen.observed,
                        scen.timestamps, scen.bus_ids);
  write_time_series_csv((fs::path(dir) / "forecasts.csv").string(), scen.forecast,
                        scen.timestamps, scen.bus_ids);
}

namespace {

struct CsvTable {
  std::vector<int> bus_ids;
  std::vector<std::int64_t> timestamps;
  Eigen::MatrixXd values;
};

CsvTable read_time_series_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error(path + ": empty file");

  CsvTable table;
  {
    std::stringstream header(line);
    std::string cell;
    if (!std::getline(header, cell, ',') || cell != "timestamp")
      throw std::runtime_error(path + ": header must start with \"timestamp\"");
    while (std::getline(header, cell, ',')) {
      if (cell.rfind("bus_", 0) != 0)
        throw std::runtime_error(path + ": column \"" + cell + "\" must be named bus_<id>");
      table.bus_ids.push_back(std::stoi(cell.substr(4)));
    }
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    if (!std::getline(ss, cell, ',')) continue;
    table.timestamps.push_back(std::stoll(cell));
    std::vector<double> row;
    row.reserve(table.bus_ids.size());
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() != table.bus_ids.size())
      throw std::runtime_error(path + ": row " + std::to_string(rows.size() + 1) +
                               " has wrong column count");
    rows.push_back(std::move(row));
  }
  table.values.resize(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(table.bus_ids.size()));
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < rows[r].size(); ++c)
      table.values(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c];
  return table;
}

}  // namespace

ScenarioSet read_scenarios(const std::string& dir, const Network* net) {
  const fs::path obs_path = fs::path(dir) / "observations.csv";
  const fs::path fc_path = fs::path(dir) / "forecasts.csv";
  CsvTable obs = read_time_series_csv(obs_path.string());

  ScenarioSet scen;
  scen.bus_ids = obs.bus_ids;
  scen.timestamps = obs.timestamps;
  scen.observed = std::move(obs.values);

  if (fs::exists(fc_path)) {
    CsvTable fc = read_time_series_csv(fc_path.string());
    if (fc.bus_ids != scen.bus_ids)
      throw std::runtime_error("forecasts.csv bus columns do not match observations.csv");
    if (fc.values.rows() != scen.observed.rows())
      throw std::runtime_error("forecasts.csv row count does not match observations.csv");
    scen.forecast = std::move(fc.values);
  } else if (net != nullptr) {
    scen.forecast = net->forecast().transpose().replicate(scen.observed.rows(), 1);
  } else {
    throw std::runtime_error("no forecasts.csv and no network to supply nominal forecasts");
  }

  scen.validate();
  if (net != nullptr) check_bus_order(scen, *net);
  return scen;
}

void check_bus_order(const ScenarioSet& scen, const Network& net) {
  std::vector<int> expected;
  expected.reserve(net.buses.size());
  for (const auto& b : net.buses) expected.push_back(b.id);
  if (scen.bus_ids != expected)
    throw std::runtime_error(
        "scenario CSV column order does not match the network bus order; "
        "reorder the file explicitly");
}

}  // namespace ucs
