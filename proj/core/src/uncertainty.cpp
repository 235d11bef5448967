#include "ucscreen/uncertainty.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ucscreen/model.hpp"
#include "ucscreen/tolerances.hpp"

namespace ucs {

using nlohmann::json;

PcaModel fit_pca(const ScenarioSet& scen) {
  scen.validate();
  const int t = scen.num_samples();
  const int n = scen.num_buses();

  PcaModel model;
  model.centered = scen.observed - scen.forecast;
  model.sigma = model.centered.transpose() * model.centered / static_cast<double>(t - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(model.sigma);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("PCA eigendecomposition failed");

  // Eigen returns ascending order; flip to descending.
  model.eigenvalues.resize(n);
  model.eigenvectors.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double lambda = es.eigenvalues()[n - 1 - i];
    if (lambda < 0.0) {
      if (lambda < -tol::kPtdfNumeric)
        throw std::runtime_error("covariance eigenvalue below -1e-9: numeric failure");
      lambda = 0.0;
    }
    model.eigenvalues[i] = lambda;
    model.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return model;
}

Eigen::VectorXd project(const PcaModel& model, int component) {
  if (component < 0 || component >= model.dim())
    throw std::out_of_range("component index out of range");
  return model.centered * model.eigenvectors.col(component);
}

Eigen::VectorXd extreme_vector(const PcaModel& model, int component) {
  const Eigen::VectorXd z = project(model, component);
  const double alpha = z.size() > 0 ? z.cwiseAbs().maxCoeff() : 0.0;
  return alpha * model.eigenvectors.col(component);
}

std::string to_string(SetKind k) {
  switch (k) {
    case SetKind::Box: return "box";
    case SetKind::P1: return "p1";
    case SetKind::P2: return "p2";
  }
  return "box";
}

SetKind set_kind_from_string(const std::string& s) {
  if (s == "box") return SetKind::Box;
  if (s == "p1") return SetKind::P1;
  if (s == "p2") return SetKind::P2;
  throw std::invalid_argument("unknown uncertainty set kind: " + s);
}

void UncertaintySet::validate() const {
  const int n = dim();
  if (kind == SetKind::Box) {
    if (box_lo.size() != n || box_hi.size() != n)
      throw std::invalid_argument("box set: bounds missing");
    for (int i = 0; i < n; ++i) {
      if (box_lo[i] > box_hi[i]) throw std::invalid_argument("box set: lower > upper");
    }
    return;
  }
  if (retained < 1 || retained > n)
    throw std::invalid_argument("polyhedral set: K out of range");
  if (static_cast<int>(sbar.size()) != retained ||
      static_cast<int>(splus.size()) != retained ||
      static_cast<int>(sminus.size()) != retained)
    throw std::invalid_argument("polyhedral set: extreme vector count mismatch");
}

UncertaintySet build_set(const PcaModel& model, const Eigen::VectorXd& d0, int k_retained,
                         SetKind kind) {
  if (kind == SetKind::Box)
    throw std::invalid_argument("build_set: box sets need explicit bounds, use build_box_set");
  if (k_retained < 1 || k_retained > model.dim())
    throw std::invalid_argument("build_set: K out of range (1 <= K <= N)");
  if (d0.size() != model.dim()) throw std::invalid_argument("build_set: d0 dimension mismatch");

  UncertaintySet set;
  set.kind = kind;
  set.d0 = d0;
  set.retained = k_retained;
  set.sbar.reserve(static_cast<std::size_t>(k_retained));
  for (int k = 0; k < k_retained; ++k) {
    set.sbar.push_back(extreme_vector(model, k));
    set.splus.push_back(d0 + set.sbar.back());
    set.sminus.push_back(d0 - set.sbar.back());
  }
  set.validate();
  return set;
}

UncertaintySet build_box_set(const Eigen::VectorXd& d0, const Eigen::VectorXd& lo,
                             const Eigen::VectorXd& hi) {
  UncertaintySet set;
  set.kind = SetKind::Box;
  set.d0 = d0;
  set.box_lo = lo;
  set.box_hi = hi;
  set.validate();
  return set;
}

UncertaintySet box_from_data(const Network& net, const ScenarioSet& scen) {
  check_bus_order(scen, net);
  const int n = net.num_buses();
  Eigen::VectorXd lo(n), hi(n);
  bool all_from_file = true;
  for (int i = 0; i < n; ++i) {
    const auto& b = net.buses[static_cast<std::size_t>(i)];
    if (b.d_min && b.d_max) {
      lo[i] = *b.d_min;
      hi[i] = *b.d_max;
    } else {
      all_from_file = false;
      lo[i] = scen.observed.col(i).minCoeff();
      hi[i] = scen.observed.col(i).maxCoeff();
    }
  }
  (void)all_from_file;
  return build_box_set(net.forecast(), lo, hi);
}

namespace {

// Elastic feasibility LP: minimum L1 distance between d and the set. The
// weight variables are exactly the set definition's; membership is distance
// below the shared tolerance.
double membership_distance(const UncertaintySet& set, const Eigen::VectorXd& d) {
  const int n = set.dim();
  ModelBuilder mb;
  std::vector<std::pair<int, double>> obj;

  std::vector<int> eplus(static_cast<std::size_t>(n)), eminus(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    eplus[static_cast<std::size_t>(i)] = mb.add_continuous("ep" + std::to_string(i), 0.0, kInf);
    eminus[static_cast<std::size_t>(i)] = mb.add_continuous("em" + std::to_string(i), 0.0, kInf);
    obj.emplace_back(eplus[static_cast<std::size_t>(i)], 1.0);
    obj.emplace_back(eminus[static_cast<std::size_t>(i)], 1.0);
  }

  if (set.kind == SetKind::P1) {
    std::vector<int> w(static_cast<std::size_t>(set.retained));
    for (int k = 0; k < set.retained; ++k)
      w[static_cast<std::size_t>(k)] = mb.add_continuous("w" + std::to_string(k), 0.0, 1.0);
    for (int i = 0; i < n; ++i) {
      // d0 + sum_k (2 w_k - 1) sbar_k + e+ - e- = d
      std::vector<std::pair<int, double>> terms;
      double rhs = d[i] - set.d0[i];
      for (int k = 0; k < set.retained; ++k) {
        const double s = set.sbar[static_cast<std::size_t>(k)][i];
        terms.emplace_back(w[static_cast<std::size_t>(k)], 2.0 * s);
        rhs += s;
      }
      terms.emplace_back(eplus[static_cast<std::size_t>(i)], 1.0);
      terms.emplace_back(eminus[static_cast<std::size_t>(i)], -1.0);
      mb.add_row(std::move(terms), RowSense::Eq, rhs);
    }
  } else if (set.kind == SetKind::P2) {
    std::vector<int> wp(static_cast<std::size_t>(set.retained)),
        wm(static_cast<std::size_t>(set.retained));
    std::vector<std::pair<int, double>> simplex;
    for (int k = 0; k < set.retained; ++k) {
      wp[static_cast<std::size_t>(k)] = mb.add_continuous("wp" + std::to_string(k), 0.0, 1.0);
      wm[static_cast<std::size_t>(k)] = mb.add_continuous("wm" + std::to_string(k), 0.0, 1.0);
      simplex.emplace_back(wp[static_cast<std::size_t>(k)], 1.0);
      simplex.emplace_back(wm[static_cast<std::size_t>(k)], 1.0);
    }
    mb.add_row(std::move(simplex), RowSense::Eq, 1.0);
    for (int i = 0; i < n; ++i) {
      std::vector<std::pair<int, double>> terms;
      for (int k = 0; k < set.retained; ++k) {
        terms.emplace_back(wp[static_cast<std::size_t>(k)], set.splus[static_cast<std::size_t>(k)][i]);
        terms.emplace_back(wm[static_cast<std::size_t>(k)], set.sminus[static_cast<std::size_t>(k)][i]);
      }
      terms.emplace_back(eplus[static_cast<std::size_t>(i)], 1.0);
      terms.emplace_back(eminus[static_cast<std::size_t>(i)], -1.0);
      mb.add_row(std::move(terms), RowSense::Eq, d[i]);
    }
  } else {
    throw std::logic_error("membership_distance: box handled separately");
  }

  mb.set_objective(std::move(obj));
  const SolveOutcome out = solve_lp_relaxation(mb, SolverConfig{});
  if (out.status != SolveStatus::Optimal)
    throw std::runtime_error("membership LP failed: " + to_string(out.status));
  return out.objective;
}

}  // namespace

bool contains(const UncertaintySet& set, const Eigen::VectorXd& d) {
  set.validate();
  if (d.size() != set.dim())
    throw std::invalid_argument("contains: dimension mismatch");
  if (set.kind == SetKind::Box) {
    for (int i = 0; i < set.dim(); ++i) {
      if (d[i] < set.box_lo[i] - tol::kMembership) return false;
      if (d[i] > set.box_hi[i] + tol::kMembership) return false;
    }
    return true;
  }
  return membership_distance(set, d) <= tol::kMembership;
}

double empirical_coverage(const UncertaintySet& set, const ScenarioSet& scen) {
  int inside = 0;
  for (int r = 0; r < scen.num_samples(); ++r) {
    if (contains(set, scen.observed.row(r).transpose())) ++inside;
  }
  return static_cast<double>(inside) / static_cast<double>(scen.num_samples());
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

Eigen::VectorXd vec_from_json(const json& arr) {
  Eigen::VectorXd v(arr.size());
  for (std::size_t i = 0; i < arr.size(); ++i) v[static_cast<Eigen::Index>(i)] = arr[i].get<double>();
  return v;
}

}  // namespace

void save_set(const UncertaintySet& set, const std::string& path) {
  set.validate();
  json doc;
  doc["kind"] = to_string(set.kind);
  doc["d0"] = vec_to_json(set.d0);
  doc["k"] = set.retained;
  if (set.kind == SetKind::Box) {
    doc["box_lo"] = vec_to_json(set.box_lo);
    doc["box_hi"] = vec_to_json(set.box_hi);
  } else {
    json sp = json::array(), sm = json::array();
    for (int k = 0; k < set.retained; ++k) {
      sp.push_back(vec_to_json(set.splus[static_cast<std::size_t>(k)]));
      sm.push_back(vec_to_json(set.sminus[static_cast<std::size_t>(k)]));
    }
    doc["s_plus"] = sp;
    doc["s_minus"] = sm;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << doc.dump(2) << "\n";
}

UncertaintySet load_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw std::runtime_error(path + ": JSON parse error: " + e.what());
  }

  UncertaintySet set;
  set.kind = set_kind_from_string(doc.at("kind").get<std::string>());
  set.d0 = vec_from_json(doc.at("d0"));
  set.retained = doc.at("k").get<int>();
  if (set.kind == SetKind::Box) {
    set.box_lo = vec_from_json(doc.at("box_lo"));
    set.box_hi = vec_from_json(doc.at("box_hi"));
  } else {
    const auto& sp = doc.at("s_plus");
    // sbar is re-derived so that splus = d0 + sbar holds bit-exactly after
    // a round trip.
    for (std::size_t k = 0; k < sp.size(); ++k) {
      const Eigen::VectorXd splus_k = vec_from_json(sp[k]);
      const Eigen::VectorXd sbar_k = splus_k - set.d0;
      set.sbar.push_back(sbar_k);
      set.splus.push_back(set.d0 + sbar_k);
      set.sminus.push_back(set.d0 - sbar_k);
    }
  }
  set.validate();
  return set;
}

}  // namespace ucs
