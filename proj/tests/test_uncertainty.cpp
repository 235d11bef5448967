#include <doctest.h>

#include "helpers.hpp"
#include "ucscreen/scenarios.hpp"
#include "ucscreen/tolerances.hpp"
#include "ucscreen/uncertainty.hpp"

using namespace ucs;

namespace {

ScenarioSet direct_set(const Eigen::MatrixXd& observed, const Eigen::MatrixXd& forecast) {
  ScenarioSet scen;
  scen.observed = observed;
  scen.forecast = forecast;
  for (int i = 0; i < observed.rows(); ++i) scen.timestamps.push_back(i);
  for (int i = 0; i < observed.cols(); ++i) scen.bus_ids.push_back(i + 1);
  return scen;
}

ScenarioSet rank1_data() {
  // 2-D errors along (1,1)/sqrt(2) only.
  const int t = 8;
  Eigen::MatrixXd mu = Eigen::MatrixXd::Constant(t, 2, 100.0);
  Eigen::MatrixXd w = mu;
  const double amp[t] = {3.0, -1.0, 7.0, -10.0, 2.0, 0.5, -4.0, 6.0};
  for (int r = 0; r < t; ++r) {
    w(r, 0) += amp[r] / std::sqrt(2.0);
    w(r, 1) += amp[r] / std::sqrt(2.0);
  }
  return direct_set(w, mu);
}

Network net_for(const ScenarioSet& scen) {
  Network net;
  for (int i = 0; i < scen.num_buses(); ++i) {
    Bus b;
    b.id = scen.bus_ids[static_cast<std::size_t>(i)];
    b.d0 = scen.forecast(0, i);
    net.buses.push_back(b);
  }
  for (int i = 0; i + 1 < scen.num_buses(); ++i)
    net.lines.push_back({i + 1, i + 1, i + 2, 1.0, 1e4});
  net.slack_bus_id = net.buses.front().id;
  return net;
}

// Simplex / box weight samples of the two set shapes.
Eigen::VectorXd sample_p1(const UncertaintySet& set, Rng& rng) {
  Eigen::VectorXd d = set.d0;
  for (int k = 0; k < set.retained; ++k)
    d += (2.0 * rng.uniform01() - 1.0) * set.sbar[static_cast<std::size_t>(k)];
  return d;
}

Eigen::VectorXd sample_p2(const UncertaintySet& set, Rng& rng) {
  const int k2 = 2 * set.retained;
  Eigen::VectorXd w(k2);
  double sum = 0.0;
  for (int i = 0; i < k2; ++i) {
    w[i] = -std::log(1.0 - rng.uniform01());
    sum += w[i];
  }
  w /= sum;
  Eigen::VectorXd d = Eigen::VectorXd::Zero(set.dim());
  for (int k = 0; k < set.retained; ++k) {
    d += w[k] * set.splus[static_cast<std::size_t>(k)];
    d += w[k + set.retained] * set.sminus[static_cast<std::size_t>(k)];
  }
  return d;
}

}  // namespace

TEST_CASE("fit_pca: zero errors give a zero covariance") {
  Eigen::MatrixXd mu = Eigen::MatrixXd::Constant(5, 3, 50.0);
  const PcaModel model = fit_pca(direct_set(mu, mu));
  CHECK(model.sigma.cwiseAbs().maxCoeff() == 0.0);
  CHECK(model.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
  CHECK(project(model, 0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(extreme_vector(model, 1).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("fit_pca: rank-1 data pins the leading component") {
  const PcaModel model = fit_pca(rank1_data());
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(std::abs(std::abs(model.eigenvectors(0, 0)) - inv_sqrt2) < 1e-9);
  CHECK(std::abs(std::abs(model.eigenvectors(1, 0)) - inv_sqrt2) < 1e-9);
  CHECK(model.eigenvalues[1] == doctest::Approx(0.0));
  CHECK(project(model, 1).cwiseAbs().maxCoeff() < 1e-9);

  // max |Z_1| = 10 so the extreme vector is 10 * V_1.
  const Eigen::VectorXd s1 = extreme_vector(model, 0);
  CHECK(s1.norm() == doctest::Approx(10.0));
}

TEST_CASE("fit_pca: numerics against the synthetic generator") {
  Rng netrng(4242);
  const Network net = test::random_network(netrng);
  const CorrelationSpec spec{0.035, 99, 8640};
  const ScenarioSet scen = generate_correlated(net, spec);
  const Eigen::MatrixXd target = generator_covariance(net, spec);

  const PcaModel model = fit_pca(scen);
  const int n = model.dim();

  // Statistical agreement with the generator's target covariance.
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(model.sigma(i, i) - target(i, i)) / target(i, i) < 0.10);

  // Orthonormality, descending order, reconstruction.
  const Eigen::MatrixXd vtv =
      model.eigenvectors.transpose() * model.eigenvectors - Eigen::MatrixXd::Identity(n, n);
  CHECK(vtv.cwiseAbs().maxCoeff() <= 1e-8);
  for (int k = 0; k + 1 < n; ++k)
    CHECK(model.eigenvalues[k] >= model.eigenvalues[k + 1] - 1e-12);
  const Eigen::MatrixXd recon = model.eigenvectors *
                                model.eigenvalues.asDiagonal() *
                                model.eigenvectors.transpose();
  CHECK((recon - model.sigma).cwiseAbs().maxCoeff() <=
        1e-6 * model.sigma.cwiseAbs().maxCoeff());
}

TEST_CASE("project: single sample row equal to V1 has unit projection") {
  const PcaModel model = fit_pca(rank1_data());
  PcaModel probe = model;
  probe.centered = model.eigenvectors.col(0).transpose();
  const Eigen::VectorXd z = project(probe, 0);
  CHECK(z.size() == 1);
  CHECK(std::abs(z[0]) == doctest::Approx(1.0));
  CHECK_THROWS_AS(project(model, 2), std::out_of_range);
}

TEST_CASE("extrema: figure-style 2-D geometry around d0 = (250, 300)") {
  const PcaModel model = fit_pca(rank1_data());
  Eigen::VectorXd d0(2);
  d0 << 250.0, 300.0;
  const UncertaintySet set = build_set(model, d0, 2, SetKind::P2);
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXd sp = set.splus[static_cast<std::size_t>(k)];
    const Eigen::VectorXd sm = set.sminus[static_cast<std::size_t>(k)];
    CHECK(sp == d0 + set.sbar[static_cast<std::size_t>(k)]);
    CHECK(sm == d0 - set.sbar[static_cast<std::size_t>(k)]);
    // Vertices are mirror images through d0.
    CHECK(((sp + sm) / 2.0 - d0).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("build_set rejects bad K") {
  const PcaModel model = fit_pca(rank1_data());
  Eigen::VectorXd d0 = Eigen::VectorXd::Zero(2);
  CHECK_THROWS_AS(build_set(model, d0, 0, SetKind::P1), std::invalid_argument);
  CHECK_THROWS_AS(build_set(model, d0, 3, SetKind::P1), std::invalid_argument);
}

TEST_CASE("contains: centers, vertices, and points past the extremes") {
  Rng netrng(555);
  const Network net = test::random_network(netrng);
  const ScenarioSet scen = generate_correlated(net, {0.08, 3, 400});
  const PcaModel model = fit_pca(scen);
  const Eigen::VectorXd d0 = net.forecast();
  const int n = net.num_buses();

  for (const SetKind kind : {SetKind::P1, SetKind::P2}) {
    const UncertaintySet set = build_set(model, d0, n, kind);
    CHECK(contains(set, d0));
    for (int k = 0; k < set.retained; ++k) {
      CHECK(contains(set, set.splus[static_cast<std::size_t>(k)]));
      CHECK(contains(set, set.sminus[static_cast<std::size_t>(k)]));
    }
    const Eigen::VectorXd outside = set.splus[0] + 2.0 * set.sbar[0];
    CHECK_FALSE(contains(set, outside));
  }

  const UncertaintySet box = box_from_data(net, scen);
  CHECK(contains(box, d0));
  CHECK_THROWS_AS(contains(box, Eigen::VectorXd::Zero(n + 1)), std::invalid_argument);
}

TEST_CASE("random hull combinations are members of P2") {
  Rng netrng(808);
  const Network net = test::random_network(netrng);
  const ScenarioSet scen = generate_correlated(net, {0.06, 21, 300});
  const PcaModel model = fit_pca(scen);
  const UncertaintySet p2 = build_set(model, net.forecast(), net.num_buses(), SetKind::P2);
  Rng rng(17);
  for (int s = 0; s < 50; ++s) CHECK(contains(p2, sample_p2(p2, rng)));
}

TEST_CASE("P2 is contained in P1") {
  Rng netrng(112);
  const Network net = test::random_network(netrng);
  const ScenarioSet scen = generate_correlated(net, {0.05, 8, 256});
  const PcaModel model = fit_pca(scen);
  const int n = net.num_buses();
  const UncertaintySet p1 = build_set(model, net.forecast(), n, SetKind::P1);
  const UncertaintySet p2 = build_set(model, net.forecast(), n, SetKind::P2);
  Rng rng(23);
  for (int s = 0; s < 200; ++s) {
    const Eigen::VectorXd d = sample_p2(p2, rng);
    CHECK(contains(p2, d));
    CHECK(contains(p1, d));
  }
}

TEST_CASE("membership is monotone in K") {
  Rng netrng(131);
  const Network net = test::random_network(netrng);
  const ScenarioSet scen = generate_correlated(net, {0.05, 31, 256});
  const PcaModel model = fit_pca(scen);
  const Eigen::VectorXd d0 = net.forecast();
  const int n = net.num_buses();
  Rng rng(5);
  for (int k = 1; k < n; ++k) {
    const UncertaintySet p1k = build_set(model, d0, k, SetKind::P1);
    const UncertaintySet p1k1 = build_set(model, d0, k + 1, SetKind::P1);
    const UncertaintySet p2k = build_set(model, d0, k, SetKind::P2);
    const UncertaintySet p2k1 = build_set(model, d0, k + 1, SetKind::P2);
    for (int s = 0; s < 12; ++s) {
      const Eigen::VectorXd dp1 = sample_p1(p1k, rng);
      CHECK(contains(p1k1, dp1));
      const Eigen::VectorXd dp2 = sample_p2(p2k, rng);
      CHECK(contains(p2k1, dp2));
    }
  }
}

TEST_CASE("with K = N every historical row lies inside P1") {
  Rng netrng(141);
  const Network net = test::random_network(netrng);
  const ScenarioSet scen = generate_correlated(net, {0.04, 77, 200});
  const PcaModel model = fit_pca(scen);
  const UncertaintySet p1 =
      build_set(model, net.forecast(), net.num_buses(), SetKind::P1);
  for (int r = 0; r < scen.num_samples(); ++r)
    CHECK(contains(p1, scen.observed.row(r).transpose()));
  CHECK(empirical_coverage(p1, scen) == 1.0);
}

TEST_CASE("sets are symmetric through d0") {
  Rng netrng(161);
  const Network net = test::random_network(netrng);
  const ScenarioSet scen = generate_correlated(net, {0.05, 13, 128});
  const PcaModel model = fit_pca(scen);
  const Eigen::VectorXd d0 = net.forecast();
  const int n = net.num_buses();
  Rng rng(3);
  for (const SetKind kind : {SetKind::P1, SetKind::P2}) {
    const UncertaintySet set = build_set(model, d0, n, kind);
    for (int s = 0; s < 25; ++s) {
      const Eigen::VectorXd d =
          kind == SetKind::P1 ? sample_p1(set, rng) : sample_p2(set, rng);
      CHECK(contains(set, d));
      CHECK(contains(set, 2.0 * d0 - d));  // the mirror point d0 - (d - d0)
    }
  }
}

TEST_CASE("axis-aligned uncorrelated data makes P1 the error box") {
  // Two independent axes: component extremes align with per-node extremes.
  Eigen::MatrixXd mu = Eigen::MatrixXd::Constant(6, 2, 100.0);
  Eigen::MatrixXd w = mu;
  const double e0[6] = {4.0, -4.0, 2.0, -2.0, 1.0, -1.0};
  const double e1[6] = {3.0, -3.0, -6.0, 6.0, 0.0, 0.0};  // orthogonal to e0
  for (int r = 0; r < 6; ++r) {
    w(r, 0) += e0[r];
    w(r, 1) += e1[r];
  }
  const ScenarioSet scen = direct_set(w, mu);
  const PcaModel model = fit_pca(scen);
  Eigen::VectorXd d0(2);
  d0 << 100.0, 100.0;
  const UncertaintySet p1 = build_set(model, d0, 2, SetKind::P1);

  // Corners of the per-node error box belong to the set and vice versa.
  Eigen::VectorXd corner(2);
  corner << 104.0, 106.0;
  CHECK(contains(p1, corner));
  corner << 96.0, 94.0;
  CHECK(contains(p1, corner));
  corner << 104.5, 100.0;
  CHECK_FALSE(contains(p1, corner));
}

TEST_CASE("set json round trip keeps the exact-vertex invariant") {
  Rng netrng(171);
  const Network net = test::random_network(netrng);
  const ScenarioSet scen = generate_correlated(net, {0.05, 19, 128});
  const PcaModel model = fit_pca(scen);
  const UncertaintySet set = build_set(model, net.forecast(), 2, SetKind::P2);

  test::TempDir tmp("uset");
  save_set(set, tmp.str("set.json"));
  const UncertaintySet back = load_set(tmp.str("set.json"));
  REQUIRE(back.kind == SetKind::P2);
  REQUIRE(back.retained == 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(back.splus[static_cast<std::size_t>(k)] ==
          back.d0 + back.sbar[static_cast<std::size_t>(k)]);
    CHECK(back.sminus[static_cast<std::size_t>(k)] ==
          back.d0 - back.sbar[static_cast<std::size_t>(k)]);
    CHECK((back.splus[static_cast<std::size_t>(k)] -
           set.splus[static_cast<std::size_t>(k)]).cwiseAbs().maxCoeff() < 1e-12);
  }

  const UncertaintySet box = box_from_data(net, scen);
  save_set(box, tmp.str("box.json"));
  const UncertaintySet box2 = load_set(tmp.str("box.json"));
  CHECK(box2.box_lo == box.box_lo);
  CHECK(box2.box_hi == box.box_hi);
}
