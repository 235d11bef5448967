#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "ucscreen/cost_bound.hpp"
#include "ucscreen/rng.hpp"

using namespace ucs;

TEST_CASE("fit: exact line is recovered with zero sigma") {
  std::vector<double> loads{10, 20, 30, 40, 50};
  std::vector<double> costs;
  for (double d : loads) costs.push_back(10.0 + 2.0 * d);
  const CostBound cb = fit_cost_bound(loads, costs, {}, 0.0, 0.0);
  REQUIRE(cb.segments.size() == 1);
  CHECK(cb.segments[0].a0 == doctest::Approx(10.0).epsilon(1e-9));
  CHECK(cb.segments[0].b0 == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cb.sigma == doctest::Approx(0.0));
  // Delta = Gamma = 0 on-line data: bound equals the fitted line.
  CHECK(upper_bound(cb, 25.0) == doctest::Approx(60.0));
  CHECK(coverage(cb, loads, costs) == doctest::Approx(1.0));
}

TEST_CASE("fit: two-cluster data recovers both segment slopes") {
  std::vector<double> loads, costs;
  for (int i = 0; i < 20; ++i) {
    const double d = 100.0 + i * 10.0;  // [100, 290]
    loads.push_back(d);
    costs.push_back(500.0 + 3.0 * d);
  }
  for (int i = 0; i < 20; ++i) {
    const double d = 300.0 + i * 10.0;  // [300, 490]
    loads.push_back(d);
    costs.push_back(-400.0 + 6.0 * d);
  }
  const CostBound cb = fit_cost_bound(loads, costs, {295.0}, 0.0, 0.0);
  REQUIRE(cb.segments.size() == 2);
  CHECK(cb.segments[0].a0 == doctest::Approx(500.0).epsilon(1e-6));
  CHECK(cb.segments[0].b0 == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(cb.segments[1].a0 == doctest::Approx(-400.0).epsilon(1e-6));
  CHECK(cb.segments[1].b0 == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(cb.sigma == doctest::Approx(0.0));
  // Segment ranges tile the data span.
  CHECK(cb.segments[0].d_min == doctest::Approx(100.0));
  CHECK(cb.segments[0].d_max == doctest::Approx(295.0));
  CHECK(cb.segments[1].d_max == doctest::Approx(490.0));
}

TEST_CASE("fit: error paths") {
  CHECK_THROWS_AS(fit_cost_bound({1.0}, {2.0}, {}, 0, 0), std::invalid_argument);
  // All mass on one side of the breakpoint leaves the other segment empty.
  CHECK_THROWS_WITH_AS(
      fit_cost_bound({1, 2, 3, 4, 3.5}, {1, 2, 3, 4, 9}, {3.9}, 0, 0),
      doctest::Contains("empty segment"), std::runtime_error);
  // Zero variance in load is a degenerate fit.
  CHECK_THROWS_WITH_AS(fit_cost_bound({5, 5, 5}, {1, 2, 3}, {}, 0, 0),
                       doctest::Contains("degenerate"), std::runtime_error);
  CHECK_THROWS_AS(fit_cost_bound({1, 2}, {1, 2}, {}, -1.0, 0), std::invalid_argument);
}

TEST_CASE("upper_bound: literal form and segment selection") {
  CostBound cb;
  cb.segments.push_back({-1.35e4, 18.9, 1000.0, 5000.0});
  cb.sigma = 0.02;
  cb.delta = 3.7;
  cb.gamma = 0.0;
  cb.mode = BoundMode::Literal;
  // (1 + delta*sigma) * a0 + (1 + gamma) * b0 * D, evaluated literally.
  const double expect = (1.0 + 3.7 * 0.02) * -1.35e4 + 18.9 * 4000.0;
  CHECK(upper_bound(cb, 4000.0) == doctest::Approx(expect));
  CHECK_THROWS_AS(upper_bound(cb, 9000.0), std::domain_error);
  CHECK_THROWS_AS(upper_bound(cb, 500.0), std::domain_error);

  cb.mode = BoundMode::Additive;
  CHECK(upper_bound(cb, 4000.0) ==
        doctest::Approx(-1.35e4 + 18.9 * 4000.0 + 3.7 * 0.02));
}

TEST_CASE("upper_bound: affine in delta and gamma, monotone in gamma") {
  std::vector<double> loads{100, 200, 300, 400};
  std::vector<double> costs{1200, 2100, 3300, 4100};
  CostBound cb = fit_cost_bound(loads, costs, {}, 1.0, 0.1);
  REQUIRE(cb.segments[0].b0 > 0.0);

  // The bound at fixed D is affine in each conservativeness factor: equal
  // steps in gamma move it by equal amounts (exact identity).
  auto at_gamma = [&](double g) {
    CostBound c = cb;
    c.gamma = g;
    return upper_bound(c, 250.0);
  };
  const double d1 = at_gamma(0.2) - at_gamma(0.1);
  const double d2 = at_gamma(0.3) - at_gamma(0.2);
  CHECK(d1 == doctest::Approx(d2).epsilon(1e-12));
  CHECK(at_gamma(0.3) > at_gamma(0.0));  // increasing for D > 0, b0 > 0

  auto at_delta = [&](double del) {
    CostBound c = cb;
    c.delta = del;
    return upper_bound(c, 250.0);
  };
  const double e1 = at_delta(2.0) - at_delta(1.0);
  const double e2 = at_delta(3.0) - at_delta(2.0);
  CHECK(e1 == doctest::Approx(e2).epsilon(1e-12));
}

TEST_CASE("coverage: large delta covers everything from above") {
  Rng rng(612);
  std::vector<double> loads, costs;
  for (int i = 0; i < 400; ++i) {
    const double d = rng.uniform(100.0, 900.0);
    loads.push_back(d);
    costs.push_back(40.0 + 2.5 * d + rng.gaussian() * 5.0);
  }
  // Positive intercept keeps the literal form's shift upward.
  CostBound cb = fit_cost_bound(loads, costs, {}, 0.0, 0.0, BoundMode::Literal);
  REQUIRE(cb.segments[0].a0 > 0.0);

  CostBound wide = cb;
  wide.delta = 60.0;  // bound far above every sample
  CHECK(coverage(wide, loads, costs) == doctest::Approx(1.0));

  // Delta = 0 with symmetric residuals splits the cloud roughly in half.
  const double mid = coverage(cb, loads, costs);
  CHECK(mid > 0.4);
  CHECK(mid < 0.6);

  // Three-sigma style shift captures every training observation here.
  CostBound shifted = cb;
  shifted.delta = 3.0;
  CHECK(coverage(shifted, loads, costs) == doctest::Approx(1.0));
}

TEST_CASE("bound json round trip") {
  std::vector<double> loads{10, 20, 30, 42, 55, 70};
  std::vector<double> costs{105, 195, 330, 400, 560, 720};
  const CostBound cb = fit_cost_bound(loads, costs, {40.0}, 2.5, 0.05, BoundMode::Additive);
  test::TempDir tmp("bound");
  save_bound(cb, tmp.str("bound.json"));
  const CostBound back = load_bound(tmp.str("bound.json"));
  REQUIRE(back.segments.size() == cb.segments.size());
  CHECK(back.sigma == cb.sigma);
  CHECK(back.delta == cb.delta);
  CHECK(back.gamma == cb.gamma);
  CHECK(back.mode == cb.mode);
  CHECK(back.segments[1].a0 == cb.segments[1].a0);
  CHECK(back.segments[1].b0 == cb.segments[1].b0);
}

TEST_CASE("uc log csv round trip") {
  test::TempDir tmp("uclog");
  write_uc_log(tmp.str("log.csv"), {1.5, 2.5}, {10.0, 20.0});
  const auto [loads, costs] = read_uc_log(tmp.str("log.csv"));
  REQUIRE(loads.size() == 2);
  CHECK(loads[1] == 2.5);
  CHECK(costs[0] == 10.0);
}
