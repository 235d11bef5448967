#include <doctest.h>

#include <fstream>

#include "helpers.hpp"
#include "ucscreen/config.hpp"
#include "ucscreen/pipeline.hpp"

using namespace ucs;

TEST_CASE("config: parses dotted keys, comments, and quoted values") {
  const RunConfig cfg = parse_config_text(R"(
# demo run
network = "net.json"
seed = 9
workers = 2
data.eta = 0.05          # inline comment
data.samples = 240
uncertainty.kind = p1
uncertainty.k = 3
screen.method = d1-ucd
solver.mip_gap = 0.0
bound.delta = 2.5
bound.breakpoints = 100, 250.5
sweep.gamma = 0, 0.1
)");
  CHECK(cfg.network_path == "net.json");
  CHECK(cfg.seed == 9);
  CHECK(cfg.workers == 2);
  CHECK(cfg.eta == 0.05);
  CHECK(cfg.samples == 240);
  CHECK(cfg.set_kind == SetKind::P1);
  CHECK(cfg.k_retained == 3);
  CHECK(cfg.method == Method::D1Ucd);
  CHECK(cfg.delta == 2.5);
  REQUIRE(cfg.breakpoints.size() == 2);
  CHECK(cfg.breakpoints[1] == 250.5);
  REQUIRE(cfg.sweep_gamma.size() == 2);
}

TEST_CASE("config: unknown keys are hard errors") {
  CHECK_THROWS_WITH_AS(parse_config_text("bound.detla = 3.0\n"),
                       doctest::Contains("unknown key"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("data.eta 0.1\n"),
                       doctest::Contains("expected key = value"), std::runtime_error);
  CHECK_THROWS_WITH_AS(parse_config_text("data.eta = zero\n"),
                       doctest::Contains("not a number"), std::runtime_error);
}

TEST_CASE("config: validation catches inconsistent method and set kind") {
  RunConfig cfg = parse_config_text(R"(
network = "net.json"
uncertainty.kind = box
screen.method = d1-ucd
)");
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("conflicts"), std::runtime_error);

  RunConfig ok = parse_config_text(R"(
network = "net.json"
uncertainty.kind = p2
screen.method = d2-ucd
)");
  CHECK_NOTHROW(ok.validate());
}

TEST_CASE("pipeline: smoke run produces every artifact deterministically") {
  Rng rng(220);
  Network net;
  do {
    net = test::random_network(rng);
  } while (!test::box_region_feasible(net));

  test::TempDir tmp("pipe");
  save_network(net, tmp.str("net.json"));

  auto config_for = [&](const std::string& out) {
    RunConfig cfg;
    cfg.network_path = tmp.str("net.json");
    cfg.out_dir = tmp.str(out);
    cfg.seed = 77;
    cfg.eta = 0.05;
    cfg.samples = 120;
    cfg.train_fraction = 0.8;
    cfg.set_kind = SetKind::P1;
    cfg.method = Method::D1Ucd;
    cfg.bound_fit_instances = 24;
    cfg.test_instances = 5;
    cfg.sweep_k_percent = {50, 100};
    cfg.sweep_gamma = {0.0, 0.2};
    return cfg;
  };

  run_pipeline(config_for("out1"));
  for (const char* artifact :
       {"scenarios/observations.csv", "scenarios/forecasts.csv", "set.json", "bound.json",
        "uc_log.csv", "result.json", "report.json", "fig2_cost_scatter.csv",
        "fig3_k_sweep.csv", "fig4_gamma_sweep.csv"}) {
    CHECK_MESSAGE(std::filesystem::exists(tmp.path / "out1" / artifact), artifact);
  }

  // Same seed, second run: byte-identical artifacts except wall-time fields.
  run_pipeline(config_for("out2"));
  auto slurp = [](const std::filesystem::path& p) {
    std::ifstream in(p);
    return std::string((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
  };
  for (const char* stable : {"scenarios/observations.csv", "set.json", "bound.json",
                             "uc_log.csv", "fig4_gamma_sweep.csv"}) {
    CHECK_MESSAGE(slurp(tmp.path / "out1" / stable) == slurp(tmp.path / "out2" / stable),
                  stable);
  }
}

TEST_CASE("pipeline: failures carry the stage name") {
  RunConfig cfg;
  cfg.network_path = "/nonexistent/net.json";
  test::TempDir tmp("pipefail");
  cfg.out_dir = tmp.str("out");
  CHECK_THROWS_WITH_AS(run_pipeline(cfg), doctest::Contains("stage 'network'"),
                       std::runtime_error);
}
