#include <doctest.h>

#include <sstream>

#include "dsm/study.hpp"

using namespace dsm;

namespace {

// CSV with the wall_time column stripped, for determinism comparisons
std::string stable_csv(const std::vector<StudyRow>& rows) {
  std::ostringstream os;
  write_csv(rows, os);
  std::istringstream is(os.str());
  std::string line, out;
  while (std::getline(is, line)) {
    const auto pos = line.rfind(',');
    out += line.substr(0, pos);
    out += '\n';
  }
  return out;
}

}  // namespace

TEST_CASE("config parsing: defaults") {
  const auto cfg = parse_config("problem=identity\ndelta=1e-2\n");
  CHECK(cfg.problem == "identity");
  CHECK(cfg.d == 3.0);
  CHECK(cfg.c == 1.0);
  CHECK(cfg.b == 0.5);
  CHECK(cfg.C == 1.5);
  CHECK(cfg.zeta == 0.9);
  REQUIRE(cfg.deltas.size() == 1);
  CHECK(cfg.deltas[0] == 1e-2);
  REQUIRE(cfg.seeds.size() == 3);
  CHECK(cfg.seeds[0] == 101);
}

TEST_CASE("config parsing: lists, comments, errors") {
  const auto cfg = parse_config(
      "# sweep\nproblem = identity\ndelta = 1e-2, 1e-3\nseeds=7,8\n"
      "t_max=1e5 # generous\n");
  REQUIRE(cfg.deltas.size() == 2);
  CHECK(cfg.deltas[1] == 1e-3);
  CHECK(cfg.seeds == std::vector<unsigned>{7, 8});
  CHECK(cfg.t_max == 1e5);

  CHECK_THROWS_WITH_AS(parse_config("delta=1e-2\nb=1.5\n"),
                       doctest::Contains("b in (0,1)"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("problem=identity\n"),
                       doctest::Contains("delta list is required"),
                       std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("delta=1e-2\nwhat=3\n"),
                       doctest::Contains("line 2"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("delta=1e-2\nnot a pair\n"),
                       doctest::Contains("key=value"), std::invalid_argument);
  CHECK_THROWS_WITH_AS(parse_config("delta=abc\n"),
                       doctest::Contains("bad number"), std::invalid_argument);
  // delta list must be strictly decreasing
  CHECK_THROWS_AS(parse_config("delta=1e-3,1e-2\n"), std::invalid_argument);
  // C delta^zeta > delta must hold for all listed deltas
  CHECK_THROWS_AS(parse_config("delta=1e-2\nC=0.5\nzeta=1\n"),
                  std::invalid_argument);
  // with init checks on (the default) the schedule must pass the q bound
  CHECK_THROWS_AS(parse_config("delta=1e-2\nd=1\n"), std::invalid_argument);
}

TEST_CASE("study runs: ordering, stopping, determinism") {
  StudyConfig cfg;
  cfg.problem = "identity";
  cfg.deltas = {1e-1, 1e-2};
  cfg.seeds = {102, 101};
  cfg.workers = 2;
  const auto res = run_study(cfg);
  REQUIRE(res.rows.size() == 4);
  // (delta desc, seed order as given)
  CHECK(res.rows[0].delta == 1e-1);
  CHECK(res.rows[1].delta == 1e-1);
  CHECK(res.rows[2].delta == 1e-2);
  CHECK(res.rows[0].seed == 102);
  CHECK(res.rows[1].seed == 101);
  for (const auto& r : res.rows) {
    CAPTURE(r.delta);
    CAPTURE(r.seed);
    CHECK(r.status == "ok");
    const double thr = cfg.C * std::pow(r.delta, cfg.zeta);
    CHECK(std::abs(r.discrepancy_at_stop - thr) <= 1e-9 * thr);
    CHECK(r.t_delta > 0.0);
    CHECK(r.init_summary.find("premise=1") != std::string::npos);
  }
  // smaller delta stops later and lands closer to the solution
  CHECK(res.rows[2].t_delta > res.rows[0].t_delta);
  CHECK(res.rows[2].error < res.rows[0].error);

  const auto res2 = run_study(cfg);
  CHECK(stable_csv(res.rows) == stable_csv(res2.rows));
}

TEST_CASE("study records failures without aborting") {
  StudyConfig cfg;
  cfg.problem = "identity";
  cfg.deltas = {1e-2};
  cfg.seeds = {101};
  cfg.t_max = 0.25;  // guarantees a timeout
  const auto res = run_study(cfg);
  REQUIRE(res.rows.size() == 1);
  CHECK(res.rows[0].status.rfind("failed:", 0) == 0);
}

TEST_CASE("csv layout") {
  StudyRow r;
  r.delta = 1e-2;
  r.seed = 101;
  r.t_delta = 12.5;
  r.error = 0.25;
  r.discrepancy_at_stop = 0.0237;
  r.a_at_stop = 0.81;
  r.status = "failed: a, b";  // commas must not break the row
  r.wall_time_ms = 3.0;
  std::ostringstream os;
  write_csv({r}, os);
  std::istringstream is(os.str());
  std::string header, line;
  std::getline(is, header);
  CHECK(header ==
        "delta,seed,t_delta,error,discrepancy_at_stop,a_at_stop,status,"
        "wall_time_ms");
  std::getline(is, line);
  std::size_t commas = 0;
  for (char ch : line) commas += ch == ',';
  CHECK(commas == 7);
  CHECK(line.find("0.01,101,12.5,0.25,") == 0);
}
