#include <string>

#include "doctest.h"
#include "proxuc/config.hpp"
#include "proxuc/errors.hpp"

using namespace proxuc;

namespace {

int error_line(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.line;
  }
  return -1;
}

}  // namespace

TEST_CASE("full config round trip") {
  const std::string text = R"(# batch of two checks
[run]
out_dir = "my reports"
workers = 3

[tabulate]
out_dir = tables

[check uc-main]   # trailing comment on a header
kind = uniform_continuity
space_p = 4
dim = 3
young = exp
young_p = 2.5
objective = quadratic
prox_kind = pr
variant = lambda_dependent
center = [0.5, -0.25, 0]
ball_radius = 2.0
eps_grid = [0.5, 1.0, 1.5]
lam_grid = [1, 0.3, 0.1]
samples = 250
seed = 42
tol = 1e-7
budget = 50000
grid_backstop = false
hoelder_r = 3.5

[check vi-grid]
kind = variational_inequality
grid_backstop = true
)";
  Config cfg = parse_config_text(text);
  CHECK(cfg.run.out_dir == "my reports");
  CHECK(cfg.run.workers == 3);
  CHECK(cfg.tabulate.out_dir == "tables");
  REQUIRE(cfg.run.checks.size() == 2);

  const CheckSpec& a = cfg.run.checks[0];
  CHECK(a.name == "uc-main");
  CHECK(a.kind == CheckKind::UniformContinuity);
  CHECK(a.space_p == 4.0);
  CHECK(a.dim == 3);
  CHECK(a.young == "exp");
  CHECK(a.young_p == 2.5);
  CHECK(a.objective == "quadratic");
  CHECK(a.prox_kind == "pr");
  CHECK(a.variant == "lambda_dependent");
  REQUIRE(a.center.size() == 3);
  CHECK(a.center[0] == 0.5);
  CHECK(a.center[1] == -0.25);
  CHECK(a.center[2] == 0.0);
  CHECK(a.ball_radius == 2.0);
  CHECK(a.eps_grid == std::vector<double>{0.5, 1.0, 1.5});
  CHECK(a.lam_grid == std::vector<double>{1.0, 0.3, 0.1});
  CHECK(a.samples == 250);
  CHECK(a.seed == 42);
  CHECK(a.tol == 1e-7);
  CHECK(a.budget == 50000);
  CHECK(a.grid_backstop == false);
  CHECK(a.hoelder_r == 3.5);

  const CheckSpec& b = cfg.run.checks[1];
  CHECK(b.name == "vi-grid");
  CHECK(b.kind == CheckKind::VariationalInequality);
  CHECK(b.grid_backstop == true);
  // untouched keys keep their defaults
  CHECK(b.space_p == 2.0);
  CHECK(b.dim == 2);
  CHECK(b.samples == 1000);
  CHECK(b.budget == 200000);
}

TEST_CASE("defaults when sections are absent") {
  Config cfg = parse_config_text("[check only]\nkind = nonexpansiveness\n");
  CHECK(cfg.run.out_dir == "reports");
  CHECK(cfg.run.workers == 0);
  CHECK(cfg.tabulate.out_dir == "tables");
  REQUIRE(cfg.run.checks.size() == 1);
  CHECK(cfg.run.checks[0].kind == CheckKind::Nonexpansiveness);
}

TEST_CASE("every check kind name parses back") {
  for (CheckKind k : all_check_kinds()) {
    const std::string text =
        std::string("[check k]\nkind = ") + check_kind_name(k) + "\n";
    Config cfg = parse_config_text(text);
    REQUIRE(cfg.run.checks.size() == 1);
    CHECK(cfg.run.checks[0].kind == k);
  }
}

TEST_CASE("errors carry the offending line number") {
  CHECK(error_line("[run]\nworkers = 1\nbogus = 2\n") == 3);
  CHECK(error_line("[run]\nout_dir = x\n[woops]\n") == 3);
  CHECK(error_line("stray = 1\n") == 1);
  CHECK(error_line("[check a]\nkind = uniform_continuity\nsamples = many\n") == 3);
  CHECK(error_line("[check a]\nkind = teleportation\n") == 2);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\neps_grid = [0.5, oops]\n") == 3);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\neps_grid = []\n") == 3);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\neps_grid = 0.5\n") == 3);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\ngrid_backstop = maybe\n") == 3);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\nseed = -4\n") == 3);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\ntol = \n") == 3);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\nno_equals_here\n") == 3);
  CHECK(error_line("[check a]\nkind = sweep_monotonicity\n[check a]\nkind = sweep_monotonicity\n") == 3);
  CHECK(error_line("[check bad name!]\nkind = sweep_monotonicity\n") == 1);
  CHECK(error_line("[run\nworkers = 1\n") == 1);
  CHECK(error_line("[run]\nworkers = -2\n") == 2);
  CHECK(error_line("[run]\n= 3\n") == 2);
}

TEST_CASE("check without kind is rejected") {
  // at end of file
  CHECK(error_line("[check last]\nsamples = 10\n") == 1);
  // in the middle, reported at its own header line
  CHECK(error_line("[run]\nworkers = 1\n[check mid]\nsamples = 10\n[run]\n") == 3);
}

TEST_CASE("unknown kind message lists the known ones") {
  try {
    parse_config_text("[check a]\nkind = warp\n");
    CHECK(false);
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("uniform_continuity") != std::string::npos);
    CHECK(msg.find("modulus_inequalities") != std::string::npos);
  }
}

TEST_CASE("comments and quoting") {
  Config cfg = parse_config_text(
      "[run]\n"
      "out_dir = \"dir # not a comment\"  # this one is\n"
      "[check a]\n"
      "kind = duality_monotonicity\n"
      "objective = \"l1\"\n");
  CHECK(cfg.run.out_dir == "dir # not a comment");
  CHECK(cfg.run.checks[0].objective == "l1");
  CHECK(error_line("[run]\nout_dir = \"open\n") == 2);
}

TEST_CASE("origin prefixes the message and missing file throws") {
  try {
    parse_config_text("[run]\nbogus = 1\n", "conf/my.cfg");
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).rfind("conf/my.cfg:2:", 0) == 0);
    CHECK(e.line == 2);
  }
  CHECK_THROWS_AS(parse_config_file("/nonexistent/path.cfg"), ConfigError);
}

TEST_CASE("parsed spec feeds run_check") {
  Config cfg = parse_config_text(
      "[check tiny-vi]\n"
      "kind = variational_inequality\n"
      "objective = quadratic\n"
      "lam_grid = [1.0, 0.3]\n"
      "samples = 200\n"
      "seed = 7\n");
  CheckOutcome out = run_check(cfg.run.checks[0]);
  CHECK(out.pass);
  CHECK(out.samples == 200);
  CHECK(out.violations == 0);
}
