#include "doctest.h"
#include "ringbec/config.hpp"
#include "ringbec/error.hpp"

using namespace ringbec;

namespace {

ErrorCode code_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::IoError;
}

}  // namespace

TEST_CASE("empty text yields the defaults") {
  const RunConfig c = parse_config("");
  CHECK(c.a1 == 0.5);
  CHECK(c.a2 == 0.7);
  CHECK(c.omega == 1.0);
  CHECK(c.beta_frac_list == std::vector<double>{0.90, 0.93, 0.95});
  CHECK(c.grid_n == 256);
  CHECK(c.grid_extent == 4.0);
  CHECK(c.init_mode == InitMode::Predicted);
  CHECK(c.blowup_n == 256);
  CHECK(c.blowup_extent == 20.0);
  CHECK(c.wants_format("json"));
  CHECK(c.wants_format("csv"));
}

TEST_CASE("all keys parse with comments, brackets and whitespace") {
  const std::string text =
      "# sweep near the threshold\n"
      "a1 = 0.4\n"
      "  a2=0.6   # trailing comment\n"
      "omega = 0.5\n"
      "beta_frac_list = [0.9, 0.95 ,0.99]\n"
      "grid.n = 128\n"
      "grid.extent = 3.5\n"
      "solver.tol = 1e-9\n"
      "solver.max_iter = 500\n"
      "solver.seed = 42\n"
      "init.mode = resume\n"
      "io.outdir = /tmp/run a\n"
      "blowup.n = 512\n"
      "blowup.extent = 16\n"
      "report.formats = csv\n"
      "soliton.r_max = 12\n"
      "workers = 3\n";
  const RunConfig c = parse_config(text);
  CHECK(c.a1 == 0.4);
  CHECK(c.a2 == 0.6);
  CHECK(c.omega == 0.5);
  CHECK(c.beta_frac_list == std::vector<double>{0.9, 0.95, 0.99});
  CHECK(c.grid_n == 128);
  CHECK(c.grid_extent == 3.5);
  CHECK(c.solver_tol == 1e-9);
  CHECK(c.solver_max_iter == 500);
  CHECK(c.solver_seed == 42);
  CHECK(c.init_mode == InitMode::Resume);
  CHECK(c.io_outdir == "/tmp/run a");
  CHECK(c.blowup_n == 512);
  CHECK(c.blowup_extent == 16.0);
  CHECK(c.report_formats == std::vector<std::string>{"csv"});
  CHECK_FALSE(c.wants_format("json"));
  CHECK(c.soliton_r_max == 12.0);
  CHECK(c.workers == 3);
}

TEST_CASE("canonical echo is a fixed point") {
  const RunConfig c = parse_config("a1=0.45\nbeta_frac_list=0.9,0.97\nsolver.tol=3e-9\n");
  const std::string t1 = canonical_text(c);
  const std::string t2 = canonical_text(parse_config(t1));
  CHECK(t1 == t2);
  CHECK(config_hash(c) == config_hash(parse_config(t1)));
  CHECK(config_hash(c).size() == 16);
  CHECK(t1.find("a1 = 0.45\n") != std::string::npos);
  CHECK(t1.find("beta_frac_list = 0.9, 0.97\n") != std::string::npos);
}

TEST_CASE("hash tracks results-relevant keys only") {
  const RunConfig base = parse_config("");
  CHECK(config_hash(base) != config_hash(parse_config("a1 = 0.51\n")));
  CHECK(config_hash(base) != config_hash(parse_config("grid.n = 512\n")));
  CHECK(config_hash(base) == config_hash(parse_config("io.outdir = elsewhere\nworkers = 4\n")));
}

TEST_CASE("malformed input is rejected as a config error") {
  CHECK(code_of("colour = blue\n") == ErrorCode::ConfigError);
  CHECK(code_of("a1 = 0.5\na1 = 0.6\n") == ErrorCode::ConfigError);
  CHECK(code_of("a1 0.5\n") == ErrorCode::ConfigError);
  CHECK(code_of("a1 = half\n") == ErrorCode::ConfigError);
  CHECK(code_of("a1 = 1.2\n") == ErrorCode::ConfigError);
  CHECK(code_of("a1 =\n") == ErrorCode::ConfigError);
  CHECK(code_of("grid.n = 100\n") == ErrorCode::ConfigError);
  CHECK(code_of("grid.n = -4\n") == ErrorCode::ConfigError);
  CHECK(code_of("beta_frac_list = 0.95, 0.9\n") == ErrorCode::ConfigError);
  CHECK(code_of("beta_frac_list = 0.9, 1.0\n") == ErrorCode::ConfigError);
  CHECK(code_of("beta_frac_list = [0.9, 0.95\n") == ErrorCode::ConfigError);
  CHECK(code_of("beta_frac_list = 0.9,,0.95\n") == ErrorCode::ConfigError);
  CHECK(code_of("init.mode = random\n") == ErrorCode::ConfigError);
  CHECK(code_of("report.formats = json, pdf\n") == ErrorCode::ConfigError);
  CHECK(code_of("solver.tol = nan\n") == ErrorCode::ConfigError);
  CHECK(code_of("soliton.r_max = 5\n") == ErrorCode::ConfigError);
  CHECK(exit_code_for(ErrorCode::ConfigError) == 2);
}

TEST_CASE("missing config file is a config error") {
  try {
    load_config("/nonexistent/ringbec.conf");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigError);
  }
}
