#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>

#include "kvn/io.hpp"
#include "kvn/pipeline.hpp"

using namespace kvn;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = KVN_SCENARIO_DIR;

fs::path temp_dir(const std::string& tag) {
  const fs::path p = fs::temp_directory_path() / ("kvn_pipeline_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const fs::path p = dir / "scenario.cfg";
  write_atomic(p, text);
  return p;
}

}  // namespace

TEST_CASE("run writes every artifact for the zero field") {
  const fs::path dir = temp_dir("zero");
  std::ostringstream out, err;
  CHECK(run_command(kScenarios / "zero_field.cfg", dir, out, err) == kExitPass);
  for (const char* name : {"series.kvnf", "norms.csv", "classification.csv", "report.txt"}) {
    CAPTURE(name);
    CHECK(fs::exists(dir / name));
  }
  CHECK(out.str() == read_file(dir / "report.txt"));
  CHECK(out.str().find("status=pass") != std::string::npos);
  const SeriesFile s = decode_series(read_file(dir / "series.kvnf"));
  CHECK(s.n == 32 * 32);
  CHECK(s.dim == 2);
  CHECK(s.states.front() == s.states.back());
  fs::remove_all(dir);
}

TEST_CASE("invalid configs exit with the usage code and write nothing") {
  const fs::path dir = temp_dir("bad");
  const fs::path cfg = write_config(dir, read_file(kScenarios / "zero_field.cfg") + "t_end = -1\n");
  std::ostringstream out, err;
  const fs::path out_dir = dir / "out";
  CHECK(run_command(cfg, out_dir, out, err) == kExitUsage);
  CHECK(err.str().find("t_end") != std::string::npos);
  CHECK_FALSE(fs::exists(out_dir));
  CHECK(check_command(dir / "missing.cfg", out, err) == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("outflow is reported as a warning, not a failure") {
  std::ostringstream out, err;
  CHECK(check_command(kScenarios / "outflow_interval.cfg", out, err) == kExitPass);
  CHECK(out.str().find("no_outflow=violated") != std::string::npos);
  CHECK(err.str().find("WARNING") != std::string::npos);
}

TEST_CASE("converge on the zero field reports exact orders") {
  const fs::path dir = temp_dir("converge");
  std::ostringstream out, err;
  CHECK(converge_command(kScenarios / "zero_field.cfg", std::nullopt, dir, out, err) == kExitPass);
  CHECK(fs::exists(dir / "convergence.csv"));
  CHECK(fs::exists(dir / "orders.csv"));
  const std::string report = read_file(dir / "convergence_report.txt");
  CHECK(report.find("order.oracle_l2_error=exact") != std::string::npos);
  CHECK(converge_command(kScenarios / "zero_field.cfg", std::vector<int>{16}, dir, out, err) == kExitUsage);
  CHECK(converge_command(kScenarios / "zero_field.cfg", std::vector<int>{32, 16}, dir, out, err) == kExitUsage);
  fs::remove_all(dir);
}

TEST_CASE("thread count comes from the environment") {
  ::unsetenv("KVN_THREADS");
  CHECK(thread_count_from_env() == 1);
  ::setenv("KVN_THREADS", "3", 1);
  CHECK(thread_count_from_env() == 3);
  ::setenv("KVN_THREADS", "many", 1);
  CHECK_THROWS_AS(thread_count_from_env(), ConfigError);
  std::ostringstream out, err;
  CHECK(check_command(kScenarios / "zero_field.cfg", out, err) == kExitUsage);
  ::unsetenv("KVN_THREADS");
}

TEST_CASE("runs are deterministic") {
  const fs::path a = temp_dir("det_a"), b = temp_dir("det_b");
  std::ostringstream out, err;
  REQUIRE(run_command(kScenarios / "logistic1d.cfg", a, out, err) == kExitPass);
  REQUIRE(run_command(kScenarios / "logistic1d.cfg", b, out, err) == kExitPass);
  for (const char* name : {"series.kvnf", "norms.csv", "report.txt"}) {
    CAPTURE(name);
    CHECK(read_file(a / name) == read_file(b / name));
  }
  fs::remove_all(a);
  fs::remove_all(b);
}
