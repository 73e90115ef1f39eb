#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <sstream>
#include <unistd.h>

#include <json.hpp>

#include "gkdv/error.hpp"
#include "gkdv/io.hpp"
#include "gkdv/random.hpp"
#include "gkdv/run.hpp"
#include "support.hpp"

using namespace gkdv;
using gkdv::testing::grid;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("gkdv_unit_" + std::to_string(::getpid())) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("binary container round trip") {
  const GridSpec g = grid(12.5, 64, 0.02, 3);
  Rng rng(90);
  Path u = Path::zeros(g);
  for (auto& s : u.snapshots) s = white_noise(g, rng);
  const std::string bytes = io::encode_path(u);
  CHECK(bytes.substr(0, 8) == "GKDVPATH");
  CHECK(bytes.size() == 8 + 4 + 4 + 8 + 8 + 8 + 8 + 32 + 4 * 64 * 8);
  const Path back = io::decode_path(bytes);
  CHECK(back.grid.length == g.length);
  CHECK(back.grid.points == g.points);
  CHECK(back.grid.dt == g.dt);
  CHECK(back.grid.steps == g.steps);
  for (std::size_t k = 0; k < u.size(); ++k) CHECK(back.snapshots[k].values == u.snapshots[k].values);

  const Field f = u.snapshots[1];
  CHECK(io::decode_field(io::encode_field(f)).values == f.values);
  CHECK_THROWS_AS(io::decode_field(bytes), ValidationError);

  std::string bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS_AS(io::decode_path(bad), ValidationError);
  CHECK_THROWS_AS(io::decode_path(bytes.substr(0, bytes.size() - 8)), ValidationError);
  std::string tag = bytes;
  tag[48] = '?';
  CHECK_THROWS_AS(io::decode_path(tag), ValidationError);
}

TEST_CASE("text output") {
  CHECK(io::format_number(0.1) == "0.1");
  CHECK(io::format_number(1e-300) == "1e-300");
  CHECK(io::format_number(-3.0) == "-3");
  io::Table t{{"a", "b"}, {{1.0, 0.25}, {2.0, -1e-5}}};
  CHECK(io::table_csv(t) == "a,b\n1,0.25\n2,-1e-05\n");

  const Path u = Path::zeros(grid(4.0, 4, 0.5, 1));
  const std::string csv = io::path_csv(u);
  CHECK(csv.rfind("t,x,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 2 * 4);
}

TEST_CASE("atomic writes") {
  const fs::path dir = scratch("atomic");
  const fs::path target = dir / "nested" / "report.json";
  io::write_atomic(target, "first");
  io::write_atomic(target, "second");
  CHECK(io::read_file(target) == "second");
  std::size_t files = 0;
  for ([[maybe_unused]] const auto& e : fs::directory_iterator(dir / "nested")) ++files;
  CHECK(files == 1);
}

TEST_CASE("configuration parsing and layering") {
  const cli::KeyValues parsed = cli::parse_config_text("# comment\n p = 7 \n\ntrials=3 # trailing\n");
  CHECK(parsed.at("p") == "7");
  CHECK(parsed.at("trials") == "3");
  try {
    cli::parse_config_text("p = 5\nnonsense\np = 6\n");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 2") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }

  const cli::RunConfig cfg = cli::resolve("verify-strichartz", {{"trials", "5"}, {"q", "8"}}, {{"trials", "9"}});
  CHECK(cfg.integer("trials") == 9);
  CHECK(cfg.real("q") == 8.0);
  CHECK(cfg.integer("num_points") == 32768);
}

TEST_CASE("validation errors are aggregated") {
  try {
    cli::resolve("picard", {}, {{"p", "3"}, {"num_points", "100"}, {"format", "xml"}});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("p >= 5") != std::string::npos);
    CHECK(msg.find("num_points") != std::string::npos);
    CHECK(msg.find("format") != std::string::npos);
  }
  CHECK_THROWS_AS(cli::resolve("picard", {}, {{"no_such_key", "1"}}), ValidationError);
  CHECK_THROWS_AS(cli::resolve("fly", {}, {}), ValidationError);
}

TEST_CASE("dry run and output directory") {
  cli::RunConfig cfg = cli::resolve("verify-bilinear", {}, {{"out_dir", "somewhere"}});
  cfg.dry_run = true;
  std::ostringstream out, err;
  CHECK(cli::run(cfg, out, err) == cli::kOk);
  CHECK(out.str().find("bands:") != std::string::npos);
  CHECK(out.str().find("estimated memory") != std::string::npos);
  CHECK_FALSE(fs::exists("somewhere"));

  cli::RunConfig plain = cli::resolve("norms", {}, {});
  ::setenv("GKDV_OUT_DIR", "from_env", 1);
  CHECK(cli::output_directory(plain) == "from_env");
  ::unsetenv("GKDV_OUT_DIR");
  CHECK(cli::output_directory(plain) == "gkdv_out");
}

TEST_CASE("reports embed config and status") {
  const fs::path dir = scratch("reports");
  const cli::RunConfig cfg =
      cli::resolve("norms", {}, {{"num_points", "256"}, {"domain_length", "40"}, {"out_dir", dir.string()}});
  std::ostringstream out, err;
  REQUIRE(cli::run(cfg, out, err) == cli::kOk);
  const std::string first = io::read_file(dir / "norms.json");
  const auto j = nlohmann::json::parse(first);
  CHECK(j["schema_version"] == cli::kSchemaVersion);
  CHECK(j["version"] == cli::kVersion);
  CHECK(j["status"] == "ok");
  CHECK(j["config"]["num_points"] == 256);
  REQUIRE(cli::run(cfg, out, err) == cli::kOk);
  CHECK(io::read_file(dir / "norms.json") == first);
}

TEST_CASE("numerical failure writes a report and exits 3") {
  const fs::path dir = scratch("failure");
  const cli::RunConfig cfg = cli::resolve("picard", {}, {{"num_points", "256"}, {"domain_length", "64"},
                                                          {"horizon", "0.5"}, {"amplitude", "40"},
                                                          {"out_dir", dir.string()}});
  std::ostringstream out, err;
  CHECK(cli::run(cfg, out, err) == cli::kNumerical);
  const auto j = nlohmann::json::parse(io::read_file(dir / "picard.json"));
  CHECK(j["status"] != "ok");
}
