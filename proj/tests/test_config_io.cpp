#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include <json.hpp>

#include "zerohit/commands.hpp"
#include "zerohit/config.hpp"
#include "zerohit/io.hpp"

using namespace zerohit;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string error_of(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("zerohit_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("numbers round-trip") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5, 12345678.9, 0.0}) {
    CHECK(std::stod(format_number(v)) == v);
  }
  CHECK(format_number(0.25) == "0.25");
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(format_number(std::numeric_limits<double>::quiet_NaN()) == "nan");
}

TEST_CASE("fnv1a hash") {
  // Published FNV-1a 64-bit test vectors.
  CHECK(fnv1a_hex("") == "cbf29ce484222325");
  CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
  CHECK(fnv1a_hex("foobar") == "85944171f73967e8");
}

TEST_CASE("empty config gives the defaults") {
  const RunConfig cfg = parse_config(R"({"schema_version": 1})");
  CHECK(cfg.seed == 1);
  CHECK(cfg.flow.max_step == 1.0 / 64.0);
  CHECK(cfg.weld.kappas.size() == 5);
  CHECK(config_hash(cfg) == config_hash(RunConfig{}));
}

TEST_CASE("config values are read") {
  const RunConfig cfg = parse_config(R"({
    "schema_version": 1, "seed": 99,
    "flow": {"step_factor": 0.001},
    "weld": {"kappas": [0.5, 1.5], "xs": [0, 1]},
    "walk": {"events": [{"x": 0.1, "k": 10, "lambda": 2}]}
  })");
  CHECK(cfg.seed == 99);
  CHECK(cfg.flow.step_factor == 0.001);
  CHECK(cfg.weld.kappas == std::vector<double>{0.5, 1.5});
  REQUIRE(cfg.walk.events.size() == 1);
  CHECK(cfg.walk.events[0].k == 10);
  CHECK(config_hash(cfg) != config_hash(RunConfig{}));
  CHECK(parse_config(canonical_json(cfg)).seed == 99);
  CHECK(config_hash(parse_config(canonical_json(cfg))) == config_hash(cfg));
}

TEST_CASE("config errors name the field") {
  CHECK(error_of(R"({})").find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 2})").find("schema_version") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "bogus": 1})").find("bogus") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "flow": {"stepfactor": 1}})").find("flow.stepfactor") !=
        std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "verify_law": {"deltas": [0.5]}})")
            .find("verify_law.deltas[0]") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "weld": {"kappas": [5]}})").find("weld.kappas") !=
        std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "seed": -3})").find("seed") != std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "trace": {"y_probe": 0.5}})").find("trace.y_probe") !=
        std::string::npos);
  CHECK(error_of(R"({"schema_version": 1, "walk": {"events": [{"x": 1, "q": 2}]}})")
            .find("walk.events[0].q") != std::string::npos);
  CHECK_FALSE(error_of("{not json").empty());
  CHECK_THROWS_AS(load_config("/nonexistent/zerohit.json"), ConfigError);
}

TEST_CASE("csv writer") {
  const fs::path dir = fresh_dir("csv");
  {
    CsvWriter csv(dir / "a.csv", {"x", "name", "ok"}, {"demo", 7, "abc"});
    csv << 0.5 << "p" << true;
    csv.end_row();
    csv << 1.0 / 3.0 << std::string("q,r") << false;
    csv.end_row();
  }
  const std::string text = slurp(dir / "a.csv");
  CHECK(text.rfind("# zerohit demo seed=7 config_hash=abc\nx,name,ok\n0.5,p,1\n", 0) == 0);
  CHECK(text.find("\"q,r\"") != std::string::npos);
  {
    CsvWriter csv(dir / "b.csv", {"x", "y"}, {"demo", 7, "abc"});
    csv << 1.0;
    CHECK_THROWS(csv.end_row());
  }
}

TEST_CASE("svg output") {
  const fs::path dir = fresh_dir("svg");
  LinePlot plot{"t", "x", "y", {{"s", {0.0, 1.0}, {0.0, 2.0}}}, true};
  write_line_svg(dir / "p.svg", plot, {"demo", 1, "h"});
  const std::string svg = slurp(dir / "p.svg");
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("zerohit demo seed=1 config_hash=h") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);

  HeatMap map{"m", "x", "y", {0.0, 1.0}, {0.0, 1.0}, {{1.0, 2.0}, {NAN, 4.0}}, true};
  write_heatmap_svg(dir / "m.svg", map, {"demo", 1, "h"});
  CHECK(slurp(dir / "m.svg").find("</svg>") != std::string::npos);
}

TEST_CASE("selftest command") {
  CommandContext ctx;
  ctx.out_dir = fresh_dir("selftest");
  CHECK(cmd_selftest(ctx) == 0);
}

TEST_CASE("trace command writes its files") {
  RunConfig cfg;
  cfg.trace.points = 5;
  CommandContext ctx;
  ctx.out_dir = fresh_dir("trace");
  CHECK(cmd_trace(cfg, ctx) == 0);
  const std::string csv = slurp(ctx.out_dir / "trace.csv");
  CHECK(csv.rfind("# zerohit trace seed=1 config_hash=" + config_hash(cfg), 0) == 0);
  const nlohmann::json report = nlohmann::json::parse(slurp(ctx.out_dir / "trace_report.json"));
  CHECK(report.contains("pass"));
  CHECK(fs::exists(ctx.out_dir / "trace.svg"));
}
