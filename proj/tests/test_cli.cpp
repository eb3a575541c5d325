#include <doctest.h>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <random>
#include <sstream>
#include <unistd.h>

#include "cli/config.hpp"
#include "cli/output.hpp"
#include "cli/scenarios.hpp"

using namespace effmap::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("effmap_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Json run(const Json& user, const fs::path& dir, std::vector<std::string> overrides = {}) {
  Json cfg = merge_config(user);
  for (const auto& o : overrides) apply_override(cfg, o);
  run_scenario(cfg, dir, "test");
  return Json::parse(slurp(dir / "summary.json"));
}

int tool(const std::string& args) {
  const std::string cmd = std::string(EFFMAP_TOOL_PATH) + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

}  // namespace

TEST_CASE("config merging rejects unknown keys and wrong types") {
  CHECK_THROWS_AS(merge_config(Json{{"scenario", "no-such"}}), ConfigError);
  CHECK_THROWS_AS(merge_config(Json{{"optical", Json::object()}}), ConfigError);
  CHECK_THROWS_AS(merge_config(Json{{"scenario", "membrane-dde"}, {"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(merge_config(Json{{"scenario", "membrane-dde"}, {"membrane", {{"mm", 2}}}}), ConfigError);
  CHECK_THROWS_AS(merge_config(Json{{"scenario", "membrane-dde"}, {"membrane", {{"m", 2.5}}}}), ConfigError);
  CHECK_THROWS_AS(merge_config(Json{{"scenario", "membrane-dde"}, {"model", 3}}), ConfigError);

  const Json c = merge_config(Json{{"scenario", "membrane-dde"}, {"membrane", {{"m", 6}, {"w0_m", 1}}}});
  CHECK(c["membrane"]["m"] == 6);
  CHECK(c["membrane"]["w0_m"].is_number_float());
  CHECK(c["membrane"]["n"] == 1);
  for (const std::string& s : scenario_names()) CHECK_NOTHROW(default_config(s));
}

TEST_CASE("dotted overrides") {
  Json c = merge_config(Json{{"scenario", "membrane-dde"}});
  apply_override(c, "membrane.m=4");
  apply_override(c, "weighting.kind=blocked-qpd");
  apply_override(c, "weighting.block_over_wd=0.5");
  apply_override(c, "wire_scan.enabled=true");
  CHECK(c["membrane"]["m"] == 4);
  CHECK(c["weighting"]["kind"] == "blocked-qpd");
  CHECK(c["weighting"]["block_over_wd"] == 0.5);
  CHECK(c["wire_scan"]["enabled"] == true);
  CHECK_THROWS_AS(apply_override(c, "membrane.q=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "membrane.m"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "membrane..m=1"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "scenario=dipole-irp"), ConfigError);
  CHECK_THROWS_AS(apply_override(c, "membrane.m=two"), ConfigError);
}

TEST_CASE("CSV doubles round-trip bit for bit") {
  std::mt19937_64 rng(5);
  Table t{{"a", "b"}, {}};
  std::vector<double> values;
  for (int i = 0; i < 2000; ++i) {
    const double v = std::bit_cast<double>(rng());
    if (!std::isfinite(v)) continue;
    values.push_back(v);
  }
  values.insert(values.end(), {0.0, -0.0, 1e-308, 5e-324, 1.7976931348623157e308, 0.1, 1.0 / 3.0});
  if (values.size() % 2) values.push_back(2.0);
  for (std::size_t i = 0; i < values.size(); i += 2) t.add({values[i], values[i + 1]});
  const auto records = parse_csv(to_csv(t));
  REQUIRE(records.size() == t.rows.size() + 1);
  for (std::size_t i = 0; i < values.size(); i += 2) {
    const auto& r = records[i / 2 + 1];
    CHECK(std::bit_cast<std::uint64_t>(parse_double(r[0])) == std::bit_cast<std::uint64_t>(values[i]));
    CHECK(std::bit_cast<std::uint64_t>(parse_double(r[1])) == std::bit_cast<std::uint64_t>(values[i + 1]));
  }
  CHECK_THROWS(parse_double("1.0x"));
}

TEST_CASE("CSV quoting and empty tables") {
  const Table empty{{"x_m", "eta"}, {}};
  CHECK(to_csv(empty) == "x_m,eta\r\n");
  Table q{{"row"}, {}};
  q.add({std::string("a,\"b\"")});
  CHECK(to_csv(q) == "row\r\n\"a,\"\"b\"\"\"\r\n");
  CHECK(parse_csv(to_csv(q))[1][0] == "a,\"b\"");
  CHECK_THROWS(q.add({1.0, 2.0}));
}

TEST_CASE("membrane-dde output: columns, trailing integral row and ASCII headers") {
  const fs::path dir = scratch("dde");
  const Json s = run(Json{{"scenario", "membrane-dde"}, {"membrane", {{"m", 6}}}}, dir);
  const auto rows = parse_csv(slurp(dir / "dde.csv"));
  REQUIRE(rows.size() > 3);
  CHECK(rows[0] == std::vector<std::string>{"x_m", "dde_per_m", "ideal_dde_per_m"});
  for (const auto& h : rows[0]) {
    for (char ch : h) CHECK(static_cast<unsigned char>(ch) < 128);
  }
  const auto& last = rows.back();
  CHECK(last[0] == "integral");
  CHECK(std::abs(parse_double(last[1]) - s["eta"].get<double>()) < 1e-4);
  for (const char* key : {"eta", "S_imp", "S_ideal", "S_ba", "dde_residual", "heisenberg_product_over_hbar2",
                          "version", "grids", "config"}) {
    CHECK(s.contains(key));
  }
  CHECK(s["config"] == merge_config(Json{{"scenario", "membrane-dde"}, {"membrane", {{"m", 6}}}}));
  CHECK(s["ideal_heisenberg_product_over_hbar2"].get<double>() == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(s["S"].get<double>() > 0.0);
}

TEST_CASE("membrane-block-scan in the optical lever limit") {
  const fs::path dir = scratch("block");
  const Json s = run(Json{{"scenario", "membrane-block-scan"}}, dir, {"scan.points=101"});
  const auto rows = parse_csv(slurp(dir / "block_scan.csv"));
  const auto& best = rows.back();
  CHECK(best[0] == "argmax");
  CHECK(std::abs(parse_double(best[2]) - 0.87) < 0.02);
  CHECK(std::abs(parse_double(best[3]) - 0.81) < 0.01);
  CHECK(rows.size() == 101 + 2);
  CHECK(s["dde_residual"].get<double>() < 1e-4);
}

TEST_CASE("dipole-irp summary") {
  const fs::path dir = scratch("irp");
  const Json s = run(Json{{"scenario", "dipole-irp"}}, dir, {"output_grid.n_theta=20", "output_grid.n_phi=20"});
  CHECK(std::abs(s["eta_col"].get<double>() - 0.5) < 0.005);
  CHECK(std::abs(s["irp_full_sphere_integral"].get<double>() - 1) < 1e-2);
  CHECK(s["dde_residual"].get<double>() < 1e-4);
}

TEST_CASE("phase-contrast mask and fisher-check run") {
  const fs::path dir = scratch("mask");
  const Json s = run(Json{{"scenario", "phase-contrast"}, {"scheme", "mask"}}, dir,
                     {"mask.n=256", "mask.sweep_points=11", "mask.emit=csv"});
  CHECK(fs::exists(dir / "mask.csv"));
  CHECK(fs::exists(dir / "threshold_sweep.csv"));
  CHECK(s.contains("open_fraction"));

  const fs::path fdir = scratch("fisher");
  const Json f = run(Json{{"scenario", "fisher-check"}}, fdir);
  CHECK(std::abs(f["F_Q_times_S_ideal"].get<double>() - 1) < 1e-6);
  CHECK(f["qpd_respects_bound"] == true);
}

TEST_CASE("two runs of one config are byte-identical") {
  const Json user{{"scenario", "membrane-dde"}, {"wire_scan", {{"enabled", true}, {"span_over_wd", 1.0}}}};
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  run(user, a);
  run(user, b);
  for (const char* f : {"dde.csv", "wire_scan.csv", "summary.json"}) {
    CAPTURE(f);
    CHECK(slurp(a / f) == slurp(b / f));
  }
}

TEST_CASE("tool exit codes") {
  const fs::path dir = scratch("tool");
  const auto write = [&](const std::string& name, const std::string& body) {
    std::ofstream(dir / name) << body;
    return (dir / name).string();
  };
  const std::string good = write("good.json", R"({"scenario": "dipole-irp", "output_grid": {"n_theta": 8, "n_phi": 8}})");
  const std::string unknown = write("unknown.json", R"({"scenario": "dipole-irp", "colour": "red"})");
  const std::string broken = write("broken.json", R"({"scenario": )");
  const std::string negative = write("neg.json", R"({"scenario": "membrane-dde", "membrane": {"w0_m": -1.0}})");
  const std::string degenerate =
      write("degenerate.json", R"({"scenario": "phase-contrast", "scheme": "mask", "mask": {"threshold": 1.0}})");
  const std::string out = (dir / "out").string();
  CHECK(tool("run --config " + good + " --out " + out) == 0);
  CHECK(fs::exists(dir / "out" / "summary.json"));
  CHECK(tool("run --config " + good + " --set dipole.axis=y0 --out " + out) == 0);
  CHECK(tool("run --config " + unknown + " --out " + out) == 2);
  CHECK(tool("run --config " + broken + " --out " + out) == 2);
  CHECK(tool("run --config " + negative + " --out " + out) == 2);
  CHECK(tool("run --config " + (dir / "missing.json").string() + " --out " + out) == 2);
  CHECK(tool("run --config " + good + " --set dipole.nope=1 --out " + out) == 2);
  CHECK(tool("run --config " + degenerate + " --out " + out) == 3);
  CHECK(tool("list-scenarios") == 0);
  CHECK(tool("version") == 0);
  CHECK(tool("frobnicate") == 2);
}
