#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cmclab/commands.hpp"
#include "cmclab/io.hpp"

using namespace cmclab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("cmclab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const json& j) {
  auto p = (dir / "config.json").string();
  std::ofstream(p) << j.dump();
  return p;
}

int run(const std::string& cmd, const fs::path& dir, const json& cfg, std::string* err_out = nullptr) {
  std::ostringstream log, err;
  RunOptions opt;
  opt.out_dir = (dir / "out").string();
  int rc = run_command(cmd, write_config(dir, cfg), opt, log, err);
  if (err_out) *err_out = err.str();
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

json plane_config() {
  return {{"n", 2},
          {"exact", {{"kind", "plane"}, {"a", 0.1}, {"p", {0.3}}, {"c", -0.4}}},
          {"boundary", "exact"},
          {"expansion_order", 4},
          {"domain", {{"x_extent", 0.4}, {"t_max", 0.5}, {"delta", 0.05}}},
          {"grid", {{"nodes", 9}}}};
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_THROWS_AS(parse_config({{"n", 2}, {"phi", "0"}, {"H", "1.5"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", 2}, {"phi", "0"}, {"H", "0.2"}, {"colour", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", 2}, {"phi", "0"}, {"H", "0.2"}, {"grid", {{"cells", 3}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", 2}, {"phi", "sin(x1"}, {"H", "0.2"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", 2}, {"phi", "0"}, {"H", "0.2 + 3*t"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", 2}, {"phi", "0"}, {"H", "0.2"}, {"jet_order", 3}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"n", "two"}, {"phi", "0"}, {"H", "0.2"}}), ConfigError);
  CHECK_THROWS_AS(parse_config({{"phi", "0"}}), ConfigError);
  auto c = parse_config({{"n", 3}, {"phi", "0.1*x1*x2"}, {"H", "0.2"}});
  CHECK(c.expansion_order == 4);
  CHECK(c.jet_order == 7);
  CHECK(c.x_center.size() == 2);
  CHECK(c.nodes_t == c.nodes);
  auto e = parse_config(plane_config());
  CHECK(e.exact.has_value());
  CHECK_FALSE(e.phi.empty());
}

TEST_CASE("json round trips") {
  auto T = expand(ProblemData::make(2, "0.2*sin(x1)", "0.3"), 7, 4);
  auto R = table_from_json(json::parse(to_json(T).dump()));
  CHECK(R.coeffs.size() == T.coeffs.size());
  for (const auto& [ij, c] : T.coeffs) CHECK((R.coeff(ij.first, ij.second) - c).max_abs() == 0.0);
  CHECK(eval_uk(R, 4, {}, 0.1) == eval_uk(T, 4, {}, 0.1));
  GridSpec g;
  g.x_center = {0.0};
  g.nodes_x = 5;
  g.nodes_t = 7;
  auto back = grid_from_json(to_json(g));
  CHECK(back.nodes_t == 7);
  CHECK(back.delta == g.delta);
}

TEST_CASE("expand and exit codes") {
  auto dir = scratch("expand");
  CHECK(run("expand", dir, plane_config()) == kSuccess);
  auto out = read_json((dir / "out" / "expansion.json").string());
  auto c1 = jet_from_json(out["coefficients"]["1,0"]);
  CHECK(c1.constant_term() == doctest::Approx(-0.4).epsilon(1e-13));
  for (auto it = out["coefficients"].begin(); it != out["coefficients"].end(); ++it)
    if (it.key()[0] >= '2') CHECK(jet_from_json(it.value()).max_abs() < 1e-12);

  json c7 = {{"n", 2}, {"phi", "0.2*sin(x1)"}, {"H", "0.3"}, {"expansion_order", 4}};
  CHECK(run("expand", dir, c7) == kSuccess);
  auto t = table_from_json(read_json((dir / "out" / "expansion.json").string()));
  CHECK(t.has(3, 1));
  CHECK(t.coeff(3, 1).max_abs() <= 1e-10);

  std::string err;
  CHECK(run("expand", dir, {{"n", 2}, {"phi", "0"}, {"H", "1.5"}}, &err) == kConfigError);
  CHECK(err.find("|H|") != std::string::npos);
  CHECK(run("nonsense", dir, c7) == kConfigError);
  std::ostringstream log, e2;
  CHECK(run_command("expand", (dir / "missing.json").string(), {}, log, e2) == kConfigError);
}

TEST_CASE("solve, nonconvergence and analyze") {
  auto dir = scratch("solve");
  json cfg = {{"n", 2},
              {"phi", "0.2*sin(x1)"},
              {"H", "0.3"},
              {"expansion_order", 4},
              {"domain", {{"x_extent", 0.5}, {"t_max", 0.42}, {"delta", 0.02}}},
              {"grid", {{"nodes", 17}, {"nodes_t", 41}}}};
  CHECK(run("solve", dir, cfg) == kSuccess);
  CHECK(fs::exists(dir / "out" / "solution.csv"));
  CHECK(fs::exists(dir / "out" / "convergence.jsonl"));
  CHECK(fs::exists(dir / "out" / "expansion_field.json"));
  auto first = slurp(dir / "out" / "solution.csv");
  CHECK(run("solve", dir, cfg) == kSuccess);
  CHECK(slurp(dir / "out" / "solution.csv") == first);

  json an = cfg;
  an["inputs"] = {{"solution", (dir / "out" / "solution.csv").string()},
                  {"expansion", (dir / "out" / "expansion_field.json").string()}};
  an["fit"] = {{"window", {0.04, 0.2}}};
  CHECK(run("analyze", dir, an) == kSuccess);
  auto rep = read_json((dir / "out" / "decay_report.json").string());
  auto e1 = rep["analysis"]["remainders"][0]["report"]["fitted_exponent"].get<double>();
  CHECK(e1 == doctest::Approx(2.0).epsilon(0.1));
  CHECK(rep["analysis"]["unverified"].size() == 3);

  an["c_global"] = "fit";
  CHECK(run("analyze", dir, an) == kSuccess);
  rep = read_json((dir / "out" / "decay_report.json").string());
  CHECK(rep["fit"]["global_fit"]["values"].size() == 17);

  json bad = an;
  bad["grid"]["nodes"] = 9;
  CHECK(run("analyze", dir, bad) == kConfigError);

  json stall = cfg;
  stall["newton"] = {{"max_iter", 1}, {"tol", 1e-15}};
  CHECK(run("solve", dir, stall) == kNumericalFailure);
  CHECK(fs::exists(dir / "out" / "solution_failed.csv"));
}

TEST_CASE("fit mode chains solve, fit and analysis") {
  auto dir = scratch("fit");
  json cfg = {{"n", 2},
              {"phi", "0.2*sin(x1)"},
              {"H", "0.3"},
              {"expansion_order", 4},
              {"c_global", "fit"},
              {"domain", {{"x_extent", 0.5}, {"t_max", 0.42}, {"delta", 0.02}}},
              {"grid", {{"nodes", 17}, {"nodes_t", 41}}}};
  std::ostringstream log, err;
  RunOptions opt;
  opt.out_dir = (dir / "out").string();
  opt.plot = true;
  CHECK(run_command("solve", write_config(dir, cfg), opt, log, err) == kSuccess);
  CHECK(fs::exists(dir / "out" / "decay_report.json"));
  CHECK(fs::exists(dir / "out" / "expansion_field_fit.json"));
  CHECK(fs::exists(dir / "out" / "decay_u1.svg"));
  CHECK(log.str().find("fitted c_{3,0}") != std::string::npos);
}

TEST_CASE("verify and exact commands") {
  auto dir = scratch("verify");
  json cfg = plane_config();
  cfg["verify"] = {{"suite", "parity"}, {"trials", 3}};
  cfg["seed"] = 9;
  CHECK(run("verify", dir, cfg) == kSuccess);
  auto a = slurp(dir / "out" / "verify.json");
  CHECK(run("verify", dir, cfg) == kSuccess);
  CHECK(slurp(dir / "out" / "verify.json") == a);
  CHECK(read_json((dir / "out" / "verify.json").string())["pass"].get<bool>());
  cfg["verify"]["suite"] = "nope";
  CHECK(run("verify", dir, cfg) == kConfigError);

  json sph = {{"n", 2},
              {"exact",
               {{"kind", "sphere"}, {"center", {0.0}}, {"height", 0.5}, {"radius", 1.0}, {"branch", 1}}},
              {"domain", {{"x_extent", 0.4}, {"t_max", 0.6}, {"delta", 0.05}}},
              {"grid", {{"nodes", 9}}}};
  CHECK(run("exact", dir, sph) == kSuccess);
  auto ex = read_json((dir / "out" / "exact.json").string());
  CHECK(ex["H"].get<double>() == doctest::Approx(0.5));
  CHECK(fs::exists(dir / "out" / "exact.csv"));
  sph["exact"]["radius"] = 0.4;
  CHECK(run("exact", dir, sph) == kConfigError);
}
