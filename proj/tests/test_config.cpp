#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include <lieflow/config.hpp>
#include <lieflow/report.hpp>

using namespace lieflow;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

RunConfig parse(const char* text) { return parse_config(json::parse(text)); }

std::string config_path(const char* name) {
  return std::string(LIEFLOW_CONFIG_DIR) + "/" + name;
}

struct CliResult {
  int exit_code = -1;
  std::string out;
};

CliResult run_cli(const std::string& args) {
  std::string cmd = std::string("\"") + LIEFLOW_CLI_PATH + "\" " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  CliResult r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
  int status = pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

json load_schema() {
  std::ifstream in(LIEFLOW_SCHEMA_PATH);
  REQUIRE(in.good());
  json s;
  in >> s;
  return s;
}

ordered_json sample_report() {
  RunConfig c = parse("{\"rank\":2,\"grading\":\"11\"}");
  ReportBuilder rb("verify", config_echo(c));
  rb.add_check("alpha", true, ordered_json{{"rel", 0.0}});
  rb.add_check("beta", true);
  return rb.finish();
}

}  // namespace

TEST_CASE("minimal configuration gets the documented defaults") {
  RunConfig c = parse("{\"rank\":2,\"grading\":\"11\"}");
  CHECK(c.rank == 2);
  CHECK(c.grading == GradingVector{1, 1});
  CHECK(c.max_grade == 1);
  CHECK(c.mode == "float");
  CHECK(c.seed == 1);
  CHECK(c.samples == 100);
  CHECK(c.tol == 1e-9);
  CHECK(c.grid.extent == 1.0);
  CHECK(c.grid.steps == std::vector<double>{1e-2});
  CHECK(!c.reduced_scan);
  CHECK(!c.has_coeffs);
  CHECK(c.lattice().size() == 3);
}

TEST_CASE("grading accepts strings, comma strings, and arrays") {
  CHECK(parse("{\"rank\":3,\"grading\":\"010\"}").grading == GradingVector{0, 1, 0});
  CHECK(parse("{\"rank\":3,\"grading\":\"0,1,0\"}").grading == GradingVector{0, 1, 0});
  CHECK(parse("{\"rank\":3,\"grading\":[0,1,0]}").grading == GradingVector{0, 1, 0});
  CHECK_THROWS_AS(parse("{\"rank\":3,\"grading\":5}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":3,\"grading\":\"01\"}"), ConstructionError);
}

TEST_CASE("mode names normalize and everything else is rejected") {
  CHECK(parse("{\"rank\":2,\"grading\":\"11\",\"mode\":\"exact\"}").mode == "exact");
  CHECK(parse("{\"rank\":2,\"grading\":\"11\",\"mode\":\"rational\"}").mode == "exact");
  CHECK(parse("{\"rank\":2,\"grading\":\"11\",\"mode\":\"float\"}").mode == "float");
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"mode\":\"symbolic\"}"), ConfigError);
}

TEST_CASE("out-of-range scalars are configuration errors") {
  CHECK_THROWS_AS(parse("{\"grading\":\"11\"}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":0,\"grading\":\"\"}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":13,\"grading\":\"1111111111111\"}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"max_grade\":0}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"max_grade\":3}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"samples\":0}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"tol\":0}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"grid\":{\"extent\":-1}}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"grid\":{\"steps\":[]}}"), ConfigError);
  CHECK_THROWS_AS(parse("{\"rank\":2,\"grading\":\"11\",\"grid\":{\"steps\":[-0.1]}}"),
                  ConfigError);
}

TEST_CASE("grid axes are inclusive and refuse degenerate resolutions") {
  GridSpec g;
  g.x0 = 0.5;
  g.y0 = -0.5;
  g.extent = 1.0;
  CHECK(g.xs(0.25) == std::vector<double>{0.5, 0.75, 1.0, 1.25, 1.5});
  std::vector<double> ys = g.ys(0.5);
  CHECK(ys == std::vector<double>{-0.5, 0.0, 0.5});
  CHECK_THROWS_AS(g.xs(0.9), ConfigError);
}

TEST_CASE("coefficient literals synthesize every block") {
  RunConfig c = parse(
      "{\"rank\":4,\"grading\":\"0101\",\"max_grade\":2,"
      "\"coefficients\":{\"raising\":\"identity\",\"lowering\":\"zero\"}}");
  CHECK(c.has_coeffs);
  CHECK(c.coeffs.pbar.size() == 3);  // (1,0) (1,1) (2,0)
  CHECK(c.coeffs.p.size() == 3);
  const PolyMat<double>& pb = c.coeffs.pbar.at({1, 0});
  CHECK(pb.rows == 2);
  CHECK(pb.cols == 2);
  CHECK(pb.at(0, 0).c == std::vector<double>{1.0});
  CHECK(pb.at(0, 1).is_zero());
  CHECK(c.coeffs.pbar.at({2, 0}).rows == 2);
  CHECK(c.coeffs.pbar.at({2, 0}).cols == 1);
  const PolyMat<double>& pl = c.coeffs.p.at({1, 0});
  CHECK(pl.at(0, 0).is_zero());
  CHECK_THROWS_AS(
      parse("{\"rank\":2,\"grading\":\"11\","
            "\"coefficients\":{\"raising\":\"ones\",\"lowering\":\"zero\"}}"),
      ConfigError);
}

TEST_CASE("explicit blocks parse polynomials and exact fraction strings") {
  RunConfig c = parse(
      "{\"rank\":3,\"grading\":\"010\","
      "\"coefficients\":{"
      "\"raising\":{\"1,0\":[[[0.5,1.0],\"1/4\"],[0,[2]]]},"
      "\"lowering\":\"identity\"}}");
  const PolyMat<double>& pb = c.coeffs.pbar.at({1, 0});
  CHECK(pb.at(0, 0).c == std::vector<double>{0.5, 1.0});
  CHECK(pb.at(0, 1).c == std::vector<double>{0.25});
  CHECK(pb.at(1, 0).is_zero());
  CHECK(pb.at(1, 1).c == std::vector<double>{2.0});
}

TEST_CASE("malformed coefficient maps are rejected with context") {
  const char* base = "{\"rank\":3,\"grading\":\"010\",\"coefficients\":{";
  auto bad = [&](const std::string& body) {
    return std::string(base) + body + "}}";
  };
  // missing lowering map
  CHECK_THROWS_AS(parse(bad("\"raising\":\"identity\"").c_str()), ConfigError);
  // key outside the lattice
  CHECK_THROWS_AS(
      parse(bad("\"raising\":{\"2,0\":[[1]]},\"lowering\":\"identity\"").c_str()), ConfigError);
  CHECK_THROWS_AS(
      parse(bad("\"raising\":{\"nope\":[[1]]},\"lowering\":\"identity\"").c_str()), ConfigError);
  // wrong shape
  CHECK_THROWS_AS(
      parse(bad("\"raising\":{\"1,0\":[[1,1]]},\"lowering\":\"identity\"").c_str()), ConfigError);
  // incomplete cover
  CHECK_THROWS_AS(parse(bad("\"raising\":{},\"lowering\":\"identity\"").c_str()), ConfigError);
}

TEST_CASE("zero-grade terms are parsed and placed by color") {
  RunConfig c = parse(
      "{\"rank\":3,\"grading\":\"010\","
      "\"coefficients\":{\"raising\":\"identity\",\"lowering\":\"identity\","
      "\"zero_raising\":[{\"kind\":\"cartan\",\"root\":2,\"poly\":[1,0.5]}],"
      "\"zero_lowering\":[{\"kind\":\"raise\",\"root\":1,\"poly\":2}]}}");
  REQUIRE(c.coeffs.zero_plus.size() == 1);
  CHECK(c.coeffs.zero_plus[0].gen.kind == GeneratorRef::Kind::Cartan);
  CHECK(c.coeffs.zero_plus[0].poly.c == std::vector<double>{1.0, 0.5});
  REQUIRE(c.coeffs.zero_minus.size() == 1);
  CHECK(c.coeffs.zero_minus[0].gen.a == 1);
  // raising term at a grade-one root
  CHECK_THROWS_AS(
      parse("{\"rank\":3,\"grading\":\"010\","
            "\"coefficients\":{\"raising\":\"identity\",\"lowering\":\"identity\","
            "\"zero_raising\":[{\"kind\":\"raise\",\"root\":2,\"poly\":[1]}]}}"),
      ConfigError);
  CHECK_THROWS_AS(
      parse("{\"rank\":3,\"grading\":\"010\","
            "\"coefficients\":{\"raising\":\"identity\",\"lowering\":\"identity\","
            "\"zero_raising\":[{\"kind\":\"twist\",\"root\":1,\"poly\":[1]}]}}"),
      ConfigError);
}

TEST_CASE("the configuration echo is normalized and reproducible") {
  RunConfig c = parse("{\"rank\":3,\"grading\":[0,1,0],\"mode\":\"rational\"}");
  ordered_json echo = config_echo(c);
  CHECK(echo["grading"] == "010");
  CHECK(echo["mode"] == "exact");
  CHECK(echo["has_coefficients"] == false);
  CHECK(echo.dump() == config_echo(parse("{\"rank\":3,\"grading\":\"010\",\"mode\":\"rational\"}"))
                           .dump());
}

TEST_CASE("shipped configurations load and describe the advertised runs") {
  RunConfig scalar = load_config_file(config_path("scalar-toda.json"));
  CHECK(scalar.rank == 2);
  CHECK(scalar.grading == GradingVector{1, 1});
  CHECK(scalar.reduced_scan);
  CHECK(scalar.has_coeffs);

  RunConfig m1 = load_config_file(config_path("matrix-toda-m1.json"));
  CHECK(m1.rank == 3);
  CHECK(m1.max_grade == 1);
  CHECK(m1.reduced_scan);
  CHECK(m1.coeffs.pbar.at({1, 0}).rows == 2);
  CHECK(m1.coeffs.pbar.at({1, 0}).at(0, 0).c == std::vector<double>{1.0});

  RunConfig g2 = load_config_file(config_path("grade2-a4.json"));
  CHECK(g2.rank == 4);
  CHECK(g2.max_grade == 2);
  CHECK(g2.coeffs.pbar.size() == 3);
  CHECK(g2.grid.steps == std::vector<double>{1e-2, 5e-3, 2.5e-3});

  RunConfig gg = load_config_file(config_path("matrix-toda-goursat.json"));
  CHECK(gg.rank == 3);
  CHECK(!gg.reduced_scan);
  CHECK(gg.coeffs.pbar.at({1, 0}).at(0, 0).c == std::vector<double>{1.0, 0.3});

  CHECK_THROWS_AS(load_config_file(config_path("missing.json")), ConfigError);
  std::string broken = "/tmp/lieflow_broken_config.json";
  std::ofstream(broken) << "{not json";
  CHECK_THROWS_AS(load_config_file(broken), ConfigError);
  std::remove(broken.c_str());
}

TEST_CASE("reports carry checks, a summary, and a stable config hash") {
  ordered_json rep = sample_report();
  CHECK(rep["tool"] == "lieflow");
  CHECK(rep["command"] == "verify");
  CHECK(rep["checks"].size() == 2);
  CHECK(rep["checks"][0]["name"] == "alpha");
  CHECK(rep["checks"][0]["pass"] == true);
  CHECK(rep["summary"]["total"] == 2);
  CHECK(rep["summary"]["passed"] == 2);
  CHECK(rep["summary"]["failed"] == 0);
  CHECK(rep["summary"]["pass"] == true);
  std::string hash = rep["config_hash"].get<std::string>();
  CHECK(hash.substr(0, 8) == "fnv1a64:");
  CHECK(hash.size() == 8 + 16);

  RunConfig c = parse("{\"rank\":2,\"grading\":\"11\"}");
  ReportBuilder failing("verify", config_echo(c));
  failing.add_check("gamma", false);
  CHECK(!failing.all_passed());
  CHECK(failing.finish()["summary"]["pass"] == false);

  std::string text = render_report(rep);
  CHECK(text.back() == '\n');
  CHECK(text == render_report(sample_report()));  // byte-stable

  CHECK(stable_hash(ordered_json{{"a", 1}}) == stable_hash(ordered_json{{"a", 1}}));
  CHECK(stable_hash(ordered_json{{"a", 1}}) != stable_hash(ordered_json{{"a", 2}}));
}

TEST_CASE("schema validation accepts real reports and localizes defects") {
  json schema = load_schema();
  ordered_json rep = sample_report();
  CHECK(schema_validate(schema, rep).empty());

  json broken = rep;
  broken.erase("summary");
  auto issues = schema_validate(schema, broken);
  REQUIRE(!issues.empty());
  CHECK(issues[0].message.find("summary") != std::string::npos);

  broken = rep;
  broken["command"] = "dance";
  issues = schema_validate(schema, broken);
  REQUIRE(!issues.empty());
  CHECK(issues[0].path == "/command");

  broken = rep;
  broken["config_hash"] = "not-a-hash";
  issues = schema_validate(schema, broken);
  REQUIRE(!issues.empty());
  CHECK(issues[0].path == "/config_hash");

  broken = rep;
  broken["checks"] = json::array();
  CHECK(!schema_validate(schema, broken).empty());

  broken = rep;
  broken["summary"]["total"] = -1;
  issues = schema_validate(schema, broken);
  REQUIRE(!issues.empty());
  CHECK(issues[0].path == "/summary/total");

  broken = rep;
  broken["surprise"] = 1;
  CHECK(!schema_validate(schema, broken).empty());
}

TEST_CASE("the command line tool emits schema-clean deterministic reports") {
  std::string args = "verify --config \"" + config_path("scalar-toda.json") + "\" --samples 5";
  CliResult first = run_cli(args);
  CHECK(first.exit_code == 0);
  json rep = json::parse(first.out);
  CHECK(schema_validate(load_schema(), rep).empty());
  CHECK(rep["summary"]["pass"] == true);

  CliResult second = run_cli(args);
  CHECK(second.out == first.out);

  CHECK(run_cli("verify --n 2 --grading 1,2").exit_code == 2);
  CHECK(run_cli("verify").exit_code == 2);
}

TEST_CASE("the report subcommand round-trips tool output") {
  CliResult run = run_cli("verify --n 2 --grading 11 --samples 5");
  REQUIRE(run.exit_code == 0);
  std::string path = "/tmp/lieflow_roundtrip_report.json";
  std::ofstream(path) << run.out;
  std::string schema_arg = std::string(" --schema \"") + LIEFLOW_SCHEMA_PATH + "\"";
  CHECK(run_cli("report --in \"" + path + "\"" + schema_arg).exit_code == 0);

  json rep = json::parse(run.out);
  rep.erase("summary");
  std::ofstream(path) << rep.dump(2);
  CHECK(run_cli("report --in \"" + path + "\"" + schema_arg).exit_code == 1);
  std::remove(path.c_str());
}
