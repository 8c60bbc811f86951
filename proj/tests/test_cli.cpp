#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "lspace/cli.hpp"

namespace {

using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/lspace_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

int run_cli(std::vector<std::string> args) { return lspace::cli::run(std::move(args)); }

// Walk a draft-07-style schema's "required" lists and confirm the document
// carries every named key (a structural subset of full validation).
void check_required(const json& schema, const json& doc) {
  if (schema.contains("required")) {
    for (const auto& key : schema["required"]) {
      INFO("missing key: ", key.get<std::string>());
      REQUIRE(doc.contains(key.get<std::string>()));
    }
  }
  if (schema.contains("properties") && doc.is_object()) {
    for (const auto& [key, sub] : schema["properties"].items()) {
      if (!doc.contains(key)) continue;
      if (sub.contains("required") || sub.contains("properties")) check_required(sub, doc[key]);
      if (sub.contains("items") && doc[key].is_array()) {
        for (const auto& element : doc[key]) check_required(sub["items"], element);
      }
    }
  }
}

void validate_against(const std::string& schema_path, const std::string& report_path) {
  const json schema = json::parse(slurp(std::string(LSPACE_SOURCE_DIR) + "/schemas/" + schema_path));
  const json doc = json::parse(slurp(report_path));
  check_required(schema, doc);
}

}  // namespace

TEST_CASE("norm command emits a schema-conforming report and exit code 0") {
  TempFile out("norm.json");
  const int code =
      run_cli({"norm", "--space", "grand", "--p", "2", "--theta", "1", "--function",
               R"({"kind":"step","breaks":[0,1],"values":[1]})", "--out", out.path});
  CHECK(code == 0);
  const json doc = json::parse(slurp(out.path));
  CHECK(doc["result"]["value"].get<double>() == doctest::Approx(1.0).epsilon(1e-3));
  validate_against("norm.schema.json", out.path);
}

TEST_CASE("check command exit codes distinguish holds from fails") {
  TempFile out("check.json");
  const int ok =
      run_cli({"check", "--kind", "no-var-small", "--theta", "1", "--exponent",
               R"({"kind":"example-exponent","theta":1,"base":2})", "--t0", "0.1353", "--out",
               out.path});
  CHECK(ok == 0);
  const json doc = json::parse(slurp(out.path));
  CHECK(doc["report"]["holds"].get<bool>());
  validate_against("check.schema.json", out.path);

  const int failed =
      run_cli({"check", "--kind", "var-small", "--theta", "1", "--eps", "0.1", "--exponent",
               R"({"kind":"example-exponent","theta":1,"base":2})", "--t0", "0.1353", "--out",
               out.path});
  CHECK(failed == 2);
}

TEST_CASE("usage and input errors exit with code 1") {
  CHECK(run_cli({"norm"}) == 1);                       // missing required options
  CHECK(run_cli({"definitely-not-a-command"}) == 1);
  CHECK(run_cli({"norm", "--space", "grand", "--p", "2", "--function", "{bad json"}) == 1);
  CHECK(run_cli({"norm", "--space", "nope", "--p", "2", "--function",
                 R"({"kind":"step","breaks":[0,1],"values":[1]})"}) == 1);
}

TEST_CASE("identical invocations produce byte-identical reports") {
  TempFile out1("det1.json");
  TempFile out2("det2.json");
  const std::vector<std::string> base = {
      "reproduce", "no-var-small", "--b",     "1.5",   "--theta",
      "1",         "--levels",     "1000,10000,100000"};
  auto with_out = [&](const std::string& path) {
    std::vector<std::string> args = base;
    args.push_back("--out");
    args.push_back(path);
    return args;
  };
  CHECK(run_cli(with_out(out1.path)) == 0);
  CHECK(run_cli(with_out(out2.path)) == 0);
  CHECK(slurp(out1.path) == slurp(out2.path));
  validate_against("reproduce-embedding.schema.json", out1.path);
}

TEST_CASE("reproduce subcommands emit schema-conforming reports") {
  SUBCASE("no-rearrange") {
    TempFile out("nr.json");
    CHECK(run_cli({"reproduce", "no-rearrange", "--p0", "2", "--theta", "1", "--eps", "0.5",
                   "--out", out.path}) == 0);
    validate_against("reproduce-embedding.schema.json", out.path);
  }
  SUBCASE("frs") {
    TempFile out("frs.json");
    CHECK(run_cli({"reproduce", "frs", "--seed", "7", "--count", "6", "--out", out.path}) == 0);
    validate_against("reproduce-frs.schema.json", out.path);
    const json doc = json::parse(slurp(out.path));
    CHECK(doc["envelope"]["anomalies"].get<long>() >= 1);
  }
  SUBCASE("chain") {
    TempFile out("chain.json");
    CHECK(run_cli({"reproduce", "chain", "--function",
                   R"({"kind":"step","breaks":[0,1],"values":[1]})", "--p", "2", "--theta", "1",
                   "--eps-grid", "0.25,0.5,0.75", "--out", out.path}) == 0);
    validate_against("reproduce-chain.schema.json", out.path);
  }
  SUBCASE("pointwise-bound") {
    TempFile out("pb.json");
    CHECK(run_cli({"reproduce", "pointwise-bound", "--function",
                   R"({"kind":"powerloglog","a":0.5,"b":-1,"c":0,"scale":1.6487212707001282,"t0":0.1353352832366127})",
                   "--exponent", R"({"kind":"recip-log-exponent","base":2,"A":0.5,"D":0})",
                   "--theta", "1", "--out", out.path}) == 0);
    validate_against("reproduce-pointwise.schema.json", out.path);
  }
}

TEST_CASE("sweep command") {
  TempFile out("sweep.json");
  CHECK(run_cli({"sweep", "--kind", "var-small", "--exponent",
                 R"({"kind":"example-exponent","theta":1,"base":2})", "--theta-grid", "0.5,1",
                 "--eps-grid", "0.01,0.1", "--out", out.path}) == 0);
  validate_against("sweep.schema.json", out.path);
  const json doc = json::parse(slurp(out.path));
  CHECK(doc["rows"].size() == 4);
}

TEST_CASE("csv output carries a header row naming units") {
  TempFile out("norm.csv");
  CHECK(run_cli({"norm", "--space", "lp", "--p", "2", "--function",
                 R"({"kind":"step","breaks":[0,1],"values":[1]})", "--format", "csv", "--out",
                 out.path}) == 0);
  const std::string text = slurp(out.path);
  CHECK(text.rfind("quantity (name),value (dimensionless)", 0) == 0);
}

TEST_CASE("rearrange command emits the sorted representation") {
  TempFile out("rearr.json");
  CHECK(run_cli({"rearrange", "--function",
                 R"({"kind":"step","breaks":[0,0.5,1],"values":[1,3]})", "--out", out.path}) ==
        0);
  validate_against("rearrange.schema.json", out.path);
  const json doc = json::parse(slurp(out.path));
  CHECK(doc["representation"]["values"][0].get<double>() == doctest::Approx(3.0));
  CHECK(doc["representation"]["values"][1].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("every numeric in a report round-trips at 17 significant digits") {
  TempFile out("digits.json");
  CHECK(run_cli({"norm", "--space", "small", "--p", "2", "--theta", "1", "--function",
                 R"({"kind":"step","breaks":[0,1],"values":[1]})", "--out", out.path}) == 0);
  const json doc = json::parse(slurp(out.path));
  const double v = doc["result"]["value"].get<double>();
  // re-render and reparse: the printed form must reproduce the double
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  CHECK(std::stod(buf) == v);
}
