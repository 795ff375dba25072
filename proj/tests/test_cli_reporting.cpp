#include <catch_amalgamated.hpp>

#include <cmath>
#include <string>

#include "ahmass/cli.hpp"

using namespace ahmass;
using Catch::Approx;

namespace {

std::string config_path(const std::string& name) { return std::string(AHMASS_CONFIG_DIR) + "/" + name; }

double value_of(const Json& j) { return j.at("value").get<double>(); }

ErrorCode code_of(const std::string& text) {
  try {
    load_config_text(text);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a configuration error");
  return ErrorCode::ConfigError;
}

}  // namespace

TEST_CASE("configuration parsing", "[config]") {
  const RunConfig cfg = load_config_text(R"(
command: mass
seed: 11
threads: 2
family:
  kind: transformed
  base: ads_schwarzschild
  n: 3
  base_m: 1.0
  rapidity: 0.2
quadrature:
  sphere_order: 10
  r_values: [10, 20, 40]
  extrapolation: richardson
fd:
  step: 0.002
  scheme: central2
output:
  format: csv
)");
  CHECK(cfg.command == Command::Mass);
  CHECK(cfg.seed == 11);
  CHECK(cfg.threads == 2);
  CHECK(cfg.family.kind == "transformed");
  CHECK(cfg.family.base == "ads_schwarzschild");
  CHECK(cfg.family.params.at("base_m") == 1.0);
  CHECK(cfg.quadrature.sphere_order == 10);
  CHECK(cfg.quadrature.r_values == std::vector<double>{10, 20, 40});
  CHECK(cfg.quadrature.extrapolation == Extrapolation::Richardson);
  CHECK(cfg.fd.scheme == FDScheme::Central2);
  CHECK(cfg.format == OutputFormat::Csv);
}

TEST_CASE("configuration errors", "[config]") {
  CHECK(code_of("command: mass\nfamily: {kind: zero, n: 3}\nbogus: 1\n") == ErrorCode::ConfigError);
  CHECK(code_of("command: mass\nfamily: {kind: zero, n: 3}\nquadrature: {order: 3}\n") == ErrorCode::ConfigError);
  CHECK(code_of("command: fly\nfamily: {kind: zero, n: 3}\n") == ErrorCode::ConfigError);
  CHECK(code_of("command: mass\n") == ErrorCode::ConfigError);
  CHECK(code_of("command: verify\nfamily: {kind: zero, n: 3}\nfd: {scheme: central6}\n") == ErrorCode::ConfigError);
  CHECK(code_of("command: [unclosed\n") == ErrorCode::ConfigError);
  CHECK(code_of("command: mass\nfamily: {kind: zero, n: 3}\noutput: {format: xml}\n") == ErrorCode::ConfigError);
  try {
    load_config_file(config_path("does_not_exist.yaml"));
    FAIL("expected IoError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::IoError);
  }
}

TEST_CASE("every shipped configuration parses", "[config]") {
  for (const char* name : {"ads_schwarzschild_mass.yaml", "ads_schwarzschild_verify.yaml",
                           "ads_schwarzschild_penrose.yaml", "ads_schwarzschild_map.yaml", "boosted_ads_mass.yaml",
                           "decay_tau3.yaml", "horosphere_decay.yaml", "horosphere_cap_penrose.yaml",
                           "horosphere_cap_negative.yaml", "horosphere_inspect.yaml",
                           "spline_horosphere_inspect.yaml", "zero_verify.yaml"}) {
    INFO(name);
    const RunConfig cfg = load_config_file(config_path(name));
    CHECK_NOTHROW(make_family(cfg.family));
  }
}

TEST_CASE("JSON emitter", "[report]") {
  Json j;
  j["b"] = 0.1;
  j["a"] = Json::array({1, -0.0, 1e-300});
  j["c"] = number(std::numeric_limits<double>::infinity());
  j["d"] = number(std::nan(""));
  j["e"] = "x\"y";
  const std::string text = to_json_text(j);
  CHECK(text ==
        "{\n  \"a\": [\n    1,\n    0,\n    1e-300\n  ],\n  \"b\": 0.10000000000000001,\n"
        "  \"c\": \"inf\",\n  \"d\": \"nan\",\n  \"e\": \"x\\\"y\"\n}\n");
  // round trip keeps every bit
  CHECK(Json::parse(text)["b"].get<double>() == 0.1);
  CHECK(estimate(1.5, 0.25) == Json{{"value", 1.5}, {"error_estimate", 0.25}});
  CHECK(exact(2.0)["error_estimate"].get<double>() == 0.0);
}

TEST_CASE("CSV table", "[report]") {
  CsvTable t;
  t.header = {"r", "m_phi"};
  t.rows = {{1.0, 0.5}, {2.0, 1.0 / 3.0}};
  CHECK(t.text() == "r,m_phi\n1,0.5\n2,0.33333333333333331\n");
}

TEST_CASE("report skeleton and config echo", "[report]") {
  RunConfig cfg = load_config_file(config_path("zero_verify.yaml"));
  cfg.threads = 3;
  const Json echo = config_echo(cfg);
  CHECK_FALSE(echo.contains("threads"));
  CHECK(echo.at("seed").get<int>() == 3);
  const RunOutcome out = run(cfg);
  const Json& doc = out.document;
  for (const char* key : {"tool_version", "schema_version", "command", "config_echo", "results", "hypothesis_flags",
                          "error_estimates", "timings"})
    CHECK(doc.contains(key));
  CHECK(doc.at("command") == "verify");
}

TEST_CASE("verify on the hyperbolic slice reaches rounding level", "[cli][verify]") {
  const RunOutcome out = run(load_config_file(config_path("zero_verify.yaml")));
  CHECK(out.exit_code == kExitOk);
  const Json& res = out.document.at("results");
  for (const char* key : {"flux_residual", "recipe_residual_relative", "gauss_residual_relative"}) {
    INFO(key);
    CHECK(value_of(res.at(key).at("max")) <= 1e-10);
  }
}

TEST_CASE("mass on AdS-Schwarzschild", "[cli][mass]") {
  RunConfig cfg = load_config_file(config_path("ads_schwarzschild_mass.yaml"));
  cfg.format = OutputFormat::Csv;
  const RunOutcome out = run(cfg);
  CHECK(out.exit_code == kExitOk);
  const Json& res = out.document.at("results");
  CHECK(value_of(res.at("balanced_mass")) == Approx(1.0).margin(0.01));
  CHECK(value_of(res.at("consistency_gap")) <= 5e-3);
  CHECK(out.document.at("hypothesis_flags").at("timelike_future").get<bool>());
  REQUIRE(out.table);
  CHECK(out.table->text().rfind("r,m_phi,gap_estimate\n", 0) == 0);
  CHECK(out.table->rows.size() == cfg.quadrature.r_values.size());
}

TEST_CASE("a negative scalar curvature excess is reported with exit code 2", "[cli][penrose]") {
  const RunOutcome out = run(load_config_file(config_path("horosphere_cap_negative.yaml")));
  CHECK(out.exit_code == kExitHypotheses);
  CHECK_FALSE(out.document.at("hypothesis_flags").at("dominant_energy").get<bool>());
  CHECK_FALSE(out.document.at("hypothesis_flags").at("inequality_asserted").get<bool>());
  CHECK(out.document.at("results").contains("margin_chi"));
}

TEST_CASE("penrose on the cap", "[cli][penrose]") {
  const RunOutcome out = run(load_config_file(config_path("horosphere_cap_penrose.yaml")));
  CHECK(out.exit_code == kExitOk);
  CHECK(value_of(out.document.at("results").at("margin_chi")) >= 0.0);
  CHECK(out.document.at("hypothesis_flags").at("alexandrov_fenchel_applies").get<bool>());
}

TEST_CASE("decay command", "[cli][decay]") {
  const RunOutcome good = run(load_config_file(config_path("decay_tau3.yaml")));
  CHECK(good.exit_code == kExitOk);
  CHECK(value_of(good.document.at("results").at("tau_hat")) == Approx(3.0).epsilon(0.1));
  const RunOutcome bad = run(load_config_file(config_path("horosphere_decay.yaml")));
  CHECK(bad.exit_code == kExitHypotheses);
  CHECK_FALSE(bad.document.at("hypothesis_flags").at("admissible").get<bool>());
}

TEST_CASE("map and inspect commands", "[cli]") {
  RunConfig map = load_config_file(config_path("ads_schwarzschild_map.yaml"));
  const RunOutcome m = run(map);
  REQUIRE(m.table);
  CHECK(m.table->header == std::vector<std::string>{"x0", "x1", "u", "y0", "y1", "y2"});
  for (const auto& row : m.table->rows) CHECK(row.back() > 0.0);
  const RunOutcome ins = run(load_config_file(config_path("horosphere_inspect.yaml")));
  CHECK(ins.exit_code == kExitOk);
  RunConfig csv = load_config_file(config_path("horosphere_inspect.yaml"));
  csv.format = OutputFormat::Csv;
  CHECK_THROWS_AS(run(csv), Error);
}

TEST_CASE("same configuration gives the same bytes", "[cli][determinism]") {
  RunConfig cfg = load_config_file(config_path("ads_schwarzschild_verify.yaml"));
  cfg.sample.count = 10;
  const std::string a = to_json_text(run(cfg).document);
  cfg.threads = 4;
  const std::string b = to_json_text(run(cfg).document);
  CHECK(a == b);
}

TEST_CASE("error documents", "[cli]") {
  const Json doc = error_document(Error(ErrorCode::WallMismatch, "no wall"));
  CHECK(doc.at("error").at("code") == to_string(ErrorCode::WallMismatch));
  CHECK(doc.at("error").at("message").get<std::string>().find("no wall") != std::string::npos);
}
