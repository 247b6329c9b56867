#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "ellis/error.hpp"
#include "ellis/experiment.hpp"

using namespace ellis;
namespace fs = std::filesystem;

namespace {

Json config(Json model, Json pipeline) {
  return {{"schema", kConfigSchema}, {"name", "test"}, {"model", std::move(model)}, {"pipeline", std::move(pipeline)}};
}

Report run(const Json& j) { return run_experiment(parse_config(j)); }

ErrorCode parse_error(const Json& j) {
  try {
    parse_config(j);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("config was accepted");
  return ErrorCode::invariant_violation;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const Json golden = {{"shift", {{"kind", "forbidden"}, {"alphabet", "01"}, {"forbidden", {"11"}}}}};

}  // namespace

TEST_CASE("an empty pipeline reports only the config") {
  auto r = run(config({{"catalog", "identity"}}, Json::array()));
  const auto& d = r.document;
  CHECK(d.at("schema") == kReportSchema);
  CHECK(d.at("tool").at("name") == kToolName);
  CHECK(d.at("config").at("name") == "test");
  CHECK(d.at("steps").empty());
  CHECK(d.at("summary").at("verdict") == "pass");
  CHECK(r.exit_code() == 0);
}

TEST_CASE("config validation") {
  auto base = config({{"catalog", "square-map"}}, Json::array({{{"op", "approx_envelope"}}}));
  CHECK_NOTHROW(parse_config(base));

  auto bad_op = base;
  bad_op["pipeline"][0]["op"] = "aprox_envelope";
  CHECK(parse_error(bad_op) == ErrorCode::invalid_config);

  auto bad_type = base;
  bad_type["pipeline"][0]["params"] = {{"horizon", "sixty"}};
  CHECK(parse_error(bad_type) == ErrorCode::invalid_config);

  auto bad_param = base;
  bad_param["pipeline"][0]["params"] = {{"horizn", 60}};
  CHECK(parse_error(bad_param) == ErrorCode::invalid_config);

  auto bad_key = base;
  bad_key["pipelines"] = Json::array();
  CHECK(parse_error(bad_key) == ErrorCode::invalid_config);

  auto bad_model = base;
  bad_model["model"] = {{"catalog", "no-such-model"}};
  CHECK(parse_error(bad_model) == ErrorCode::invalid_config);

  auto bad_schema = base;
  bad_schema["schema"] = "something-else/1";
  CHECK(parse_error(bad_schema) == ErrorCode::invalid_config);

  auto dup = config({{"catalog", "identity"}}, Json::array({{{"op", "describe"}, {"id", "a"}},
                                                            {{"op", "describe"}, {"id", "a"}}}));
  CHECK(parse_error(dup) == ErrorCode::invalid_config);

  auto bad_id = config({{"catalog", "identity"}}, Json::array({{{"op", "describe"}, {"id", "a b"}}}));
  CHECK(parse_error(bad_id) == ErrorCode::invalid_config);

  auto twice = parse_config(config({{"catalog", "identity"}}, Json::array({{{"op", "describe"}}, {{"op", "describe"}}})));
  CHECK(twice.pipeline[0].id != twice.pipeline[1].id);

  auto names = operation_names();
  CHECK(std::is_sorted(names.begin(), names.end()));
}

TEST_CASE("golden-mean entropy table") {
  auto r = run(config(golden, Json::array({{{"op", "entropy"}, {"id", "entropy"}, {"params", {{"n_max", 20}}}}})));
  REQUIRE(r.tables.size() == 1);
  const auto& t = r.tables[0];
  CHECK(t.columns.size() >= 2);
  CHECK(t.columns[0] == "n");
  CHECK(t.columns[1] == "per_symbol");
  REQUIRE(t.rows.size() == 20);
  double a = 1, b = 2;  // |B_0|, |B_1|
  for (std::size_t n = 1; n <= 20; ++n) {
    CHECK(t.rows[n - 1][0] == n);
    CHECK(t.rows[n - 1][1].get<double>() == doctest::Approx(std::log(b) / n).epsilon(1e-12));
    double next = a + b;
    a = b;
    b = next;
  }
  auto csv = render_csv(t);
  CHECK(csv.rfind("n,per_symbol", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("square-map envelope pipeline") {
  auto r = run(config({{"catalog", "square-map"}, {"params", {{"grid", "201"}}}},
                      Json::array({{{"op", "approx_envelope"},
                                    {"id", "env"},
                                    {"params", {{"horizon", 60}, {"tau", 1e-3}, {"two_sided", true}}},
                                    {"expect", {{"limit_count", 2}}}},
                                   {{"op", "match_references"}, {"expect", {{"all_matched", true}}}},
                                   {{"op", "idempotents"}, {"expect", {{"count", 3}}}}})));
  CHECK(r.exit_code() == 0);
  const auto& env = r.document.at("steps").at(0).at("result");
  CHECK(env.at("table").size() == env.at("size"));
  auto text = render_text(r);
  CHECK(text.find("[env] approx_envelope - ok") != std::string::npos);
  CHECK(text.find("lim#1") != std::string::npos);
  CHECK(text.find("summary: pass") != std::string::npos);
}

TEST_CASE("step failures do not stop the pipeline") {
  auto r = run(config({{"catalog", "identity"}},
                      Json::array({{{"op", "idempotents"}}, {{"op", "exact_envelope"}}, {{"op", "idempotents"}}})));
  const auto& steps = r.document.at("steps");
  CHECK(steps.at(0).at("status") == "error");
  CHECK(steps.at(0).at("error").at("code") == "dependency");
  CHECK(steps.at(1).at("status") == "ok");
  CHECK(steps.at(2).at("status") == "ok");
  CHECK(r.exit_code() == 1);
  CHECK(r.document.at("summary").at("verdict") == "error");

  auto shift_on_model = run(config({{"catalog", "identity"}}, Json::array({{{"op", "entropy"}}})));
  CHECK(shift_on_model.step_errors == 1);
}

TEST_CASE("failed expectations give exit code 2") {
  auto r = run(config({{"catalog", "identity"}, {"params", {{"n", "3"}}}},
                      Json::array({{{"op", "exact_envelope"}, {"expect", {{"size", 2}}}}})));
  CHECK(r.exit_code() == 2);
  CHECK(r.document.at("summary").at("expectations_failed") == 1);
  CHECK(r.document.at("summary").at("verdict") == "fail");
}

TEST_CASE("expectation semantics") {
  Json doc = {{"a", {{"b", Json::array({1, 2, 3})}, {"x", 0.5}}}, {"s", "lim#1"}};
  REQUIRE(json_path(doc, "a.b.1"));
  CHECK(*json_path(doc, "a.b.1") == 2);
  CHECK(*json_path(doc, "a.b.length") == 3);
  CHECK(json_path(doc, "a.c") == nullptr);
  CHECK(json_path(doc, "a.b.7") == nullptr);
  CHECK(expectation_holds(0.1 + 0.2, 0.3));
  CHECK_FALSE(expectation_holds(0.31, 0.3));
  CHECK(expectation_holds(0.31, {{"approx", 0.3}, {"tol", 0.02}}));
  CHECK(expectation_holds(5, {{"lt", 6}, {"ge", 5}}));
  CHECK_FALSE(expectation_holds(5, {{"gt", 5}}));
  CHECK(expectation_holds(Json::array({"e", "f"}), {{"contains", "f"}}));
  CHECK(expectation_holds("lim#1", {{"contains", "lim"}}));
  CHECK(expectation_holds("x", "x"));
  CHECK_FALSE(expectation_holds(1, "1"));
}

TEST_CASE("report emission") {
  auto r = run(config(golden, Json::array({{{"op", "entropy"}, {"id", "entropy"}, {"params", {{"n_max", 8}}}}})));
  auto dir = fs::temp_directory_path() / "ellis-test-emit";
  fs::remove_all(dir);
  auto written = emit_report(r, dir, {"json", "csv", "text"});
  CHECK(fs::exists(dir / "report.json"));
  CHECK(fs::exists(dir / "timings.json"));
  CHECK(fs::exists(dir / "entropy.csv"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(Json::parse(slurp(dir / "report.json")) == r.document);
  CHECK(slurp(dir / "report.json") == dump_report(r.document));
  CHECK(written.size() == 4);

  // a regular file where the directory should be
  auto blocker = fs::temp_directory_path() / "ellis-test-blocker";
  std::ofstream(blocker) << "x";
  try {
    emit_report(r, blocker / "sub", {"json"});
    FAIL("expected io-failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::io_failure);
  }
  fs::remove(blocker);
  fs::remove_all(dir);
}

TEST_CASE("catalog listing") {
  auto a = catalog_listing();
  CHECK(a == catalog_listing());
  bool square = false, stack = false;
  for (const auto& e : a) {
    square = square || e.at("name") == "square-map";
    stack = stack || e.at("name") == "periodic-stack";
    CHECK(e.contains("params"));
  }
  CHECK(square);
  CHECK(stack);
  CHECK(render_catalog().find("neg-cube") != std::string::npos);
}

TEST_CASE("reports are deterministic") {
  auto j = config({{"catalog", "full-shift"}, {"params", {{"samples", "200"}}}},
                  Json::array({{{"op", "rigidity"}, {"params", {{"horizon", 100}, {"tau", 0.4}, {"tuple_size", 2}}}},
                               {{"op", "approx_envelope"}, {"params", {{"horizon", 100}, {"tau", 0.4}}}}}));
  j["seed"] = 42;
  CHECK(dump_report(run(j).document) == dump_report(run(j).document));
}

TEST_CASE("config files resolve relative paths") {
  auto cfg = load_config(fs::path(ELLIS_SOURCE_DIR) / "configs" / "acceptance" / "golden_mean.json");
  CHECK(cfg.base_dir == fs::path(ELLIS_SOURCE_DIR) / "configs" / "acceptance");
  CHECK(run_experiment(cfg).exit_code() == 0);
  CHECK_THROWS_AS(load_config("/nonexistent/config.json"), Error);
}
