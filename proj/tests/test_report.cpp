#include "catch_amalgamated.hpp"

#include <limits>

#include "oqho/config.hpp"
#include "oqho/report.hpp"
#include "test_support.hpp"

using namespace oqho;
using testing::code_of;

namespace {

const char* kTiny = R"({
  "n": 2, "m": 2,
  "R": [[0, 0], [0, 0]],
  "M": [[1, 0], [0, 1]],
  "theta_list": [0.1],
  "orders": [2, 3],
  "eps_grid": {"min": 2, "max": 6, "steps": 3}
})";

}  // namespace

TEST_CASE("non-finite values are tagged") {
  const double inf = std::numeric_limits<double>::infinity();
  CHECK(tagged(1.5) == Json(1.5));
  CHECK(tagged(inf) == Json{{"inf", true}});
  CHECK(tagged(-inf) == Json{{"inf", true}, {"negative", true}});
  CHECK(tagged(std::nan("")).is_null());
}

TEST_CASE("doubles round-trip through the writer") {
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(-0.0) == "0");
  Json j;
  j["x"] = 0.1;
  j["row"] = Json::array({1, 2.5});
  j["m"] = to_json(Mat(Mat::Identity(2, 2)));
  const std::string s = dump(j);
  CHECK(s.find("\"x\": 0.10000000000000001") != std::string::npos);
  CHECK(s.find("[1, 2.5]") != std::string::npos);
  CHECK(s.find("[1, 0]") != std::string::npos);
  CHECK(Json::parse(s)["x"].get<double>() == 0.1);
}

TEST_CASE("config parsing") {
  const AnalysisConfig cfg = parse_config(kTiny);
  CHECK(cfg.source == "inline");
  CHECK((cfg.theta - 0.5 * block_J(2)).norm() == 0.0);
  CHECK((cfg.Pi - Mat::Identity(2, 2)).norm() == 0.0);
  REQUIRE(cfg.eps_grid);
  CHECK(cfg.eps_grid->values() == std::vector<double>{2, 4, 6});
  CHECK_FALSE(cfg.mc);

  const AnalysisConfig fx = parse_config(R"({"fixture": "paper-example"})");
  CHECK(fx.source == "paper-example");
  CHECK(fx.orders == std::vector<int>{2, 3});
}

TEST_CASE("config errors") {
  try {
    parse_config("{\n  \"n\": 2,,\n}");
    FAIL("expected ConfigParse");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ConfigParse);
    CHECK(std::string(e.what()).find("malformed JSON at 2:") != std::string::npos);
  }
  CHECK(code_of([] { parse_config(R"({"n": 2, "m": 2, "R": [[0]], "M": [[1, 0], [0, 1]]})"); }) ==
        ErrorCode::DimensionMismatch);
  CHECK(code_of([] { parse_config(R"({"n": 2, "m": 2, "M": [[1, 0], [0, 1]]})"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_config(R"({"fixture": "nope"})"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_config(R"({"fixture": "tiny", "orders": [1]})"); }) == ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_config(R"({"fixture": "tiny", "quadrature": {"abs_tol": 0}})"); }) ==
        ErrorCode::ConfigParse);
  CHECK(code_of([] { parse_config("[1, 2]"); }) == ErrorCode::ConfigParse);
  AnalysisConfig bad = parse_config(R"({"fixture": "tiny", "Pi": [[1, 0], [0, -1]]})");
  CHECK(code_of([&] { config_model(bad); }) == ErrorCode::ModelInvalid);
}

TEST_CASE("tiny analysis report") {
  const Report r = analyze(parse_config(kTiny));
  CHECK(r.exit_code == 0);
  CHECK(r.json["errors"].empty());
  CHECK(r.json["quartic"]["theta0"] == Json{{"inf", true}});
  CHECK(r.json["quartic"]["mean_rate"].get<double>() == Catch::Approx(1.0).epsilon(1e-14));
  CHECK(r.json["deviation"]["curve"].size() == 3);
  CHECK(r.json["provenance"]["source"] == "inline");
  CHECK_FALSE(r.json["provenance"].contains("wall_clock_s"));
  // identical inputs give byte-identical output
  CHECK(dump(r.json) == dump(analyze(parse_config(kTiny)).json));
}

TEST_CASE("an unstable model fails every block") {
  const Report r = analyze(parse_config(R"({"n": 2, "m": 2, "R": [[1, 0], [0, 1]], "M": [[0, 0], [0, 0]]})"));
  CHECK(r.exit_code == 3);
  CHECK(r.json["model"]["hurwitz"] == false);
  CHECK(r.json["errors"].size() == 5);
  CHECK(r.json["steady_state"].contains("error"));
}

TEST_CASE("CSV writers") {
  CHECK(delta_csv(delta_table(3)) == "gamma_bits,count\n0,1\n1,1\n");
  CHECK(cumulants_csv({2, 3}, {0.5, -0.0}) == "order,rate\n2,0.5\n3,0\n");
  TailBoundCurve c;
  CHECK(bound_csv(c) == "epsilon,bound_closed,bound_numeric,theta_star\n");
  c.epsilon = {1.0};
  c.closed = {std::nan("")};
  c.numeric = {-0.25};
  c.theta_star = {0.1875};
  CHECK(bound_csv(c) == "epsilon,bound_closed,bound_numeric,theta_star\n1,nan,-0.25,0.1875\n");
}
