#include <doctest.h>

#include <cmath>
#include <functional>
#include <optional>
#include <sstream>

#include "finsler/commands.hpp"

using namespace finsler;

namespace {

Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}

std::optional<ErrorCode> code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

// Small grid so the command tests stay fast.
const char* kSmallGrid = "grid = 0.6:1.8:6, 0.1:0.8:5, 2\n";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("defaults") {
    const RunConfig cfg = parse_config("");
    CHECK(cfg.metric == "bryant");
    CHECK(cfg.c == 2.0);
    CHECK(cfg.n == 2);
    CHECK(cfg.tol == 1e-8);
    CHECK(cfg.oracle == OracleMode::Off);
    CHECK_FALSE(cfg.checks.empty());
  }

  TEST_CASE("documents and overrides") {
    const RunConfig cfg = parse_config(
        "# comment\n"
        "metric = family\n"
        "f2 = 1, 0.5   # trailing comment\n"
        "c1 = 0 0.2\n"
        "grid = 0.5:1.5:3, 0.1:0.5:2, 1\n"
        "check = landsberg, flat\n",
        {{"n", "3"}, {"tol", "1e-6"}});
    CHECK(cfg.metric == "family");
    CHECK(cfg.n == 3);
    CHECK(cfg.tol == 1e-6);
    CHECK(cfg.f2 == std::vector<double>{1.0, 0.5});
    CHECK(cfg.c1 == std::vector<double>{0.0, 0.2});
    CHECK(cfg.grid.r.count == 3);
    CHECK(cfg.grid.s_fraction.hi == 0.5);
    CHECK(cfg.grid.angle_count == 1);
    REQUIRE(cfg.checks.size() == 2);
    CHECK(cfg.checks[0] == Claim::Landsberg);
    CHECK(cfg.checks[1] == Claim::Flat);
  }

  TEST_CASE("rejections") {
    CHECK(code_of([] { (void)parse_config("foo = 1"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { (void)parse_config("no equals sign"); }) == ErrorCode::ParseError);
    CHECK(code_of([] { (void)parse_config("c = 1/3\ncheck = non-berwald"); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { (void)parse_config("n = 7"); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { (void)parse_config("metric = hyperbolic"); }) == ErrorCode::ValidationError);
    CHECK(code_of([] { (void)parse_config("oracle = maybe"); }) == ErrorCode::ParseError);
  }

  TEST_CASE("numbers") {
    CHECK(parse_real("1/3", "c") == 1.0 / 3.0);
    CHECK(parse_real("-2.5e-1", "c") == -0.25);
    CHECK(code_of([] { (void)parse_real("1/0", "c"); }).has_value());
    CHECK(parse_list("1, 2 3", "f") == std::vector<double>{1, 2, 3});
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02e23, 1e-16}) {
      CHECK(std::stod(format_number(v)) == v);
    }
    CHECK(format_number(0.5) == "0.5");
  }

  TEST_CASE("report") {
    const RunConfig cfg = parse_config("");
    const Json doc = report_document(cfg, vec({1, 0}), vec({0, 1}));
    CHECK(doc["schema_version"] == kSchemaVersion);
    CHECK(doc["spray"]["P"].get<double>() == doctest::Approx(2.0));
    CHECK(doc["spray"]["Q"].get<double>() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(doc["residuals"]["res_weak_berwald"].get<double>() == doctest::Approx(5.0));

    std::ostringstream out;
    CHECK(cmd_report(cfg, vec({1, 0}), vec({2, 0}), out) == kExitInvalid);
    const Json err = Json::parse(out.str());
    CHECK(err["error"]["code"] == "SingularFrame");
  }

  TEST_CASE("check: bryant passes its default claims") {
    const CheckOutcome o = run_check(parse_config(kSmallGrid));
    CHECK(o.pass);
    for (const auto& claim : o.summary["claims"]) CHECK(claim["pass"].get<bool>());
  }

  TEST_CASE("check: perturbed family is not landsberg") {
    const RunConfig cfg = parse_config(std::string(kSmallGrid) + "metric = family\ng = 0.1\ncheck = landsberg\n");
    const CheckOutcome o = run_check(cfg);
    CHECK_FALSE(o.pass);
    std::ostringstream out;
    CHECK(cmd_check(cfg, out) == kExitCheckFailure);
  }

  TEST_CASE("check csv is deterministic and round-trips") {
    const RunConfig cfg = parse_config(std::string(kSmallGrid) + "format = csv\nseed = 11\n");
    const CheckOutcome a = run_check(cfg);
    const CheckOutcome b = run_check(cfg);
    CHECK(a.csv == b.csv);
    const auto rows = csv_rows(a.csv);
    REQUIRE(rows.size() > 1);
    CHECK(rows[0].front() == "r");
    CHECK(rows[0].back() == "valid");
    for (std::size_t i = 1; i < rows.size(); ++i) {
      REQUIRE(rows[i].size() == rows[0].size());
      const std::string& cell = rows[i][4];
      if (cell != "nan") CHECK(format_number(std::stod(cell)) == cell);
    }
  }

  TEST_CASE("scan through c = 1/3") {
    const RunConfig cfg = parse_config(kSmallGrid);
    const auto rows = csv_rows(run_scan(cfg, "c", {0.0, 1.0 / 3.0, 2.0}));
    REQUIRE(rows.size() == 4);
    CHECK(rows[0][0] == "parameter");
    CHECK(rows[0][4] == "max_abs_weak_berwald");
    CHECK(std::stod(rows[2][4]) < 1e-12);
    CHECK(std::stod(rows[3][4]) > 1.0);
    CHECK(std::stod(rows[1][2]) > 0);  // spray frames survive the degenerate metric

    CHECK(code_of([&] { (void)run_scan(cfg, "c", {}); }) == ErrorCode::ValidationError);
    CHECK(code_of([&] { (void)run_scan(cfg, "f2[0]", {1.0}); }) == ErrorCode::ValidationError);
  }

  TEST_CASE("verify without oracle") {
    const VerifyOutcome v = run_verify(parse_config("oracle = off"));
    CHECK(v.pass);
    CHECK_FALSE(v.results.empty());
    CHECK(v.document["oracle"]["semi"] == false);
  }
}
