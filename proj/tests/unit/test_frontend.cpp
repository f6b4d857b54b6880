#include <cmath>
#include <map>
#include <string>

#include "doctest.h"
#include "locop/config.hpp"
#include "locop/error.hpp"
#include "locop/report.hpp"
#include "locop/runner.hpp"
#include "locop/symbols.hpp"

using namespace locop;

namespace {

// Parses text and returns the (code, path) of the config error it raises.
std::pair<std::string, std::string> config_failure(const std::string& text) {
  try {
    parse_config(text);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::config);
    return {e.code(), e.path()};
  }
  return {"", ""};
}

const ReportRow* find_row(const std::vector<ReportRow>& rows, const std::string& diag, const std::string& quantity) {
  for (const auto& r : rows)
    if (r.diagnostic == diag && r.quantity == quantity) return &r;
  return nullptr;
}

}  // namespace

TEST_CASE("config defaults") {
  const auto cfg = parse_config("{}");
  CHECK(cfg.id == "experiment");
  CHECK(cfg.grid.extent == 16.0);
  CHECK(cfg.grid.samples == 256);
  CHECK(cfg.op.kind == "identity");
  CHECK(cfg.lattice.alpha == 0.5);
  CHECK(cfg.output.format == "csv");
  CHECK(cfg.plan().empty());

  const auto t2 = parse_config(R"({"pipeline": "thm2", "diagnostics": ["svd", "boundedness"],
    "operator": {"kind": "tau", "tau": 1, "symbol": {"family": "gaussian", "center": [0, 0]}}})");
  const std::vector<std::string> plan = {"sjostrand", "m0", "envelope", "weakcpt", "svd", "boundedness"};
  CHECK(t2.plan() == plan);
}

TEST_CASE("config errors carry code and path") {
  using P = std::pair<std::string, std::string>;
  CHECK(config_failure(R"({"operator": {"kind": "tau", "tau": 1.5,
      "symbol": {"family": "gaussian", "center": [0, 0]}}})") == P{"tau.range", "operator.tau"});
  CHECK(config_failure(R"({"operator": {"kind": "tau_transform", "tau": 0.5, "tau2": 0.5,
      "symbol": {"family": "gaussian", "center": [0, 0]}}})") == P{"tau.distinct", "operator.tau2"});
  CHECK(config_failure(R"({"operator": {"kind": "tau", "symbol": {"family": "wavelet"}}})") ==
        P{"family.unknown", "operator.symbol.family"});
  CHECK(config_failure(R"({"lattice": {"radius": 7}})").first == "lattice.margin");
  CHECK(config_failure(R"({"grid": {"samples": 300}})") == P{"grid.samples", "grid.samples"});
  CHECK(config_failure(R"({"grid": {"samples": 4096}})").first == "guard.kernel");
  CHECK(config_failure(R"({"grid": {"extent": 16}, "colour": 1})") == P{"config.unknown_key", "colour"});
  CHECK(config_failure(R"({"operator": {"kind": "tau"}})").first == "operator.symbol_missing");
  CHECK(config_failure(R"({"diagnostics": ["atoms"]})").first == "diagnostic.operator");
  CHECK(config_failure(R"({"lattice": {"alpha": 0.0625, "radius": 4}, "diagnostics": ["svd"]})").first ==
        "guard.gabor");
  CHECK(config_failure("{").first == "config.syntax");
  CHECK(config_failure(R"({"output": {"format": "xml"}})").first == "output.format");
  CHECK_THROWS_AS(load_config("/nonexistent/locop.json"), Error);
}

TEST_CASE("report formats") {
  CHECK(report_csv({}) == "experiment,diagnostic,quantity,value,verdict,thresholds,artifact\n");
  CHECK(format_number(0.1) == "0.10000000000000001");
  CHECK(format_short(0.1) == "0.1");
  CHECK(format_number(HUGE_VAL) == "inf");

  const std::vector<ReportRow> rows = {
      {"e", "svd", "rank", 12.0, "", "", ""},
      {"e", "weakcpt", "decaying", 1.0, "pass", "ratio<=0.1;alpha=0.5", "e_weakcpt.csv"},
      {"e", "sjostrand", "norm_nu0", std::nan(""), "fail", "finite", ""},
      {"e, \"quoted\"", "x", "y", -1.0 / 3.0, "", "", ""},
  };
  const std::string json = report_json(rows);
  const auto back = parse_report_json(json);
  CHECK(report_json(back) == json);
  CHECK(back[1] == rows[1]);
  CHECK(std::isnan(back[2].value));
  CHECK(report_csv(rows).find("\"e, \"\"quoted\"\"\"") != std::string::npos);
}

TEST_CASE("identity experiment") {
  const auto cfg = parse_config(R"({"id": "id", "diagnostics": ["boundedness", "weakcpt"]})");
  const auto rows = run_experiment(cfg);
  for (const char* tag : {"p1_q1", "p2_q2", "p2_q1"}) {
    const auto* r = find_row(rows, "boundedness", std::string("max_ratio_") + tag);
    REQUIRE(r != nullptr);
    CHECK(r->value == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto* wk = find_row(rows, "weakcpt", "decaying");
  REQUIRE(wk != nullptr);
  CHECK(wk->verdict == "fail");
}

TEST_CASE("bilinear FIO matches the tau = 1 quantization") {
  const std::string sym = R"("symbol": {"family": "gaussian", "center": [0, 0]})";
  const auto fio = run_experiment(parse_config(R"({"pipeline": "thm5", "operator": {"kind": "fio", )" + sym + "}}"));
  const auto kn =
      run_experiment(parse_config(R"({"pipeline": "thm2", "operator": {"kind": "tau", "tau": 1, )" + sym + "}}"));
  std::map<std::string, std::string> a, b;
  for (const auto& r : fio)
    if (!r.verdict.empty()) a[r.diagnostic + "/" + r.quantity] = r.verdict;
  for (const auto& r : kn)
    if (!r.verdict.empty()) b[r.diagnostic + "/" + r.quantity] = r.verdict;
  std::size_t shared = 0;
  for (const auto& [key, verdict] : a)
    if (b.count(key)) {
      ++shared;
      CHECK_MESSAGE(verdict == b[key], key);
    }
  CHECK(shared >= 3);
  CHECK(a["tameness/tame"] == "pass");
}

TEST_CASE("symbol expressions") {
  const auto g = SymbolExpr::gaussian({1.0, 0.0}, {2.0, 1.0});
  const double u[] = {1.0, 0.5};
  CHECK(std::abs(g(u) - std::exp(-kPi * 0.25)) <= 1e-15);
  CHECK(g.decay() == "schwartz");
  CHECK(SymbolExpr::bump({1.0}, {0.5}).decay() == "compact");
  CHECK(SymbolExpr::constant(2.0, 2).decay() == "bounded");
  const auto xonly = SymbolExpr::separable({SymbolExpr::gaussian({0.0}, {1.0}), SymbolExpr::constant(1.0, 1)});
  CHECK(xonly.depends_on(0));
  CHECK_FALSE(xonly.depends_on(1));
  CHECK(operator_symbol(xonly, GridSpec::cube(1, 16.0, 256)).constant_like);
  const double far[] = {2.0};
  CHECK(SymbolExpr::bump({1.0}, {0.5})(far) == 0.0);
  const auto pw = SymbolExpr::plane_wave({0.5}, SymbolExpr::constant(1.0, 1));
  const double quarter[] = {0.5};
  CHECK(std::abs(pw(quarter) - std::polar(1.0, kPi * 0.5)) <= 1e-15);
  CHECK(parse_symbol(R"({"family": "hermite", "orders": [1]})").dim() == 1);
}
