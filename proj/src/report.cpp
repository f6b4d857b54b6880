#include "locop/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "json.hpp"
#include "locop/error.hpp"

namespace locop {
namespace {

using ordered = nlohmann::ordered_json;

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

// JSON has no literal for non-finite numbers, so they travel as strings.
ordered json_number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number_from_json(const ordered& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan") return std::nan("");
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
  }
  throw Error(ErrorKind::io, "report.parse", "value must be a number or nan/inf/-inf");
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return {buf, r.ptr};
}

std::string format_short(double v) {
  if (!std::isfinite(v)) return format_number(v);
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, r.ptr};
}

std::string report_csv(const std::vector<ReportRow>& rows) {
  std::string out = "experiment,diagnostic,quantity,value,verdict,thresholds,artifact\n";
  for (const auto& r : rows) {
    out += csv_field(r.experiment) + ',' + csv_field(r.diagnostic) + ',' + csv_field(r.quantity) + ',' +
           format_number(r.value) + ',' + csv_field(r.verdict) + ',' + csv_field(r.thresholds) + ',' +
           csv_field(r.artifact) + '\n';
  }
  return out;
}

std::string report_json(const std::vector<ReportRow>& rows) {
  ordered list = ordered::array();
  for (const auto& r : rows) {
    ordered o;
    o["experiment"] = r.experiment;
    o["diagnostic"] = r.diagnostic;
    o["quantity"] = r.quantity;
    o["value"] = json_number(r.value);
    o["verdict"] = r.verdict;
    o["thresholds"] = r.thresholds;
    o["artifact"] = r.artifact;
    list.push_back(std::move(o));
  }
  return list.dump(2) + "\n";
}

std::vector<ReportRow> parse_report_json(const std::string& text) {
  ordered list;
  try {
    list = ordered::parse(text);
  } catch (const ordered::parse_error& e) {
    throw Error(ErrorKind::io, "report.parse", e.what());
  }
  if (!list.is_array()) throw Error(ErrorKind::io, "report.parse", "report must be an array");
  std::vector<ReportRow> rows;
  for (const auto& o : list) {
    try {
      rows.push_back({o.at("experiment").get<std::string>(), o.at("diagnostic").get<std::string>(),
                      o.at("quantity").get<std::string>(), number_from_json(o.at("value")),
                      o.at("verdict").get<std::string>(), o.at("thresholds").get<std::string>(),
                      o.at("artifact").get<std::string>()});
    } catch (const ordered::exception& e) {
      throw Error(ErrorKind::io, "report.parse", e.what());
    }
  }
  return rows;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::io, "io.open", "cannot open file for writing", path);
  out << text;
  out.flush();
  if (!out) throw Error(ErrorKind::io, "io.write", "write failed", path);
}

void emit_report(const std::vector<ReportRow>& rows, const std::string& format, const std::string& path) {
  if (format == "csv") {
    write_text_file(path, report_csv(rows));
  } else if (format == "json") {
    write_text_file(path, report_json(rows));
  } else {
    fail("output.format", "format must be csv or json");
  }
}

}  // namespace locop
