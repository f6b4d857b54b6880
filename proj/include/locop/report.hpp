#pragma once

#include <string>
#include <vector>

namespace locop {

/// One scalar result. Verdict rows ("pass" / "fail") carry their thresholds
/// and lattice parameters in `thresholds`; plain measurements leave verdict empty.
struct ReportRow {
  std::string experiment;
  std::string diagnostic;
  std::string quantity;
  double value = 0.0;
  std::string verdict;
  std::string thresholds;
  std::string artifact;  ///< path of a CSV profile, if any

  bool operator==(const ReportRow&) const = default;
};

/// 17 significant digits, '.' separator; non-finite values print as nan, inf, -inf.
std::string format_number(double v);
/// Shortest round-trip form, for labels and thresholds.
std::string format_short(double v);

std::string report_csv(const std::vector<ReportRow>& rows);
std::string report_json(const std::vector<ReportRow>& rows);
/// Inverse of report_json; report_json(parse_report_json(s)) == s for emitted s.
std::vector<ReportRow> parse_report_json(const std::string& text);

/// Writes csv or json. I/O failures raise ErrorKind::io with the path.
void emit_report(const std::vector<ReportRow>& rows, const std::string& format, const std::string& path);

/// Writes text to a file, raising ErrorKind::io on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace locop
