#pragma once

#include <functional>
#include <string>
#include <vector>

#include "locop/report.hpp"

namespace locop {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::size_t checks = 0;  ///< verdict rows behind the criterion
  std::string detail;      ///< first failing check, or a short summary
};

/// Called after each criterion with its number and wall time in seconds.
using AcceptanceProgress = std::function<void(int, double)>;

/// Criteria 1-11 as report rows (experiment "criterion_NN"). The report is
/// deterministic; timings only reach the progress callback.
std::vector<ReportRow> run_acceptance(const AcceptanceProgress& progress = {});

/// Groups verdict rows by criterion.
std::vector<CriterionResult> summarize_acceptance(const std::vector<ReportRow>& rows);

/// Runs the suite with the given worker count and writes the report.
std::vector<ReportRow> selftest(unsigned threads, const std::string& format, const std::string& path,
                                const AcceptanceProgress& progress = {});

}  // namespace locop
