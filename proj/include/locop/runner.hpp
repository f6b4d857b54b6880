#pragma once

#include <memory>
#include <string>
#include <vector>

#include "locop/config.hpp"
#include "locop/quantizers.hpp"
#include "locop/report.hpp"

namespace locop {

/// The configured operator on its 1-D grid.
std::unique_ptr<LinearOperator> build_operator(const ExperimentConfig& cfg);
/// The configured phase-space map (canonical maps need a fio operator).
BiLipschitzMap build_chi(const ExperimentConfig& cfg);

/// Runs cfg.plan() in order. Artifacts (CSV profiles, optional gnuplot
/// script) go to cfg.output.dir when it is set; rows reference them by file
/// name. Module errors are rethrown with the experiment id and diagnostic.
std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg);

/// Runs only the listed diagnostics, ignoring the configured plan.
std::vector<ReportRow> run_diagnostics(const ExperimentConfig& cfg, const std::vector<std::string>& names);

/// V_phi(T phi) on the configured lattice as CSV (x, xi, re, im, modulus) plus
/// a JSON sidecar with the lattice metadata. Returns one summary row.
std::vector<ReportRow> dump_stft(const ExperimentConfig& cfg, const std::string& dir);
/// Operator kernel in the binary matrix format (entries K with T f = K f h).
std::vector<ReportRow> dump_kernel(const ExperimentConfig& cfg, const std::string& dir);
/// Gabor matrix M[z][w] in the binary matrix format.
std::vector<ReportRow> dump_gabor(const ExperimentConfig& cfg, const std::string& dir);

}  // namespace locop
