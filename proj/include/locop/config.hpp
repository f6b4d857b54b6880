#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "locop/phase.hpp"
#include "locop/symbols.hpp"
#include "locop/weights.hpp"

namespace locop {

struct GridConfig {
  double extent = 16.0;
  std::size_t samples = 256;
  std::size_t pad = 2;           ///< xi oversampling of two-parameter symbols
  std::size_t xi_samples = 128;  ///< xi samples of three-parameter symbols
};

struct PhaseConfig {
  std::string kind = "bilinear";  ///< bilinear | quadratic | shifted
  double a = 0.0, b = 0.0, cross = 0.0, x0 = 0.0;
  [[nodiscard]] PhaseSpec spec() const;
};

struct OperatorConfig {
  std::string kind = "identity";  ///< identity | tau | threeparam | fio | tau_transform
  double tau = 0.5;
  double tau2 = 0.0;
  std::optional<SymbolExpr> symbol;
  PhaseConfig phase;
};

struct LatticeConfig {
  double alpha = 0.5;
  double radius = 4.0;
};

struct WeightsConfig {
  std::vector<double> s = {0.0, 1.0, 2.0};  ///< polynomial orders for nu_s
  double m = 0.0;                           ///< order of the moderate weight m
  std::vector<std::pair<double, double>> pq = {{1, 1}, {2, 2}, {2, 1}};
};

struct ChiConfig {
  std::string kind = "identity";  ///< identity | affine | canonical
  std::vector<double> matrix = {1, 0, 0, 1};
  std::vector<double> offset = {0, 0};
};

/// Cube grid used by the symbol decomposition and translation diagnostics.
struct AtomsConfig {
  double extent = 8.0;
  std::size_t samples = 64;
};

struct OutputConfig {
  std::string dir;
  std::string format = "csv";
  bool gnuplot = false;
};

struct ExperimentConfig {
  std::string id = "experiment";
  GridConfig grid;
  OperatorConfig op;
  LatticeConfig lattice;
  WeightsConfig weights;
  ChiConfig chi;
  AtomsConfig atoms;
  std::string pipeline;                 ///< thm2 | thm3 | thm4 | thm5, or empty
  std::vector<std::string> diagnostics;  ///< run after the pipeline's own list
  OutputConfig output;
  std::uint64_t seed = 1;

  /// Diagnostics in execution order: the pipeline list, then extra ones not already present.
  [[nodiscard]] std::vector<std::string> plan() const;
};

/// Known diagnostic names.
const std::vector<std::string>& diagnostic_names();
/// Diagnostics of a pipeline preset.
std::vector<std::string> pipeline_diagnostics(const std::string& pipeline);

/// Parses and validates a JSON document. Errors are ErrorKind::config with a
/// stable code and the JSON path, e.g. tau.range at operator.tau.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// Symbol expression from its JSON form; `path` prefixes error locations.
SymbolExpr parse_symbol(const std::string& json_text, const std::string& path = "symbol");

}  // namespace locop
