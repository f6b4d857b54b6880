#pragma once

#include <Eigen/Dense>
#include <string>

#include "locop/grid.hpp"

namespace locop {

/// Binary field file: one JSON header line {"dim","extents","samples"}, then
/// little-endian float64 (re, im) pairs in row-major order.
void write_field(const std::string& path, const SampledField& f);
SampledField read_field(const std::string& path);

/// Binary matrix file with the same layout; header {"rows","cols"} plus
/// optional grid metadata for kernels.
void write_matrix(const std::string& path, const Eigen::MatrixXcd& m, const GridSpec* grid = nullptr);
Eigen::MatrixXcd read_matrix(const std::string& path);

/// CSV import. 1-D: one sample per line, "re" or "re,im". 2-D: each line is a
/// row of real values, or "re:im" tokens for complex entries. The grid must
/// match the parsed shape.
SampledField read_field_csv(const std::string& path, const GridSpec& grid);

}  // namespace locop
