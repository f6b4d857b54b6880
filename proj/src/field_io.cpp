#include "locop/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "locop/error.hpp"

namespace locop {
namespace {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little, "binary format assumes little endian");

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::io, "io.open", "cannot open for writing", path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "io.open", "cannot open for reading", path);
  return in;
}

void write_payload(std::ofstream& out, const cplx* data, std::size_t n, const std::string& path) {
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(cplx)));
  if (!out) throw Error(ErrorKind::io, "io.write", "write failed", path);
}

void read_payload(std::ifstream& in, cplx* data, std::size_t n, const std::string& path) {
  in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(cplx)));
  if (in.gcount() != static_cast<std::streamsize>(n * sizeof(cplx)))
    throw Error(ErrorKind::io, "io.truncated", "payload shorter than header promises", path);
}

json read_header(std::ifstream& in, const std::string& path) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::io, "io.header", "missing header line", path);
  try {
    return json::parse(line);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, "io.header", e.what(), path);
  }
}

cplx parse_value(const std::string& token) {
  const auto colon = token.find(':');
  if (colon == std::string::npos) return {std::stod(token), 0.0};
  return {std::stod(token.substr(0, colon)), std::stod(token.substr(colon + 1))};
}

}  // namespace

void write_field(const std::string& path, const SampledField& f) {
  auto out = open_out(path);
  json header;
  header["dim"] = f.grid().dim();
  header["extents"] = f.grid().extents();
  header["samples"] = f.grid().sample_counts();
  out << header.dump() << '\n';
  write_payload(out, f.values().data(), f.size(), path);
}

SampledField read_field(const std::string& path) {
  auto in = open_in(path);
  const json header = read_header(in, path);
  GridSpec grid;
  try {
    grid = GridSpec(header.at("extents").get<std::vector<double>>(),
                    header.at("samples").get<std::vector<std::size_t>>());
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, "io.header", e.what(), path);
  }
  SampledField f(grid);
  read_payload(in, f.values().data(), f.size(), path);
  return f;
}

void write_matrix(const std::string& path, const Eigen::MatrixXcd& m, const GridSpec* grid) {
  auto out = open_out(path);
  json header;
  header["rows"] = m.rows();
  header["cols"] = m.cols();
  if (grid) {
    header["extents"] = grid->extents();
    header["samples"] = grid->sample_counts();
  }
  out << header.dump() << '\n';
  // Eigen is column-major; the file is row-major.
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm = m;
  write_payload(out, rm.data(), static_cast<std::size_t>(rm.size()), path);
}

Eigen::MatrixXcd read_matrix(const std::string& path) {
  auto in = open_in(path);
  const json header = read_header(in, path);
  Eigen::Index rows = 0, cols = 0;
  try {
    rows = header.at("rows").get<Eigen::Index>();
    cols = header.at("cols").get<Eigen::Index>();
  } catch (const json::exception& e) {
    throw Error(ErrorKind::io, "io.header", e.what(), path);
  }
  Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> rm(rows, cols);
  read_payload(in, rm.data(), static_cast<std::size_t>(rm.size()), path);
  return rm;
}

SampledField read_field_csv(const std::string& path, const GridSpec& grid) {
  if (grid.dim() > 2) fail("csv.dim", "CSV import supports 1-D and 2-D grids");
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::io, "io.open", "cannot open for reading", path);
  std::vector<cplx> values;
  std::string line;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> tokens;
    std::stringstream ss(line);
    for (std::string tok; std::getline(ss, tok, ',');) tokens.push_back(tok);
    try {
      if (grid.dim() == 1) {
        if (tokens.size() == 2)
          values.emplace_back(std::stod(tokens[0]), std::stod(tokens[1]));
        else
          values.push_back(parse_value(tokens.at(0)));
      } else {
        if (tokens.size() != grid.samples(1))
          throw Error(ErrorKind::io, "csv.shape", "row length does not match grid", path);
        for (const auto& t : tokens) values.push_back(parse_value(t));
      }
    } catch (const std::invalid_argument&) {
      throw Error(ErrorKind::io, "csv.parse", "non-numeric entry on line " + std::to_string(rows + 1), path);
    }
    ++rows;
  }
  if (values.size() != grid.size())
    throw Error(ErrorKind::io, "csv.shape", "sample count does not match grid", path);
  return SampledField(grid, std::move(values));
}

}  // namespace locop
