#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace locop {

/// Phase-space point z = (x, xi) with x, xi in R^d, d <= 4.
struct PhasePoint {
  int dim = 1;
  std::array<double, 4> x{};
  std::array<double, 4> xi{};

  static PhasePoint make(double x0, double xi0) {
    PhasePoint p;
    p.x[0] = x0;
    p.xi[0] = xi0;
    return p;
  }
  /// From 2d coordinates (x_1..x_d, xi_1..xi_d).
  static PhasePoint from_coords(std::span<const double> c) {
    PhasePoint p;
    p.dim = static_cast<int>(c.size() / 2);
    for (int a = 0; a < p.dim; ++a) {
      p.x[a] = c[a];
      p.xi[a] = c[p.dim + a];
    }
    return p;
  }
  [[nodiscard]] std::vector<double> coords() const {
    std::vector<double> c(2 * dim);
    for (int a = 0; a < dim; ++a) {
      c[a] = x[a];
      c[dim + a] = xi[a];
    }
    return c;
  }
  [[nodiscard]] std::span<const double> position() const { return {x.data(), static_cast<std::size_t>(dim)}; }
  [[nodiscard]] std::span<const double> frequency() const { return {xi.data(), static_cast<std::size_t>(dim)}; }
  [[nodiscard]] double norm() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s += x[a] * x[a] + xi[a] * xi[a];
    return std::sqrt(s);
  }
  [[nodiscard]] double sup_norm() const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) s = std::max({s, std::abs(x[a]), std::abs(xi[a])});
    return s;
  }
  friend PhasePoint operator+(PhasePoint a, const PhasePoint& b) {
    for (int i = 0; i < a.dim; ++i) {
      a.x[i] += b.x[i];
      a.xi[i] += b.xi[i];
    }
    return a;
  }
  friend PhasePoint operator-(PhasePoint a, const PhasePoint& b) {
    for (int i = 0; i < a.dim; ++i) {
      a.x[i] -= b.x[i];
      a.xi[i] -= b.xi[i];
    }
    return a;
  }
};

/// Truncated lattice (alpha Z)^{2d} cut to [-R, R]^{2d}, enumerated in
/// lexicographic order of (x_1..x_d, xi_1..xi_d) with the last axis fastest.
class Lattice {
 public:
  Lattice(double step, double radius, int dim = 1);

  [[nodiscard]] double step() const { return step_; }
  [[nodiscard]] double radius() const { return radius_; }
  [[nodiscard]] int dim() const { return dim_; }
  /// Points per phase-space axis, 2R/alpha + 1.
  [[nodiscard]] std::size_t per_axis() const { return per_axis_; }
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] PhasePoint point(std::size_t index) const;
  [[nodiscard]] std::vector<PhasePoint> points() const;
  /// Integer coordinates in [-R/alpha, R/alpha] for each of the 2d axes.
  [[nodiscard]] std::array<long, 8> integer_coords(std::size_t index) const;
  /// Index of the lattice point with given integer coordinates, or size() if outside.
  [[nodiscard]] std::size_t index_of(std::span<const long> ints) const;

 private:
  double step_;
  double radius_;
  int dim_;
  long half_;
  std::size_t per_axis_;
  std::size_t size_;
};

}  // namespace locop
