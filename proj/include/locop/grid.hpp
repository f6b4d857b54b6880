#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace locop {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Centered uniform grid: axis a covers [-L_a/2, L_a/2) with N_a samples,
/// N_a a power of two. The frequency grid of axis a has spacing 1/L_a.
class GridSpec {
 public:
  GridSpec() = default;
  GridSpec(std::vector<double> extents, std::vector<std::size_t> samples);

  /// Same extent and sample count on every axis.
  static GridSpec cube(int dim, double extent, std::size_t samples);

  [[nodiscard]] int dim() const { return static_cast<int>(extents_.size()); }
  [[nodiscard]] double extent(int axis) const { return extents_[axis]; }
  [[nodiscard]] std::size_t samples(int axis) const { return samples_[axis]; }
  [[nodiscard]] double spacing(int axis) const { return extents_[axis] / samples_[axis]; }
  [[nodiscard]] double coord(int axis, std::size_t j) const {
    return -0.5 * extents_[axis] + static_cast<double>(j) * spacing(axis);
  }
  [[nodiscard]] double freq_spacing(int axis) const { return 1.0 / extents_[axis]; }
  [[nodiscard]] double freq(int axis, std::size_t k) const {
    return (static_cast<double>(k) - 0.5 * static_cast<double>(samples_[axis])) / extents_[axis];
  }
  /// Extent of the dual (frequency) axis, N/L.
  [[nodiscard]] double dual_extent(int axis) const { return samples_[axis] / extents_[axis]; }

  [[nodiscard]] std::size_t size() const;
  /// Row-major stride (last axis fastest).
  [[nodiscard]] std::size_t stride(int axis) const;
  [[nodiscard]] double cell_volume() const;

  /// Grid obtained after Fourier transforming the listed axes.
  [[nodiscard]] GridSpec dual(std::span<const int> axes) const;

  /// Index of the sample nearest to coordinate value t on an axis, if t is a
  /// grid node within tolerance (relative to the spacing).
  [[nodiscard]] bool node_index(int axis, double t, std::size_t& index, double tol = 1e-9) const;
  [[nodiscard]] bool freq_index(int axis, double xi, std::size_t& index, double tol = 1e-9) const;

  [[nodiscard]] const std::vector<double>& extents() const { return extents_; }
  [[nodiscard]] const std::vector<std::size_t>& sample_counts() const { return samples_; }

  /// Equal sample counts and extents equal to relative 1e-12 (dual-of-dual
  /// extents may differ from the original in the last bit).
  bool operator==(const GridSpec& other) const;

 private:
  std::vector<double> extents_;
  std::vector<std::size_t> samples_;
};

/// Complex samples on a GridSpec, row-major.
class SampledField {
 public:
  SampledField() = default;
  explicit SampledField(GridSpec grid);
  SampledField(GridSpec grid, std::vector<cplx> values);

  /// Samples fn at every grid node; fn receives the node coordinates.
  static SampledField sample(const GridSpec& grid,
                             const std::function<cplx(std::span<const double>)>& fn);

  [[nodiscard]] const GridSpec& grid() const { return grid_; }
  [[nodiscard]] std::size_t size() const { return values_.size(); }
  [[nodiscard]] std::span<cplx> values() { return values_; }
  [[nodiscard]] std::span<const cplx> values() const { return values_; }
  cplx& operator[](std::size_t i) { return values_[i]; }
  const cplx& operator[](std::size_t i) const { return values_[i]; }

  SampledField& operator+=(const SampledField& other);
  SampledField& operator-=(const SampledField& other);
  SampledField& operator*=(cplx c);

 private:
  GridSpec grid_;
  std::vector<cplx> values_;
};

SampledField operator+(SampledField a, const SampledField& b);
SampledField operator-(SampledField a, const SampledField& b);
SampledField operator*(cplx c, SampledField a);

/// Continuous Fourier transform f^(xi) = int f(x) e^{-2 pi i x.xi} dx along the
/// listed axes (sign = -1), or its inverse (sign = +1). The result lives on the
/// dual grid of those axes.
///
/// With x_j = -L/2 + j h and xi_k = (k - N/2)/L one has
///   x_j xi_k = N/4 - j/2 - k/2 + j k / N,
/// so the sum becomes a plain DFT once the input is multiplied by (-1)^j and
/// the output by h (-1)^k e^{sign 2 pi i N/4}.
SampledField fourier_axes(const SampledField& f, std::span<const int> axes, int sign);

/// Transform along every axis.
SampledField fourier(const SampledField& f, int sign);

/// Riemann sum of f conj(g) times the cell volume.
cplx inner_product(const SampledField& f, const SampledField& g);

/// Riemann-sum L^p norm; p = infinity gives the max modulus.
double norm_lp(const SampledField& f, double p);

/// Max modulus of f - g on a shared grid.
double max_abs_diff(const SampledField& f, const SampledField& g);

/// ||f - g||_2 / ||g||_2.
double relative_l2_error(const SampledField& f, const SampledField& g);

/// Translation by an arbitrary vector via a phase ramp in the Fourier domain.
/// Exact for fields that are bandlimited on the grid.
SampledField translate(const SampledField& f, std::span<const double> shift);

/// Multiplication by e^{2 pi i xi.t}.
SampledField modulate(const SampledField& f, std::span<const double> xi);

}  // namespace locop
