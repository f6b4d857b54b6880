#include "locop/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "locop/error.hpp"
#include "locop/fft.hpp"
#include "locop/parallel.hpp"

namespace locop {
namespace {

bool is_power_of_two(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

void require_same_grid(const SampledField& f, const SampledField& g) {
  if (!(f.grid() == g.grid())) fail("grid.mismatch", "fields live on different grids");
}

// Applies the centered continuous-FT recipe to each line of one axis.
void transform_axis(std::vector<cplx>& data, const GridSpec& grid, int axis, int sign) {
  const std::size_t n = grid.samples(axis);
  const std::size_t stride = grid.stride(axis);
  const std::size_t lines = data.size() / n;
  const double h = grid.spacing(axis);
  // e^{sign 2 pi i N/4}: 1 for N divisible by 4.
  cplx global = 1.0;
  if (n % 4 == 2) global = -1.0;
  if (n == 1) global = cplx(0.0, static_cast<double>(sign));
  const double scale = h * global.real();
  const bool real_scale = global.imag() == 0.0;
  // Work units: blocks of lines that FFTW transforms in one strided call.
  // The block size depends only on the grid, so results do not depend on
  // the worker count.
  const std::size_t per_unit = stride == 1 ? std::max<std::size_t>(1, 4096 / n) : std::min<std::size_t>(stride, 64);
  const std::size_t outer_blocks = lines / stride;
  const std::size_t units_per_block = stride == 1 ? 1 : stride / per_unit;
  const std::size_t units = stride == 1 ? (lines + per_unit - 1) / per_unit : outer_blocks * units_per_block;
  parallel_for(units, [&](std::size_t u) {
    std::size_t first_line, count;
    cplx* origin;
    if (stride == 1) {
      first_line = u * per_unit;
      count = std::min(per_unit, lines - first_line);
      origin = data.data() + first_line * n;
    } else {
      const std::size_t block = u / units_per_block;
      const std::size_t inner = (u % units_per_block) * per_unit;
      count = per_unit;
      origin = data.data() + block * n * stride + inner;
    }
    const std::size_t dist = stride == 1 ? n : 1;
    for (std::size_t m = 0; m < count; ++m)
      for (std::size_t j = 1; j < n; j += 2) origin[m * dist + j * stride] = -origin[m * dist + j * stride];
    dft_strided(origin, n, stride, count, dist, sign);
    for (std::size_t m = 0; m < count; ++m)
      for (std::size_t k = 0; k < n; ++k) {
        cplx& v = origin[m * dist + k * stride];
        const double s = (k & 1) ? -scale : scale;
        v = real_scale ? v * s : v * (h * global) * ((k & 1) ? -1.0 : 1.0);
      }
  });
}

}  // namespace

GridSpec::GridSpec(std::vector<double> extents, std::vector<std::size_t> samples)
    : extents_(std::move(extents)), samples_(std::move(samples)) {
  if (extents_.empty() || extents_.size() > 4 || extents_.size() != samples_.size())
    fail("grid.dim", "grid needs 1 to 4 axes with one extent and sample count each");
  for (std::size_t a = 0; a < extents_.size(); ++a) {
    if (!(extents_[a] > 0.0) || !std::isfinite(extents_[a]))
      fail("grid.extent", "axis extent must be positive and finite");
    if (!is_power_of_two(samples_[a])) fail("grid.samples", "sample count must be a power of two");
  }
}

GridSpec GridSpec::cube(int dim, double extent, std::size_t samples) {
  return GridSpec(std::vector<double>(dim, extent), std::vector<std::size_t>(dim, samples));
}

bool GridSpec::operator==(const GridSpec& other) const {
  if (samples_ != other.samples_) return false;
  for (std::size_t a = 0; a < extents_.size(); ++a)
    if (std::abs(extents_[a] - other.extents_[a]) > 1e-12 * extents_[a]) return false;
  return true;
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (auto s : samples_) n *= s;
  return n;
}

std::size_t GridSpec::stride(int axis) const {
  std::size_t s = 1;
  for (int a = dim() - 1; a > axis; --a) s *= samples_[a];
  return s;
}

double GridSpec::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dim(); ++a) v *= spacing(a);
  return v;
}

GridSpec GridSpec::dual(std::span<const int> axes) const {
  auto ext = extents_;
  for (int a : axes) ext[a] = dual_extent(a);
  return GridSpec(ext, samples_);
}

bool GridSpec::node_index(int axis, double t, std::size_t& index, double tol) const {
  const double pos = (t + 0.5 * extents_[axis]) / spacing(axis);
  const double r = std::round(pos);
  if (std::abs(pos - r) > tol || r < 0 || r >= static_cast<double>(samples_[axis])) return false;
  index = static_cast<std::size_t>(r);
  return true;
}

bool GridSpec::freq_index(int axis, double xi, std::size_t& index, double tol) const {
  const double pos = xi * extents_[axis] + 0.5 * static_cast<double>(samples_[axis]);
  const double r = std::round(pos);
  if (std::abs(pos - r) > tol || r < 0 || r >= static_cast<double>(samples_[axis])) return false;
  index = static_cast<std::size_t>(r);
  return true;
}

SampledField::SampledField(GridSpec grid) : grid_(std::move(grid)), values_(grid_.size()) {}

SampledField::SampledField(GridSpec grid, std::vector<cplx> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (values_.size() != grid_.size()) fail("field.shape", "value count does not match grid");
}

SampledField SampledField::sample(const GridSpec& grid,
                                  const std::function<cplx(std::span<const double>)>& fn) {
  SampledField out(grid);
  const int d = grid.dim();
  const std::size_t last = grid.samples(d - 1);
  const std::size_t rows = grid.size() / last;
  parallel_for(rows, [&](std::size_t row) {
    double t[4];
    std::size_t rem = row;
    for (int a = d - 2; a >= 0; --a) {
      t[a] = grid.coord(a, rem % grid.samples(a));
      rem /= grid.samples(a);
    }
    for (std::size_t j = 0; j < last; ++j) {
      t[d - 1] = grid.coord(d - 1, j);
      out.values_[row * last + j] = fn(std::span<const double>(t, d));
    }
  });
  return out;
}

SampledField& SampledField::operator+=(const SampledField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SampledField& SampledField::operator-=(const SampledField& other) {
  require_same_grid(*this, other);
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SampledField& SampledField::operator*=(cplx c) {
  for (auto& v : values_) v *= c;
  return *this;
}

SampledField operator+(SampledField a, const SampledField& b) { return a += b; }
SampledField operator-(SampledField a, const SampledField& b) { return a -= b; }
SampledField operator*(cplx c, SampledField a) { return a *= c; }

SampledField fourier_axes(const SampledField& f, std::span<const int> axes, int sign) {
  if (sign != 1 && sign != -1) fail("fourier.sign", "sign must be +1 or -1");
  for (int a : axes)
    if (a < 0 || a >= f.grid().dim()) fail("fourier.axis", "axis index out of range");
  std::vector<cplx> data(f.values().begin(), f.values().end());
  GridSpec grid = f.grid();
  for (int a : axes) {
    transform_axis(data, grid, a, sign);
    const int one[1] = {a};
    grid = grid.dual(one);
  }
  return SampledField(grid, std::move(data));
}

SampledField fourier(const SampledField& f, int sign) {
  std::vector<int> axes(f.grid().dim());
  for (int a = 0; a < f.grid().dim(); ++a) axes[a] = a;
  return fourier_axes(f, axes, sign);
}

cplx inner_product(const SampledField& f, const SampledField& g) {
  require_same_grid(f, g);
  cplx acc = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += f[i] * std::conj(g[i]);
  return acc * f.grid().cell_volume();
}

double norm_lp(const SampledField& f, double p) {
  if (!(p >= 1.0)) fail("norm.exponent", "p must be at least 1");
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& v : f.values()) m = std::max(m, std::abs(v));
    return m;
  }
  double acc = 0.0;
  for (const auto& v : f.values()) acc += std::pow(std::abs(v), p);
  return std::pow(acc * f.grid().cell_volume(), 1.0 / p);
}

double max_abs_diff(const SampledField& f, const SampledField& g) {
  require_same_grid(f, g);
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) m = std::max(m, std::abs(f[i] - g[i]));
  return m;
}

double relative_l2_error(const SampledField& f, const SampledField& g) {
  return norm_lp(f - g, 2.0) / norm_lp(g, 2.0);
}

SampledField translate(const SampledField& f, std::span<const double> shift) {
  const GridSpec& grid = f.grid();
  if (static_cast<int>(shift.size()) != grid.dim()) fail("shift.dim", "shift dimension mismatch");
  std::vector<int> axes;
  for (int a = 0; a < grid.dim(); ++a)
    if (shift[a] != 0.0) axes.push_back(a);
  if (axes.empty()) return f;
  SampledField hat = fourier_axes(f, axes, -1);
  // Phase e^{-2 pi i x eta} per translated axis, applied line by line.
  const std::size_t total = hat.size();
  std::vector<std::vector<cplx>> ramps(grid.dim());
  for (int a : axes) {
    ramps[a].resize(grid.samples(a));
    for (std::size_t k = 0; k < grid.samples(a); ++k)
      ramps[a][k] = std::polar(1.0, -kTwoPi * shift[a] * grid.freq(a, k));
  }
  auto values = hat.values();
  for (std::size_t i = 0; i < total; ++i) {
    cplx phase = 1.0;
    for (int a : axes) phase *= ramps[a][(i / grid.stride(a)) % grid.samples(a)];
    values[i] *= phase;
  }
  SampledField back = fourier_axes(hat, axes, +1);
  return SampledField(grid, std::vector<cplx>(back.values().begin(), back.values().end()));
}

SampledField modulate(const SampledField& f, std::span<const double> xi) {
  const GridSpec& grid = f.grid();
  if (static_cast<int>(xi.size()) != grid.dim()) fail("shift.dim", "frequency dimension mismatch");
  std::vector<std::vector<cplx>> ramps(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    ramps[a].resize(grid.samples(a));
    for (std::size_t j = 0; j < grid.samples(a); ++j)
      ramps[a][j] = std::polar(1.0, kTwoPi * xi[a] * grid.coord(a, j));
  }
  SampledField out = f;
  auto values = out.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx phase = 1.0;
    for (int a = 0; a < grid.dim(); ++a) phase *= ramps[a][(i / grid.stride(a)) % grid.samples(a)];
    values[i] *= phase;
  }
  return out;
}

}  // namespace locop
