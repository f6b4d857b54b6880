#include "locop/lattice.hpp"

#include "locop/error.hpp"

namespace locop {

Lattice::Lattice(double step, double radius, int dim) : step_(step), radius_(radius), dim_(dim) {
  if (!(step > 0.0) || !(radius >= 0.0)) throw Error(ErrorKind::config, "lattice.params", "step must be positive and radius nonnegative");
  if (dim < 1 || dim > 4) fail("lattice.dim", "lattice dimension must be 1 to 4");
  const double ratio = radius / step;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
    throw Error(ErrorKind::config, "lattice.ratio", "R/alpha must be an integer");
  half_ = static_cast<long>(std::round(ratio));
  per_axis_ = static_cast<std::size_t>(2 * half_ + 1);
  size_ = 1;
  for (int a = 0; a < 2 * dim_; ++a) size_ *= per_axis_;
}

std::array<long, 8> Lattice::integer_coords(std::size_t index) const {
  std::array<long, 8> c{};
  for (int a = 2 * dim_ - 1; a >= 0; --a) {
    c[a] = static_cast<long>(index % per_axis_) - half_;
    index /= per_axis_;
  }
  return c;
}

std::size_t Lattice::index_of(std::span<const long> ints) const {
  std::size_t idx = 0;
  for (int a = 0; a < 2 * dim_; ++a) {
    if (ints[a] < -half_ || ints[a] > half_) return size_;
    idx = idx * per_axis_ + static_cast<std::size_t>(ints[a] + half_);
  }
  return idx;
}

PhasePoint Lattice::point(std::size_t index) const {
  const auto c = integer_coords(index);
  PhasePoint p;
  p.dim = dim_;
  for (int a = 0; a < dim_; ++a) {
    p.x[a] = static_cast<double>(c[a]) * step_;
    p.xi[a] = static_cast<double>(c[dim_ + a]) * step_;
  }
  return p;
}

std::vector<PhasePoint> Lattice::points() const {
  std::vector<PhasePoint> out(size_);
  for (std::size_t i = 0; i < size_; ++i) out[i] = point(i);
  return out;
}

}  // namespace locop
