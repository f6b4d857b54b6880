#include "locop/tf.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

#include "locop/error.hpp"
#include "locop/parallel.hpp"

namespace locop {
namespace {

// Per-axis factor tables combined over a row-major grid.
std::vector<cplx> tensor_product(const GridSpec& grid, const std::vector<std::vector<cplx>>& factors) {
  std::vector<cplx> out(grid.size());
  const int d = grid.dim();
  for (std::size_t i = 0; i < out.size(); ++i) {
    cplx v = 1.0;
    std::size_t rem = i;
    for (int a = d - 1; a >= 0; --a) {
      v *= factors[a][rem % grid.samples(a)];
      rem /= grid.samples(a);
    }
    out[i] = v;
  }
  return out;
}

std::vector<std::vector<cplx>> axis_phases(const GridSpec& grid, std::span<const double> xi, double sign) {
  std::vector<std::vector<cplx>> ph(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    ph[a].resize(grid.samples(a));
    for (std::size_t j = 0; j < grid.samples(a); ++j)
      ph[a][j] = std::polar(1.0, sign * kTwoPi * xi[a] * grid.coord(a, j));
  }
  return ph;
}

// sum_i p_i e^{-2 pi i xi.t_i} times the cell volume.
cplx direct_transform(const std::vector<cplx>& p, const GridSpec& grid, std::span<const double> xi) {
  const auto ph = axis_phases(grid, xi, -1.0);
  const int d = grid.dim();
  cplx acc = 0.0;
  if (d == 1) {
    for (std::size_t j = 0; j < p.size(); ++j) acc += p[j] * ph[0][j];
  } else {
    for (std::size_t i = 0; i < p.size(); ++i) {
      cplx v = p[i];
      std::size_t rem = i;
      for (int a = d - 1; a >= 0; --a) {
        v *= ph[a][rem % grid.samples(a)];
        rem /= grid.samples(a);
      }
      acc += v;
    }
  }
  return acc * grid.cell_volume();
}

// Groups point indices by identical position, in order of first appearance.
std::vector<std::vector<std::size_t>> group_by_position(std::span<const PhasePoint> points) {
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto key_less = [&](std::size_t a, std::size_t b) {
    const auto& pa = points[a];
    const auto& pb = points[b];
    for (int i = 0; i < pa.dim; ++i)
      if (pa.x[i] != pb.x[i]) return pa.x[i] < pb.x[i];
    return false;
  };
  std::stable_sort(order.begin(), order.end(), key_less);
  std::vector<std::vector<std::size_t>> groups;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (k == 0 || key_less(order[k - 1], order[k])) groups.emplace_back();
    groups.back().push_back(order[k]);
  }
  std::sort(groups.begin(), groups.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
  return groups;
}

void require_window_dim(const WindowSpec& g, const GridSpec& grid) {
  if (g.dim() != grid.dim()) fail("window.dim", "window dimension does not match the grid");
}

}  // namespace

double hermite_function(int order, double x) {
  const double u = std::sqrt(kTwoPi) * x;
  double prev = 0.0;
  double cur = std::pow(2.0, 0.25) * std::exp(-kPi * x * x);
  for (int k = 0; k < order; ++k) {
    const double next = std::sqrt(2.0 / (k + 1)) * u * cur - std::sqrt(static_cast<double>(k) / (k + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

WindowSpec WindowSpec::gaussian(int dim) {
  WindowSpec w;
  w.kind_ = Kind::gaussian;
  w.dim_ = dim;
  w.orders_.assign(dim, 0);
  return w;
}

WindowSpec WindowSpec::hermite(std::vector<int> orders) {
  if (orders.empty()) fail("window.dim", "hermite window needs at least one axis");
  WindowSpec w;
  w.kind_ = Kind::hermite;
  w.dim_ = static_cast<int>(orders.size());
  w.orders_ = std::move(orders);
  return w;
}

WindowSpec WindowSpec::sampled(SampledField samples) {
  WindowSpec w;
  w.kind_ = Kind::sampled;
  w.dim_ = samples.grid().dim();
  w.norm_ = norm_lp(samples, 2.0);
  if (w.norm_ == 0.0) fail("window.zero", "window must be nonzero");
  w.samples_ = std::move(samples);
  return w;
}

std::vector<cplx> WindowSpec::shifted_samples(const GridSpec& grid, std::span<const double> x) const {
  require_window_dim(*this, grid);
  if (kind_ == Kind::sampled) {
    if (!(samples_->grid() == grid)) fail("window.grid", "sampled window lives on a different grid");
    bool zero = std::all_of(x.begin(), x.end(), [](double v) { return v == 0.0; });
    const SampledField shifted = zero ? *samples_ : translate(*samples_, x);
    return {shifted.values().begin(), shifted.values().end()};
  }
  std::vector<std::vector<cplx>> factors(grid.dim());
  for (int a = 0; a < grid.dim(); ++a) {
    factors[a].resize(grid.samples(a));
    for (std::size_t j = 0; j < grid.samples(a); ++j)
      factors[a][j] = hermite_function(orders_[a], grid.coord(a, j) - x[a]);
  }
  return tensor_product(grid, factors);
}

SampledField WindowSpec::atom(const GridSpec& grid, const PhasePoint& z) const {
  auto values = shifted_samples(grid, z.position());
  const auto ph = axis_phases(grid, z.frequency(), 1.0);
  const auto mod = tensor_product(grid, ph);
  for (std::size_t i = 0; i < values.size(); ++i) values[i] *= mod[i];
  return SampledField(grid, std::move(values));
}

void require_atom_margin(const GridSpec& grid, const PhasePoint& z, double margin) {
  for (int a = 0; a < grid.dim(); ++a) {
    if (std::abs(z.x[a]) > 0.5 * grid.extent(a) - margin + 1e-12 ||
        std::abs(z.xi[a]) > 0.5 * grid.dual_extent(a) - margin + 1e-12)
      fail("lattice.margin", "phase-space point too close to the grid boundary");
  }
}

SampledField tf_shift(const SampledField& f, const PhasePoint& z) {
  const GridSpec& grid = f.grid();
  if (z.dim != grid.dim()) fail("shift.dim", "phase point dimension does not match the grid");
  for (int a = 0; a < grid.dim(); ++a) {
    if (std::abs(z.x[a]) > 0.25 * grid.extent(a) || std::abs(z.xi[a]) > 0.25 * grid.dual_extent(a))
      fail("shift.margin", "shift exceeds a quarter of the grid extent");
  }
  return modulate(translate(f, z.position()), z.frequency());
}

SampledField tf_shift_adjoint(const SampledField& f, const PhasePoint& z) {
  const GridSpec& grid = f.grid();
  if (z.dim != grid.dim()) fail("shift.dim", "phase point dimension does not match the grid");
  std::array<double, 4> mx{}, mxi{};
  for (int a = 0; a < z.dim; ++a) {
    if (std::abs(z.x[a]) > 0.25 * grid.extent(a) || std::abs(z.xi[a]) > 0.25 * grid.dual_extent(a))
      fail("shift.margin", "shift exceeds a quarter of the grid extent");
    mx[a] = -z.x[a];
    mxi[a] = -z.xi[a];
  }
  const std::span<const double> sx(mx.data(), z.dim), sxi(mxi.data(), z.dim);
  return translate(modulate(f, sxi), sx);
}

StftPlan::StftPlan(const GridSpec& grid, const WindowSpec& g, std::span<const PhasePoint> points)
    : grid_(grid), window_(g), points_(points.begin(), points.end()), count_(points.size()) {
  require_window_dim(g, grid);
  for (const auto& p : points_)
    if (p.dim != grid.dim()) fail("stft.dim", "phase point dimension does not match the grid");
  const auto grouped = group_by_position(points_);
  groups_.resize(grouped.size());
  // Window caches are skipped when they would exceed ~0.8 GB.
  const bool cache = static_cast<double>(grouped.size()) * static_cast<double>(grid.size()) <= 5e7;
  parallel_for(grouped.size(), [&](std::size_t gi) {
    Group& group = groups_[gi];
    group.members = grouped[gi];
    bool on_grid = group.members.size() > 16;
    std::vector<std::size_t> bins(group.members.size());
    for (std::size_t k = 0; on_grid && k < group.members.size(); ++k) {
      std::size_t idx = 0;
      for (int a = 0; a < grid.dim(); ++a) {
        std::size_t ia = 0;
        if (!grid.freq_index(a, points_[group.members[k]].xi[a], ia)) {
          on_grid = false;
          break;
        }
        idx += ia * grid.stride(a);
      }
      bins[k] = idx;
    }
    if (on_grid) group.bins = std::move(bins);
    if (cache) {
      group.window = window_.shifted_samples(grid, points_[group.members.front()].position());
      for (auto& v : group.window) v = std::conj(v);
    }
  });
}

std::vector<cplx> StftPlan::apply(const SampledField& f) const {
  if (!(f.grid() == grid_)) fail("grid.mismatch", "field does not live on the plan grid");
  std::vector<cplx> out(count_);
  parallel_for(groups_.size(), [&](std::size_t gi) {
    const Group& group = groups_[gi];
    std::vector<cplx> p = group.window.empty()
                              ? window_.shifted_samples(grid_, points_[group.members.front()].position())
                              : group.window;
    if (group.window.empty())
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = f[i] * std::conj(p[i]);
    else
      for (std::size_t i = 0; i < p.size(); ++i) p[i] *= f[i];
    if (!group.bins.empty()) {
      const SampledField hat = fourier(SampledField(grid_, std::move(p)), -1);
      for (std::size_t k = 0; k < group.members.size(); ++k) out[group.members[k]] = hat[group.bins[k]];
    } else {
      for (std::size_t idx : group.members) out[idx] = direct_transform(p, grid_, points_[idx].frequency());
    }
  });
  return out;
}

std::vector<cplx> stft(const SampledField& f, const WindowSpec& g, std::span<const PhasePoint> points) {
  if (points.empty()) return {};
  return StftPlan(f.grid(), g, points).apply(f);
}

SampledField synthesize(std::span<const cplx> coeffs, std::span<const PhasePoint> points, const WindowSpec& g1,
                        const WindowSpec& g2, double alpha, const GridSpec& grid) {
  if (coeffs.size() != points.size()) fail("synth.size", "one coefficient per point required");
  require_window_dim(g1, grid);
  require_window_dim(g2, grid);
  const int d = grid.dim();
  const std::vector<double> origin(d, 0.0);
  const SampledField s1(grid, g1.shifted_samples(grid, origin));
  const SampledField s2(grid, g2.shifted_samples(grid, origin));
  const cplx pairing = inner_product(s2, s1);
  if (std::abs(pairing) < 1e-14) fail("window.degenerate", "<g2, g1> vanishes");
  const cplx scale = std::pow(alpha, 2 * d) / pairing;

  SampledField out(grid);
  if (points.empty()) return out;
  const auto groups = group_by_position(points);
  const std::size_t n = grid.size();
  std::vector<cplx> slice(n);
  for (const auto& group : groups) {
    const PhasePoint& first = points[group.front()];
    // slice(t) = sum over the group's frequencies of c e^{2 pi i xi.t}, in point order.
    std::fill(slice.begin(), slice.end(), cplx(0.0));
    for (std::size_t idx : group) {
      if (coeffs[idx] == cplx(0.0)) continue;
      const auto ph = tensor_product(grid, axis_phases(grid, points[idx].frequency(), 1.0));
      for (std::size_t i = 0; i < n; ++i) slice[i] += coeffs[idx] * ph[i];
    }
    const auto window = g2.shifted_samples(grid, first.position());
    auto values = out.values();
    for (std::size_t i = 0; i < n; ++i) values[i] += window[i] * slice[i];
  }
  out *= scale;
  return out;
}

M0Profile m0_decay_profile(const SampledField& f, const Lattice& lattice, std::span<const double> radii) {
  for (std::size_t k = 1; k < radii.size(); ++k)
    if (!(radii[k] > radii[k - 1])) fail("m0.radii", "radii must be increasing");
  const auto points = lattice.points();
  const auto values = stft(f, WindowSpec::gaussian(f.grid().dim()), points);
  std::vector<double> r(points.size()), v(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    r[i] = points[i].norm();
    v[i] = std::abs(values[i]);
  }
  M0Profile prof;
  prof.radii.assign(radii.begin(), radii.end());
  for (double rad : radii) {
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
      if (r[i] >= rad - 1e-9 && r[i] < rad + 1.0 - 1e-9) s = std::max(s, v[i]);
    prof.sup.push_back(s);
    prof.untrusted.push_back(rad + 1.0 > lattice.radius() + 1e-9);
  }
  double smax = 0.0;
  for (double s : prof.sup) smax = std::max(smax, s);
  std::vector<double> fr, fy;
  double last = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (prof.untrusted[k]) continue;
    if (prof.sup[k] > last * (1.0 + 1e-12) + 1e-300) prof.monotone = false;
    last = prof.sup[k];
    if (prof.sup[k] > 1e-13 * smax && prof.sup[k] > 0.0) {
      fr.push_back(radii[k]);
      fy.push_back(std::log(prof.sup[k]));
    }
  }
  if (fr.size() >= 3) {
    Eigen::MatrixXd A(fr.size(), 3);
    Eigen::VectorXd b(fr.size());
    for (std::size_t k = 0; k < fr.size(); ++k) {
      A(k, 0) = 1.0;
      A(k, 1) = fr[k];
      A(k, 2) = fr[k] * fr[k];
      b(k) = fy[k];
    }
    const Eigen::VectorXd c = A.colPivHouseholderQr().solve(b);
    prof.fit_c0 = c(0);
    prof.fit_c1 = c(1);
    prof.fit_c2 = c(2);
  }
  prof.verdict = annulus_verdict(r, v, lattice.radius());
  return prof;
}

}  // namespace locop
