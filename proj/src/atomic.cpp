#include "locop/atomic.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "locop/error.hpp"
#include "locop/parallel.hpp"
#include "locop/quantizers.hpp"
#include "locop/tf.hpp"

namespace locop {
namespace {

using Quadrature = boost::math::quadrature::gauss_kronrod<double, 61>;

constexpr double kQuadTol = 1e-13;
constexpr double kSkipMass = 1e-16;
constexpr std::size_t kAtomChunk = 16;

double integrate(const std::function<double(double)>& f, double a, double b) {
  if (b <= a) return 0.0;
  return Quadrature::integrate(f, a, b, 8, kQuadTol);
}

// Per-axis band window tables on the transform grid of a field.
struct BandTables {
  GridSpec dual;
  std::vector<long> k_lo, k_hi;
  // window[a][k - k_lo[a]][j] and the first/last nonzero sample j for each k.
  std::vector<std::vector<std::vector<double>>> window;
  std::vector<std::vector<std::size_t>> first, last;
};

BandTables band_tables(const GridSpec& dual, const PartitionOfUnity& pou) {
  BandTables t;
  t.dual = dual;
  const int d = dual.dim();
  t.k_lo.resize(d);
  t.k_hi.resize(d);
  t.window.resize(d);
  t.first.resize(d);
  t.last.resize(d);
  for (int a = 0; a < d; ++a) {
    const std::size_t n = dual.samples(a);
    const double lo = dual.coord(a, 0), hi = dual.coord(a, n - 1);
    t.k_lo[a] = static_cast<long>(std::ceil(lo - pou.band_hi()));
    t.k_hi[a] = static_cast<long>(std::floor(hi - pou.band_lo()));
    for (long k = t.k_lo[a]; k <= t.k_hi[a]; ++k) {
      std::vector<double> w(n);
      std::size_t f = n, l = 0;
      for (std::size_t j = 0; j < n; ++j) {
        w[j] = pou.band(dual.coord(a, j) - static_cast<double>(k));
        if (w[j] != 0.0) {
          f = std::min(f, j);
          l = j;
        }
      }
      t.window[a].push_back(std::move(w));
      t.first[a].push_back(f);
      t.last[a].push_back(l);
    }
  }
  return t;
}

// Multi-indices of the box [k_lo, k_hi] in lexicographic order.
std::vector<std::array<long, 3>> band_indices(const BandTables& t) {
  const int d = t.dual.dim();
  std::vector<std::array<long, 3>> out;
  std::array<long, 3> k{};
  for (int a = 0; a < d; ++a) k[a] = t.k_lo[a];
  while (true) {
    out.push_back(k);
    int a = d - 1;
    while (a >= 0 && ++k[a] > t.k_hi[a]) {
      k[a] = t.k_lo[a];
      --a;
    }
    if (a < 0) break;
  }
  return out;
}

// Visits flat indices of the nonzero window box of band k with the window value.
template <class Fn>
void for_band_box(const BandTables& t, const std::array<long, 3>& k, Fn&& fn) {
  const int d = t.dual.dim();
  std::array<std::size_t, 3> f{}, l{}, s{};
  std::array<const std::vector<double>*, 3> w{};
  for (int a = 0; a < d; ++a) {
    const auto slot = static_cast<std::size_t>(k[a] - t.k_lo[a]);
    f[a] = t.first[a][slot];
    l[a] = t.last[a][slot];
    if (f[a] > l[a]) return;
    w[a] = &t.window[a][slot];
    s[a] = t.dual.stride(a);
  }
  std::array<std::size_t, 3> j = f;
  while (true) {
    double weight = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      weight *= (*w[a])[j[a]];
      flat += j[a] * s[a];
    }
    fn(flat, weight);
    int a = d - 1;
    while (a >= 0 && ++j[a] > l[a]) {
      j[a] = f[a];
      --a;
    }
    if (a < 0) break;
  }
}

double band_mass(const SampledField& hat, const BandTables& t, const std::array<long, 3>& k) {
  double mass = 0.0;
  for_band_box(t, k, [&](std::size_t i, double w) { mass += std::abs(hat[i]) * w; });
  return mass;
}

// Windowed spectrum of band k (zero elsewhere) and its atom on the original grid.
SampledField band_atom(const SampledField& hat, const BandTables& t, const std::array<long, 3>& k) {
  SampledField windowed(hat.grid());
  for_band_box(t, k, [&](std::size_t i, double w) { windowed[i] = hat[i] * w; });
  return fourier(windowed, +1);
}

double sup_abs(std::span<const cplx> v) {
  double m = 0.0;
  for (const cplx& c : v) m = std::max(m, std::abs(c));
  return m;
}

double out_of_box(const SampledField& hat, std::span<const double> lo, double width) {
  const GridSpec& g = hat.grid();
  const int d = g.dim();
  std::vector<std::vector<char>> inside(d);
  for (int a = 0; a < d; ++a) {
    const double tol = 1e-9 * g.spacing(a);
    inside[a].resize(g.samples(a));
    for (std::size_t j = 0; j < g.samples(a); ++j) {
      const double eta = g.coord(a, j);
      inside[a][j] = eta >= lo[a] - tol && eta <= lo[a] + width + tol;
    }
  }
  double total = 0.0, outside = 0.0;
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double m = std::abs(hat[i]);
    total += m;
    bool in = true;
    for (int a = 0; a < d; ++a) in = in && inside[a][idx[a]];
    if (!in) outside += m;
    for (int a = d - 1; a >= 0; --a) {
      if (++idx[a] < g.samples(a)) break;
      idx[a] = 0;
    }
  }
  return total > 0.0 ? outside / total : 0.0;
}

SampledField spectral_derivative(const SampledField& f, int axis, int order) {
  if (order == 0) return f;
  const int axes[1] = {axis};
  SampledField hat = fourier_axes(f, axes, -1);
  const GridSpec& g = hat.grid();
  const std::size_t n = g.samples(axis), stride = g.stride(axis);
  for (std::size_t i = 0; i < hat.size(); ++i) {
    const double eta = g.coord(axis, (i / stride) % n);
    hat[i] *= std::pow(cplx(0.0, kTwoPi * eta), order);
  }
  SampledField back = fourier_axes(hat, axes, +1);
  return SampledField(f.grid(), std::vector<cplx>(back.values().begin(), back.values().end()));
}

// Verdict for one ray: samples at t_j = j T / (count - 1).
RayVerdict ray_verdict(double cx, double cxi, std::span<const double> values) {
  RayVerdict v{cx, cxi};
  const std::size_t n = values.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double frac = static_cast<double>(j) / static_cast<double>(n - 1);
    if (frac <= 0.5 + 1e-12) v.inner_max = std::max(v.inner_max, values[j]);
    if (frac >= 0.75 - 1e-12) v.outer_max = std::max(v.outer_max, values[j]);
  }
  v.decaying = v.outer_max <= 0.1 * v.inner_max;
  return v;
}

double bump(double u) { return std::abs(u) < 1.0 ? std::exp(-1.0 / (1.0 - u * u)) : 0.0; }

}  // namespace

PartitionOfUnity::PartitionOfUnity(int dim, double radius) : dim_(dim), radius_(radius) {
  if (dim < 2 || dim > 3) fail("pou.dim", "partition of unity supports dimension 2 or 3");
  if (!(radius > 0.0 && radius < 0.5)) fail("pou.radius", "mollifier radius must lie in (0, 1/2)");
  bump_mass_ = integrate([r = radius_](double t) { return bump(t / r); }, -radius_, radius_);
}

double PartitionOfUnity::cdf(double s) const {
  if (s <= -radius_) return 0.0;
  if (s >= radius_) return 1.0;
  const auto b = [r = radius_](double t) { return bump(t / r); };
  // Integrate over the shorter side.
  if (s <= 0.0) return integrate(b, -radius_, s) / bump_mass_;
  return 1.0 - integrate(b, s, radius_) / bump_mass_;
}

double PartitionOfUnity::cdf_integral(double s) const {
  if (s <= -radius_) return 0.0;
  if (s >= radius_) return s;
  // int_{-r}^s M = s M(s) - int_{-r}^s t b(t) dt; the first moment vanishes over [-r, r].
  const auto tb = [r = radius_](double t) { return t * bump(t / r); };
  const double moment = s <= 0.0 ? integrate(tb, -radius_, s) : -integrate(tb, s, radius_);
  return s * cdf(s) - moment / bump_mass_;
}

double PartitionOfUnity::base(double s) const { return cdf(s) - cdf(s - 1.0); }

double PartitionOfUnity::band(double s) const {
  if (s <= band_lo() || s >= band_hi()) return 0.0;
  return cdf_integral(s) - 2.0 * cdf_integral(s - 1.0) + cdf_integral(s - 2.0);
}

double PartitionOfUnity::base(std::span<const double> s) const {
  double v = 1.0;
  for (double c : s) v *= base(c);
  return v;
}

double PartitionOfUnity::band(std::span<const double> s) const {
  double v = 1.0;
  for (double c : s) v *= band(c);
  return v;
}

double AtomDecomposition::ledger_sum(long k_range) const {
  double s = 0.0;
  for (const AtomEntry& a : atoms) {
    long m = 0;
    for (long c : a.k) m = std::max(m, std::abs(c));
    if (m <= k_range) s += a.ledger;
  }
  return s;
}

long AtomDecomposition::max_index() const {
  long m = 0;
  for (const AtomEntry& a : atoms)
    for (long c : a.k) m = std::max(m, std::abs(c));
  return m;
}

AtomDecomposition decompose(const SampledField& sigma, const Weight& ledger_weight, const PartitionOfUnity& pou,
                            const AtomSink& sink) {
  const GridSpec& grid = sigma.grid();
  const int d = grid.dim();
  if (d != pou.dim()) fail("atoms.dim", "partition dimension differs from the symbol dimension");
  if (ledger_weight.dim() != d) fail("weight.dim", "ledger weight must act on the band index space");
  for (int a = 0; a < d; ++a)
    if (grid.freq_spacing(a) > 0.125 * (1.0 + 1e-12))
      fail("atoms.coarse_grid", "frequency grid needs at least 8 samples per unit band");

  AtomDecomposition out;
  out.band_lo = pou.band_lo();
  out.band_hi = pou.band_hi();
  const double sigma_sup = sup_abs(sigma.values());
  if (sigma_sup == 0.0) return out;

  const SampledField hat = fourier(sigma, -1);
  const BandTables tables = band_tables(hat.grid(), pou);
  const auto indices = band_indices(tables);

  std::vector<double> masses(indices.size());
  parallel_for(indices.size(), [&](std::size_t i) { masses[i] = band_mass(hat, tables, indices[i]); });
  double total_mass = 0.0;
  for (double m : masses) total_mass += m;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < indices.size(); ++i)
    if (masses[i] >= kSkipMass * total_mass) kept.push_back(i);

  SampledField sum(grid);
  for (std::size_t start = 0; start < kept.size(); start += kAtomChunk) {
    const std::size_t count = std::min(kAtomChunk, kept.size() - start);
    std::vector<SampledField> fields(count);
    std::vector<AtomEntry> entries(count);
    parallel_for(count, [&](std::size_t c) {
      const std::size_t idx = kept[start + c];
      const auto& k = indices[idx];
      fields[c] = band_atom(hat, tables, k);
      AtomEntry& e = entries[c];
      e.k = k;
      e.sup_norm = sup_abs(fields[c].values());
      std::vector<double> kp(k.begin(), k.begin() + d);
      e.ledger = ledger_weight(kp) * e.sup_norm;
      e.spectral_mass = masses[idx];
      // Round trip the atom to measure its transform outside the band box.
      std::vector<double> lo(d);
      for (int a = 0; a < d; ++a) lo[a] = static_cast<double>(k[a]) + pou.band_lo();
      e.out_of_band = out_of_box(fourier(fields[c], -1), lo, pou.band_hi() - pou.band_lo());
    });
    for (std::size_t c = 0; c < count; ++c) {
      for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += fields[c][i];
      out.total_ledger += entries[c].ledger;
      if (sink) sink(entries[c], fields[c]);
      out.atoms.push_back(entries[c]);
    }
  }
  double diff = 0.0;
  for (std::size_t i = 0; i < sum.size(); ++i) diff = std::max(diff, std::abs(sum[i] - sigma[i]));
  out.residual = diff / sigma_sup;
  return out;
}

SampledField band_symbol(const GridSpec& grid, std::array<double, 3> box_lo, double box_width, std::size_t terms,
                         std::uint64_t seed) {
  if (grid.dim() != 3) fail("symbol.dim", "band symbols live on a 3-D grid");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const std::size_t n0 = grid.samples(0), n1 = grid.samples(1), n2 = grid.samples(2);
  std::vector<cplx> values(grid.size(), cplx{});
  for (std::size_t term = 0; term < terms; ++term) {
    std::array<std::vector<cplx>, 3> factor;
    for (int a = 0; a < 3; ++a) {
      const double df = grid.freq_spacing(a);
      const long first = static_cast<long>(std::ceil(box_lo[a] / df - 1e-9));
      const long last = static_cast<long>(std::floor((box_lo[a] + box_width) / df + 1e-9));
      if (last < first) fail("band.empty", "band box contains no grid frequency");
      std::uniform_int_distribution<long> pick(0, last - first);
      const double freq = static_cast<double>(first + pick(rng)) * df;
      factor[a].resize(grid.samples(a));
      for (std::size_t j = 0; j < grid.samples(a); ++j)
        factor[a][j] = std::polar(1.0, kTwoPi * freq * grid.coord(a, j));
    }
    const double re = normal(rng), im = normal(rng);
    const cplx c(re, im);
    parallel_for(n0, [&](std::size_t i) {
      for (std::size_t j = 0; j < n1; ++j) {
        const cplx ij = c * factor[0][i] * factor[1][j];
        cplx* row = values.data() + (i * n1 + j) * n2;
        for (std::size_t l = 0; l < n2; ++l) row[l] += ij * factor[2][l];
      }
    });
  }
  return SampledField(grid, std::move(values));
}

double out_of_box_mass(const SampledField& sigma, std::span<const double> box_lo, double box_width) {
  if (box_lo.size() != static_cast<std::size_t>(sigma.grid().dim())) fail("band.dim", "box dimension mismatch");
  return out_of_box(fourier(sigma, -1), box_lo, box_width);
}

std::vector<DerivativeDecayReport> derivative_decay_check(const SampledField& sigma3, std::span<const int> orders,
                                                          std::span<const int> exponents,
                                                          std::span<const double> box_lo, double box_width) {
  for (int order : orders)
    if (order < 0 || order > 2) fail("decay.order", "derivative order must lie in [0, 2]");
  if (out_of_box_mass(sigma3, box_lo, box_width) > 1e-10)
    fail("band.violated", "symbol transform leaves the declared band box");
  const GridSpec op = operator_grid(sigma3.grid());
  if (op.extent(0) < 12.0) fail("decay.grid", "operator grid must cover |x| <= 6");
  const double sup = sup_abs(sigma3.values());
  std::vector<DerivativeDecayReport> out;
  SampledField image;
  if (sup > 0.0) {
    const SampledField phi = WindowSpec::gaussian(1).atom(op, PhasePoint{});
    image = kernel_threeparam(sigma3).apply(phi);
  }
  for (int order : orders) {
    SampledField d;
    if (sup > 0.0) d = spectral_derivative(image, 0, order);
    for (int exponent : exponents) {
      DerivativeDecayReport r;
      r.order = order;
      r.exponent = exponent;
      if (sup == 0.0) {
        r.pass = true;
        out.push_back(r);
        continue;
      }
      std::vector<double> radius, value;
      for (std::size_t j = 0; j < op.samples(0); ++j) {
        const double x = std::abs(op.coord(0, j));
        if (x < 2.0 - 1e-12 || x > 6.0 + 1e-12) continue;
        radius.push_back(x);
        value.push_back(std::abs(d[j]));
        r.constant = std::max(r.constant, std::abs(d[j]) * std::pow(bracket(x), exponent) / sup);
      }
      r.fit = fit_power_law(annulus_max(radius, value, 0.25, 2.0), 2.0, 6.0, 1e-13, 1);
      // Fewer than two fit samples means the profile fell 13 orders below its
      // own maximum inside the window: faster than any power.
      const bool slope_ok = r.fit.samples < 2 || r.fit.slope <= -exponent + 0.5;
      r.pass = std::isfinite(r.constant) && slope_ok;
      out.push_back(r);
    }
  }
  return out;
}

PairingProfile pairing_decay(const SampledField& sigma3, std::array<long, 3> band_index, const Lattice& lattice,
                             int exponent, std::span<const PhasePoint> w_samples) {
  if (w_samples.empty()) fail("pairing.samples", "need at least one conjugation point");
  PairingProfile p;
  p.exponent = exponent;
  p.points = lattice.points();
  p.values.assign(p.points.size(), 0.0);
  p.center = PhasePoint::make(-static_cast<double>(band_index[2]),
                              static_cast<double>(band_index[0] + band_index[1]));
  const GridSpec op = operator_grid(sigma3.grid());
  const KernelMatrix kernel = kernel_threeparam(sigma3);
  const WindowSpec g = WindowSpec::gaussian(1);
  const SampledField phi = g.atom(op, PhasePoint{});
  const StftPlan plan(op, g, p.points);
  for (const PhasePoint& w : w_samples) {
    if (std::abs(w.x[0]) > 0.25 * op.extent(0) || std::abs(w.xi[0]) > 0.25 * op.dual_extent(0))
      fail("shift.margin", "conjugation shift exceeds a quarter of the grid extent");
    const SampledField field = tf_shift(kernel.apply(tf_shift_adjoint(phi, w)), w);
    const auto coeffs = plan.apply(field);
    for (std::size_t i = 0; i < coeffs.size(); ++i) p.values[i] = std::max(p.values[i], std::abs(coeffs[i]));
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < p.values.size(); ++i)
    if (p.values[i] > p.values[best]) best = i;
  p.peak = p.points[best];
  if (p.values[best] == 0.0) {
    p.pass = true;
    return p;
  }
  // Fit on annuli around the predicted centre that stay inside the lattice.
  std::vector<double> radius(p.points.size());
  for (std::size_t i = 0; i < p.points.size(); ++i) radius[i] = (p.points[i] - p.center).norm();
  const double reach = lattice.radius() - p.center.sup_norm();
  p.fit = fit_power_law(annulus_max(radius, p.values, lattice.step(), 0.0), 1.0, reach, 1e-13, 1);
  p.pass = p.fit.samples >= 2 && p.fit.slope <= -exponent + 0.5;
  return p;
}

PhasePoint correlation_offset(const PairingProfile& a, const PairingProfile& b, const Lattice& lattice, long reach) {
  if (a.values.size() != lattice.size() || b.values.size() != lattice.size())
    fail("pairing.lattice", "profiles must live on the given lattice");
  double best = -1.0;
  std::array<long, 2> arg{};
  for (long dx = -reach; dx <= reach; ++dx)
    for (long dxi = -reach; dxi <= reach; ++dxi) {
      double score = 0.0;
      for (std::size_t i = 0; i < lattice.size(); ++i) {
        const auto c = lattice.integer_coords(i);
        const long moved[2] = {c[0] + dx, c[1] + dxi};
        const std::size_t j = lattice.index_of(moved);
        if (j < lattice.size()) score += a.values[i] * b.values[j];
      }
      if (score > best) {
        best = score;
        arg = {dx, dxi};
      }
    }
  return PhasePoint::make(static_cast<double>(arg[0]) * lattice.step(),
                          static_cast<double>(arg[1]) * lattice.step());
}

TranslationReport translation_vanishing_check(const SampledField& sigma3, const PartitionOfUnity& pou) {
  const GridSpec& grid = sigma3.grid();
  if (grid.dim() != 3 || pou.dim() != 3) fail("symbol.dim", "translation check needs a 3-D symbol");
  constexpr std::size_t kRays = 8, kSteps = 9, kLeadingAtoms = 4;
  TranslationReport rep;
  rep.reach = 0.25 * std::min(grid.extent(0), grid.extent(2));

  // Six separable test functions: Gaussian, four Hermite products, compact bump.
  using Profile = std::function<double(double)>;
  const Profile gauss = [](double u) { return hermite_function(0, u); };
  const Profile herm1 = [](double u) { return hermite_function(1, u); };
  const Profile herm2 = [](double u) { return hermite_function(2, u); };
  const Profile compact = [](double u) { return bump(u / 1.5); };
  const std::vector<std::array<Profile, 3>> tests = {
      {gauss, gauss, gauss}, {herm1, gauss, gauss}, {gauss, herm1, gauss},
      {gauss, gauss, herm1}, {herm2, herm1, herm2}, {compact, compact, compact}};

  std::vector<std::array<double, 2>> dirs(kRays);
  for (std::size_t r = 0; r < kRays; ++r) {
    const double angle = kTwoPi * static_cast<double>(r) / kRays;
    dirs[r] = {std::cos(angle), std::sin(angle)};
  }
  const auto t_of = [&](std::size_t j) { return rep.reach * static_cast<double>(j) / (kSteps - 1); };

  const std::size_t n0 = grid.samples(0), n1 = grid.samples(1), n2 = grid.samples(2);
  const double vol = grid.cell_volume();
  rep.rays.resize(kRays);
  parallel_for(kRays, [&](std::size_t r) {
    std::vector<double> values(kSteps, 0.0);
    for (std::size_t j = 0; j < kSteps; ++j) {
      const double t = t_of(j);
      const double shift[3] = {t * dirs[r][0], t * dirs[r][0], t * dirs[r][1]};
      for (const auto& b : tests) {
        // <sigma(. - s), b> = sum sigma(u) b(u + s) vol, contracted axis by axis.
        std::array<std::vector<double>, 3> f;
        for (int a = 0; a < 3; ++a) {
          f[a].resize(grid.samples(a));
          for (std::size_t i = 0; i < grid.samples(a); ++i) f[a][i] = b[a](grid.coord(a, i) + shift[a]);
        }
        cplx acc{};
        for (std::size_t i = 0; i < n0; ++i) {
          if (f[0][i] == 0.0) continue;
          cplx row{};
          for (std::size_t k = 0; k < n1; ++k) {
            if (f[1][k] == 0.0) continue;
            const cplx* s = sigma3.values().data() + (i * n1 + k) * n2;
            cplx inner{};
            for (std::size_t l = 0; l < n2; ++l) inner += s[l] * f[2][l];
            row += inner * f[1][k];
          }
          acc += row * f[0][i];
        }
        values[j] = std::max(values[j], std::abs(acc) * vol);
      }
    }
    rep.rays[r] = ray_verdict(dirs[r][0], dirs[r][1], values);
  });

  // Leading atoms by spectral mass; their gradients sampled at -s, i.e. the
  // origin seen from the translated symbol.
  if (sup_abs(sigma3.values()) > 0.0) {
    const SampledField hat = fourier(sigma3, -1);
    const BandTables tables = band_tables(hat.grid(), pou);
    const auto indices = band_indices(tables);
    std::vector<double> masses(indices.size());
    parallel_for(indices.size(), [&](std::size_t i) { masses[i] = band_mass(hat, tables, indices[i]); });
    std::vector<std::size_t> order(indices.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return masses[a] > masses[b]; });
    order.resize(std::min(order.size(), kLeadingAtoms));

    std::vector<std::vector<double>> gradient(order.size());
    parallel_for(order.size(), [&](std::size_t c) {
      const SampledField atom = band_atom(hat, tables, indices[order[c]]);
      std::vector<double> g(atom.size(), 0.0);
      for (int a = 0; a < 3; ++a) {
        const SampledField da = spectral_derivative(atom, a, 1);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += std::norm(da[i]);
      }
      for (double& v : g) v = std::sqrt(v);
      gradient[c] = std::move(g);
    });

    const auto nearest = [&](int a, double u) {
      const double idx = std::round((u + 0.5 * grid.extent(a)) / grid.spacing(a));
      const auto n = static_cast<long>(grid.samples(a));
      return static_cast<std::size_t>(((static_cast<long>(idx) % n) + n) % n);
    };
    rep.atom_rays.resize(kRays);
    for (std::size_t r = 0; r < kRays; ++r) {
      std::vector<double> values(kSteps, 0.0);
      for (std::size_t j = 0; j < kSteps; ++j) {
        const double t = t_of(j);
        const double shift[3] = {t * dirs[r][0], t * dirs[r][0], t * dirs[r][1]};
        const std::size_t flat =
            (nearest(0, -shift[0]) * n1 + nearest(1, -shift[1])) * n2 + nearest(2, -shift[2]);
        for (const auto& g : gradient) values[j] = std::max(values[j], g[flat]);
      }
      rep.atom_rays[r] = ray_verdict(dirs[r][0], dirs[r][1], values);
    }
  }

  rep.pass = std::all_of(rep.rays.begin(), rep.rays.end(), [](const RayVerdict& v) { return v.decaying; }) &&
             std::all_of(rep.atom_rays.begin(), rep.atom_rays.end(), [](const RayVerdict& v) { return v.decaying; });
  return rep;
}

}  // namespace locop
