#include "locop/mod_norms.hpp"

#include <algorithm>
#include <cmath>

#include "locop/error.hpp"
#include "locop/parallel.hpp"

namespace locop {
namespace {

void require_exponent(double p) {
  if (!(p >= 1.0)) fail("norm.exponent", "exponents must be at least 1");
}

// Trapezoid weight of integer lattice coordinate k in [-half, half].
double trapezoid(long k, long half, double step) { return (k == -half || k == half) ? 0.5 * step : step; }

// Per-axis node indices whose coordinate is an integer multiple of step.
std::vector<std::size_t> lattice_nodes(const GridSpec& grid, int axis, double step) {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < grid.samples(axis); ++j) {
    const double q = grid.coord(axis, j) / step;
    if (std::abs(q - std::round(q)) < 1e-9) out.push_back(j);
  }
  return out;
}

}  // namespace

double mixed_norm(const PhaseSpaceSamples& s, const MixedNormSpec& spec) {
  require_exponent(spec.p);
  require_exponent(spec.q);
  const Lattice& lat = s.lattice;
  if (s.values.size() != lat.size()) fail("norm.shape", "one value per lattice point required");
  const int d = lat.dim();
  if (spec.weight.dim() != 2 * d) fail("weight.dim", "weight must live on phase space");
  const long half = static_cast<long>(lat.per_axis() / 2);
  std::size_t block = 1;
  for (int a = 0; a < d; ++a) block *= lat.per_axis();
  const std::size_t x_count = block;
  const std::size_t xi_count = block;
  const bool p_inf = std::isinf(spec.p);
  const bool q_inf = std::isinf(spec.q);

  // Per-xi inner norms; x-major layout means index = ix * xi_count + ixi.
  std::vector<double> inner(xi_count, 0.0);
  std::vector<double> xi_weight(xi_count, 1.0);
  for (std::size_t ixi = 0; ixi < xi_count; ++ixi) {
    double acc = 0.0;
    for (std::size_t ix = 0; ix < x_count; ++ix) {
      const std::size_t idx = ix * xi_count + ixi;
      const auto ints = lat.integer_coords(idx);
      const PhasePoint z = lat.point(idx);
      const double v = std::abs(s.values[idx]) * spec.weight(z.coords());
      if (p_inf) {
        acc = std::max(acc, v);
      } else {
        double w = 1.0;
        for (int a = 0; a < d; ++a) w *= trapezoid(ints[a], half, lat.step());
        acc += w * std::pow(v, spec.p);
      }
      if (ix == 0) {
        double w = 1.0;
        for (int a = 0; a < d; ++a) w *= trapezoid(ints[d + a], half, lat.step());
        xi_weight[ixi] = w;
      }
    }
    inner[ixi] = p_inf ? acc : std::pow(acc, 1.0 / spec.p);
  }
  double outer = 0.0;
  for (std::size_t ixi = 0; ixi < xi_count; ++ixi) {
    if (q_inf)
      outer = std::max(outer, inner[ixi]);
    else
      outer += xi_weight[ixi] * std::pow(inner[ixi], spec.q);
  }
  return q_inf ? outer : std::pow(outer, 1.0 / spec.q);
}

double modulation_norm(const SampledField& f, const MixedNormSpec& spec, const BiLipschitzMap& chi,
                       const WindowSpec& g, const Lattice& lattice) {
  if (chi.dim() != lattice.dim() || f.grid().dim() != lattice.dim()) fail("map.dim", "dimension mismatch");
  std::vector<PhasePoint> sources(lattice.size());
  for (std::size_t i = 0; i < lattice.size(); ++i) sources[i] = chi.inverse(lattice.point(i));
  PhaseSpaceSamples s{lattice, stft(f, g, sources)};
  return mixed_norm(s, spec);
}

double pullback_jacobian_factor(const BiLipschitzMap& chi, double p) {
  require_exponent(p);
  if (std::isinf(p)) return 1.0;
  return std::pow(chi.jacobian(), 1.0 / p);
}

Weight pullback_weight(const Weight& m, const BiLipschitzMap& chi) {
  if (chi.kind() != BiLipschitzMap::Kind::affine) fail("map.kind", "weight pullback needs an affine map");
  if (!chi.offset().isZero(0.0)) fail("map.offset", "weight pullback needs a linear map");
  if (chi.is_identity()) return m;
  return Weight::composed(m, LinearMap(chi.matrix(), "chi"));
}

SjostrandEstimate sjostrand_estimate(const SampledField& sigma, const Weight& nu, const SjostrandOptions& opt) {
  const GridSpec& grid = sigma.grid();
  const int D = grid.dim();
  if (nu.dim() != D) fail("weight.dim", "weight must match the symbol dimension");
  if (!(opt.step > 0.0)) fail("sjostrand.step", "lattice step must be positive");
  const double s = opt.step;

  std::vector<std::vector<std::size_t>> z_axes(D);
  std::size_t z_nodes = 1;
  for (int a = 0; a < D; ++a) {
    z_axes[a] = lattice_nodes(grid, a, s);
    if (z_axes[a].empty()) fail("sjostrand.step", "no grid node on the z lattice");
    z_nodes *= z_axes[a].size();
  }
  // zeta lattice: multiples of s strictly inside the dual range.
  std::vector<std::vector<double>> zeta_axes(D);
  std::size_t zeta_nodes = 1;
  for (int a = 0; a < D; ++a) {
    const long kmax = static_cast<long>(std::floor((0.5 * grid.dual_extent(a) - s) / s + 1e-9));
    for (long k = -kmax; k <= kmax; ++k) zeta_axes[a].push_back(k * s);
    zeta_nodes *= zeta_axes[a].size();
  }
  if (static_cast<double>(z_nodes) * static_cast<double>(zeta_nodes) > opt.max_points)
    throw Error(ErrorKind::numeric_guard, "memory.guard", "(z, zeta) lattice exceeds the point budget");

  const SampledField hat = fourier(sigma, -1);
  const GridSpec& dual = hat.grid();
  double hat_max = 0.0;
  for (const auto& v : hat.values()) hat_max = std::max(hat_max, std::abs(v));

  std::vector<std::size_t> z_index(z_nodes);
  for (std::size_t i = 0; i < z_nodes; ++i) {
    std::size_t rem = i, idx = 0;
    for (int a = D - 1; a >= 0; --a) {
      idx += z_axes[a][rem % z_axes[a].size()] * grid.stride(a);
      rem /= z_axes[a].size();
    }
    z_index[i] = idx;
  }

  const double norm_const = std::pow(2.0, 0.25 * D);
  std::vector<double> sup(zeta_nodes, 0.0);
  std::vector<double> weight(zeta_nodes, 0.0);
  parallel_for(zeta_nodes, [&](std::size_t iz) {
    std::vector<double> zeta(D);
    std::size_t rem = iz;
    for (int a = D - 1; a >= 0; --a) {
      zeta[a] = zeta_axes[a][rem % zeta_axes[a].size()];
      rem /= zeta_axes[a].size();
    }
    weight[iz] = nu(zeta);
    std::vector<std::vector<double>> gauss(D);
    for (int a = 0; a < D; ++a) {
      gauss[a].resize(dual.samples(a));
      for (std::size_t k = 0; k < dual.samples(a); ++k) {
        const double d = dual.coord(a, k) - zeta[a];
        gauss[a][k] = std::exp(-kPi * d * d);
      }
    }
    std::vector<cplx> prod(dual.size());
    double pmax = 0.0;
    for (std::size_t i = 0; i < prod.size(); ++i) {
      double g = norm_const;
      std::size_t r = i;
      for (int a = D - 1; a >= 0; --a) {
        g *= gauss[a][r % dual.samples(a)];
        r /= dual.samples(a);
      }
      prod[i] = hat[i] * g;
      pmax = std::max(pmax, std::abs(prod[i]));
    }
    if (pmax <= opt.negligible * hat_max) return;
    const SampledField back = fourier(SampledField(dual, std::move(prod)), +1);
    double m = 0.0;
    for (std::size_t idx : z_index) m = std::max(m, std::abs(back[idx]));
    sup[iz] = m;
  });

  SjostrandEstimate est;
  est.step = s;
  est.z_nodes = z_nodes;
  est.zeta_nodes = zeta_nodes;
  const double cell = std::pow(s, D);
  for (std::size_t iz = 0; iz < zeta_nodes; ++iz) {
    est.value += sup[iz] * weight[iz] * cell;
    est.sup = std::max(est.sup, sup[iz]);
  }
  return est;
}

double sjostrand_norm(const SampledField& sigma, const Weight& nu, const SjostrandOptions& opt) {
  return sjostrand_estimate(sigma, nu, opt).value;
}

double modulation_sup_norm(const SampledField& sigma, const SjostrandOptions& opt) {
  return sjostrand_estimate(sigma, Weight::constant(sigma.grid().dim()), opt).sup;
}

double amalgam_norm(const SampledField& sigma, const Weight& nu, double tau, const SjostrandOptions& opt) {
  if (!(tau > 0.0 && tau < 1.0))
    throw Error(ErrorKind::invalid_argument, "tau.open", "amalgam norm needs tau in (0,1)");
  if (sigma.grid().dim() != 2) fail("symbol.dim", "amalgam norm expects a symbol on R^2");
  const Weight composed = Weight::composed(nu, LinearMap::tau_scaling(tau, 1));
  return sjostrand_norm(fourier(sigma, +1), composed, opt);
}

}  // namespace locop
