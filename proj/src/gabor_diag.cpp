#include "locop/gabor_diag.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "locop/error.hpp"
#include "locop/parallel.hpp"

namespace locop {
namespace {

using BinKey = std::array<long, 8>;

BinKey bin_of(const PhasePoint& u, double step) {
  BinKey k{};
  for (int a = 0; a < u.dim; ++a) {
    k[a] = std::lround(u.x[a] / step);
    k[u.dim + a] = std::lround(u.xi[a] / step);
  }
  return k;
}

RadialProfile radial(std::vector<PhasePoint> points, std::vector<double> values, double radius) {
  RadialProfile prof;
  prof.radius = radius;
  std::vector<double> r(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) r[i] = points[i].norm();
  prof.annuli = annulus_max(r, values, 1.0);
  prof.power_fit = fit_power_law(prof.annuli, 1.0, radius);
  prof.verdict = annulus_verdict(r, values, radius);
  prof.points = std::move(points);
  prof.values = std::move(values);
  return prof;
}

}  // namespace

Eigen::MatrixXcd gabor_coefficients(const LinearOperator& op, std::span<const PhasePoint> sources,
                                    std::span<const PhasePoint> targets, const WindowSpec& g1, const WindowSpec& g2) {
  if (static_cast<double>(sources.size()) * static_cast<double>(targets.size()) > kGaborCoefficientGuard)
    throw Error(ErrorKind::numeric_guard, "memory.guard", "Gabor matrix exceeds the coefficient budget");
  const GridSpec& grid = op.grid();
  for (const auto& s : sources) require_atom_margin(grid, s);
  for (const auto& t : targets) require_atom_margin(grid, t);
  const auto rows = static_cast<Eigen::Index>(sources.size());
  const auto cols = static_cast<Eigen::Index>(targets.size());
  Eigen::MatrixXcd out(rows, cols);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const StftPlan plan(grid, g2, targets);
  constexpr std::size_t kChunk = 256;
  for (std::size_t start = 0; start < sources.size(); start += kChunk) {
    const std::size_t count = std::min(kChunk, sources.size() - start);
    Eigen::MatrixXcd atoms(n, static_cast<Eigen::Index>(count));
    parallel_for(count, [&](std::size_t c) {
      const SampledField a = g1.atom(grid, sources[start + c]);
      atoms.col(static_cast<Eigen::Index>(c)) = Eigen::Map<const Eigen::VectorXcd>(a.values().data(), n);
    });
    const Eigen::MatrixXcd images = op.apply_columns(atoms);
    parallel_for(count, [&](std::size_t c) {
      const auto col = static_cast<Eigen::Index>(c);
      const SampledField f(grid, std::vector<cplx>(images.col(col).data(), images.col(col).data() + n));
      const auto v = plan.apply(f);
      for (Eigen::Index t = 0; t < cols; ++t) out(static_cast<Eigen::Index>(start + c), t) = v[static_cast<std::size_t>(t)];
    });
  }
  return out;
}

GaborMatrix gabor_matrix(const LinearOperator& op, const Lattice& sources, const Lattice& targets,
                         const BiLipschitzMap& chi, const WindowSpec& g1, const WindowSpec& g2) {
  if (std::abs(sources.step() - targets.step()) > 1e-12) fail("lattice.step", "source and target steps differ");
  GaborMatrix g;
  g.sources = sources.points();
  g.targets = targets.points();
  g.step = sources.step();
  g.target_radius = targets.radius();
  g.chi = chi;
  g.coeffs = gabor_coefficients(op, g.sources, g.targets, g1, g2);
  return g;
}

GaborMatrix gabor_matrix(const LinearOperator& op, const Lattice& lattice, const BiLipschitzMap& chi,
                         const WindowSpec& g1, const WindowSpec& g2) {
  return gabor_matrix(op, lattice, lattice, chi, g1, g2);
}

double EnvelopeProfile::at(const PhasePoint& offset) const {
  const BinKey key = bin_of(offset, step);
  auto less = [&](const PhasePoint& p, const BinKey& k) { return bin_of(p, step) < k; };
  auto it = std::lower_bound(offsets.begin(), offsets.end(), key, less);
  if (it == offsets.end() || bin_of(*it, step) != key) return 0.0;
  return envelope[static_cast<std::size_t>(it - offsets.begin())];
}

EnvelopeProfile localization_envelope(const GaborMatrix& g, const Weight& nu) {
  if (g.sources.empty() || g.targets.empty()) return {};
  const int d = g.sources.front().dim;
  if (nu.dim() != 2 * d) fail("weight.dim", "envelope weight must live on phase space");
  std::vector<PhasePoint> images(g.sources.size());
  for (std::size_t i = 0; i < images.size(); ++i) images[i] = g.chi.apply(g.sources[i]);
  std::map<BinKey, double> bins;
  for (std::size_t i = 0; i < g.sources.size(); ++i)
    for (std::size_t j = 0; j < g.targets.size(); ++j) {
      const double v = std::abs(g.coeffs(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      double& slot = bins[bin_of(g.targets[j] - images[i], g.step)];
      slot = std::max(slot, v);
    }
  EnvelopeProfile env;
  env.step = g.step;
  const double cell = std::pow(g.step, 2 * d);
  std::vector<double> radii;
  for (const auto& [key, value] : bins) {
    PhasePoint p;
    p.dim = d;
    for (int a = 0; a < d; ++a) {
      p.x[a] = static_cast<double>(key[a]) * g.step;
      p.xi[a] = static_cast<double>(key[d + a]) * g.step;
    }
    env.offsets.push_back(p);
    env.envelope.push_back(value);
    env.weighted_sum += value * nu(p.coords()) * cell;
    radii.push_back(p.norm());
  }
  const AnnulusProfile ann = annulus_max(radii, env.envelope, 1.0);
  const double rmax = radii.empty() ? 0.0 : *std::max_element(radii.begin(), radii.end());
  env.power_fit = fit_power_law(ann, 1.0, rmax);
  env.stretched_fit = fit_stretched_exponential(ann, 1.0, rmax);
  return env;
}

RadialProfile weak_compactness_profile(const LinearOperator& op, const Lattice& lattice, const BiLipschitzMap& chi,
                                       double half_width, const WindowSpec& g1, const WindowSpec& g2) {
  if (half_width < lattice.step() - 1e-12) fail("weakcpt.width", "box half-width must be at least the lattice step");
  const auto targets = lattice.points();
  std::vector<PhasePoint> sources(targets.size());
  for (std::size_t i = 0; i < targets.size(); ++i) sources[i] = chi.inverse(targets[i]);
  const Eigen::MatrixXcd c = gabor_coefficients(op, sources, targets, g1, g2);
  const long reach = static_cast<long>(std::floor(half_width / lattice.step() + 1e-9));
  const int D = 2 * lattice.dim();
  std::vector<double> values(targets.size(), 0.0);
  parallel_for(targets.size(), [&](std::size_t zi) {
    const auto base = lattice.integer_coords(zi);
    // Walk the (2 reach + 1)^D box of w around z.
    std::array<long, 8> off{};
    for (int a = 0; a < D; ++a) off[a] = -reach;
    double best = 0.0;
    while (true) {
      std::array<long, 8> w{};
      for (int a = 0; a < D; ++a) w[a] = base[a] + off[a];
      const std::size_t wi = lattice.index_of(std::span<const long>(w.data(), D));
      if (wi < lattice.size())
        best = std::max(best, std::abs(c(static_cast<Eigen::Index>(wi), static_cast<Eigen::Index>(zi))));
      int a = D - 1;
      while (a >= 0 && off[a] == reach) off[a--] = -reach;
      if (a < 0) break;
      ++off[a];
    }
    values[zi] = best;
  });
  return radial(targets, std::move(values), lattice.radius());
}

RadialProfile uniform_sup_profile(const LinearOperator& op, const Lattice& lattice, const WindowSpec& g) {
  const GaborMatrix m = gabor_matrix(op, lattice, BiLipschitzMap::identity(lattice.dim()), g, g);
  std::vector<double> values(m.sources.size());
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = m.coeffs.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff();
  return radial(m.sources, std::move(values), lattice.radius());
}

BoundednessReport boundedness_ratio(const LinearOperator& op, std::span<const SampledField> fields,
                                    const MixedNormSpec& spec, const BiLipschitzMap& chi, const Lattice& lattice,
                                    const WindowSpec& g) {
  BoundednessReport rep;
  const BiLipschitzMap id = BiLipschitzMap::identity(lattice.dim());
  for (const auto& f : fields) {
    const double den = modulation_norm(f, spec, chi, g, lattice);
    if (!(den > 0.0)) {
      ++rep.skipped;
      continue;
    }
    rep.ratios.push_back(modulation_norm(op.apply(f), spec, id, g, lattice) / den);
  }
  if (!rep.ratios.empty()) {
    rep.max_ratio = *std::max_element(rep.ratios.begin(), rep.ratios.end());
    rep.min_ratio = *std::min_element(rep.ratios.begin(), rep.ratios.end());
  }
  return rep;
}

std::vector<SampledField> boundedness_test_set(const GridSpec& grid) {
  std::vector<SampledField> out;
  for (int k = 0; k < 5; ++k) out.push_back(WindowSpec::hermite({k}).atom(grid, PhasePoint{}));
  const double shifts[5][2] = {{1.0, 0.0}, {-1.0, 1.0}, {0.0, -1.5}, {2.0, 0.5}, {-1.5, -1.0}};
  for (const auto& s : shifts) out.push_back(WindowSpec::gaussian(1).atom(grid, PhasePoint::make(s[0], s[1])));
  return out;
}

std::vector<double> singular_values(const GaborMatrix& g) {
  if (g.coeffs.size() == 0) return {};
  const int d = g.sources.front().dim;
  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(g.coeffs);
  const double scale = std::pow(g.step, 2 * d);
  std::vector<double> sv(static_cast<std::size_t>(svd.singularValues().size()));
  for (std::size_t i = 0; i < sv.size(); ++i) sv[i] = svd.singularValues()(static_cast<Eigen::Index>(i)) * scale;
  return sv;
}

std::size_t epsilon_rank(std::span<const double> sv, double rel) {
  if (sv.empty() || sv[0] == 0.0) return 0;
  return static_cast<std::size_t>(std::count_if(sv.begin(), sv.end(), [&](double s) { return s > rel * sv[0]; }));
}

double tail_norm(const GaborMatrix& g, double k_radius, double p, double q, const Weight& m) {
  if (!(p >= 1.0) || !(q >= 1.0)) fail("norm.exponent", "exponents must be at least 1");
  if (k_radius >= g.target_radius) fail("tail.radius", "K must sit strictly inside the lattice");
  if (g.sources.empty()) return 0.0;
  const int d = g.sources.front().dim;
  const double cell = std::pow(g.step, 2 * d);
  std::vector<std::size_t> rows;
  for (std::size_t j = 0; j < g.targets.size(); ++j)
    if (k_radius < 0.0 || g.targets[j].sup_norm() > k_radius + 1e-12) rows.push_back(j);
  if (rows.empty()) return 0.0;
  const auto nr = static_cast<Eigen::Index>(rows.size());
  const auto nc = static_cast<Eigen::Index>(g.sources.size());
  Eigen::MatrixXcd block(nr, nc);
  std::vector<double> msrc(g.sources.size());
  for (std::size_t i = 0; i < msrc.size(); ++i) msrc[i] = m(g.sources[i].coords());
  for (Eigen::Index r = 0; r < nr; ++r) {
    const std::size_t j = rows[static_cast<std::size_t>(r)];
    const double mt = m(g.targets[j].coords());
    for (Eigen::Index c = 0; c < nc; ++c)
      block(r, c) = g.coeffs(c, static_cast<Eigen::Index>(j)) * (mt / msrc[static_cast<std::size_t>(c)] * cell);
  }
  const double col_sum = block.cwiseAbs().colwise().sum().maxCoeff();
  const double row_sum = block.cwiseAbs().rowwise().sum().maxCoeff();
  if (p == 2.0 && q == 2.0) {
    const Eigen::BDCSVD<Eigen::MatrixXcd> svd(block);
    return svd.singularValues()(0);
  }
  if (p == 1.0 && q == 1.0) return col_sum;
  if (std::isinf(p) && std::isinf(q)) return row_sum;
  if (p == q) return std::pow(col_sum, 1.0 / p) * std::pow(row_sum, 1.0 - 1.0 / p);
  return std::max(col_sum, row_sum);
}

GraphConcentration graph_concentration(const GaborMatrix& g, double radius, double tolerance) {
  GraphConcentration out;
  out.tolerance = tolerance < 0.0 ? g.step : tolerance;
  for (std::size_t i = 0; i < g.sources.size(); ++i) {
    if (g.sources[i].norm() > radius + 1e-12) continue;
    Eigen::Index best = 0;
    g.coeffs.row(static_cast<Eigen::Index>(i)).cwiseAbs().maxCoeff(&best);
    const double dist = (g.targets[static_cast<std::size_t>(best)] - g.chi.apply(g.sources[i])).sup_norm();
    ++out.considered;
    if (dist <= out.tolerance + 1e-9) ++out.hits;
    out.worst_distance = std::max(out.worst_distance, dist);
  }
  out.fraction = out.considered ? static_cast<double>(out.hits) / static_cast<double>(out.considered) : 0.0;
  return out;
}

}  // namespace locop
