#include "locop/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <map>
#include <sstream>

#include "locop/atomic.hpp"
#include "locop/error.hpp"
#include "locop/gabor_diag.hpp"
#include "locop/mod_norms.hpp"
#include "locop/parallel.hpp"
#include "locop/phase.hpp"
#include "locop/quantizers.hpp"
#include "locop/tf.hpp"

namespace locop {
namespace {

std::string label(double v) { return format_short(v); }

class Sheet {
 public:
  explicit Sheet(std::vector<ReportRow>& rows) : rows_(rows) {}
  void start(int id, std::string name) {
    std::ostringstream s;
    s << "criterion_" << (id < 10 ? "0" : "") << id;
    experiment_ = s.str();
    name_ = std::move(name);
  }
  void measure(const std::string& quantity, double value) {
    rows_.push_back({experiment_, name_, quantity, value, "", "", ""});
  }
  void check(const std::string& quantity, double value, bool ok, const std::string& thresholds) {
    rows_.push_back({experiment_, name_, quantity, value, ok ? "pass" : "fail", thresholds, ""});
  }
  void at_most(const std::string& quantity, double value, double limit, const std::string& extra = {}) {
    check(quantity, value, value <= limit, "<=" + label(limit) + (extra.empty() ? "" : ";" + extra));
  }
  void at_least(const std::string& quantity, double value, double limit, const std::string& extra = {}) {
    check(quantity, value, value >= limit, ">=" + label(limit) + (extra.empty() ? "" : ";" + extra));
  }

 private:
  std::vector<ReportRow>& rows_;
  std::string experiment_, name_;
};

SampledField gaussian_field(const GridSpec& g, double x0 = 0.0, double xi0 = 0.0) {
  return SampledField::sample(g, [&](auto t) {
    return std::exp(-kPi * (t[0] - x0) * (t[0] - x0)) * std::polar(1.0, kTwoPi * xi0 * t[0]);
  });
}

SymbolGrid2 symbol2(const GridSpec& op, const std::function<cplx(double, double)>& fn, bool constant_like = false) {
  return {SampledField::sample(symbol_grid2(op), [&](auto t) { return fn(t[0], t[1]); }), constant_like};
}

cplx gauss2(double x, double xi) { return std::exp(-kPi * (x * x + xi * xi)); }

// Large operator grid for the lattice criteria: L = 32, N = 1024 leaves room for R = 9.
const GridSpec& wide_grid() {
  static const GridSpec g = GridSpec::cube(1, 32.0, 1024);
  return g;
}

void criterion_reproducing(Sheet& s) {
  const GridSpec grid = GridSpec::cube(1, 16.0, 256);
  const Lattice lat(0.25, 8.0);
  const auto pts = lat.points();
  const WindowSpec phi = WindowSpec::gaussian(1);
  const std::pair<const char*, WindowSpec> fields[] = {{"gaussian", WindowSpec::gaussian(1)},
                                                       {"hermite1", WindowSpec::hermite({1})}};
  for (const auto& [name, w] : fields) {
    const SampledField f = w.atom(grid, PhasePoint{});
    const auto c = stft(f, phi, pts);
    const double err = relative_l2_error(synthesize(c, pts, phi, phi, lat.step(), grid), f);
    double energy = 0.0;
    for (const auto& v : c) energy += std::norm(v);
    energy *= lat.step() * lat.step();
    const double norm2 = std::pow(norm_lp(f, 2.0), 2);
    s.at_most(std::string("roundtrip_") + name, err, 1e-6, "alpha=0.25;R=8");
    s.at_most(std::string("parseval_") + name, std::abs(energy - norm2) / norm2, 1e-4, "alpha=0.25;R=8");
  }
}

void criterion_closed_form(Sheet& s) {
  const GridSpec grid = GridSpec::cube(1, 16.0, 256);
  const WindowSpec phi = WindowSpec::gaussian(1);
  const SampledField f = phi.atom(grid, PhasePoint{});
  std::vector<PhasePoint> pts;
  const double xs[] = {-1.5, -0.7, 0.0, 0.4, 1.25};
  for (double x : xs)
    for (double xi : xs) pts.push_back(PhasePoint::make(x, xi * 1.1));
  const auto v = stft(f, phi, pts);
  double worst = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i)
    worst = std::max(worst, std::abs(std::abs(v[i]) - std::exp(-kPi * pts[i].norm() * pts[i].norm() / 2)));
  s.at_most("max_deviation", worst, 1e-8, "points=25");
}

void criterion_quantizers(Sheet& s) {
  const GridSpec grid = GridSpec::cube(1, 16.0, 256);
  const std::vector<SampledField> fields = {gaussian_field(grid), WindowSpec::hermite({1}).atom(grid, PhasePoint{}),
                                            gaussian_field(grid, 1.0, 0.5)};
  const auto worst_error = [&](const LinearOperator& op, const std::function<SampledField(const SampledField&)>& ref) {
    double worst = 0.0;
    for (const auto& f : fields) worst = std::max(worst, relative_l2_error(op.apply(f), ref(f)));
    return worst;
  };
  const auto same = [](const SampledField& f) { return f; };
  const auto one = symbol2(grid, [](double, double) { return cplx(1.0); });
  const auto mult = symbol2(grid, [](double x, double) { return cplx(std::exp(-kPi * x * x / 9.0)); });
  const auto fmult = symbol2(grid, [](double, double xi) { return cplx(std::exp(-kPi * xi * xi / 4.0)); });
  const auto times_a = [&](const SampledField& f) {
    SampledField out = f;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] *= std::exp(-kPi * std::pow(grid.coord(0, i), 2) / 9.0);
    return out;
  };
  const auto filter_b = [&](const SampledField& f) {
    SampledField hat = fourier(f, -1);
    const GridSpec& d = hat.grid();
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= std::exp(-kPi * std::pow(d.coord(0, k), 2) / 4.0);
    return fourier(hat, +1);
  };
  for (double tau : {0.0, 0.25, 0.5, 1.0}) {
    const std::string t = "tau=" + label(tau);
    s.at_most("identity_" + t, worst_error(kernel_tau(one, tau), same), 1e-10);
    s.at_most("multiplier_" + t, worst_error(kernel_tau(mult, tau), times_a), 1e-8);
    s.at_most("fourier_multiplier_" + t, worst_error(kernel_tau(fmult, tau), filter_b), 1e-8);
  }
  s.at_most("fio_bilinear_identity", worst_error(FioOperator(one, PhaseSpec::bilinear()), same), 1e-10);
}

void criterion_intertwining(Sheet& s) {
  const GridSpec grid = GridSpec::cube(1, 16.0, 256);
  const auto sym = symbol2(grid, gauss2);
  for (auto [t1, t2] : {std::pair{1.0, 0.5}, {0.5, 0.0}, {0.7, 0.3}}) {
    const auto moved = tau_transform(sym, t1, t2);
    const auto ka = kernel_tau(sym, t1), kb = kernel_tau(moved, t2);
    const std::string tag = label(t1) + "->" + label(t2);
    s.at_most("kernel_deviation_" + tag, (ka.entries() - kb.entries()).norm() / ka.entries().norm(), 1e-6,
              "frobenius");
    s.at_most("roundtrip_" + tag, relative_l2_error(tau_transform(moved, t2, t1).sigma, sym.sigma), 1e-8);
  }
}

void criterion_localization(Sheet& s) {
  const GridSpec& grid = wide_grid();
  const auto weyl = kernel_tau(symbol2(grid, gauss2), 0.5);
  const WindowSpec g = WindowSpec::gaussian(1);
  const auto id = BiLipschitzMap::identity();
  const GaborMatrix small = gabor_matrix(weyl, Lattice(0.5, 6.0), id, g, g);
  const GaborMatrix large = gabor_matrix(weyl, Lattice(0.5, 9.0), id, g, g);
  for (double order : {0.0, 1.0, 2.0}) {
    const Weight nu = Weight::polynomial(order, 2);
    const double a = localization_envelope(small, nu).weighted_sum;
    const double b = localization_envelope(large, nu).weighted_sum;
    s.measure("weighted_sum_R6_nu" + label(order), a);
    s.check("weighted_sum_R9_nu" + label(order), b, std::isfinite(b) && std::abs(b - a) <= 0.05 * a,
            "finite;within 5% of R=6;alpha=0.5");
  }
  const auto env = localization_envelope(gabor_matrix(ScaledIdentity(grid, 1.0), Lattice(0.5, 6.0), id, g, g),
                                         Weight::constant(2));
  double worst = 0.0;
  for (std::size_t i = 0; i < env.offsets.size(); ++i) {
    const double r = env.offsets[i].norm();
    worst = std::max(worst, std::abs(env.envelope[i] - std::exp(-kPi * r * r / 2)));
  }
  s.at_most("identity_envelope_deviation", worst, 1e-6, "alpha=0.5;R=6");
}

void criterion_weak_compactness(Sheet& s) {
  const GridSpec& grid = wide_grid();
  const WindowSpec g = WindowSpec::gaussian(1);
  const auto id = BiLipschitzMap::identity();
  const Lattice lat(0.5, 6.0);
  const std::string thr = "outer<=0.1*inner;K_half_width=1;alpha=0.5;R=6";
  const auto gauss = symbol2(grid, gauss2);
  int decaying = 0;
  for (double tau : {0.0, 0.5, 1.0}) {
    const auto prof = weak_compactness_profile(kernel_tau(gauss, tau), lat, id, 1.0, g, g);
    decaying += prof.verdict.decaying;
    s.check("gaussian_tau=" + label(tau), prof.verdict.outer_max / prof.verdict.inner_max, prof.verdict.decaying,
            "decaying;" + thr);
  }
  s.check("gaussian_verdicts_agree", decaying, decaying == 0 || decaying == 3, "all three tau agree");
  const std::pair<const char*, SymbolGrid2> flat[] = {
      {"one", symbol2(grid, [](double, double) { return cplx(1.0); }, true)},
      {"gaussian_x_only", symbol2(grid, [](double x, double) { return cplx(std::exp(-kPi * x * x)); }, true)}};
  for (const auto& [name, sym] : flat) {
    const auto prof = weak_compactness_profile(kernel_tau(sym, 0.5), lat, id, 1.0, g, g);
    s.check(std::string(name), prof.verdict.outer_max / prof.verdict.inner_max, !prof.verdict.decaying,
            "non-decaying;" + thr);
  }
}

void criterion_rank_growth(Sheet& s) {
  const GridSpec& grid = wide_grid();
  const WindowSpec g = WindowSpec::gaussian(1);
  const auto id = BiLipschitzMap::identity();
  const auto weyl = kernel_tau(symbol2(grid, gauss2), 0.5);
  const ScaledIdentity identity(grid, 1.0);
  const auto growth = [&](const LinearOperator& op, const char* name) {
    const auto r4 = epsilon_rank(singular_values(gabor_matrix(op, Lattice(0.5, 4.0), id, g, g)), 0.1);
    const auto r8 = epsilon_rank(singular_values(gabor_matrix(op, Lattice(0.5, 8.0), id, g, g)), 0.1);
    s.measure(std::string(name) + "_rank_R4", static_cast<double>(r4));
    s.measure(std::string(name) + "_rank_R8", static_cast<double>(r8));
    return static_cast<double>(r8) / static_cast<double>(std::max<std::size_t>(r4, 1));
  };
  s.at_least("identity_growth", growth(identity, "identity"), 3.0, "eps=0.1*s1;alpha=0.5;R=4->8");
  s.at_most("weyl_gaussian_growth", growth(weyl, "weyl_gaussian"), 1.3, "eps=0.1*s1;alpha=0.5;R=4->8");
}

void criterion_fio_graph(Sheet& s) {
  const GridSpec& grid = wide_grid();
  const PhaseSpec phase = PhaseSpec::quadratic(1.0, 0.0);  // x xi + x^2 / 2
  const auto one = symbol2(grid, [](double, double) { return cplx(1.0); });
  const FioOperator fio(one, phase);
  const auto chi = BiLipschitzMap::canonical(phase, 16.0);
  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 1.0, 1.0;  // (y, eta) -> (y, eta + y)
  const auto affine = BiLipschitzMap::affine(a, Eigen::Vector2d::Zero());
  const Lattice sources(0.5, 4.0), targets(0.5, 8.0);
  double worst = 0.0;
  for (const auto& z : sources.points()) worst = std::max(worst, (chi.apply(z) - affine.apply(z)).sup_norm());
  s.at_most("canonical_vs_affine", worst, 1e-9, "lattice alpha=0.5;R=4");
  const WindowSpec g = WindowSpec::gaussian(1);
  GaborMatrix G = gabor_matrix(fio, sources, targets, BiLipschitzMap::identity(), g, g);
  G.chi = chi;
  const auto conc = graph_concentration(G, 4.0);
  s.measure("worst_distance", conc.worst_distance);
  s.at_least("argmax_on_graph_fraction", conc.fraction, 0.95, "|z|<=4;tolerance=one step;alpha=0.5;target_R=8");
}

void criterion_atoms(Sheet& s) {
  const GridSpec cube = GridSpec::cube(3, 8.0, 64);
  const PartitionOfUnity pou(3);
  const Weight ledger = Weight::composed(Weight::polynomial(1.0, 2), LinearMap::three_to_two(1));
  const std::pair<const char*, SampledField> symbols[] = {
      {"gaussian", SampledField::sample(cube, [](auto t) {
         return cplx(std::exp(-kPi * (t[0] * t[0] + t[1] * t[1] + t[2] * t[2])));
       })},
      {"band_limited", band_symbol(cube, {-0.2, -0.2, -0.2}, 0.4, 6, 7)}};
  for (const auto& [name, sigma] : symbols) {
    const auto dec = decompose(sigma, ledger, pou);
    double band = 0.0;
    for (const auto& atom : dec.atoms) band = std::max(band, atom.out_of_band);
    const std::string n = name;
    s.measure(n + "_atoms", static_cast<double>(dec.atoms.size()));
    s.at_most(n + "_residual", dec.residual, 1e-8);
    s.at_most(n + "_out_of_band", band, 1e-10, "K=k+[-0.25,2.25]^3");
    const long full = std::max(2L, dec.max_index());
    const long half = (full + 1) / 2;
    const double a = dec.ledger_sum(half), b = dec.ledger_sum(2 * half);
    s.measure(n + "_ledger_k" + std::to_string(half), a);
    s.at_most(n + "_ledger_drift", std::abs(b - a) / b, 0.02,
              "weight=nu1oB;k_range=" + std::to_string(half) + "->" + std::to_string(2 * half));
  }
}

void criterion_band_decay(Sheet& s) {
  const GridSpec op = GridSpec::cube(1, 16.0, 256);
  const GridSpec g3 = symbol_grid3(op, 128);
  const int orders[] = {0, 1, 2};
  const int exponents[] = {2, 4};
  const double box_lo[] = {-0.25, -0.25, -0.25};
  const Lattice lat(0.5, 4.5);
  const std::vector<PhasePoint> w = {PhasePoint::make(0, 0), PhasePoint::make(1, 0), PhasePoint::make(0, 1),
                                     PhasePoint::make(-1, -1)};
  const std::array<std::array<long, 3>, 2> shifted = {{{0, 0, 2}, {1, 1, 0}}};
  for (int seed = 0; seed < 5; ++seed) {
    const std::string tag = "symbol" + std::to_string(seed);
    const auto sigma = band_symbol(g3, {-0.25, -0.25, -0.25}, 0.5, 5, 100 + seed);
    for (const auto& r : derivative_decay_check(sigma, orders, exponents, box_lo, 2.5)) {
      s.check(tag + "_derivative" + std::to_string(r.order) + "_N" + std::to_string(r.exponent), r.fit.slope,
              r.pass, "slope<=" + std::to_string(-r.exponent) + "+0.5;C finite;|x| in [2,6]");
    }
    PairingProfile base;
    for (int n : exponents) {
      base = pairing_decay(sigma, {0, 0, 0}, lat, n, w);
      s.check(tag + "_pairing_N" + std::to_string(n), base.fit.slope, base.pass,
              "slope<=" + std::to_string(-n) + "+0.5;alpha=0.5;R=4.5;w samples=4");
    }
    if (seed > 1) continue;
    for (const auto& k : shifted) {
      const std::array<double, 3> lo = {k[0] - 0.25, k[1] - 0.25, k[2] - 0.25};
      const auto moved = band_symbol(g3, lo, 0.5, 5, 100 + seed);
      const auto prof = pairing_decay(moved, k, lat, 2, w);
      const PhasePoint d = correlation_offset(base, prof, lat, 4);
      const PhasePoint expect = PhasePoint::make(-static_cast<double>(k[2]), static_cast<double>(k[0] + k[1]));
      const std::string kt = "k=" + std::to_string(k[0]) + std::to_string(k[1]) + std::to_string(k[2]);
      s.measure(tag + "_offset_x_" + kt, d.x[0]);
      s.measure(tag + "_offset_xi_" + kt, d.xi[0]);
      s.at_most(tag + "_recentering_" + kt, (d - expect).sup_norm(), lat.step(),
                "offset=(-k3,k1+k2);one lattice step");
    }
  }
}

void criterion_boundedness(Sheet& s) {
  const GridSpec grid = GridSpec::cube(1, 16.0, 256);
  const WindowSpec g = WindowSpec::gaussian(1);
  const auto id = BiLipschitzMap::identity();
  const Lattice lat(0.5, 4.0);
  const auto fields = boundedness_test_set(grid);
  const auto gauss = symbol2(grid, gauss2);
  const auto wide = symbol2(grid, [](double x, double xi) { return cplx(std::exp(-kPi * (x * x + xi * xi) / 4.0)); });
  std::vector<std::pair<std::string, std::unique_ptr<LinearOperator>>> ops;
  ops.emplace_back("identity", std::make_unique<ScaledIdentity>(grid, 1.0));
  ops.emplace_back("weyl_gaussian", std::make_unique<KernelMatrix>(kernel_tau(gauss, 0.5)));
  ops.emplace_back("kn_gaussian", std::make_unique<KernelMatrix>(kernel_tau(gauss, 1.0)));
  ops.emplace_back("weyl_wide_gaussian", std::make_unique<KernelMatrix>(kernel_tau(wide, 0.5)));
  double lo = HUGE_VAL, hi = 0.0;
  for (const auto& [name, op] : ops) {
    const double env = localization_envelope(gabor_matrix(*op, lat, id, g, g), Weight::constant(2)).weighted_sum;
    s.measure(name + "_envelope_sum", env);
    for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 2.0}, {2.0, 1.0}}) {
      const auto rep = boundedness_ratio(*op, fields, {p, q, Weight::constant(2)}, id, lat, g);
      const std::string tag = name + "_p" + label(p) + "_q" + label(q);
      s.check(tag + "_ratio", rep.max_ratio, std::isfinite(rep.max_ratio) && rep.ratios.size() >= 10,
              "finite;fields>=10;alpha=0.5;R=4");
      const double r = rep.max_ratio / env;
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
  }
  s.at_most("ratio_of_ratios", hi / lo, 10.0, "max/min of boundedness/envelope over operators and (p,q)");
}

struct Criterion {
  int id;
  const char* name;
  void (*run)(Sheet&);
};

constexpr Criterion kCriteria[] = {
    {1, "reproducing_formula", criterion_reproducing},
    {2, "closed_form_stft", criterion_closed_form},
    {3, "quantizer_identities", criterion_quantizers},
    {4, "intertwining", criterion_intertwining},
    {5, "localization", criterion_localization},
    {6, "weak_compactness", criterion_weak_compactness},
    {7, "rank_growth", criterion_rank_growth},
    {8, "fio_graph", criterion_fio_graph},
    {9, "atomic_decomposition", criterion_atoms},
    {10, "band_decay", criterion_band_decay},
    {11, "boundedness_surrogate", criterion_boundedness},
};

}  // namespace

std::vector<ReportRow> run_acceptance(const AcceptanceProgress& progress) {
  std::vector<ReportRow> rows;
  Sheet sheet(rows);
  for (const auto& c : kCriteria) {
    const auto t0 = std::chrono::steady_clock::now();
    sheet.start(c.id, c.name);
    try {
      c.run(sheet);
    } catch (const Error& e) {
      // A module error fails the criterion but keeps the remaining ones running.
      sheet.check("error:" + e.code(), 0.0, false, e.what());
    }
    if (progress) progress(c.id, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return rows;
}

std::vector<CriterionResult> summarize_acceptance(const std::vector<ReportRow>& rows) {
  std::map<std::string, CriterionResult> by_id;
  for (const auto& c : kCriteria) {
    std::ostringstream s;
    s << "criterion_" << (c.id < 10 ? "0" : "") << c.id;
    by_id[s.str()] = {c.id, c.name, true, 0, ""};
  }
  for (const auto& r : rows) {
    auto it = by_id.find(r.experiment);
    if (it == by_id.end() || r.verdict.empty()) continue;
    CriterionResult& c = it->second;
    ++c.checks;
    if (r.verdict != "pass" && c.pass) {
      c.pass = false;
      c.detail = r.quantity + "=" + format_number(r.value) + " (" + r.thresholds + ")";
    }
  }
  std::vector<CriterionResult> out;
  for (auto& [key, c] : by_id) {
    if (c.checks == 0) {
      c.pass = false;
      c.detail = "no checks ran";
    } else if (c.pass) {
      c.detail = std::to_string(c.checks) + " checks";
    }
    out.push_back(c);
  }
  return out;
}

std::vector<ReportRow> selftest(unsigned threads, const std::string& format, const std::string& path,
                                const AcceptanceProgress& progress) {
  const unsigned before = thread_count();
  set_thread_count(threads);
  std::vector<ReportRow> rows;
  try {
    rows = run_acceptance(progress);
  } catch (...) {
    set_thread_count(before);
    throw;
  }
  set_thread_count(before);
  if (!path.empty()) emit_report(rows, format, path);
  return rows;
}

}  // namespace locop
