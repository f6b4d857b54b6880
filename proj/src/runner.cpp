#include "locop/runner.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "json.hpp"
#include "locop/atomic.hpp"
#include "locop/error.hpp"
#include "locop/field_io.hpp"
#include "locop/gabor_diag.hpp"
#include "locop/mod_norms.hpp"
#include "locop/tf.hpp"

namespace locop {
namespace {

constexpr double kWeakHalfWidth = 1.0;
constexpr double kRankEps = 0.1;
constexpr double kCompactGrowth = 1.3;
constexpr double kNoncompactGrowth = 3.0;
constexpr double kLedgerStability = 0.02;
constexpr double kResidualTol = 1e-8;
constexpr double kBandTol = 1e-10;
constexpr double kGraphFraction = 0.95;
constexpr double kTamenessDelta = 0.5;

std::string label(double v) { return format_short(v); }

GridSpec operator_grid_of(const ExperimentConfig& cfg) {
  return GridSpec::cube(1, cfg.grid.extent, cfg.grid.samples);
}

// Largest multiple of step that keeps window atoms on the grid.
double max_lattice_radius(const GridSpec& grid, double step) {
  const double room = 0.5 * std::min(grid.extent(0), grid.dual_extent(0)) - kWindowMargin;
  return std::floor(room / step + 1e-9) * step;
}

Weight nu_phase(double s) { return Weight::polynomial(s, 2); }
// Weight of the frequency displacement of a two-parameter symbol.
Weight nu_symbol2(double s) { return Weight::composed(nu_phase(s), LinearMap::quarter_turn(1).inverse()); }
// Ledger weight on band indices of a three-parameter symbol.
Weight nu_three(double s) { return Weight::composed(nu_phase(s), LinearMap::three_to_two(1)); }

std::string pass_fail(bool ok) { return ok ? "pass" : "fail"; }

class Session {
 public:
  explicit Session(const ExperimentConfig& cfg) : cfg_(cfg), grid_(operator_grid_of(cfg)) {}

  std::vector<ReportRow> run(const std::vector<std::string>& names) {
    for (const auto& name : names) {
      const auto it = table().find(name);
      if (it == table().end()) fail("diagnostic.unknown", "unknown diagnostic '" + name + "'");
      current_ = name;
      try {
        (this->*(it->second))();
      } catch (const Error& e) {
        throw Error(e.kind(), e.code(), "experiment '" + cfg_.id + "', diagnostic '" + name + "': " + e.what(),
                    e.path());
      }
    }
    if (cfg_.output.gnuplot && !cfg_.output.dir.empty() && !plots_.empty()) write_gnuplot();
    return std::move(rows_);
  }

  const LinearOperator& op() {
    if (!op_) op_ = build_operator(cfg_);
    return *op_;
  }
  const BiLipschitzMap& chi() {
    if (!chi_) chi_ = build_chi(cfg_);
    return *chi_;
  }
  Lattice lattice() const { return {cfg_.lattice.alpha, cfg_.lattice.radius}; }

  std::string params() const {
    return "alpha=" + label(cfg_.lattice.alpha) + ";R=" + label(cfg_.lattice.radius) + ";L=" + label(cfg_.grid.extent) +
           ";N=" + std::to_string(cfg_.grid.samples);
  }

  void measure(const std::string& quantity, double value, const std::string& artifact = {}) {
    rows_.push_back({cfg_.id, current_, quantity, value, "", "", artifact});
  }
  void verdict(const std::string& quantity, double value, bool ok, const std::string& thresholds,
               const std::string& artifact = {}) {
    rows_.push_back({cfg_.id, current_, quantity, value, pass_fail(ok), thresholds + ";" + params(), artifact});
  }

  // Writes a CSV profile and returns its file name, or "" without an output dir.
  std::string artifact(const std::string& suffix, const std::string& header, const std::string& body,
                       const std::string& plot_columns = {}) {
    if (cfg_.output.dir.empty()) return {};
    const std::string name = cfg_.id + "_" + suffix + ".csv";
    std::filesystem::create_directories(cfg_.output.dir);
    write_text_file((std::filesystem::path(cfg_.output.dir) / name).string(), header + "\n" + body);
    if (!plot_columns.empty()) plots_.emplace_back(name, plot_columns);
    return name;
  }

 private:
  using Method = void (Session::*)();
  static const std::map<std::string, Method>& table() {
    static const std::map<std::string, Method> t = {
        {"sjostrand", &Session::sjostrand},     {"amalgam", &Session::amalgam},
        {"m0", &Session::m0},                   {"envelope", &Session::envelope},
        {"weakcpt", &Session::weakcpt},         {"svd", &Session::svd},
        {"boundedness", &Session::boundedness}, {"atoms", &Session::atoms},
        {"translation", &Session::translation}, {"tameness", &Session::tameness},
        {"intertwine", &Session::intertwine},   {"canonical", &Session::canonical},
    };
    return t;
  }

  const SymbolExpr& symbol() const {
    if (!cfg_.op.symbol) fail("operator.symbol_missing", "diagnostic needs a symbol");
    return *cfg_.op.symbol;
  }
  const SymbolGrid2& symbol2() {
    if (!sym2_) sym2_ = operator_symbol(symbol(), grid_, cfg_.grid.pad);
    return *sym2_;
  }
  const SampledField& symbol_cube() {
    if (!cube_) {
      if (symbol().dim() != 3) fail("symbol.dim", "diagnostic needs a three-parameter symbol");
      cube_ = symbol().sample(GridSpec::cube(3, cfg_.atoms.extent, cfg_.atoms.samples));
    }
    return *cube_;
  }
  const GaborMatrix& gabor_full() {
    if (!gabor_) gabor_ = gabor_matrix(op(), lattice(), chi(), window_, window_);
    return *gabor_;
  }

  void sjostrand() {
    const bool three = symbol().dim() == 3;
    const SampledField& sigma = three ? symbol_cube() : symbol2().sigma;
    for (double s : cfg_.weights.s) {
      const auto est = sjostrand_estimate(sigma, three ? nu_three(s) : nu_symbol2(s));
      verdict("norm_nu" + label(s), est.value, std::isfinite(est.value),
              "finite;step=" + label(est.step) + ";zeta_nodes=" + std::to_string(est.zeta_nodes));
    }
  }

  void amalgam() {
    const double tau = cfg_.op.tau;
    for (double s : cfg_.weights.s) {
      const double v = amalgam_norm(symbol2().sigma, nu_phase(s), tau);
      verdict("amalgam_nu" + label(s), v, std::isfinite(v), "finite;tau=" + label(tau));
    }
  }

  void m0() {
    const GridSpec& g = symbol2().sigma.grid();
    double room = 0.5 * std::min({g.extent(0), g.extent(1), g.dual_extent(0), g.dual_extent(1)}) - kWindowMargin;
    room = std::min(room, cfg_.lattice.radius);
    const double R = std::floor(room);
    if (R < 2.0) fail("lattice.margin", "symbol grid too small for the M0 profile");
    std::vector<double> radii;
    for (double r = 0.0; r <= R + 1e-9; r += 1.0) radii.push_back(r);
    const auto prof = m0_decay_profile(symbol2().sigma, Lattice(1.0, R, 2), radii);
    std::ostringstream body;
    for (std::size_t i = 0; i < prof.radii.size(); ++i)
      body << format_number(prof.radii[i]) << ',' << format_number(prof.sup[i]) << ',' << (prof.untrusted[i] ? 1 : 0) << '\n';
    const auto file = artifact("m0", "radius,sup,untrusted", body.str(), "1:2");
    measure("fit_c2", prof.fit_c2, file);
    verdict("decaying", prof.verdict.decaying ? 1.0 : 0.0, prof.verdict.decaying,
            "outer<=" + label(prof.verdict.threshold) + "*inner;lattice_step=1;lattice_R=" + label(R));
  }

  void envelope() {
    const GaborMatrix& G = gabor_full();
    std::string file;
    for (double s : cfg_.weights.s) {
      const auto env = localization_envelope(G, nu_phase(s));
      if (file.empty()) {
        std::ostringstream body;
        for (std::size_t i = 0; i < env.offsets.size(); ++i)
          body << format_number(env.offsets[i].x[0]) << ',' << format_number(env.offsets[i].xi[0]) << ',' << format_number(env.envelope[i])
               << '\n';
        file = artifact("envelope", "u_x,u_xi,envelope", body.str(), "(sqrt($1**2+$2**2)):3");
        measure("power_slope", env.power_fit.slope, file);
      }
      verdict("weighted_sum_nu" + label(s), env.weighted_sum, std::isfinite(env.weighted_sum), "finite");
    }
  }

  void weakcpt() {
    const auto prof = weak_compactness_profile(op(), lattice(), chi(), kWeakHalfWidth, window_, window_);
    std::ostringstream body;
    for (std::size_t i = 0; i < prof.points.size(); ++i)
      body << format_number(prof.points[i].x[0]) << ',' << format_number(prof.points[i].xi[0]) << ',' << format_number(prof.values[i]) << '\n';
    const auto file = artifact("weakcpt", "z_x,z_xi,value", body.str(), "(sqrt($1**2+$2**2)):3");
    measure("inner_max", prof.verdict.inner_max, file);
    measure("outer_max", prof.verdict.outer_max);
    verdict("decaying", prof.verdict.decaying ? 1.0 : 0.0, prof.verdict.decaying,
            "outer<=" + label(prof.verdict.threshold) + "*inner;K_half_width=" + label(kWeakHalfWidth));
  }

  void svd() {
    const double alpha = cfg_.lattice.alpha;
    const double half = std::max(alpha, std::floor(0.5 * cfg_.lattice.radius / alpha + 1e-9) * alpha);
    const auto small = singular_values(gabor_matrix(op(), Lattice(alpha, half), chi(), window_, window_));
    const auto large = singular_values(gabor_full());
    const auto r_small = epsilon_rank(small, kRankEps), r_large = epsilon_rank(large, kRankEps);
    std::ostringstream body;
    for (std::size_t i = 0; i < large.size(); ++i)
      body << i << ',' << (i < small.size() ? format_number(small[i]) : "") << ',' << format_number(large[i]) << '\n';
    const auto file = artifact("svd", "index,sv_half_radius,sv_full_radius", body.str(), "1:3");
    measure("eps_rank_R" + label(half), static_cast<double>(r_small), file);
    measure("eps_rank_R" + label(cfg_.lattice.radius), static_cast<double>(r_large));
    const double growth = r_small ? static_cast<double>(r_large) / static_cast<double>(r_small) : HUGE_VAL;
    verdict("rank_growth", growth, growth <= kCompactGrowth,
            "compact<=" + label(kCompactGrowth) + ";noncompact>=" + label(kNoncompactGrowth) +
                ";eps=" + label(kRankEps) + "*s1;R_small=" + label(half));
  }

  void boundedness() {
    const auto fields = boundedness_test_set(grid_);
    const Weight m = nu_phase(cfg_.weights.m);
    for (const auto& [p, q] : cfg_.weights.pq) {
      const auto rep = boundedness_ratio(op(), fields, {p, q, m}, chi(), lattice(), window_);
      const std::string tag = "p" + label(p) + "_q" + label(q);
      measure("min_ratio_" + tag, rep.min_ratio);
      verdict("max_ratio_" + tag, rep.max_ratio, std::isfinite(rep.max_ratio),
              "finite;fields=" + std::to_string(rep.ratios.size()) + ";m_order=" + label(cfg_.weights.m));
    }
  }

  void atoms() {
    const PartitionOfUnity pou(3);
    const double s_main = cfg_.weights.s.empty() ? 1.0 : cfg_.weights.s.back();
    const auto dec = decompose(symbol_cube(), nu_three(s_main), pou);
    double worst_band = 0.0;
    std::ostringstream body;
    for (const auto& a : dec.atoms) {
      worst_band = std::max(worst_band, a.out_of_band);
      body << a.k[0] << ',' << a.k[1] << ',' << a.k[2] << ',' << format_number(a.sup_norm) << ',' << format_number(a.ledger) << ','
           << format_number(a.out_of_band) << '\n';
    }
    const auto file = artifact("atoms", "k1,k2,k3,sup_norm,ledger,out_of_band_mass", body.str());
    measure("atom_count", static_cast<double>(dec.atoms.size()), file);
    const std::string box = "K=k+[" + label(dec.band_lo) + "," + label(dec.band_hi) + "]^3";
    verdict("residual", dec.residual, dec.residual <= kResidualTol, "<=" + label(kResidualTol) + ";" + box);
    verdict("out_of_band", worst_band, worst_band <= kBandTol, "<=" + label(kBandTol) + ";" + box);
    const long full = std::max(2L, dec.max_index());
    const long half = (full + 1) / 2;
    for (double s : cfg_.weights.s) {
      const Weight w = nu_three(s);
      double sum_half = 0.0, sum_full = 0.0;
      for (const auto& a : dec.atoms) {
        const double kd[3] = {static_cast<double>(a.k[0]), static_cast<double>(a.k[1]), static_cast<double>(a.k[2])};
        const double l = w(kd) * a.sup_norm;
        const long reach = std::max({std::abs(a.k[0]), std::abs(a.k[1]), std::abs(a.k[2])});
        if (reach <= half) sum_half += l;
        if (reach <= 2 * half) sum_full += l;
      }
      const double drift = std::abs(sum_full - sum_half) / std::max(sum_full, 1e-300);
      measure("ledger_nu" + label(s) + "_k" + std::to_string(half), sum_half);
      verdict("ledger_drift_nu" + label(s), drift, std::isfinite(sum_full) && drift <= kLedgerStability,
              "<=" + label(kLedgerStability) + ";k_range=" + std::to_string(half) + "->" + std::to_string(2 * half));
    }
  }

  void translation() {
    const auto rep = translation_vanishing_check(symbol_cube(), PartitionOfUnity(3));
    std::size_t ok = 0, atom_ok = 0;
    std::ostringstream body;
    for (const auto& r : rep.rays) {
      ok += r.decaying;
      body << "field," << format_number(r.direction_x) << ',' << format_number(r.direction_xi) << ',' << format_number(r.inner_max) << ','
           << format_number(r.outer_max) << '\n';
    }
    for (const auto& r : rep.atom_rays) {
      atom_ok += r.decaying;
      body << "atom," << format_number(r.direction_x) << ',' << format_number(r.direction_xi) << ',' << format_number(r.inner_max) << ','
           << format_number(r.outer_max) << '\n';
    }
    const auto file = artifact("translation", "kind,dir_x,dir_xi,inner_max,outer_max", body.str());
    measure("decaying_rays", static_cast<double>(ok), file);
    measure("decaying_atom_rays", static_cast<double>(atom_ok));
    verdict("vanishing", rep.pass ? 1.0 : 0.0, rep.pass,
            "outer<=0.1*inner;rays=8;test_functions=6;reach=" + label(rep.reach));
  }

  void tameness() {
    const double box = 0.5 * std::min(grid_.extent(0), grid_.dual_extent(0));
    const auto cert = tameness_check(cfg_.op.phase.spec(), box, kTamenessDelta);
    measure("min_mixed_det", cert.min_mixed_det);
    measure("max_high_derivative", cert.max_high_derivative);
    measure("globally_bounded", cert.globally_bounded ? 1.0 : 0.0);
    verdict("tame", cert.pass ? 1.0 : 0.0, cert.pass,
            "min_mixed_det>=" + label(kTamenessDelta) + ";box=" + label(box));
  }

  void intertwine() {
    const double t1 = cfg_.op.tau, t2 = cfg_.op.tau2;
    const SymbolGrid2& sym = symbol2();
    const auto moved = tau_transform(sym, t1, t2);
    const auto ka = kernel_tau(sym, t1), kb = kernel_tau(moved, t2);
    const double dev = (ka.entries() - kb.entries()).norm() / ka.entries().norm();
    const double back = relative_l2_error(tau_transform(moved, t2, t1).sigma, sym.sigma);
    verdict("kernel_deviation", dev, dev <= 1e-6, "<=1e-06;tau=" + label(t1) + "->" + label(t2));
    verdict("roundtrip", back, back <= 1e-8, "<=1e-08");
  }

  void canonical() {
    const PhaseSpec phase = cfg_.op.phase.spec();
    const auto chi_c = BiLipschitzMap::canonical(phase, 0.5 * std::min(grid_.extent(0), grid_.dual_extent(0)));
    const auto pts = lattice().points();
    double roundtrip = 0.0, affine_dev = 0.0;
    std::optional<BiLipschitzMap> affine;
    if (cfg_.chi.kind == "affine") affine = build_chi(cfg_);
    for (const auto& z : pts) {
      const PhasePoint w = chi_c.apply(z);
      roundtrip = std::max(roundtrip, (chi_c.inverse(w) - z).sup_norm());
      if (affine) affine_dev = std::max(affine_dev, (affine->apply(z) - w).sup_norm());
    }
    verdict("roundtrip", roundtrip, roundtrip <= 1e-9, "<=1e-09");
    if (affine) verdict("affine_deviation", affine_dev, affine_dev <= 1e-9, "<=1e-09");

    // Rows of the Gabor matrix should peak on the graph of chi.
    const double alpha = cfg_.lattice.alpha;
    const Lattice sources(alpha, cfg_.lattice.radius);
    const Lattice targets(alpha, max_lattice_radius(grid_, alpha));
    GaborMatrix G = gabor_matrix(op(), sources, targets, BiLipschitzMap::identity(), window_, window_);
    G.chi = chi_c;
    const auto conc = graph_concentration(G, cfg_.lattice.radius);
    measure("worst_distance", conc.worst_distance);
    verdict("graph_fraction", conc.fraction, conc.fraction >= kGraphFraction,
            ">=" + label(kGraphFraction) + ";tolerance=" + label(conc.tolerance) +
                ";target_R=" + label(targets.radius()));
  }

  void write_gnuplot() {
    std::ostringstream s;
    s << "set datafile separator ','\nset key autotitle columnhead\nset logscale y\n";
    for (const auto& [file, cols] : plots_) {
      s << "set title '" << file << "'\n";
      s << "plot '" << file << "' using " << cols << " with points\n";
      s << "pause -1\n";
    }
    write_text_file((std::filesystem::path(cfg_.output.dir) / (cfg_.id + ".gp")).string(), s.str());
  }

  const ExperimentConfig& cfg_;
  GridSpec grid_;
  WindowSpec window_ = WindowSpec::gaussian(1);
  std::unique_ptr<LinearOperator> op_;
  std::optional<BiLipschitzMap> chi_;
  std::optional<SymbolGrid2> sym2_;
  std::optional<SampledField> cube_;
  std::optional<GaborMatrix> gabor_;
  std::vector<ReportRow> rows_;
  std::vector<std::pair<std::string, std::string>> plots_;
  std::string current_;
};

}  // namespace

std::unique_ptr<LinearOperator> build_operator(const ExperimentConfig& cfg) {
  const GridSpec grid = operator_grid_of(cfg);
  const std::string& kind = cfg.op.kind;
  if (kind == "identity") return std::make_unique<ScaledIdentity>(grid, 1.0);
  if (!cfg.op.symbol) fail("operator.symbol_missing", "operator needs a symbol");
  const SymbolExpr& expr = *cfg.op.symbol;
  if (kind == "threeparam")
    return std::make_unique<KernelMatrix>(kernel_threeparam(expr.sample(symbol_grid3(grid, cfg.grid.xi_samples))));
  const SymbolGrid2 sym = operator_symbol(expr, grid, cfg.grid.pad);
  if (kind == "tau") return std::make_unique<KernelMatrix>(kernel_tau(sym, cfg.op.tau));
  if (kind == "tau_transform")
    return std::make_unique<KernelMatrix>(kernel_tau(tau_transform(sym, cfg.op.tau, cfg.op.tau2), cfg.op.tau2));
  if (kind == "fio") return std::make_unique<FioOperator>(sym, cfg.op.phase.spec());
  fail("operator.kind", "unknown operator kind '" + kind + "'");
}

BiLipschitzMap build_chi(const ExperimentConfig& cfg) {
  if (cfg.chi.kind == "identity") return BiLipschitzMap::identity();
  if (cfg.chi.kind == "affine") {
    Eigen::MatrixXd a(2, 2);
    a << cfg.chi.matrix[0], cfg.chi.matrix[1], cfg.chi.matrix[2], cfg.chi.matrix[3];
    return BiLipschitzMap::affine(a, Eigen::Vector2d(cfg.chi.offset[0], cfg.chi.offset[1]));
  }
  if (cfg.chi.kind == "canonical") {
    const GridSpec grid = operator_grid_of(cfg);
    return BiLipschitzMap::canonical(cfg.op.phase.spec(), 0.5 * std::min(grid.extent(0), grid.dual_extent(0)));
  }
  fail("chi.kind", "unknown chi kind '" + cfg.chi.kind + "'");
}

std::vector<ReportRow> run_diagnostics(const ExperimentConfig& cfg, const std::vector<std::string>& names) {
  return Session(cfg).run(names);
}

std::vector<ReportRow> run_experiment(const ExperimentConfig& cfg) { return run_diagnostics(cfg, cfg.plan()); }

std::vector<ReportRow> dump_stft(const ExperimentConfig& cfg, const std::string& dir) {
  const auto op = build_operator(cfg);
  const WindowSpec g = WindowSpec::gaussian(1);
  const Lattice lat(cfg.lattice.alpha, cfg.lattice.radius);
  const auto pts = lat.points();
  const SampledField image = op->apply(g.atom(op->grid(), PhasePoint{}));
  const auto v = stft(image, g, pts);
  std::ostringstream body;
  body << "x,xi,re,im,modulus\n";
  for (std::size_t i = 0; i < pts.size(); ++i)
    body << format_number(pts[i].x[0]) << ',' << format_number(pts[i].xi[0]) << ',' << format_number(v[i].real())
         << ',' << format_number(v[i].imag()) << ',' << format_number(std::abs(v[i])) << '\n';
  std::filesystem::create_directories(dir);
  const std::string name = cfg.id + "_stft.csv";
  write_text_file((std::filesystem::path(dir) / name).string(), body.str());
  nlohmann::ordered_json meta;
  meta["alpha"] = lat.step();
  meta["radius"] = lat.radius();
  meta["dim"] = lat.dim();
  meta["points"] = lat.size();
  meta["window"] = "gaussian";
  meta["field"] = op->describe() + " applied to the window";
  write_text_file((std::filesystem::path(dir) / (cfg.id + "_stft.json")).string(), meta.dump(2) + "\n");
  double peak = 0.0;
  for (const auto& c : v) peak = std::max(peak, std::abs(c));
  return {{cfg.id, "stft", "max_modulus", peak, "", "", name}};
}

std::vector<ReportRow> dump_kernel(const ExperimentConfig& cfg, const std::string& dir) {
  const auto op = build_operator(cfg);
  const GridSpec& grid = op->grid();
  Eigen::MatrixXcd k;
  if (const auto* km = dynamic_cast<const KernelMatrix*>(op.get())) {
    k = km->entries();
  } else {
    const auto n = static_cast<Eigen::Index>(grid.size());
    k = op->apply_columns(Eigen::MatrixXcd::Identity(n, n) / grid.spacing(0));
  }
  std::filesystem::create_directories(dir);
  const std::string name = cfg.id + "_kernel.bin";
  write_matrix((std::filesystem::path(dir) / name).string(), k, &grid);
  const double norm = KernelMatrix(grid, k).spectral_norm();
  return {{cfg.id, "quantize", "spectral_norm", norm, "", "", name}};
}

std::vector<ReportRow> dump_gabor(const ExperimentConfig& cfg, const std::string& dir) {
  const auto op = build_operator(cfg);
  const WindowSpec g = WindowSpec::gaussian(1);
  const GaborMatrix G = gabor_matrix(*op, Lattice(cfg.lattice.alpha, cfg.lattice.radius), build_chi(cfg), g, g);
  std::filesystem::create_directories(dir);
  const std::string name = cfg.id + "_gabor.bin";
  write_matrix((std::filesystem::path(dir) / name).string(), G.coeffs);
  return {{cfg.id, "gabor", "max_modulus", G.coeffs.cwiseAbs().maxCoeff(), "", "", name},
          {cfg.id, "gabor", "points", static_cast<double>(G.sources.size()), "", "", ""}};
}

}  // namespace locop
