#include "locop/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "locop/error.hpp"
#include "locop/field_io.hpp"
#include "locop/gabor_diag.hpp"
#include "locop/tf.hpp"

namespace locop {
namespace {

using nlohmann::json;

// Upper limits checked before anything is allocated.
constexpr std::size_t kMaxOperatorSamples = 2048;       // dense N x N kernels
constexpr std::size_t kMaxSymbol3Samples = 1u << 25;    // three-parameter symbol grid
constexpr std::size_t kMaxAtomSamples = 1u << 21;       // decomposition cube

[[noreturn]] void config_error(const std::string& code, const std::string& message, const std::string& path) {
  throw Error(ErrorKind::config, code, message, path);
}

std::string join_path(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

// Object view that tracks its JSON path and rejects unknown keys.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) config_error("config.type", "expected an object", path_.empty() ? "$" : path_);
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> known(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items())
      if (!known.count(k)) config_error("config.unknown_key", "unknown key '" + k + "'", join_path(path_, k));
  }

  [[nodiscard]] bool has(const char* key) const { return j_.contains(key); }
  [[nodiscard]] const json& raw(const char* key) const { return j_.at(key); }
  [[nodiscard]] std::string path(const char* key) const { return join_path(path_, key); }

  double number(const char* key, double fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number()) config_error("config.type", "expected a number", path(key));
    const double d = v.get<double>();
    if (!std::isfinite(d)) config_error("config.type", "expected a finite number", path(key));
    return d;
  }

  std::size_t count(const char* key, std::size_t fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_number_integer() || v.get<long long>() < 0)
      config_error("config.type", "expected a nonnegative integer", path(key));
    return v.get<std::size_t>();
  }

  std::string text(const char* key, const std::string& fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_string()) config_error("config.type", "expected a string", path(key));
    return v.get<std::string>();
  }

  bool flag(const char* key, bool fallback) const {
    if (!has(key)) return fallback;
    const json& v = raw(key);
    if (!v.is_boolean()) config_error("config.type", "expected a boolean", path(key));
    return v.get<bool>();
  }

  std::vector<double> numbers(const char* key, std::vector<double> fallback) const {
    if (!has(key)) return fallback;
    return number_list(raw(key), path(key));
  }

  static std::vector<double> number_list(const json& v, const std::string& p) {
    if (!v.is_array()) config_error("config.type", "expected an array of numbers", p);
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) config_error("config.type", "expected a number", index_path(p, i));
      out.push_back(v[i].get<double>());
    }
    return out;
  }

 private:
  const json& j_;
  std::string path_;
};

SymbolExpr symbol_from_json(const json& j, const std::string& path) {
  const Section s(j, path);
  if (!s.has("family")) config_error("family.missing", "symbol needs a family", path);
  const std::string family = s.text("family", "");
  if (family == "gaussian") {
    s.allow({"family", "center", "widths", "dim"});
    const auto dim = s.count("dim", s.has("center") ? Section::number_list(s.raw("center"), s.path("center")).size() : 0);
    if (dim == 0) config_error("symbol.shape", "gaussian needs a centre or a dim", path);
    const auto center = s.numbers("center", std::vector<double>(dim, 0.0));
    const auto widths = s.numbers("widths", std::vector<double>(center.size(), 1.0));
    if (widths.size() != center.size()) config_error("symbol.shape", "one width per axis", s.path("widths"));
    for (double w : widths)
      if (!(w > 0.0)) config_error("symbol.width", "widths must be positive", s.path("widths"));
    return SymbolExpr::gaussian(center, widths);
  }
  if (family == "hermite") {
    s.allow({"family", "orders"});
    if (!s.has("orders")) config_error("symbol.shape", "hermite needs orders", path);
    std::vector<int> orders;
    for (double o : s.numbers("orders", {})) {
      if (o < 0 || o != std::floor(o)) config_error("symbol.order", "orders are nonnegative integers", s.path("orders"));
      orders.push_back(static_cast<int>(o));
    }
    if (orders.empty()) config_error("symbol.shape", "hermite needs orders", s.path("orders"));
    return SymbolExpr::hermite(orders);
  }
  if (family == "constant") {
    s.allow({"family", "value", "dim"});
    cplx value = 1.0;
    if (s.has("value")) {
      const json& v = s.raw("value");
      if (v.is_number()) {
        value = v.get<double>();
      } else {
        const auto parts = Section::number_list(v, s.path("value"));
        if (parts.size() != 2) config_error("config.type", "value is a number or [re, im]", s.path("value"));
        value = cplx(parts[0], parts[1]);
      }
    }
    const auto dim = s.count("dim", 0);
    if (dim == 0) config_error("symbol.shape", "constant needs a dim", path);
    return SymbolExpr::constant(value, static_cast<int>(dim));
  }
  if (family == "product" || family == "separable") {
    const char* key = family == "product" ? "factors" : "axes";
    s.allow({"family", key});
    if (!s.has(key) || !s.raw(key).is_array() || s.raw(key).empty())
      config_error("symbol.shape", std::string(family) + " needs a nonempty '" + key + "' array", s.path(key));
    std::vector<SymbolExpr> parts;
    const json& list = s.raw(key);
    for (std::size_t i = 0; i < list.size(); ++i) parts.push_back(symbol_from_json(list[i], index_path(s.path(key), i)));
    const int want = family == "separable" ? 1 : parts.front().dim();
    for (std::size_t i = 0; i < parts.size(); ++i)
      if (parts[i].dim() != want) config_error("symbol.dim", "factor has the wrong dimension", index_path(s.path(key), i));
    return family == "product" ? SymbolExpr::product(parts) : SymbolExpr::separable(parts);
  }
  if (family == "plane_wave") {
    s.allow({"family", "frequency", "base"});
    if (!s.has("base")) config_error("symbol.shape", "plane_wave needs a base symbol", path);
    SymbolExpr base = symbol_from_json(s.raw("base"), s.path("base"));
    const auto freq = s.numbers("frequency", std::vector<double>(base.dim(), 0.0));
    if (freq.size() != static_cast<std::size_t>(base.dim()))
      config_error("symbol.shape", "one frequency per axis", s.path("frequency"));
    return SymbolExpr::plane_wave(freq, base);
  }
  if (family == "bump") {
    s.allow({"family", "plateau", "radius"});
    if (!s.has("plateau")) config_error("symbol.shape", "bump needs a plateau", path);
    const auto plateau = s.numbers("plateau", {});
    const auto radius = s.numbers("radius", std::vector<double>(plateau.size(), 1.0));
    if (plateau.empty() || radius.size() != plateau.size())
      config_error("symbol.shape", "one plateau and radius per axis", s.path("radius"));
    for (std::size_t i = 0; i < plateau.size(); ++i)
      if (!(plateau[i] >= 0.0) || !(radius[i] > 0.0))
        config_error("symbol.width", "plateau >= 0 and radius > 0", s.path("radius"));
    return SymbolExpr::bump(plateau, radius);
  }
  if (family == "imported") {
    s.allow({"family", "path"});
    const std::string file = s.text("path", "");
    if (file.empty()) config_error("symbol.shape", "imported symbol needs a path", s.path("path"));
    return SymbolExpr::imported(read_field(file));
  }
  config_error("family.unknown", "unknown symbol family '" + family + "'", s.path("family"));
}

void check_tau(double tau, const std::string& path) {
  if (!(tau >= 0.0 && tau <= 1.0)) config_error("tau.range", "tau must lie in [0, 1]", path);
}

bool needs_symbol(const std::string& kind) { return kind != "identity"; }

}  // namespace

PhaseSpec PhaseConfig::spec() const {
  if (kind == "bilinear") return PhaseSpec::bilinear();
  if (kind == "quadratic") return PhaseSpec::quadratic(a, b, cross);
  if (kind == "shifted") return PhaseSpec::shifted(x0);
  config_error("phase.kind", "unknown phase kind '" + kind + "'", "operator.phase.kind");
}

const std::vector<std::string>& diagnostic_names() {
  static const std::vector<std::string> names = {"sjostrand", "amalgam",     "m0",        "envelope",
                                                 "weakcpt",   "svd",         "boundedness", "atoms",
                                                 "translation", "tameness",  "intertwine", "canonical"};
  return names;
}

std::vector<std::string> pipeline_diagnostics(const std::string& pipeline) {
  if (pipeline.empty()) return {};
  if (pipeline == "thm2") return {"sjostrand", "m0", "envelope", "weakcpt", "svd"};
  if (pipeline == "thm3") return {"amalgam", "boundedness", "envelope"};
  if (pipeline == "thm4") return {"atoms", "translation", "weakcpt", "svd"};
  if (pipeline == "thm5") return {"tameness", "sjostrand", "weakcpt", "svd"};
  config_error("pipeline.unknown", "unknown pipeline '" + pipeline + "'", "pipeline");
}

std::vector<std::string> ExperimentConfig::plan() const {
  std::vector<std::string> out = pipeline_diagnostics(pipeline);
  for (const auto& d : diagnostics)
    if (std::find(out.begin(), out.end(), d) == out.end()) out.push_back(d);
  return out;
}

SymbolExpr parse_symbol(const std::string& json_text, const std::string& path) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    config_error("config.syntax", e.what(), path);
  }
  return symbol_from_json(j, path);
}

ExperimentConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error("config.syntax", e.what(), "$");
  }
  const Section root(j, "");
  root.allow({"id", "grid", "operator", "lattice", "weights", "chi", "atoms", "pipeline", "diagnostics", "output",
              "seed"});
  ExperimentConfig cfg;
  cfg.id = root.text("id", cfg.id);
  cfg.seed = root.count("seed", cfg.seed);

  if (root.has("grid")) {
    const Section g(root.raw("grid"), "grid");
    g.allow({"extent", "samples", "pad", "xi_samples"});
    cfg.grid.extent = g.number("extent", cfg.grid.extent);
    cfg.grid.samples = g.count("samples", cfg.grid.samples);
    cfg.grid.pad = g.count("pad", cfg.grid.pad);
    cfg.grid.xi_samples = g.count("xi_samples", cfg.grid.xi_samples);
  }
  const auto pow2 = [](std::size_t n) { return n > 0 && (n & (n - 1)) == 0; };
  if (!(cfg.grid.extent > 0.0)) config_error("grid.extent", "extent must be positive", "grid.extent");
  if (!pow2(cfg.grid.samples)) config_error("grid.samples", "samples must be a power of two", "grid.samples");
  if (cfg.grid.samples > kMaxOperatorSamples)
    config_error("guard.kernel", "dense kernels are limited to 2048 samples", "grid.samples");
  if (!pow2(cfg.grid.pad)) config_error("grid.samples", "pad must be a power of two", "grid.pad");
  if (!pow2(cfg.grid.xi_samples)) config_error("grid.samples", "xi_samples must be a power of two", "grid.xi_samples");

  if (root.has("operator")) {
    const Section o(root.raw("operator"), "operator");
    o.allow({"kind", "tau", "tau2", "symbol", "phase"});
    cfg.op.kind = o.text("kind", cfg.op.kind);
    cfg.op.tau = o.number("tau", cfg.op.tau);
    cfg.op.tau2 = o.number("tau2", cfg.op.tau2);
    if (o.has("symbol")) cfg.op.symbol = symbol_from_json(o.raw("symbol"), "operator.symbol");
    if (o.has("phase")) {
      const Section p(o.raw("phase"), "operator.phase");
      p.allow({"kind", "a", "b", "cross", "x0"});
      cfg.op.phase.kind = p.text("kind", cfg.op.phase.kind);
      cfg.op.phase.a = p.number("a", 0.0);
      cfg.op.phase.b = p.number("b", 0.0);
      cfg.op.phase.cross = p.number("cross", 0.0);
      cfg.op.phase.x0 = p.number("x0", 0.0);
      if (cfg.op.phase.kind != "bilinear" && cfg.op.phase.kind != "quadratic" && cfg.op.phase.kind != "shifted")
        config_error("phase.kind", "unknown phase kind '" + cfg.op.phase.kind + "'", "operator.phase.kind");
    }
  }
  const std::string& kind = cfg.op.kind;
  if (kind != "identity" && kind != "tau" && kind != "threeparam" && kind != "fio" && kind != "tau_transform")
    config_error("operator.kind", "unknown operator kind '" + kind + "'", "operator.kind");
  check_tau(cfg.op.tau, "operator.tau");
  if (kind == "tau_transform") {
    check_tau(cfg.op.tau2, "operator.tau2");
    if (cfg.op.tau == cfg.op.tau2) config_error("tau.distinct", "tau transform needs tau != tau2", "operator.tau2");
  }
  if (needs_symbol(kind) && !cfg.op.symbol)
    config_error("operator.symbol_missing", "operator kind '" + kind + "' needs a symbol", "operator.symbol");
  if (cfg.op.symbol) {
    const int want = kind == "threeparam" ? 3 : 2;
    if (cfg.op.symbol->dim() != want)
      config_error("symbol.dim", "symbol must live on R^" + std::to_string(want), "operator.symbol");
  }
  if (kind == "threeparam" && cfg.grid.samples * cfg.grid.samples * cfg.grid.xi_samples > kMaxSymbol3Samples)
    config_error("guard.symbol", "three-parameter symbol grid exceeds 2^25 samples", "grid.xi_samples");

  if (root.has("lattice")) {
    const Section l(root.raw("lattice"), "lattice");
    l.allow({"alpha", "radius"});
    cfg.lattice.alpha = l.number("alpha", cfg.lattice.alpha);
    cfg.lattice.radius = l.number("radius", cfg.lattice.radius);
  }
  if (!(cfg.lattice.alpha > 0.0)) config_error("lattice.alpha", "alpha must be positive", "lattice.alpha");
  if (!(cfg.lattice.radius > 0.0)) config_error("lattice.radius", "radius must be positive", "lattice.radius");
  {
    const double ratio = cfg.lattice.radius / cfg.lattice.alpha;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
      config_error("lattice.ratio", "radius / alpha must be an integer", "lattice.radius");
  }
  {
    const double L = cfg.grid.extent, dual = static_cast<double>(cfg.grid.samples) / L;
    if (cfg.lattice.radius + kWindowMargin > 0.5 * std::min(L, dual) + 1e-12)
      config_error("lattice.margin", "lattice radius plus window margin exceeds the grid", "lattice.radius");
  }

  if (root.has("weights")) {
    const Section w(root.raw("weights"), "weights");
    w.allow({"s", "m", "pq"});
    cfg.weights.s = w.numbers("s", cfg.weights.s);
    for (double s : cfg.weights.s)
      if (!(s >= 0.0)) config_error("weight.order", "weight orders must be nonnegative", "weights.s");
    cfg.weights.m = w.number("m", cfg.weights.m);
    if (!(cfg.weights.m >= 0.0)) config_error("weight.order", "weight orders must be nonnegative", "weights.m");
    if (w.has("pq")) {
      cfg.weights.pq.clear();
      const json& list = w.raw("pq");
      if (!list.is_array()) config_error("config.type", "pq is a list of [p, q] pairs", "weights.pq");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const auto pair = Section::number_list(list[i], index_path("weights.pq", i));
        if (pair.size() != 2 || !(pair[0] >= 1.0) || !(pair[1] >= 1.0))
          config_error("weight.exponent", "pairs [p, q] need p, q >= 1", index_path("weights.pq", i));
        cfg.weights.pq.emplace_back(pair[0], pair[1]);
      }
    }
  }

  if (root.has("chi")) {
    const Section c(root.raw("chi"), "chi");
    c.allow({"kind", "matrix", "offset"});
    cfg.chi.kind = c.text("kind", cfg.chi.kind);
    cfg.chi.matrix = c.numbers("matrix", cfg.chi.matrix);
    cfg.chi.offset = c.numbers("offset", cfg.chi.offset);
  }
  if (cfg.chi.kind != "identity" && cfg.chi.kind != "affine" && cfg.chi.kind != "canonical")
    config_error("chi.kind", "unknown chi kind '" + cfg.chi.kind + "'", "chi.kind");
  if (cfg.chi.kind == "affine" && (cfg.chi.matrix.size() != 4 || cfg.chi.offset.size() != 2))
    config_error("chi.shape", "affine chi needs a 2x2 matrix and a 2-vector", "chi.matrix");
  if (cfg.chi.kind == "canonical" && kind != "fio")
    config_error("chi.kind", "canonical chi needs a fio operator", "chi.kind");

  if (root.has("atoms")) {
    const Section a(root.raw("atoms"), "atoms");
    a.allow({"extent", "samples"});
    cfg.atoms.extent = a.number("extent", cfg.atoms.extent);
    cfg.atoms.samples = a.count("samples", cfg.atoms.samples);
  }
  if (!pow2(cfg.atoms.samples)) config_error("grid.samples", "samples must be a power of two", "atoms.samples");
  if (cfg.atoms.samples * cfg.atoms.samples * cfg.atoms.samples > kMaxAtomSamples)
    config_error("guard.atoms", "decomposition cube exceeds 2^21 samples", "atoms.samples");
  if (!(cfg.atoms.extent >= 8.0))
    config_error("atoms.coarse_grid", "decomposition needs extent >= 8 (8 samples per unit band)", "atoms.extent");

  cfg.pipeline = root.text("pipeline", "");
  (void)pipeline_diagnostics(cfg.pipeline);
  if (root.has("diagnostics")) {
    const json& list = root.raw("diagnostics");
    if (!list.is_array()) config_error("config.type", "diagnostics is a list of names", "diagnostics");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (!list[i].is_string()) config_error("config.type", "expected a name", index_path("diagnostics", i));
      const auto name = list[i].get<std::string>();
      const auto& known = diagnostic_names();
      if (std::find(known.begin(), known.end(), name) == known.end())
        config_error("diagnostic.unknown", "unknown diagnostic '" + name + "'", index_path("diagnostics", i));
      cfg.diagnostics.push_back(name);
    }
  }

  // Applicability of every planned diagnostic.
  const auto plan = cfg.plan();
  for (std::size_t i = 0; i < plan.size(); ++i) {
    const std::string& d = plan[i];
    const std::string where = cfg.pipeline.empty() || i >= pipeline_diagnostics(cfg.pipeline).size()
                                  ? "diagnostics"
                                  : "pipeline";
    const auto reject = [&](const std::string& why) {
      config_error("diagnostic.operator", "diagnostic '" + d + "' " + why, where);
    };
    if ((d == "sjostrand" || d == "m0") && !cfg.op.symbol) reject("needs a symbol");
    if (d == "amalgam" && !(kind == "tau" || kind == "tau_transform")) reject("needs a tau operator");
    if (d == "amalgam" && !(cfg.op.tau > 0.0 && cfg.op.tau < 1.0))
      config_error("tau.open", "amalgam norm needs tau in (0, 1)", "operator.tau");
    if ((d == "atoms" || d == "translation") && kind != "threeparam") reject("needs a threeparam operator");
    if ((d == "tameness" || d == "canonical") && kind != "fio") reject("needs a fio operator");
    if (d == "intertwine" && kind != "tau_transform") reject("needs a tau_transform operator");
    if (d == "m0" && cfg.op.symbol && cfg.op.symbol->dim() == 3) reject("supports two-parameter symbols only");
    if (d == "envelope" || d == "svd" || d == "boundedness") {
      const double per_axis = 2.0 * cfg.lattice.radius / cfg.lattice.alpha + 1.0;
      if (per_axis * per_axis * per_axis * per_axis > kGaborCoefficientGuard)
        config_error("guard.gabor", "Gabor matrix exceeds the coefficient guard", "lattice.radius");
    }
  }

  if (root.has("output")) {
    const Section out(root.raw("output"), "output");
    out.allow({"dir", "format", "gnuplot"});
    cfg.output.dir = out.text("dir", cfg.output.dir);
    cfg.output.format = out.text("format", cfg.output.format);
    cfg.output.gnuplot = out.flag("gnuplot", cfg.output.gnuplot);
  }
  if (cfg.output.format != "csv" && cfg.output.format != "json")
    config_error("output.format", "format must be csv or json", "output.format");
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::io, "io.open", "cannot open config file", path);
  std::ostringstream s;
  s << in.rdbuf();
  return parse_config(s.str());
}

}  // namespace locop
