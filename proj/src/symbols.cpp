#include "locop/symbols.hpp"

#include <cmath>
#include <sstream>

#include "locop/error.hpp"
#include "locop/parallel.hpp"
#include "locop/tf.hpp"

namespace locop {

struct SymbolExpr::Node {
  Family family;
  int dim = 1;
  std::vector<double> a, b;  // centre/widths, frequency, plateau/radius
  std::vector<int> orders;
  cplx value{};
  std::vector<SymbolExpr> children;
  std::shared_ptr<const SampledField> field;
};

namespace {

int decay_rank(const std::string& d) {
  if (d == "compact") return 3;
  if (d == "schwartz") return 2;
  if (d == "sampled") return 1;
  return 0;
}

// Smooth step from 1 (s <= 0) to 0 (s >= 1).
double smooth_fall(double s) {
  if (s <= 0.0) return 1.0;
  if (s >= 1.0) return 0.0;
  const double up = std::exp(-1.0 / s), down = std::exp(-1.0 / (1.0 - s));
  return down / (up + down);
}

void require_size(std::size_t got, int dim, const char* what) {
  if (got != static_cast<std::size_t>(dim)) fail("symbol.shape", std::string(what) + " needs one entry per axis");
}

std::string join(const std::vector<double>& v) {
  std::ostringstream s;
  for (std::size_t i = 0; i < v.size(); ++i) s << (i ? "," : "") << v[i];
  return s.str();
}

}  // namespace

SymbolExpr SymbolExpr::gaussian(std::vector<double> center, std::vector<double> widths) {
  if (center.empty()) fail("symbol.shape", "gaussian needs a centre");
  require_size(widths.size(), static_cast<int>(center.size()), "gaussian widths");
  for (double w : widths)
    if (!(w > 0.0)) fail("symbol.width", "gaussian widths must be positive");
  auto n = std::make_shared<Node>();
  n->family = Family::gaussian;
  n->dim = static_cast<int>(center.size());
  n->a = std::move(center);
  n->b = std::move(widths);
  return SymbolExpr(n);
}

SymbolExpr SymbolExpr::hermite(std::vector<int> orders) {
  if (orders.empty()) fail("symbol.shape", "hermite needs at least one order");
  for (int o : orders)
    if (o < 0) fail("symbol.order", "hermite orders must be nonnegative");
  auto n = std::make_shared<Node>();
  n->family = Family::hermite;
  n->dim = static_cast<int>(orders.size());
  n->orders = std::move(orders);
  return SymbolExpr(n);
}

SymbolExpr SymbolExpr::constant(cplx value, int dim) {
  if (dim < 1) fail("symbol.shape", "dimension must be positive");
  auto n = std::make_shared<Node>();
  n->family = Family::constant;
  n->dim = dim;
  n->value = value;
  return SymbolExpr(n);
}

SymbolExpr SymbolExpr::product(std::vector<SymbolExpr> factors) {
  if (factors.empty()) fail("symbol.shape", "product needs factors");
  for (const auto& f : factors)
    if (f.dim() != factors.front().dim()) fail("symbol.shape", "product factors must share a dimension");
  auto n = std::make_shared<Node>();
  n->family = Family::product;
  n->dim = factors.front().dim();
  n->children = std::move(factors);
  return SymbolExpr(n);
}

SymbolExpr SymbolExpr::separable(std::vector<SymbolExpr> axes) {
  if (axes.empty()) fail("symbol.shape", "separable needs one factor per axis");
  for (const auto& f : axes)
    if (f.dim() != 1) fail("symbol.shape", "separable factors must be one-dimensional");
  auto n = std::make_shared<Node>();
  n->family = Family::separable;
  n->dim = static_cast<int>(axes.size());
  n->children = std::move(axes);
  return SymbolExpr(n);
}

SymbolExpr SymbolExpr::plane_wave(std::vector<double> frequency, SymbolExpr base) {
  require_size(frequency.size(), base.dim(), "plane wave frequency");
  auto n = std::make_shared<Node>();
  n->family = Family::plane_wave;
  n->dim = base.dim();
  n->a = std::move(frequency);
  n->children = {std::move(base)};
  return SymbolExpr(n);
}

SymbolExpr SymbolExpr::bump(std::vector<double> plateau, std::vector<double> radius) {
  if (plateau.empty()) fail("symbol.shape", "bump needs a plateau");
  require_size(radius.size(), static_cast<int>(plateau.size()), "bump radius");
  for (std::size_t i = 0; i < plateau.size(); ++i)
    if (!(plateau[i] >= 0.0) || !(radius[i] > 0.0)) fail("symbol.width", "bump needs plateau >= 0 and radius > 0");
  auto n = std::make_shared<Node>();
  n->family = Family::bump;
  n->dim = static_cast<int>(plateau.size());
  n->a = std::move(plateau);
  n->b = std::move(radius);
  return SymbolExpr(n);
}

SymbolExpr SymbolExpr::imported(SampledField field) {
  auto n = std::make_shared<Node>();
  n->family = Family::imported;
  n->dim = field.grid().dim();
  n->field = std::make_shared<const SampledField>(std::move(field));
  return SymbolExpr(n);
}

SymbolExpr::Family SymbolExpr::family() const { return node_->family; }
int SymbolExpr::dim() const { return node_->dim; }

cplx SymbolExpr::operator()(std::span<const double> u) const {
  const Node& n = *node_;
  if (static_cast<int>(u.size()) != n.dim) fail("symbol.dim", "evaluation point has the wrong dimension");
  switch (n.family) {
    case Family::gaussian: {
      double e = 0.0;
      for (int i = 0; i < n.dim; ++i) e += std::pow((u[i] - n.a[i]) / n.b[i], 2);
      return std::exp(-kPi * e);
    }
    case Family::hermite: {
      double v = 1.0;
      for (int i = 0; i < n.dim; ++i) v *= hermite_function(n.orders[i], u[i]);
      return v;
    }
    case Family::constant:
      return n.value;
    case Family::product: {
      cplx v = 1.0;
      for (const auto& c : n.children) v *= c(u);
      return v;
    }
    case Family::separable: {
      cplx v = 1.0;
      for (int i = 0; i < n.dim; ++i) v *= n.children[i](u.subspan(i, 1));
      return v;
    }
    case Family::plane_wave: {
      double phase = 0.0;
      for (int i = 0; i < n.dim; ++i) phase += n.a[i] * u[i];
      return std::polar(1.0, kTwoPi * phase) * n.children.front()(u);
    }
    case Family::bump: {
      double v = 1.0;
      for (int i = 0; i < n.dim; ++i) v *= smooth_fall((std::abs(u[i]) - n.a[i]) / n.b[i]);
      return v;
    }
    case Family::imported: {
      const GridSpec& g = n.field->grid();
      std::size_t flat = 0;
      for (int i = 0; i < n.dim; ++i) {
        std::size_t j = 0;
        if (!g.node_index(i, u[i], j)) fail("symbol.imported", "imported symbols are only defined on their grid");
        flat += j * g.stride(i);
      }
      return (*n.field)[flat];
    }
  }
  return 0.0;
}

SampledField SymbolExpr::sample(const GridSpec& grid) const {
  if (grid.dim() != dim()) fail("symbol.dim", "grid dimension differs from the symbol dimension");
  if (family() == Family::imported) {
    if (!(node_->field->grid() == grid)) fail("symbol.imported", "imported symbol lives on a different grid");
    return *node_->field;
  }
  SampledField out(grid);
  const int d = grid.dim();
  const std::size_t rows = grid.samples(0), row_len = grid.size() / rows;
  parallel_for(rows, [&](std::size_t r) {
    std::vector<double> u(d);
    for (std::size_t k = 0; k < row_len; ++k) {
      std::size_t flat = r * row_len + k;
      for (int a = d - 1; a >= 0; --a) {
        u[a] = grid.coord(a, flat % grid.samples(a));
        flat /= grid.samples(a);
      }
      out[r * row_len + k] = (*this)(u);
    }
  });
  return out;
}

bool SymbolExpr::depends_on(int axis) const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::constant:
      return false;
    case Family::product:
      for (const auto& c : n.children)
        if (c.depends_on(axis)) return true;
      return false;
    case Family::separable:
      return n.children[axis].depends_on(0);
    case Family::plane_wave:
      return n.a[axis] != 0.0 || n.children.front().depends_on(axis);
    default:
      return true;
  }
}

std::string SymbolExpr::decay() const {
  const Node& n = *node_;
  switch (n.family) {
    case Family::gaussian:
    case Family::hermite:
      return "schwartz";
    case Family::constant:
      return "bounded";
    case Family::bump:
      return "compact";
    case Family::imported:
      return "sampled";
    case Family::plane_wave:
      return n.children.front().decay();
    case Family::product: {
      // Bounded factors keep the strongest decay of the others.
      std::string best = "bounded";
      for (const auto& c : n.children)
        if (decay_rank(c.decay()) > decay_rank(best)) best = c.decay();
      return best;
    }
    case Family::separable: {
      // Decay in every variable needs every axis factor to decay.
      std::string worst = "compact";
      for (const auto& c : n.children)
        if (decay_rank(c.decay()) < decay_rank(worst)) worst = c.decay();
      return worst;
    }
  }
  return "bounded";
}

std::string SymbolExpr::describe() const {
  const Node& n = *node_;
  std::ostringstream s;
  switch (n.family) {
    case Family::gaussian:
      s << "gaussian(c=" << join(n.a) << ";w=" << join(n.b) << ")";
      break;
    case Family::hermite: {
      s << "hermite(";
      for (std::size_t i = 0; i < n.orders.size(); ++i) s << (i ? "," : "") << n.orders[i];
      s << ")";
      break;
    }
    case Family::constant:
      s << "constant(" << n.value.real() << (n.value.imag() != 0.0 ? "+" + std::to_string(n.value.imag()) + "i" : "")
        << ")";
      break;
    case Family::product:
    case Family::separable: {
      s << (n.family == Family::product ? "product(" : "separable(");
      for (std::size_t i = 0; i < n.children.size(); ++i) s << (i ? "," : "") << n.children[i].describe();
      s << ")";
      break;
    }
    case Family::plane_wave:
      s << "plane_wave(a=" << join(n.a) << ";" << n.children.front().describe() << ")";
      break;
    case Family::bump:
      s << "bump(p=" << join(n.a) << ";r=" << join(n.b) << ")";
      break;
    case Family::imported:
      s << "imported(" << n.field->size() << ")";
      break;
  }
  return s.str();
}

SymbolGrid2 operator_symbol(const SymbolExpr& expr, const GridSpec& op, std::size_t pad) {
  if (expr.dim() != 2) fail("symbol.dim", "operator symbols live on R^2");
  const GridSpec sg = symbol_grid2(op, pad);
  return {expr.sample(sg), !expr.depends_on(1)};
}

}  // namespace locop
