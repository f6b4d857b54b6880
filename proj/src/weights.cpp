#include "locop/weights.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <sstream>

#include "locop/error.hpp"

namespace locop {

struct Weight::Node {
  Form form = Form::constant;
  int dim = 1;
  double s = 0.0;
  double delta = 0.0;
  double b = 0.0;
  std::shared_ptr<const Node> first;
  std::shared_ptr<const Node> second;
  std::optional<LinearMap> map;
};

namespace {

double euclid(std::span<const double> z) {
  double s = 0.0;
  for (double v : z) s += v * v;
  return std::sqrt(s);
}

double eval_node(const Weight::Node& n, std::span<const double> z) {
  switch (n.form) {
    case Weight::Form::constant:
      return 1.0;
    case Weight::Form::polynomial: {
      double r2 = 0.0;
      for (double v : z) r2 += v * v;
      return std::pow(1.0 + r2, 0.5 * n.s);
    }
    case Weight::Form::exponential:
      return std::exp(n.delta * std::pow(euclid(z), n.b));
    case Weight::Form::theta:
      return std::exp(euclid(z));
    case Weight::Form::product: {
      const auto split = static_cast<std::size_t>(n.first->dim);
      return eval_node(*n.first, z.first(split)) * eval_node(*n.second, z.subspan(split));
    }
    case Weight::Form::composed: {
      const Point image = n.map->apply(z);
      return eval_node(*n.first, image);
    }
  }
  return 1.0;
}

std::string describe_node(const Weight::Node& n) {
  std::ostringstream os;
  os.precision(17);
  switch (n.form) {
    case Weight::Form::constant: os << "one"; break;
    case Weight::Form::polynomial: os << "poly(" << n.s << ")"; break;
    case Weight::Form::exponential: os << "exp(" << n.delta << "," << n.b << ")"; break;
    case Weight::Form::theta: os << "theta"; break;
    case Weight::Form::product: os << describe_node(*n.first) << "x" << describe_node(*n.second); break;
    case Weight::Form::composed: os << describe_node(*n.first) << "o[" << n.map->name() << "]"; break;
  }
  return os.str();
}

void require_positive_dim(int dim) {
  if (dim < 1 || dim > 12) fail("weight.dim", "weight dimension out of range");
}

}  // namespace

LinearMap::LinearMap(Eigen::MatrixXd matrix, std::string name) : matrix_(std::move(matrix)), name_(std::move(name)) {
  if (matrix_.size() == 0) fail("map.shape", "empty matrix");
  if (!matrix_.allFinite()) fail("map.finite", "matrix entries must be finite");
}

LinearMap LinearMap::identity(int dim) { return LinearMap(Eigen::MatrixXd::Identity(dim, dim), "identity"); }

LinearMap LinearMap::quarter_turn(int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n);
  m.bottomLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n);
  return LinearMap(m, "quarter_turn");
}

LinearMap LinearMap::tau_scaling(double tau, int n) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::invalid_argument, "tau.open", "needs tau in (0,1)");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = Eigen::MatrixXd::Identity(n, n) / (1.0 - tau);
  m.bottomRightCorner(n, n) = Eigen::MatrixXd::Identity(n, n) / tau;
  return LinearMap(m, "tau_scaling");
}

LinearMap LinearMap::tau_reflection(double tau, int n) {
  if (!(tau > 0.0 && tau < 1.0)) throw Error(ErrorKind::invalid_argument, "tau.open", "needs tau in (0,1)");
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  m.topLeftCorner(n, n) = -Eigen::MatrixXd::Identity(n, n) * (tau / (1.0 - tau));
  m.bottomRightCorner(n, n) = -Eigen::MatrixXd::Identity(n, n) * ((1.0 - tau) / tau);
  return LinearMap(m, "tau_reflection");
}

LinearMap LinearMap::three_to_two(int n) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(2 * n, 3 * n);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
  m.block(0, 2 * n, n, n) = -id;
  m.block(n, 0, n, n) = id;
  m.block(n, n, n, n) = id;
  return LinearMap(m, "three_to_two");
}

Point LinearMap::apply(std::span<const double> v) const {
  if (static_cast<int>(v.size()) != cols()) fail("map.dim", "vector length does not match map");
  const Eigen::Map<const Eigen::VectorXd> in(v.data(), static_cast<Eigen::Index>(v.size()));
  const Eigen::VectorXd out = matrix_ * in;
  return Point(out.data(), out.data() + out.size());
}

LinearMap LinearMap::inverse() const {
  if (rows() != cols()) fail("map.not_square", "only square maps can be inverted");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(matrix_);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12)
    fail("map.singular", "map is singular");
  return LinearMap(lu.inverse(), name_ + "^-1");
}

Point LinearMap::apply_inverse(std::span<const double> v) const { return inverse().apply(v); }

Weight Weight::constant(int dim) {
  require_positive_dim(dim);
  auto n = std::make_shared<Node>();
  n->dim = dim;
  return Weight(n);
}

Weight Weight::polynomial(double s, int dim) {
  require_positive_dim(dim);
  if (!(s >= 0.0) || !std::isfinite(s)) fail("weight.exponent", "polynomial weight needs s >= 0");
  auto n = std::make_shared<Node>();
  n->form = Form::polynomial;
  n->dim = dim;
  n->s = s;
  return Weight(n);
}

Weight Weight::exponential(double delta, double b, int dim) {
  require_positive_dim(dim);
  if (!(delta > 0.0) || !(b > 0.0 && b < 1.0)) fail("weight.exponent", "exponential weight needs delta > 0, 0 < b < 1");
  auto n = std::make_shared<Node>();
  n->form = Form::exponential;
  n->dim = dim;
  n->delta = delta;
  n->b = b;
  return Weight(n);
}

Weight Weight::theta(int dim) {
  require_positive_dim(dim);
  auto n = std::make_shared<Node>();
  n->form = Form::theta;
  n->dim = dim;
  return Weight(n);
}

Weight Weight::product(const Weight& first, const Weight& second) {
  auto n = std::make_shared<Node>();
  n->form = Form::product;
  n->dim = first.dim() + second.dim();
  n->first = first.node_;
  n->second = second.node_;
  return Weight(n);
}

Weight Weight::composed(const Weight& outer, const LinearMap& map) {
  if (outer.dim() != map.rows()) fail("weight.dim", "map output dimension does not match weight");
  auto n = std::make_shared<Node>();
  n->form = Form::composed;
  n->dim = map.cols();
  n->first = outer.node_;
  n->map = map;
  return Weight(n);
}

Weight::Form Weight::form() const { return node_->form; }
int Weight::dim() const { return node_->dim; }

double Weight::operator()(std::span<const double> z) const {
  if (static_cast<int>(z.size()) != node_->dim) fail("weight.dim", "point dimension does not match weight");
  return eval_node(*node_, z);
}

std::string Weight::describe() const { return describe_node(*node_); }

std::vector<Point> random_points(int dim, std::size_t count, double half_width, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(-half_width, half_width);
  std::vector<Point> out(count, Point(dim));
  for (auto& p : out)
    for (auto& v : p) v = dist(gen);
  return out;
}

AdmissibilityReport check_admissible(const Weight& nu, std::span<const Point> points, std::span<const Point> shifts,
                                     double slack, double constant) {
  if (!(constant >= 1.0)) fail("weight.constant", "submultiplicativity constant must be at least 1");
  if (points.size() != shifts.size()) fail("weight.pairs", "points and shifts must pair up");
  AdmissibilityReport rep;
  const int d = nu.dim();
  const Point origin(d, 0.0);
  rep.origin_value = nu(origin);

  double far = 0.0;
  const Point* far_point = nullptr;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Point& z = points[i];
    const Point& w = shifts[i];
    Point sum(d);
    for (int a = 0; a < d; ++a) {
      sum[a] = z[a] + w[a];
      rep.box_half_width = std::max({rep.box_half_width, std::abs(z[a]), std::abs(w[a])});
    }
    rep.worst_submultiplicative = std::max(rep.worst_submultiplicative, nu(sum) / (nu(z) * nu(w)));
    const double base = nu(z);
    for (int a = 0; a < d; ++a) {
      Point flipped = z;
      flipped[a] = -flipped[a];
      rep.evenness_deviation = std::max(rep.evenness_deviation, std::abs(nu(flipped) - base) / base);
    }
    const double r = euclid(z);
    if (r > far) {
      far = r;
      far_point = &z;
    }
  }

  Point probe(d, 0.0);
  probe[0] = 1.0;
  if (far_point != nullptr) {
    const double scale = std::clamp(far, 1.0, 8.0) / far;
    for (int a = 0; a < d; ++a) probe[a] = (*far_point)[a] * scale;
  }
  for (int n = 1; n <= 64; ++n) {
    Point scaled = probe;
    for (auto& v : scaled) v *= n;
    rep.growth.push_back(std::pow(nu(scaled), 1.0 / n));
  }
  const double l64 = std::log(rep.growth[63]);
  const double l32 = std::log(rep.growth[31]);
  rep.growth_log_ratio = l32 > 0.0 ? l64 / l32 : 0.0;
  rep.subexponential = rep.growth[63] <= 1.0 + slack || l64 <= 0.95 * l32;

  rep.constant = constant;
  rep.submultiplicative = rep.worst_submultiplicative <= constant + slack;
  rep.even = rep.evenness_deviation <= slack;
  rep.pass = rep.submultiplicative && rep.even && rep.subexponential && std::abs(rep.origin_value - 1.0) <= slack;
  return rep;
}

ModerateReport check_moderate(const Weight& m, const Weight& nu, double half_width, std::size_t count,
                              std::uint64_t seed) {
  if (m.dim() != nu.dim()) fail("weight.dim", "weights must share a dimension");
  const int d = m.dim();
  auto sup_over = [&](double b, std::size_t n, std::uint64_t s) {
    const auto zs = random_points(d, n, b, s);
    const auto ws = random_points(d, n, b, s + 1);
    double sup = 0.0;
    auto ratio = [&](const Point& z, const Point& w) {
      Point sum(d);
      for (int a = 0; a < d; ++a) sum[a] = z[a] + w[a];
      return m(sum) / (m(z) * nu(w));
    };
    for (std::size_t i = 0; i < n; ++i) sup = std::max(sup, ratio(zs[i], ws[i]));
    // Deterministic axis pairs: w along each axis at the box edge, z at 0 or -w.
    const Point origin(d, 0.0);
    for (int a = 0; a < d; ++a) {
      for (double sign : {-1.0, 1.0}) {
        Point w(d, 0.0);
        w[a] = sign * b;
        Point neg = w;
        for (auto& v : neg) v = -v;
        sup = std::max({sup, ratio(origin, w), ratio(neg, w), ratio(w, origin)});
      }
    }
    sup = std::max(sup, ratio(origin, origin));
    return sup;
  };
  ModerateReport rep;
  rep.box_half_width = half_width;
  rep.pairs = count;
  rep.sup_base = sup_over(half_width, count, seed);
  rep.sup_doubled = sup_over(2.0 * half_width, 2 * count, seed + 7);
  rep.pass = std::isfinite(rep.sup_doubled) && rep.sup_doubled <= 1.05 * rep.sup_base + 1e-9;
  return rep;
}

}  // namespace locop
