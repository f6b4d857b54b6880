#include "locop/phase.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "locop/error.hpp"
#include "locop/grid.hpp"

namespace locop {
namespace {

// d^k/dt^k t^n at t.
double power_derivative(int n, int k, double t) {
  if (k > n) return 0.0;
  double c = 1.0;
  for (int i = 0; i < k; ++i) c *= n - i;
  return c * std::pow(t, n - k);
}

template <class Residual, class Slope>
double damped_newton(double start, Residual residual, Slope slope, double tol, int max_iter, const char* what) {
  double v = start;
  double r = residual(v);
  for (int it = 0; it < max_iter; ++it) {
    if (std::abs(r) <= tol) return v;
    const double s = slope(v);
    if (s == 0.0 || !std::isfinite(s))
      throw Error(ErrorKind::convergence, "newton.singular", std::string(what) + ": vanishing mixed derivative");
    double step = -r / s;
    double next = v + step;
    double rn = residual(next);
    for (int halve = 0; halve < 30 && !(std::abs(rn) < std::abs(r)); ++halve) {
      step *= 0.5;
      next = v + step;
      rn = residual(next);
    }
    v = next;
    r = rn;
  }
  if (std::abs(r) <= tol) return v;
  std::ostringstream os;
  os.precision(3);
  os << what << ": no convergence, last residual " << std::scientific << std::abs(r);
  throw Error(ErrorKind::convergence, "newton.diverged", os.str());
}

}  // namespace

PhaseSpec::PhaseSpec(const Coefficients& coeffs, double perturbation, std::string name)
    : coeffs_(coeffs), eps_(perturbation), name_(std::move(name)) {
  for (const auto& row : coeffs_)
    for (double c : row)
      if (!std::isfinite(c)) fail("phase.finite", "phase coefficients must be finite");
  if (!std::isfinite(eps_)) fail("phase.finite", "perturbation must be finite");
}

PhaseSpec PhaseSpec::bilinear() {
  Coefficients c{};
  c[1][1] = 1.0;
  return PhaseSpec(c, 0.0, "bilinear");
}

PhaseSpec PhaseSpec::quadratic(double a, double b, double cross) {
  Coefficients c{};
  c[1][1] = 1.0 + cross;
  c[2][0] = 0.5 * a;
  c[0][2] = 0.5 * b;
  return PhaseSpec(c, 0.0, "quadratic");
}

PhaseSpec PhaseSpec::shifted(double x0) {
  Coefficients c{};
  c[1][1] = 1.0;
  c[0][1] = -x0;
  return PhaseSpec(c, 0.0, "shifted");
}

double PhaseSpec::derivative(int a, int b, double x, double xi) const {
  double v = 0.0;
  for (int i = a; i <= 4; ++i)
    for (int j = b; j <= 4; ++j)
      if (coeffs_[i][j] != 0.0) v += coeffs_[i][j] * power_derivative(i, a, x) * power_derivative(j, b, xi);
  if (eps_ != 0.0) v += eps_ * std::sin(x + xi + 0.5 * kPi * (a + b));
  return v;
}

int PhaseSpec::degree() const {
  int deg = 0;
  for (int i = 0; i <= 4; ++i)
    for (int j = 0; j <= 4; ++j)
      if (coeffs_[i][j] != 0.0) deg = std::max(deg, i + j);
  return deg;
}

PhasePoint canonical_transform(const PhaseSpec& phase, const PhasePoint& yeta, double tol, int max_iter) {
  const double y = yeta.x[0];
  const double eta = yeta.xi[0];
  const double x = damped_newton(
      y, [&](double v) { return phase.derivative(0, 1, v, eta) - y; },
      [&](double v) { return phase.derivative(1, 1, v, eta); }, tol, max_iter, "canonical transform");
  return PhasePoint::make(x, phase.derivative(1, 0, x, eta));
}

PhasePoint canonical_inverse(const PhaseSpec& phase, const PhasePoint& xxi, double tol, int max_iter) {
  const double x = xxi.x[0];
  const double xi = xxi.xi[0];
  const double eta = damped_newton(
      xi, [&](double v) { return phase.derivative(1, 0, x, v) - xi; },
      [&](double v) { return phase.derivative(1, 1, x, v); }, tol, max_iter, "canonical inverse");
  return PhasePoint::make(phase.derivative(0, 1, x, eta), eta);
}

TamenessCertificate tameness_check(const PhaseSpec& phase, double box_half_width, double delta) {
  if (!(box_half_width > 0.0)) fail("phase.box", "box must be nonempty");
  TamenessCertificate cert;
  cert.box_half_width = box_half_width;
  cert.delta = delta;
  cert.min_mixed_det = std::numeric_limits<double>::infinity();
  cert.min_full_hessian_det = std::numeric_limits<double>::infinity();
  constexpr int kNodes = 33;
  for (int i = 0; i < kNodes; ++i) {
    const double x = -box_half_width + 2.0 * box_half_width * i / (kNodes - 1);
    for (int j = 0; j < kNodes; ++j) {
      const double xi = -box_half_width + 2.0 * box_half_width * j / (kNodes - 1);
      const double pxx = phase.derivative(2, 0, x, xi);
      const double pxk = phase.derivative(1, 1, x, xi);
      const double pkk = phase.derivative(0, 2, x, xi);
      cert.min_mixed_det = std::min(cert.min_mixed_det, std::abs(pxk));
      cert.min_full_hessian_det = std::min(cert.min_full_hessian_det, std::abs(pxx * pkk - pxk * pxk));
      for (int order = 2; order <= 4; ++order)
        for (int a = 0; a <= order; ++a)
          cert.max_high_derivative =
              std::max(cert.max_high_derivative, std::abs(phase.derivative(a, order - a, x, xi)));
    }
  }
  cert.globally_bounded = phase.degree() <= 2 && std::isfinite(cert.max_high_derivative);
  cert.pass = cert.min_mixed_det >= delta && cert.globally_bounded;
  return cert;
}

BiLipschitzMap BiLipschitzMap::identity(int dim) {
  return affine(Eigen::MatrixXd::Identity(2 * dim, 2 * dim), Eigen::VectorXd::Zero(2 * dim));
}

BiLipschitzMap BiLipschitzMap::affine(Eigen::MatrixXd matrix, Eigen::VectorXd offset) {
  if (matrix.rows() != matrix.cols() || matrix.rows() % 2 != 0 || matrix.rows() > 8 || offset.size() != matrix.rows())
    fail("map.shape", "affine map needs a square 2d x 2d matrix and matching offset");
  Eigen::FullPivLU<Eigen::MatrixXd> lu(matrix);
  if (!lu.isInvertible() || std::abs(lu.determinant()) < 1e-12) fail("map.singular", "affine map is singular");
  BiLipschitzMap m;
  m.kind_ = Kind::affine;
  m.dim_ = static_cast<int>(matrix.rows() / 2);
  m.inverse_ = lu.inverse();
  m.matrix_ = std::move(matrix);
  m.offset_ = std::move(offset);
  return m;
}

BiLipschitzMap BiLipschitzMap::canonical(const PhaseSpec& phase, double box_half_width, double delta) {
  auto cert = tameness_check(phase, box_half_width, delta);
  if (!cert.pass) fail("phase.not_tame", "phase fails the tameness check");
  BiLipschitzMap m;
  m.kind_ = Kind::canonical;
  m.dim_ = 1;
  m.phase_ = phase;
  m.certificate_ = cert;
  return m;
}

PhasePoint BiLipschitzMap::apply(const PhasePoint& z) const {
  if (z.dim != dim_) fail("map.dim", "point dimension does not match map");
  if (kind_ == Kind::canonical) return canonical_transform(*phase_, z);
  const auto c = z.coords();
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(c.data(), 2 * dim_);
  const Eigen::VectorXd out = matrix_ * v + offset_;
  return PhasePoint::from_coords(std::span<const double>(out.data(), out.size()));
}

PhasePoint BiLipschitzMap::inverse(const PhasePoint& z) const {
  if (z.dim != dim_) fail("map.dim", "point dimension does not match map");
  if (kind_ == Kind::canonical) return canonical_inverse(*phase_, z);
  const auto c = z.coords();
  const Eigen::VectorXd v = Eigen::Map<const Eigen::VectorXd>(c.data(), 2 * dim_);
  const Eigen::VectorXd out = inverse_ * (v - offset_);
  return PhasePoint::from_coords(std::span<const double>(out.data(), out.size()));
}

bool BiLipschitzMap::is_identity() const {
  return kind_ == Kind::affine && matrix_.isIdentity(0.0) && offset_.isZero(0.0);
}

double BiLipschitzMap::jacobian() const {
  if (kind_ != Kind::affine) fail("map.kind", "jacobian is only constant for affine maps");
  return std::abs(matrix_.determinant());
}

std::string BiLipschitzMap::describe() const {
  if (kind_ == Kind::canonical) return "canonical(" + phase_->name() + ")";
  if (is_identity()) return "identity";
  std::ostringstream os;
  os.precision(17);
  os << "affine[";
  for (Eigen::Index i = 0; i < matrix_.rows(); ++i)
    for (Eigen::Index j = 0; j < matrix_.cols(); ++j) os << (i || j ? "," : "") << matrix_(i, j);
  os << ";";
  for (Eigen::Index i = 0; i < offset_.size(); ++i) os << (i ? "," : "") << offset_(i);
  os << "]";
  return os.str();
}

}  // namespace locop
