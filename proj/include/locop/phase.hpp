#pragma once

#include <Eigen/Dense>
#include <array>
#include <optional>
#include <string>

#include "locop/lattice.hpp"

namespace locop {

/// Phase Phi(x, xi) on R x R: a polynomial sum_{i,j<=4} c_ij x^i xi^j plus an
/// optional bounded perturbation eps sin(x + xi).
class PhaseSpec {
 public:
  using Coefficients = std::array<std::array<double, 5>, 5>;

  explicit PhaseSpec(const Coefficients& coeffs, double perturbation = 0.0, std::string name = "polynomial");

  /// x xi.
  static PhaseSpec bilinear();
  /// (1 + cross) x xi + a x^2 / 2 + b xi^2 / 2.
  static PhaseSpec quadratic(double a, double b, double cross = 0.0);
  /// (x - x0) xi.
  static PhaseSpec shifted(double x0);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const Coefficients& coefficients() const { return coeffs_; }
  [[nodiscard]] double perturbation() const { return eps_; }

  /// d^a/dx^a d^b/dxi^b Phi at (x, xi).
  [[nodiscard]] double derivative(int a, int b, double x, double xi) const;
  [[nodiscard]] double value(double x, double xi) const { return derivative(0, 0, x, xi); }
  /// Largest total degree among nonzero polynomial terms.
  [[nodiscard]] int degree() const;

 private:
  Coefficients coeffs_{};
  double eps_ = 0.0;
  std::string name_;
};

/// Evaluates (x, xi) = chi(y, eta) from y = dPhi/dxi(x, eta), xi = dPhi/dx(x, eta)
/// by damped Newton on x starting from y. Throws ErrorKind::convergence.
PhasePoint canonical_transform(const PhaseSpec& phase, const PhasePoint& yeta, double tol = 1e-12,
                               int max_iter = 50);

/// Inverse: solves xi = dPhi/dx(x, eta) for eta, then y = dPhi/dxi(x, eta).
PhasePoint canonical_inverse(const PhaseSpec& phase, const PhasePoint& xxi, double tol = 1e-12,
                             int max_iter = 50);

struct TamenessCertificate {
  double box_half_width = 0.0;
  double delta = 0.0;
  double min_mixed_det = 0.0;       ///< min |d^2 Phi / dx dxi| over the sample grid
  double min_full_hessian_det = 0.0;  ///< auxiliary: min |det| of the full 2x2 Hessian
  double max_high_derivative = 0.0;   ///< max |d^alpha Phi|, 2 <= |alpha| <= 4, on the box
  bool globally_bounded = false;      ///< polynomial part has degree <= 2
  bool pass = false;
};

/// Samples a 33 x 33 grid of [-b, b]^2.
TamenessCertificate tameness_check(const PhaseSpec& phase, double box_half_width, double delta);

/// Phase-space map with forward and inverse evaluation: affine z -> A z + b
/// with A invertible, or the canonical transformation of a tame phase.
class BiLipschitzMap {
 public:
  enum class Kind { affine, canonical };

  static BiLipschitzMap identity(int dim = 1);
  static BiLipschitzMap affine(Eigen::MatrixXd matrix, Eigen::VectorXd offset);
  /// Requires a passing tameness certificate on the given box.
  static BiLipschitzMap canonical(const PhaseSpec& phase, double box_half_width = 8.0, double delta = 0.5);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] PhasePoint apply(const PhasePoint& z) const;
  [[nodiscard]] PhasePoint inverse(const PhasePoint& z) const;
  [[nodiscard]] bool is_identity() const;
  /// |det A| for affine maps.
  [[nodiscard]] double jacobian() const;
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return matrix_; }
  [[nodiscard]] const Eigen::VectorXd& offset() const { return offset_; }
  [[nodiscard]] const std::optional<TamenessCertificate>& certificate() const { return certificate_; }
  [[nodiscard]] std::string describe() const;

 private:
  Kind kind_ = Kind::affine;
  int dim_ = 1;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd inverse_;
  Eigen::VectorXd offset_;
  std::optional<PhaseSpec> phase_;
  std::optional<TamenessCertificate> certificate_;
};

}  // namespace locop
