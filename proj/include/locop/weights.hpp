#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace locop {

using Point = std::vector<double>;

/// Real matrix acting on coordinate vectors. Phase-space vectors are ordered
/// (x_1..x_n, xi_1..xi_n); three-parameter vectors are (t_1, t_2, t_3) blocks.
class LinearMap {
 public:
  explicit LinearMap(Eigen::MatrixXd matrix, std::string name = "matrix");

  static LinearMap identity(int dim);
  /// (x, xi) -> (xi, -x) on R^{2n}.
  static LinearMap quarter_turn(int n);
  /// diag(1/(1-tau), 1/tau) acting blockwise on R^{2n}.
  static LinearMap tau_scaling(double tau, int n);
  /// -diag(tau/(1-tau), (1-tau)/tau) acting blockwise on R^{2n}.
  static LinearMap tau_reflection(double tau, int n);
  /// (t_1, t_2, t_3) -> (-t_3, t_1 + t_2), from R^{3n} onto R^{2n}.
  static LinearMap three_to_two(int n);

  [[nodiscard]] int rows() const { return static_cast<int>(matrix_.rows()); }
  [[nodiscard]] int cols() const { return static_cast<int>(matrix_.cols()); }
  [[nodiscard]] const Eigen::MatrixXd& matrix() const { return matrix_; }
  [[nodiscard]] const std::string& name() const { return name_; }

  [[nodiscard]] Point apply(std::span<const double> v) const;
  /// Throws map.not_square or map.singular.
  [[nodiscard]] LinearMap inverse() const;
  [[nodiscard]] Point apply_inverse(std::span<const double> v) const;

 private:
  Eigen::MatrixXd matrix_;
  std::string name_;
};

/// Positive weight function built from a small expression tree.
class Weight {
 public:
  enum class Form { constant, polynomial, exponential, theta, product, composed };

  /// m == 1.
  static Weight constant(int dim);
  /// (1 + |z|^2)^{s/2}, s >= 0.
  static Weight polynomial(double s, int dim);
  /// e^{delta |z|^b}, 0 < b < 1.
  static Weight exponential(double delta, double b, int dim);
  /// e^{|z|}; kept as a container, fails the growth test.
  static Weight theta(int dim);
  /// first(z') second(z'') on the split z = (z', z'').
  static Weight product(const Weight& first, const Weight& second);
  /// outer(A z).
  static Weight composed(const Weight& outer, const LinearMap& map);

  [[nodiscard]] Form form() const;
  [[nodiscard]] int dim() const;
  [[nodiscard]] double operator()(std::span<const double> z) const;
  /// Compact textual form used in reports, e.g. "poly(1)o[three_to_two]".
  [[nodiscard]] std::string describe() const;

  struct Node;

 private:
  explicit Weight(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct AdmissibilityReport {
  double worst_submultiplicative = 0.0;  ///< max nu(z+w) / (nu(z) nu(w))
  double constant = 1.0;                 ///< allowed bound for that ratio
  double evenness_deviation = 0.0;       ///< max relative change under one-coordinate sign flips
  double origin_value = 0.0;
  std::vector<double> growth;            ///< nu(n z*)^{1/n} for n = 1..64
  double growth_log_ratio = 0.0;         ///< log growth[64] / log growth[32]
  double box_half_width = 0.0;
  bool submultiplicative = false;
  bool even = false;
  bool subexponential = false;
  bool pass = false;
};

/// Sampled admissibility test. Pairs are (points[i], shifts[i]). The growth
/// sequence uses the sample point of largest norm rescaled into |z| in [1, 8];
/// it passes when nu(64 z)^{1/64} <= 1 + 1e-9 or the log shrinks by at least
/// 5% from n = 32 to n = 64.
/// Submultiplicativity is tested up to `constant`: weights only matter up to
/// equivalence, and nu_s satisfies nu_s(z + w) <= 2^{s/2} nu_s(z) nu_s(w)
/// without being strictly submultiplicative near the origin.
AdmissibilityReport check_admissible(const Weight& nu, std::span<const Point> points,
                                     std::span<const Point> shifts, double slack = 1e-9,
                                     double constant = 2.0);

struct ModerateReport {
  double sup_base = 0.0;     ///< sup over box [-b, b]^D pairs
  double sup_doubled = 0.0;  ///< sup over box [-2b, 2b]^D with twice the pairs
  double box_half_width = 0.0;
  std::size_t pairs = 0;
  bool pass = false;         ///< sup_doubled <= 1.05 sup_base + 1e-9
};

/// sup of m(z + w) / (m(z) nu(w)) over seeded random pairs, axis pairs and the
/// origin; stability under doubling the sampled box stands in for finiteness.
ModerateReport check_moderate(const Weight& m, const Weight& nu, double half_width, std::size_t count,
                              std::uint64_t seed);

/// Uniform points in [-half_width, half_width]^dim from a seeded generator.
std::vector<Point> random_points(int dim, std::size_t count, double half_width, std::uint64_t seed);

}  // namespace locop
