#pragma once

#include <memory>
#include <string>
#include <vector>

#include "locop/grid.hpp"
#include "locop/quantizers.hpp"

namespace locop {

/// Closed-form test symbols and windows on R^D, evaluable at any point.
class SymbolExpr {
 public:
  enum class Family { gaussian, hermite, constant, product, separable, plane_wave, bump, imported };

  /// exp(-pi sum ((u_a - c_a) / w_a)^2).
  static SymbolExpr gaussian(std::vector<double> center, std::vector<double> widths);
  /// prod_a h_{n_a}(u_a) with L^2-normalized Hermite functions.
  static SymbolExpr hermite(std::vector<int> orders);
  static SymbolExpr constant(cplx value, int dim);
  /// Pointwise product of factors of equal dimension.
  static SymbolExpr product(std::vector<SymbolExpr> factors);
  /// Tensor product of one-dimensional factors, one per axis.
  static SymbolExpr separable(std::vector<SymbolExpr> axes);
  /// e^{2 pi i a.u} base(u).
  static SymbolExpr plane_wave(std::vector<double> frequency, SymbolExpr base);
  /// Per axis: 1 on |u| <= plateau, smooth descent to 0 at plateau + radius.
  static SymbolExpr bump(std::vector<double> plateau, std::vector<double> radius);
  /// Samples on a fixed grid; evaluation is only defined at its nodes.
  static SymbolExpr imported(SampledField field);

  [[nodiscard]] Family family() const;
  [[nodiscard]] int dim() const;
  [[nodiscard]] cplx operator()(std::span<const double> u) const;
  /// Samples on a grid of the same dimension (imported fields need the same grid).
  [[nodiscard]] SampledField sample(const GridSpec& grid) const;
  /// Whether the value changes along an axis.
  [[nodiscard]] bool depends_on(int axis) const;
  /// "compact", "schwartz", "bounded" or "sampled": the decay guaranteed in every variable.
  [[nodiscard]] std::string decay() const;
  [[nodiscard]] std::string describe() const;

  struct Node;

 private:
  explicit SymbolExpr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

/// Symbol of an operator on `op`, with constant_like set when it does not depend on xi.
SymbolGrid2 operator_symbol(const SymbolExpr& expr, const GridSpec& op, std::size_t pad = 2);

}  // namespace locop
