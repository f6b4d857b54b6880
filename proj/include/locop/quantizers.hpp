#pragma once

#include <Eigen/Dense>
#include <memory>
#include <string>

#include "locop/grid.hpp"
#include "locop/lattice.hpp"
#include "locop/phase.hpp"

namespace locop {

/// Symbol sigma(x, xi) for a 1-D operator grid (L, N). Axis 0 coincides with
/// the operator grid; axis 1 has extent N / L, so the inverse transform in xi
/// lands on a v-axis whose spacing equals the operator spacing h.
struct SymbolGrid2 {
  SampledField sigma;
  /// The symbol does not depend on xi (e.g. sigma == 1): kernels take the
  /// analytic diagonal path a(x) delta(x - y).
  bool constant_like = false;
};

/// Grid for symbols of an operator on `op`: xi-axis with pad * N samples.
GridSpec symbol_grid2(const GridSpec& op, std::size_t pad = 2);
/// Grid (x, y, xi) for three-parameter symbols with n_xi frequency samples.
GridSpec symbol_grid3(const GridSpec& op, std::size_t n_xi);
/// The operator grid recovered from axis 0 of a symbol grid.
GridSpec operator_grid(const GridSpec& symbol);

class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  [[nodiscard]] virtual const GridSpec& grid() const = 0;
  [[nodiscard]] virtual SampledField apply(const SampledField& f) const = 0;
  [[nodiscard]] virtual std::string describe() const = 0;
  /// Applies the operator to each column (a field on grid()).
  [[nodiscard]] virtual Eigen::MatrixXcd apply_columns(const Eigen::MatrixXcd& columns) const;
};

/// Dense kernel with (T f)(x_i) = sum_j K(i, j) f(x_j) h.
class KernelMatrix final : public LinearOperator {
 public:
  KernelMatrix(GridSpec grid, Eigen::MatrixXcd entries, std::string label = "kernel");

  [[nodiscard]] const GridSpec& grid() const override { return grid_; }
  [[nodiscard]] const Eigen::MatrixXcd& entries() const { return entries_; }
  [[nodiscard]] SampledField apply(const SampledField& f) const override;
  [[nodiscard]] Eigen::MatrixXcd apply_columns(const Eigen::MatrixXcd& columns) const override;
  [[nodiscard]] std::string describe() const override { return label_; }
  /// Operator norm on the sampled L^2 space, i.e. the largest singular value of K h.
  [[nodiscard]] double spectral_norm() const;
  [[nodiscard]] KernelMatrix scaled(cplx c) const;

 private:
  GridSpec grid_;
  Eigen::MatrixXcd entries_;
  std::string label_;
};

/// c Id.
class ScaledIdentity final : public LinearOperator {
 public:
  ScaledIdentity(GridSpec grid, cplx scale) : grid_(std::move(grid)), scale_(scale) {}
  [[nodiscard]] const GridSpec& grid() const override { return grid_; }
  [[nodiscard]] SampledField apply(const SampledField& f) const override;
  [[nodiscard]] std::string describe() const override;

 private:
  GridSpec grid_;
  cplx scale_;
};

/// f -> <f, probe> image.
class RankOne final : public LinearOperator {
 public:
  RankOne(SampledField image, SampledField probe);
  [[nodiscard]] const GridSpec& grid() const override { return image_.grid(); }
  [[nodiscard]] SampledField apply(const SampledField& f) const override;
  [[nodiscard]] std::string describe() const override { return "rank_one"; }

 private:
  SampledField image_;
  SampledField probe_;
};

/// T f(x) = int sigma(x, xi) e^{2 pi i Phi(x, xi)} f^(xi) dxi by trapezoid
/// quadrature over the operator's frequency grid.
class FioOperator final : public LinearOperator {
 public:
  /// The phase must pass the tameness check on the operator's phase-space box.
  FioOperator(const SymbolGrid2& sigma, const PhaseSpec& phase, double tameness_delta = 0.5);

  [[nodiscard]] const GridSpec& grid() const override { return grid_; }
  [[nodiscard]] SampledField apply(const SampledField& f) const override;
  [[nodiscard]] std::string describe() const override { return "fio(" + phase_.name() + ")"; }
  [[nodiscard]] const PhaseSpec& phase() const { return phase_; }
  [[nodiscard]] const TamenessCertificate& certificate() const { return certificate_; }
  /// The N x N quadrature matrix acting on f^ samples.
  [[nodiscard]] const Eigen::MatrixXcd& quadrature() const { return quad_; }

 private:
  GridSpec grid_;
  PhaseSpec phase_;
  TamenessCertificate certificate_;
  Eigen::MatrixXcd quad_;
};

/// Op_tau(sigma): K(x, y) = sigma_check(tau x + (1 - tau) y, x - y), where
/// sigma_check is the inverse transform of sigma in xi. For the offset
/// m = i - j the column sigma_check(., m h) is evaluated at x_j + tau m h by an
/// exact index shift when tau m is an integer and by a Fourier phase ramp
/// otherwise. Throws kernel.resize when sigma_check has not decayed at the
/// edge of the v-axis.
KernelMatrix kernel_tau(const SymbolGrid2& sigma, double tau);

/// T_sigma for sigma(x, y, xi): K(i, j) = sigma_check(x_i, y_j, (i - j) h).
KernelMatrix kernel_threeparam(const SampledField& sigma3);

/// S_{tau1 -> tau2}: multiplies the 2-D transform sigma^(eta_1, eta_2) by
/// e^{2 pi i (tau2 - tau1) eta_1 eta_2}.
///
/// Kernel equality Op_tau1(sigma) = Op_tau2(rho) in the (u, v) coordinates
/// means rho_check(u, v) = sigma_check(u - (tau2 - tau1) v, v); transforming
/// in u (eta_1) and noting that v pairs with -eta_2 gives the multiplier.
SymbolGrid2 tau_transform(const SymbolGrid2& sigma, double tau1, double tau2);

enum class PairingPath { symbol_translation, operator_conjugation };

/// pi(w) T_sigma pi(w)^* phi for a three-parameter symbol.
/// symbol_translation builds T for sigma(x - w1, y - w1, xi - w2);
/// operator_conjugation applies pi(w)^*, T_sigma and pi(w) in turn.
SampledField conjugated_field(const SampledField& sigma3, const PhasePoint& w, PairingPath path);

/// <pi(w) T_sigma pi(w)^* phi, pi(z) phi>.
cplx conjugated_pairing(const SampledField& sigma3, const PhasePoint& w, const PhasePoint& z,
                        PairingPath path = PairingPath::symbol_translation);

}  // namespace locop
