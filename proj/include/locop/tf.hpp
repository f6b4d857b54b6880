#pragma once

#include <optional>
#include <span>
#include <vector>

#include "locop/decay.hpp"
#include "locop/grid.hpp"
#include "locop/lattice.hpp"

namespace locop {

/// L^2-normalized Hermite function of order k for the e^{-pi x^2} scaling;
/// order 0 is 2^{1/4} e^{-pi x^2}.
double hermite_function(int order, double x);

/// Analysis/synthesis window: the standard Gaussian 2^{d/4} e^{-pi |x|^2},
/// a tensor product of Hermite functions, or imported samples.
class WindowSpec {
 public:
  enum class Kind { gaussian, hermite, sampled };

  static WindowSpec gaussian(int dim = 1);
  static WindowSpec hermite(std::vector<int> orders);
  static WindowSpec sampled(SampledField samples);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double norm() const { return norm_; }

  /// Samples of g(t - x) on the grid.
  [[nodiscard]] std::vector<cplx> shifted_samples(const GridSpec& grid, std::span<const double> x) const;
  /// Samples of pi(z) g.
  [[nodiscard]] SampledField atom(const GridSpec& grid, const PhasePoint& z) const;

 private:
  Kind kind_ = Kind::gaussian;
  int dim_ = 1;
  std::vector<int> orders_;
  std::optional<SampledField> samples_;
  double norm_ = 1.0;
};

/// Half-width kept free between an analytic window atom and the grid edge.
inline constexpr double kWindowMargin = 3.5;

/// Rejects phase-space points whose window atom would not fit on the grid.
void require_atom_margin(const GridSpec& grid, const PhasePoint& z, double margin = kWindowMargin);

/// pi(z) f = M_xi T_x f. Translation uses a Fourier phase ramp; shifts beyond
/// a quarter of the grid extent (in x or xi) are rejected.
SampledField tf_shift(const SampledField& f, const PhasePoint& z);

/// Adjoint pi(z)^* f (y) = e^{-2 pi i xi (y + x)} f(y + x).
SampledField tf_shift_adjoint(const SampledField& f, const PhasePoint& z);

/// Precomputed STFT evaluation for a fixed window and point set: points are
/// grouped by position, each group keeps its conjugated window samples and,
/// when every frequency sits on the dual grid, the FFT bins to read.
class StftPlan {
 public:
  StftPlan(const GridSpec& grid, const WindowSpec& g, std::span<const PhasePoint> points);

  [[nodiscard]] std::vector<cplx> apply(const SampledField& f) const;
  [[nodiscard]] std::size_t size() const { return count_; }

 private:
  struct Group {
    std::vector<std::size_t> members;
    std::vector<std::size_t> bins;  ///< empty unless the FFT path applies
    std::vector<cplx> window;       ///< conj g(t - x); empty when not cached
  };
  GridSpec grid_;
  WindowSpec window_;
  std::vector<PhasePoint> points_;
  std::vector<Group> groups_;
  std::size_t count_ = 0;
};

/// V_g f(z) = <f, pi(z) g> for every point. Points sharing x reuse one
/// windowed product; when their frequencies sit on the dual grid one FFT
/// serves the whole slice, otherwise the sum is evaluated directly.
std::vector<cplx> stft(const SampledField& f, const WindowSpec& g, std::span<const PhasePoint> points);

/// Lattice Riemann sum of the reproducing formula
///   f ~ <g2, g1>^{-1} sum_z c(z) pi(z) g2 alpha^{2d}.
/// Accumulates in the given point order.
SampledField synthesize(std::span<const cplx> coeffs, std::span<const PhasePoint> points,
                        const WindowSpec& g1, const WindowSpec& g2, double alpha, const GridSpec& grid);

/// Sup of |V_phi f| over annuli |z| in [r, r+1) of a lattice, with a
/// quadratic fit of log s(r) and a monotone-trend flag.
struct M0Profile {
  std::vector<double> radii;
  std::vector<double> sup;
  std::vector<bool> untrusted;  ///< annulus leaves the truncated lattice
  double fit_c0 = 0.0, fit_c1 = 0.0, fit_c2 = 0.0;  ///< log s ~ c0 + c1 r + c2 r^2
  bool monotone = true;
  AnnulusVerdict verdict;
};

M0Profile m0_decay_profile(const SampledField& f, const Lattice& lattice, std::span<const double> radii);

}  // namespace locop
