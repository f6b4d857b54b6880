#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "locop/decay.hpp"
#include "locop/grid.hpp"
#include "locop/lattice.hpp"
#include "locop/weights.hpp"

namespace locop {

/// One-dimensional ingredients of the frequency partition. The base function
/// is the indicator of [0, 1) smoothed by a normalized C^infinity bump of
/// radius r; its integer translates sum to one. The band window is its
/// average over unit shifts t in [0, 1).
class PartitionOfUnity {
 public:
  explicit PartitionOfUnity(int dim, double radius = 0.25);

  [[nodiscard]] int dim() const { return dim_; }
  [[nodiscard]] double radius() const { return radius_; }

  /// Smoothed indicator; support [-r, 1 + r].
  [[nodiscard]] double base(double s) const;
  /// Band window profile q(s) = int_0^1 base(s - t) dt; support [-r, 2 + r].
  [[nodiscard]] double band(double s) const;
  /// Tensor products over dim axes.
  [[nodiscard]] double base(std::span<const double> s) const;
  [[nodiscard]] double band(std::span<const double> s) const;
  /// Lower and upper edge of the per-axis band support relative to k.
  [[nodiscard]] double band_lo() const { return -radius_; }
  [[nodiscard]] double band_hi() const { return 2.0 + radius_; }

  /// Mollifier CDF and its antiderivative (exactly 0 / 1 and 0 / s outside [-r, r]).
  [[nodiscard]] double cdf(double s) const;
  [[nodiscard]] double cdf_integral(double s) const;

 private:
  int dim_;
  double radius_;
  double bump_mass_;
};

struct AtomEntry {
  std::array<long, 3> k{};
  double sup_norm = 0.0;
  double ledger = 0.0;           ///< ledger_weight(k) * sup_norm
  double spectral_mass = 0.0;    ///< L^1 mass of the windowed transform
  double out_of_band = 0.0;      ///< relative transform mass outside the band box
};

struct AtomDecomposition {
  std::vector<AtomEntry> atoms;  ///< sorted lexicographically by k
  double residual = 0.0;         ///< ||sum sigma_k - sigma||_inf / ||sigma||_inf
  double total_ledger = 0.0;
  double band_lo = 0.0, band_hi = 0.0;

  /// Ledger sum over |k|_inf <= k_range.
  [[nodiscard]] double ledger_sum(long k_range) const;
  [[nodiscard]] long max_index() const;
};

/// Called once per kept atom, in sorted k order.
using AtomSink = std::function<void(const AtomEntry&, const SampledField&)>;

/// sigma = sum_k sigma_k with sigma_k^ = sigma^ psi_k, psi_k(eta) = band(eta - k).
/// Requires a frequency spacing of at most 1/8 (atoms.coarse_grid). Atoms
/// whose windowed transform carries less than 1e-16 of the total L^1 mass
/// are skipped. Atoms are streamed to the optional sink and not retained.
AtomDecomposition decompose(const SampledField& sigma, const Weight& ledger_weight, const PartitionOfUnity& pou,
                            const AtomSink& sink = {});

/// Random trigonometric polynomial on a 3-D symbol grid whose frequencies are
/// grid frequencies inside box_lo + [0, box_width]^3 (xi frequencies are
/// multiples of the xi-axis frequency spacing). Coefficients are complex
/// normal from a seeded generator.
SampledField band_symbol(const GridSpec& grid, std::array<double, 3> box_lo, double box_width, std::size_t terms,
                         std::uint64_t seed);

/// Relative transform mass outside box_lo + [0, box_width]^D.
double out_of_box_mass(const SampledField& sigma, std::span<const double> box_lo, double box_width);

struct DerivativeDecayReport {
  int order = 0;
  int exponent = 0;
  double constant = 0.0;  ///< sup_{|x| in [2, 6]} |d^a T phi(x)| <x>^N / ||sigma||_inf
  DecayFit fit;           ///< log-log fit of |d^a T phi| against <x> on [2, 6]
  bool pass = false;      ///< constant finite and slope <= -N + 0.5
};

/// Decay of derivatives of T_sigma phi for a band-limited three-parameter
/// symbol, by spectral differentiation; one report per (order, exponent),
/// order-major. Throws band.violated when more than 1e-10 of the transform
/// mass lies outside the declared box.
std::vector<DerivativeDecayReport> derivative_decay_check(const SampledField& sigma3, std::span<const int> orders,
                                                          std::span<const int> exponents,
                                                          std::span<const double> box_lo, double box_width);

struct PairingProfile {
  std::vector<PhasePoint> points;
  std::vector<double> values;   ///< sup over sampled w of |<pi(w) T pi(w)^* phi, pi(z) phi>|
  PhasePoint peak;              ///< lattice argmax
  PhasePoint center;            ///< the predicted centre (-k3, k1 + k2)
  DecayFit fit;                 ///< fit against <z - center> on the fit annulus
  int exponent = 0;
  bool pass = false;            ///< slope <= -N + 0.5
};

/// Conjugated pairing profile over a lattice for a symbol declared in band k.
/// One kernel is built; the w samples only conjugate it.
PairingProfile pairing_decay(const SampledField& sigma3, std::array<long, 3> band_index, const Lattice& lattice,
                             int exponent, std::span<const PhasePoint> w_samples);

/// Offset d maximizing sum_z a(z) b(z + d) over lattice shifts |d|_inf <= reach.
PhasePoint correlation_offset(const PairingProfile& a, const PairingProfile& b, const Lattice& lattice, long reach);

struct RayVerdict {
  double direction_x = 0.0, direction_xi = 0.0;
  double inner_max = 0.0, outer_max = 0.0;
  bool decaying = false;
};

struct TranslationReport {
  std::vector<RayVerdict> rays;
  std::vector<RayVerdict> atom_rays;  ///< derivative decay of the largest atoms
  double reach = 0.0;
  bool pass = false;
};

/// Decay of <sigma(. - z1, . - z1, . - z2), b> along 8 rays z = t (cos, sin),
/// t in [0, L/4], for six fixed test functions b, plus gradient decay of the
/// leading atoms along the same rays. Inner max over t <= T/2 against outer
/// max over t >= 3T/4, threshold 0.1.
TranslationReport translation_vanishing_check(const SampledField& sigma3, const PartitionOfUnity& pou);

}  // namespace locop
