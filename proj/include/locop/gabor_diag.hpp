#pragma once

#include <Eigen/Dense>
#include <vector>

#include "locop/decay.hpp"
#include "locop/lattice.hpp"
#include "locop/mod_norms.hpp"
#include "locop/phase.hpp"
#include "locop/quantizers.hpp"
#include "locop/tf.hpp"
#include "locop/weights.hpp"

namespace locop {

inline constexpr double kGaborCoefficientGuard = 4e7;

/// Rows: sources s, columns: targets t, entry <T pi(s) g1, pi(t) g2>.
/// Throws numeric_guard beyond 4e7 entries and lattice.margin when an atom
/// does not fit the grid.
Eigen::MatrixXcd gabor_coefficients(const LinearOperator& op, std::span<const PhasePoint> sources,
                                    std::span<const PhasePoint> targets, const WindowSpec& g1, const WindowSpec& g2);

/// M[z][w] = <T pi(z) g1, pi(w) g2> for z on the source lattice, w on the
/// target lattice. chi is kept for offset bookkeeping.
struct GaborMatrix {
  std::vector<PhasePoint> sources;
  std::vector<PhasePoint> targets;
  double step = 1.0;
  double target_radius = 0.0;
  BiLipschitzMap chi = BiLipschitzMap::identity();
  Eigen::MatrixXcd coeffs;
};

GaborMatrix gabor_matrix(const LinearOperator& op, const Lattice& sources, const Lattice& targets,
                         const BiLipschitzMap& chi, const WindowSpec& g1, const WindowSpec& g2);
/// Same lattice for z and w.
GaborMatrix gabor_matrix(const LinearOperator& op, const Lattice& lattice, const BiLipschitzMap& chi,
                         const WindowSpec& g1, const WindowSpec& g2);

/// Binned envelope of |M| against the offset u = w - chi(z).
struct EnvelopeProfile {
  std::vector<PhasePoint> offsets;  ///< bin centres, sorted lexicographically
  std::vector<double> envelope;     ///< max |M| per bin
  double step = 1.0;
  double weighted_sum = 0.0;        ///< sum envelope nu(offset) step^{2d}
  DecayFit power_fit;
  DecayFit stretched_fit;
  /// Envelope value of the bin holding w - chi(z), for dominance checks.
  [[nodiscard]] double at(const PhasePoint& offset) const;
};

EnvelopeProfile localization_envelope(const GaborMatrix& g, const Weight& nu);

/// Per-point radial profile with its decay verdict.
struct RadialProfile {
  std::vector<PhasePoint> points;
  std::vector<double> values;
  AnnulusProfile annuli;
  DecayFit power_fit;
  AnnulusVerdict verdict;
  double radius = 0.0;
};

/// D_K(z) = max over lattice w with |w - z|_inf <= a of
/// |<T pi(chi^{-1}(w)) g1, pi(z) g2>|, K = [-a, a]^{2d}.
RadialProfile weak_compactness_profile(const LinearOperator& op, const Lattice& lattice, const BiLipschitzMap& chi,
                                       double half_width, const WindowSpec& g1, const WindowSpec& g2);

/// sup over the whole w lattice of |<T pi(z) g, pi(w) g>|, per z.
RadialProfile uniform_sup_profile(const LinearOperator& op, const Lattice& lattice, const WindowSpec& g);

struct BoundednessReport {
  std::vector<double> ratios;  ///< one per nonzero test field
  double max_ratio = 0.0;
  double min_ratio = 0.0;
  std::size_t skipped = 0;
};

/// max over fields of ||T f||_{M^{p,q}_m} / ||f||_{M^{p,q}_{m,chi}}.
BoundednessReport boundedness_ratio(const LinearOperator& op, std::span<const SampledField> fields,
                                    const MixedNormSpec& spec, const BiLipschitzMap& chi, const Lattice& lattice,
                                    const WindowSpec& g);

/// Shifted Gaussians and Hermite functions (at least ten fields).
std::vector<SampledField> boundedness_test_set(const GridSpec& grid);

/// Where each source row of M peaks, relative to the image chi(z).
struct GraphConcentration {
  std::size_t considered = 0;  ///< sources with |z| <= radius
  std::size_t hits = 0;        ///< argmax_w |M[z][w]| within `tolerance` (sup norm) of chi(z)
  double fraction = 0.0;
  double worst_distance = 0.0;
  double tolerance = 0.0;
};

/// chi is taken from the matrix; tolerance defaults to one lattice step.
GraphConcentration graph_concentration(const GaborMatrix& g, double radius, double tolerance = -1.0);

/// Nonincreasing singular values of the coefficient matrix times step^{2d}.
std::vector<double> singular_values(const GaborMatrix& g);
/// Number of singular values above rel * s_1.
std::size_t epsilon_rank(std::span<const double> sv, double rel = 0.1);

/// Norm of the block B[w][z] = m(w) / m(z) M[z][w] step^{2d} restricted to
/// targets outside [-k, k]^{2d} (k < 0 keeps every target). p = q = 2 gives
/// the spectral norm, (1,1) the max column sum, (inf, inf) the max row sum;
/// other pairs use the bounds |B|_1^{1/p} |B|_inf^{1 - 1/p} (p = q) and
/// max(|B|_1, |B|_inf) (p != q).
double tail_norm(const GaborMatrix& g, double k_radius, double p, double q, const Weight& m);

}  // namespace locop
