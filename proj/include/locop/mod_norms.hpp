#pragma once

#include <vector>

#include "locop/grid.hpp"
#include "locop/lattice.hpp"
#include "locop/phase.hpp"
#include "locop/tf.hpp"
#include "locop/weights.hpp"

namespace locop {

/// Values on a truncated phase-space lattice, in lattice order.
struct PhaseSpaceSamples {
  Lattice lattice;
  std::vector<cplx> values;
};

struct MixedNormSpec {
  double p = 2.0;
  double q = 2.0;
  Weight weight = Weight::constant(2);
};

/// Inner L^p over x, outer L^q over xi, of |F| m. Finite exponents use
/// trapezoid lattice weights (alpha, alpha/2 at the two truncation ends);
/// infinite ones take the sup.
double mixed_norm(const PhaseSpaceSamples& s, const MixedNormSpec& spec);

/// ||V_g f o chi^{-1}||_{L^{p,q}_m}: the target lattice is sampled directly
/// and V_g f is evaluated at chi^{-1} of each node.
double modulation_norm(const SampledField& f, const MixedNormSpec& spec, const BiLipschitzMap& chi,
                       const WindowSpec& g, const Lattice& lattice);

/// For affine chi and p = q: |det A|^{1/p}, the factor relating the pullback
/// norm to the norm with weight m o chi.
double pullback_jacobian_factor(const BiLipschitzMap& chi, double p);

/// m o chi as a Weight (affine chi without offset).
Weight pullback_weight(const Weight& m, const BiLipschitzMap& chi);

struct SjostrandOptions {
  double step = 0.5;                ///< lattice step in z and zeta
  double max_points = 1e8;          ///< guard on (#z nodes) x (#zeta nodes)
  double negligible = 1e-15;        ///< zeta slices below this relative size are skipped
};

struct SjostrandEstimate {
  double value = 0.0;        ///< sum_zeta sup_z |V sigma(z, zeta)| nu(zeta) step^D
  double sup = 0.0;          ///< sup over (z, zeta): the M^infinity surrogate
  std::size_t zeta_nodes = 0;
  std::size_t z_nodes = 0;
  double step = 0.0;
};

/// Gaussian-window estimate of the M^{infinity,1}_{1 x nu} norm of a symbol on
/// R^D. Uses |V sigma(z, zeta)| = |F^{-1}[sigma^ Phi^(. - zeta)](z)|.
SjostrandEstimate sjostrand_estimate(const SampledField& sigma, const Weight& nu, const SjostrandOptions& opt = {});
double sjostrand_norm(const SampledField& sigma, const Weight& nu, const SjostrandOptions& opt = {});
/// sup |V sigma| only.
double modulation_sup_norm(const SampledField& sigma, const SjostrandOptions& opt = {});

/// Sjostrand estimate of the inverse Fourier transform of sigma with weight
/// nu o tau_scaling(tau), tau in (0, 1).
double amalgam_norm(const SampledField& sigma, const Weight& nu, double tau, const SjostrandOptions& opt = {});

}  // namespace locop
