#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace locop {

/// Fitted decay model of |value| against a radius r.
/// power: |v| ~ C <r>^{-N}, reported with slope = -N in log-log coordinates.
/// stretched: |v| ~ C exp(-c r^gamma).
struct DecayFit {
  std::string model;
  double amplitude = 0.0;
  double rate = 0.0;      ///< N for power, c for stretched
  double gamma = 0.0;     ///< only for stretched
  double slope = 0.0;     ///< log-log slope against <r>
  double residual = 0.0;  ///< RMS of log residuals
  std::size_t samples = 0;
};

/// <r> = (1 + r^2)^{1/2}.
inline double bracket(double r) { return std::sqrt(1.0 + r * r); }

/// Per-annulus maxima: bins [lo + k w, lo + (k+1) w) of the radius.
struct AnnulusProfile {
  std::vector<double> inner_radius;
  std::vector<double> max_value;
  std::vector<std::size_t> count;
};

AnnulusProfile annulus_max(std::span<const double> radius, std::span<const double> value,
                           double width = 1.0, double lo = 0.0);

/// Log-log least squares of value against <r>, restricted to r in [r_lo, r_hi]
/// and to values above floor_rel * max(value). Annuli with fewer than
/// min_count samples are dropped.
DecayFit fit_power_law(const AnnulusProfile& profile, double r_lo, double r_hi,
                       double floor_rel = 1e-13, std::size_t min_count = 5);

/// Same data, stretched-exponential model with gamma chosen on a grid.
DecayFit fit_stretched_exponential(const AnnulusProfile& profile, double r_lo, double r_hi,
                                   double floor_rel = 1e-13, std::size_t min_count = 5);

/// Inner-vs-outer annulus rule: decaying iff max over r in [3R/4, R]
/// <= threshold * max over r in [R/4, R/2].
struct AnnulusVerdict {
  double inner_max = 0.0;
  double outer_max = 0.0;
  double threshold = 0.1;
  bool decaying = false;
};

AnnulusVerdict annulus_verdict(std::span<const double> radius, std::span<const double> value,
                               double R, double threshold = 0.1);

}  // namespace locop
