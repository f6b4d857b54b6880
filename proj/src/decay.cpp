#include "locop/decay.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace locop {
namespace {

struct Samples {
  std::vector<double> r;
  std::vector<double> v;
};

Samples select(const AnnulusProfile& p, double r_lo, double r_hi, double floor_rel, std::size_t min_count) {
  double vmax = 0.0;
  for (double v : p.max_value) vmax = std::max(vmax, v);
  Samples s;
  for (std::size_t k = 0; k < p.inner_radius.size(); ++k) {
    const double r = p.inner_radius[k];
    if (r < r_lo - 1e-12 || r > r_hi + 1e-12) continue;
    if (p.count[k] < min_count) continue;
    if (!(p.max_value[k] > floor_rel * vmax) || p.max_value[k] <= 0.0) continue;
    s.r.push_back(r);
    s.v.push_back(p.max_value[k]);
  }
  return s;
}

// Least squares y = a + b t; returns RMS residual.
double linear_fit(const std::vector<double>& t, const std::vector<double>& y, double& a, double& b) {
  const double n = static_cast<double>(t.size());
  double st = 0, sy = 0, stt = 0, sty = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double den = n * stt - st * st;
  b = den != 0.0 ? (n * sty - st * sy) / den : 0.0;
  a = (sy - b * st) / n;
  double res = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) res += std::pow(y[i] - a - b * t[i], 2);
  return std::sqrt(res / n);
}

}  // namespace

AnnulusProfile annulus_max(std::span<const double> radius, std::span<const double> value, double width,
                           double lo) {
  AnnulusProfile p;
  double rmax = lo;
  for (double r : radius) rmax = std::max(rmax, r);
  const std::size_t bins = static_cast<std::size_t>(std::floor((rmax - lo) / width)) + 1;
  p.inner_radius.resize(bins);
  p.max_value.assign(bins, 0.0);
  p.count.assign(bins, 0);
  for (std::size_t k = 0; k < bins; ++k) p.inner_radius[k] = lo + width * static_cast<double>(k);
  for (std::size_t i = 0; i < radius.size(); ++i) {
    if (radius[i] < lo) continue;
    // Small tolerance keeps lattice points with |z| = r in the bin starting at r.
    const auto k = static_cast<std::size_t>(std::floor((radius[i] - lo) / width + 1e-9));
    if (k >= bins) continue;
    p.max_value[k] = std::max(p.max_value[k], value[i]);
    ++p.count[k];
  }
  return p;
}

DecayFit fit_power_law(const AnnulusProfile& profile, double r_lo, double r_hi, double floor_rel,
                       std::size_t min_count) {
  const Samples s = select(profile, r_lo, r_hi, floor_rel, min_count);
  DecayFit fit;
  fit.model = "power";
  fit.samples = s.r.size();
  if (s.r.size() < 2) {
    fit.slope = std::numeric_limits<double>::quiet_NaN();
    return fit;
  }
  std::vector<double> t, y;
  for (std::size_t i = 0; i < s.r.size(); ++i) {
    t.push_back(std::log(bracket(s.r[i])));
    y.push_back(std::log(s.v[i]));
  }
  double a = 0, b = 0;
  fit.residual = linear_fit(t, y, a, b);
  fit.amplitude = std::exp(a);
  fit.slope = b;
  fit.rate = -b;
  return fit;
}

DecayFit fit_stretched_exponential(const AnnulusProfile& profile, double r_lo, double r_hi, double floor_rel,
                                   std::size_t min_count) {
  const Samples s = select(profile, r_lo, r_hi, floor_rel, min_count);
  DecayFit best;
  best.model = "stretched";
  best.samples = s.r.size();
  best.residual = std::numeric_limits<double>::infinity();
  if (s.r.size() < 3) return best;
  std::vector<double> y;
  for (double v : s.v) y.push_back(std::log(v));
  for (int g = 0; g <= 50; ++g) {
    const double gamma = 0.5 + 0.05 * g;
    std::vector<double> t;
    for (double r : s.r) t.push_back(std::pow(r, gamma));
    double a = 0, b = 0;
    const double res = linear_fit(t, y, a, b);
    if (res < best.residual) {
      best.residual = res;
      best.amplitude = std::exp(a);
      best.rate = -b;
      best.gamma = gamma;
    }
  }
  // Companion log-log slope on the same samples.
  std::vector<double> t;
  for (double r : s.r) t.push_back(std::log(bracket(r)));
  double a = 0, b = 0;
  linear_fit(t, y, a, b);
  best.slope = b;
  return best;
}

AnnulusVerdict annulus_verdict(std::span<const double> radius, std::span<const double> value, double R,
                               double threshold) {
  AnnulusVerdict v;
  v.threshold = threshold;
  const double eps = 1e-9;
  for (std::size_t i = 0; i < radius.size(); ++i) {
    const double r = radius[i];
    if (r >= R / 4 - eps && r <= R / 2 + eps) v.inner_max = std::max(v.inner_max, value[i]);
    if (r >= 3 * R / 4 - eps && r <= R + eps) v.outer_max = std::max(v.outer_max, value[i]);
  }
  v.decaying = v.outer_max <= threshold * v.inner_max;
  return v;
}

}  // namespace locop
