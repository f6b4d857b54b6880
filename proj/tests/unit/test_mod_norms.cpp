#include <cmath>

#include "doctest.h"
#include "locop/mod_norms.hpp"

using namespace locop;

namespace {

PhaseSpaceSamples fill(const Lattice& lat, const std::function<cplx(const PhasePoint&)>& fn) {
  PhaseSpaceSamples s{lat, {}};
  for (std::size_t i = 0; i < lat.size(); ++i) s.values.push_back(fn(lat.point(i)));
  return s;
}

SampledField gauss2d(double scale = 1.0) {
  return SampledField::sample(GridSpec::cube(2, 16.0, 128), [scale](auto t) {
    return cplx(std::exp(-kPi * (t[0] * t[0] + t[1] * t[1]) / scale));
  });
}

}  // namespace

TEST_CASE("mixed norms on lattices") {
  const Lattice lat(0.5, 3.0);
  const auto c = fill(lat, [](const PhasePoint&) { return cplx(0.0, 2.5); });
  CHECK(mixed_norm(c, {2.0, 2.0, Weight::constant(2)}) == doctest::Approx(2.5 * 6.0).epsilon(1e-12));
  const Lattice fine(0.125, 6.0);
  const auto g = fill(fine, [](const PhasePoint& z) { return cplx(std::exp(-kPi * z.norm() * z.norm() / 2)); });
  CHECK(mixed_norm(g, {HUGE_VAL, 1.0, Weight::constant(2)}) == doctest::Approx(std::sqrt(2.0)).epsilon(0.02));
  const auto g2 = fill(Lattice(0.125, 12.0), [](const PhasePoint& z) {
    return cplx(std::exp(-kPi * z.norm() * z.norm() / 2));
  });
  for (auto [p, q] : {std::pair{1.0, 1.0}, {2.0, 1.0}, {2.0, 2.0}})
    CHECK(std::abs(mixed_norm(g, {p, q, Weight::constant(2)}) - mixed_norm(g2, {p, q, Weight::constant(2)})) <= 1e-8);
}

TEST_CASE("modulation norms") {
  const auto grid = GridSpec::cube(1, 16.0, 256);
  const auto win = WindowSpec::gaussian(1);
  const auto phi = win.atom(grid, PhasePoint{});
  const Lattice lat(0.25, 4.0);
  const auto id = BiLipschitzMap::identity();
  CHECK(std::abs(modulation_norm(phi, {2, 2, Weight::constant(2)}, id, win, lat) - 1.0) <= 1e-3);
  CHECK(modulation_norm(SampledField(grid), {1, 1, Weight::constant(2)}, id, win, lat) == 0.0);

  Eigen::MatrixXd a(2, 2);
  a << 1.0, 0.0, 0.5, 1.0;
  const auto chi = BiLipschitzMap::affine(a, Eigen::Vector2d::Zero());
  const Weight m = Weight::polynomial(1.0, 2);
  const auto f = win.atom(grid, PhasePoint::make(0.5, 0.25));
  const Lattice wide(0.25, 6.0);
  const double pulled = modulation_norm(f, {2, 2, m}, chi, win, wide);
  const double composed = pullback_jacobian_factor(chi, 2.0) * modulation_norm(f, {2, 2, pullback_weight(m, chi)}, id, win, wide);
  CHECK(std::abs(pulled - composed) <= 1e-6 * composed);
}

TEST_CASE("Sjostrand estimate") {
  const auto sigma = gauss2d();
  const double coarse = sjostrand_norm(sigma, Weight::constant(2), {0.5});
  const double fine = sjostrand_norm(sigma, Weight::constant(2), {0.25});
  CHECK(std::isfinite(coarse));
  CHECK(std::abs(fine - coarse) <= 0.05 * coarse);
  CHECK(sjostrand_norm(sigma, Weight::polynomial(1.0, 2)) >= coarse);
  // Constant symbols: the estimate barely depends on the truncation.
  const auto one_small = SampledField::sample(GridSpec::cube(2, 16.0, 128), [](auto) { return cplx(1.0); });
  const auto one_large = SampledField::sample(GridSpec::cube(2, 32.0, 256), [](auto) { return cplx(1.0); });
  const double a = sjostrand_norm(one_small, Weight::constant(2)), b = sjostrand_norm(one_large, Weight::constant(2));
  CHECK(std::isfinite(a));
  CHECK(std::abs(a - b) <= 0.05 * b);
  CHECK(modulation_sup_norm(sigma) > 0.0);
}

TEST_CASE("amalgam norm") {
  const auto sigma = gauss2d();
  const Weight nu1 = Weight::polynomial(1.0, 2);
  const double half = amalgam_norm(sigma, nu1, 0.5, {0.5});
  CHECK(std::isfinite(half));
  CHECK(std::abs(amalgam_norm(sigma, nu1, 0.5, {0.25}) - half) <= 0.05 * half);
  CHECK(amalgam_norm(sigma, nu1, 0.01) > half);
  // Trivial weight: the Sjostrand estimate of the transformed symbol.
  const double plain = amalgam_norm(sigma, Weight::constant(2), 0.5);
  CHECK(plain == doctest::Approx(sjostrand_norm(fourier(sigma, +1), Weight::constant(2))).epsilon(1e-12));
}
