#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "locop/tf.hpp"

using namespace locop;

namespace {
GridSpec default_grid() { return GridSpec::cube(1, 16.0, 256); }
}  // namespace

TEST_CASE("time-frequency shifts") {
  const auto g = default_grid();
  const auto phi = WindowSpec::gaussian(1).atom(g, PhasePoint{});
  CHECK(max_abs_diff(tf_shift(phi, PhasePoint{}), phi) == 0.0);
  CHECK(std::abs(norm_lp(tf_shift(phi, PhasePoint::make(1, 2)), 2) - 1.0) <= 1e-10);
  const auto z = PhasePoint::make(1, 0), w = PhasePoint::make(0, 1);
  const auto lhs = tf_shift(tf_shift(phi, w), z);
  const auto rhs = tf_shift(phi, z + w);
  CHECK(std::abs(std::abs(inner_product(lhs, rhs)) - 1.0) <= 1e-8);
  const auto there = tf_shift(phi, PhasePoint::make(0.5, -0.75));
  CHECK(max_abs_diff(tf_shift_adjoint(there, PhasePoint::make(0.5, -0.75)), phi) <= 1e-12);
}

TEST_CASE("window atoms match shifts of the window") {
  const auto g = default_grid();
  const auto win = WindowSpec::gaussian(1);
  const auto z = PhasePoint::make(-1.25, 0.5);
  CHECK(max_abs_diff(win.atom(g, z), tf_shift(win.atom(g, PhasePoint{}), z)) <= 1e-12);
  CHECK(hermite_function(0, 0.0) == doctest::Approx(std::pow(2.0, 0.25)));
  const auto h3 = WindowSpec::hermite({3}).atom(g, PhasePoint{});
  CHECK(std::abs(norm_lp(h3, 2) - 1.0) <= 1e-10);
}

TEST_CASE("closed-form STFT of the Gaussian") {
  const auto g = default_grid();
  const auto win = WindowSpec::gaussian(1);
  const auto phi = win.atom(g, PhasePoint{});
  const std::vector<PhasePoint> pts = {PhasePoint{}, PhasePoint::make(1, 0), PhasePoint::make(0.3, 0.7)};
  const auto v = stft(phi, win, pts);
  CHECK(std::abs(v[0] - 1.0) <= 1e-10);
  CHECK(std::abs(std::abs(v[1]) - 0.2078795763507619) <= 1e-8);
  CHECK(std::abs(std::abs(v[2]) - std::exp(-kPi * 0.58 / 2)) <= 1e-8);
}

TEST_CASE("plan path agrees with the direct path") {
  const auto g = default_grid();
  const auto win = WindowSpec::hermite({1});
  const auto f = WindowSpec::gaussian(1).atom(g, PhasePoint::make(0.4, -0.2));
  // On-grid frequencies (multiples of 1/16) use FFT bins; the others are summed directly.
  std::vector<PhasePoint> on = {PhasePoint::make(0.5, 0.25), PhasePoint::make(-1, -0.5)};
  std::vector<PhasePoint> off = {PhasePoint::make(0.5, 0.25 + 1e-7), PhasePoint::make(-1, -0.5 + 1e-7)};
  const auto a = StftPlan(g, win, on).apply(f);
  const auto b = stft(f, win, off);
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) <= 1e-6);
}

TEST_CASE("Parseval frame and reproducing formula") {
  const auto g = default_grid();
  const auto win = WindowSpec::gaussian(1);
  const Lattice lat(0.25, 8.0);
  const auto pts = lat.points();
  for (const auto& f : {win.atom(g, PhasePoint{}), WindowSpec::hermite({1}).atom(g, PhasePoint{})}) {
    const auto c = stft(f, win, pts);
    double e = 0.0;
    for (const auto& v : c) e += std::norm(v);
    CHECK(std::abs(e * 0.0625 - 1.0) <= 1e-4);
    CHECK(relative_l2_error(synthesize(c, pts, win, win, 0.25, g), f) <= 1e-5);
  }
  const std::vector<cplx> zero(pts.size());
  CHECK(norm_lp(synthesize(zero, pts, win, win, 0.25, g), HUGE_VAL) == 0.0);
}

TEST_CASE("M0 decay profile") {
  const auto g = GridSpec::cube(1, 16.0, 256);
  const Lattice lat(0.25, 4.0);
  const std::vector<double> radii = {0, 0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4};
  const auto p = m0_decay_profile(WindowSpec::gaussian(1).atom(g, PhasePoint{}), lat, radii);
  CHECK(p.fit_c2 == doctest::Approx(-kPi / 2).epsilon(0.1));
  CHECK(p.verdict.decaying);
  // The constant field: samples of 1 on a wide grid, lattice well inside it.
  const auto wide = GridSpec::cube(1, 64.0, 1024);
  const auto one = SampledField::sample(wide, [](auto) { return cplx(1.0); });
  const auto q = m0_decay_profile(one, Lattice(0.25, 4.0), radii);
  CHECK(*std::min_element(q.sup.begin(), q.sup.end()) >= 0.5);
  CHECK_FALSE(q.verdict.decaying);
  const auto z = m0_decay_profile(SampledField(g), lat, radii);
  CHECK(*std::max_element(z.sup.begin(), z.sup.end()) == 0.0);
}
