#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "locop/atomic.hpp"
#include "locop/error.hpp"
#include "locop/quantizers.hpp"

using namespace locop;

TEST_CASE("partition of unity") {
  const PartitionOfUnity pou(2);
  CHECK(pou.band_lo() == -0.25);
  CHECK(pou.band_hi() == 2.25);
  for (double s = -3.0; s <= 3.0; s += 0.0625) {
    double base = 0.0, band = 0.0;
    for (int k = -6; k <= 6; ++k) {
      base += pou.base(s - k);
      band += pou.band(s - k);
    }
    CHECK(base == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(band == doctest::Approx(1.0).epsilon(1e-10));
  }
  CHECK(pou.band(-0.26) == 0.0);
  CHECK(pou.band(2.26) == 0.0);
  CHECK(pou.base(0.5) == 1.0);
}

TEST_CASE("decomposition of a Gaussian on R^2") {
  const auto sigma = SampledField::sample(GridSpec::cube(2, 8.0, 64), [](auto t) {
    return cplx(std::exp(-kPi * (t[0] * t[0] + t[1] * t[1])));
  });
  std::size_t streamed = 0;
  const auto dec = decompose(sigma, Weight::polynomial(1.0, 2), PartitionOfUnity(2),
                             [&](const AtomEntry&, const SampledField&) { ++streamed; });
  CHECK(streamed == dec.atoms.size());
  CHECK(dec.residual <= 1e-8);
  for (const auto& a : dec.atoms) CHECK(a.out_of_band <= 1e-10);
  // Atoms sit around the origin and the ledger converges.
  CHECK(dec.ledger_sum(dec.max_index()) == doctest::Approx(dec.total_ledger).epsilon(1e-12));

  CHECK_THROWS_AS(decompose(SampledField::sample(GridSpec::cube(2, 4.0, 32), [](auto) { return cplx(1.0); }),
                            Weight::constant(2), PartitionOfUnity(2)),
                  Error);
}

TEST_CASE("band-limited symbols only touch neighbouring bands") {
  const auto sigma = band_symbol(GridSpec::cube(3, 8.0, 64), {-0.2, -0.2, -0.2}, 0.4, 6, 7);
  const double lo[] = {-0.2, -0.2, -0.2};
  CHECK(out_of_box_mass(sigma, lo, 0.4) <= 1e-12);
  const auto dec = decompose(sigma, Weight::constant(3), PartitionOfUnity(3));
  CHECK(dec.residual <= 1e-8);
  CHECK(!dec.atoms.empty());
  double peak = 0.0;
  for (const auto& a : dec.atoms) peak = std::max(peak, a.sup_norm);
  // Bands reach from k - 0.25 to k + 2.25, so only k in {-2, -1, 0} meet the support.
  for (const auto& a : dec.atoms) {
    if (a.sup_norm <= 1e-12 * peak) continue;
    for (long k : a.k) {
      CHECK(k >= -2);
      CHECK(k <= 0);
    }
  }
}

TEST_CASE("derivative decay of band-limited symbols") {
  const GridSpec g3 = symbol_grid3(GridSpec::cube(1, 16.0, 256), 128);
  const auto sigma = band_symbol(g3, {-0.25, -0.25, -0.25}, 0.5, 5, 3);
  const int orders[] = {0, 1};
  const int exponents[] = {2, 4};
  const double lo[] = {-0.25, -0.25, -0.25};
  const auto reps = derivative_decay_check(sigma, orders, exponents, lo, 2.5);
  REQUIRE(reps.size() == 4);
  for (const auto& r : reps) CHECK(r.pass);
  CHECK(reps[1].constant >= reps[0].constant);
  CHECK(reps[3].constant >= reps[2].constant);

  const double tiny[] = {-0.05, -0.05, -0.05};
  CHECK_THROWS_AS(derivative_decay_check(sigma, orders, exponents, tiny, 0.1), Error);
}

TEST_CASE("zero symbol") {
  const GridSpec g3 = symbol_grid3(GridSpec::cube(1, 16.0, 256), 128);
  const SampledField zero(g3);
  const auto dec = decompose(zero, Weight::constant(3), PartitionOfUnity(3));
  CHECK(dec.atoms.empty());
  CHECK(dec.residual == 0.0);
  const int orders[] = {0};
  const int exponents[] = {2};
  const double lo[] = {-0.25, -0.25, -0.25};
  const auto rep = derivative_decay_check(zero, orders, exponents, lo, 0.5);
  CHECK(rep[0].pass);
  const std::vector<PhasePoint> w = {PhasePoint{}};
  const auto prof = pairing_decay(zero, {0, 0, 0}, Lattice(0.5, 4.5), 2, w);
  for (double v : prof.values) CHECK(v == 0.0);
}

TEST_CASE("translation vanishing") {
  const GridSpec cube = GridSpec::cube(3, 8.0, 64);
  const PartitionOfUnity pou(3);
  const auto gauss = SampledField::sample(cube, [](auto t) {
    return cplx(std::exp(-kPi * (t[0] * t[0] + t[1] * t[1] + t[2] * t[2])));
  });
  CHECK(translation_vanishing_check(gauss, pou).pass);
  // Constant along the diagonal x = y: no decay in that direction.
  const auto ridge = SampledField::sample(cube, [](auto t) {
    return cplx(std::exp(-kPi * (t[0] - t[1]) * (t[0] - t[1])));
  });
  CHECK_FALSE(translation_vanishing_check(ridge, pou).pass);
}
