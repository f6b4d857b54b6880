#include <cmath>
#include <random>

#include "doctest.h"
#include "locop/error.hpp"
#include "locop/fft.hpp"
#include "locop/grid.hpp"

using namespace locop;

namespace {

GridSpec default_grid() { return GridSpec::cube(1, 16.0, 256); }

SampledField phi(const GridSpec& g) {
  return SampledField::sample(g, [](auto t) { return cplx(std::pow(2.0, 0.25) * std::exp(-kPi * t[0] * t[0])); });
}

// Random field with a Gaussian envelope so that it decays on the grid.
SampledField random_decaying(const GridSpec& g, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n;
  SampledField f(g);
  for (std::size_t i = 0; i < f.size(); ++i) {
    double r2 = 0.0;
    std::size_t flat = i;
    for (int a = g.dim() - 1; a >= 0; --a) {
      const double t = g.coord(a, flat % g.samples(a));
      r2 += t * t;
      flat /= g.samples(a);
    }
    f[i] = cplx(n(rng), n(rng)) * std::exp(-0.5 * r2);
  }
  return f;
}

}  // namespace

TEST_CASE("gaussian is its own Fourier transform") {
  const auto g = default_grid();
  const auto f = phi(g);
  const auto hat = fourier(f, -1);
  CHECK(hat.grid().extent(0) == doctest::Approx(16.0));
  double worst = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) worst = std::max(worst, std::abs(hat[k] - f[k]));
  CHECK(worst <= 1e-10);
}

TEST_CASE("inverse after forward is the identity") {
  for (int dim : {1, 2, 3}) {
    const auto g = GridSpec::cube(dim, 8.0, dim == 3 ? 16 : 64);
    const auto f = random_decaying(g, 3 + dim);
    CHECK(max_abs_diff(fourier(fourier(f, -1), +1), f) <= 1e-12);
  }
}

TEST_CASE("Plancherel") {
  const auto g = GridSpec({8.0, 4.0}, {64, 32});
  const auto f = random_decaying(g, 11);
  CHECK(std::abs(norm_lp(fourier(f, -1), 2) / norm_lp(f, 2) - 1.0) <= 1e-12);
}

TEST_CASE("single-axis transform composes to the full transform") {
  const auto g = GridSpec({8.0, 4.0}, {32, 16});
  const auto f = random_decaying(g, 5);
  const int a0[] = {0}, a1[] = {1};
  const auto two_steps = fourier_axes(fourier_axes(f, a0, -1), a1, -1);
  CHECK(max_abs_diff(two_steps, fourier(f, -1)) <= 1e-12);
}

TEST_CASE("inner products and norms") {
  const auto g = default_grid();
  const auto f = phi(g);
  CHECK(std::abs(inner_product(f, f) - 1.0) <= 1e-10);
  const auto h = random_decaying(g, 9);
  CHECK(std::abs(inner_product(f, h) - std::conj(inner_product(h, f))) <= 1e-15);
  CHECK(inner_product(f, SampledField(g)) == cplx(0.0));
  CHECK(std::abs(norm_lp(f, 2) - 1.0) <= 1e-10);
  for (double p : {1.0, 2.0, 3.5, HUGE_VAL}) {
    CHECK(norm_lp(SampledField(g), p) == 0.0);
    CHECK(norm_lp(cplx(0, -3) * h, p) == doctest::Approx(3.0 * norm_lp(h, p)).epsilon(1e-13));
  }
}

TEST_CASE("translation and modulation") {
  const auto g = default_grid();
  const auto f = phi(g);
  const double shift[] = {1.5};
  const auto moved = translate(f, shift);
  const auto expect = SampledField::sample(g, [](auto t) {
    return cplx(std::pow(2.0, 0.25) * std::exp(-kPi * (t[0] - 1.5) * (t[0] - 1.5)));
  });
  CHECK(max_abs_diff(moved, expect) <= 1e-12);
  const double xi[] = {0.75};
  CHECK(std::abs(norm_lp(modulate(f, xi), 2) - 1.0) <= 1e-10);
}

TEST_CASE("grid metadata") {
  const auto g = GridSpec::cube(2, 16.0, 256);
  CHECK(g.size() == 65536);
  CHECK(g.stride(0) == 256);
  CHECK(g.stride(1) == 1);
  CHECK(g.coord(0, 0) == -8.0);
  CHECK(g.freq(0, 128) == 0.0);
  std::size_t j = 0;
  CHECK(g.node_index(0, 0.0, j));
  CHECK(j == 128);
  CHECK_FALSE(g.node_index(0, 0.03, j));
  CHECK_THROWS_AS(GridSpec({1.0}, {100}), Error);
}

TEST_CASE("raw DFT agrees with a direct sum") {
  std::vector<cplx> v(12);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = cplx(std::cos(0.3 * i), std::sin(1.1 * i));
  const auto ref = v;
  dft_inplace(v, -1);
  for (std::size_t k = 0; k < v.size(); ++k) {
    cplx s = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) s += ref[j] * std::polar(1.0, -kTwoPi * double(j * k) / 12.0);
    CHECK(std::abs(s - v[k]) <= 1e-12);
  }
}
