#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "locop/atomic.hpp"
#include "locop/error.hpp"
#include "locop/gabor_diag.hpp"
#include "locop/mod_norms.hpp"
#include "locop/quantizers.hpp"
#include "locop/tf.hpp"

using namespace locop;

namespace {

const GridSpec& op_grid() {
  static const GridSpec g = GridSpec::cube(1, 16.0, 256);
  return g;
}

SymbolGrid2 sym2(const std::function<double(double, double)>& fn, bool constant_like = false,
                 const GridSpec& op = op_grid()) {
  return {SampledField::sample(symbol_grid2(op), [&](auto t) { return cplx(fn(t[0], t[1])); }), constant_like};
}

std::vector<SampledField> probes() {
  const auto win = WindowSpec::gaussian(1);
  return {win.atom(op_grid(), PhasePoint{}), win.atom(op_grid(), PhasePoint::make(1.0, -0.5)),
          WindowSpec::hermite({2}).atom(op_grid(), PhasePoint::make(-0.5, 0.25))};
}

}  // namespace

TEST_CASE("symbol one quantizes to the identity") {
  const auto one = sym2([](double, double) { return 1.0; });
  for (double tau : {0.0, 0.25, 0.5, 0.7, 1.0})
    for (const auto& f : probes()) CHECK(relative_l2_error(kernel_tau(one, tau).apply(f), f) <= 1e-10);
}

TEST_CASE("multipliers") {
  const auto a = [](double x) { return std::exp(-kPi * x * x / 4.0); };
  const auto mult = kernel_tau(sym2([&](double x, double) { return a(x); }), 1.0);
  const auto fmult = kernel_tau(sym2([](double, double xi) { return std::exp(-kPi * xi * xi / 4.0); }), 0.5);
  for (const auto& f : probes()) {
    SampledField expect = f;
    for (std::size_t i = 0; i < f.size(); ++i) expect[i] *= a(op_grid().coord(0, i));
    CHECK(relative_l2_error(mult.apply(f), expect) <= 1e-8);
    SampledField hat = fourier(f, -1);
    const SampledField got = fourier(fmult.apply(f), -1);
    for (std::size_t k = 0; k < hat.size(); ++k) hat[k] *= std::exp(-kPi * std::pow(hat.grid().coord(0, k), 2) / 4.0);
    CHECK(relative_l2_error(got, hat) <= 1e-8);
  }
}

TEST_CASE("three-parameter kernels") {
  const GridSpec op = GridSpec::cube(1, 8.0, 64);
  const GridSpec g3 = symbol_grid3(op, 64);
  const auto ab = SampledField::sample(g3, [](auto t) {
    return cplx(std::exp(-kPi * t[0] * t[0] / 4.0) * (1.0 + 0.5 * std::cos(t[1])));
  });
  const auto k = kernel_threeparam(ab);
  const auto f = WindowSpec::gaussian(1).atom(op, PhasePoint::make(0.5, 0.5));
  SampledField expect = f;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = op.coord(0, i);
    expect[i] *= std::exp(-kPi * x * x / 4.0) * (1.0 + 0.5 * std::cos(x));
  }
  CHECK(relative_l2_error(k.apply(f), expect) <= 1e-8);

  const auto one3 = SampledField::sample(g3, [](auto) { return cplx(1.0); });
  CHECK(relative_l2_error(kernel_threeparam(one3).apply(f), f) <= 1e-10);

  const auto s3 = SampledField::sample(g3, [](auto t) {
    const double u = 0.5 * (t[0] + t[1]);
    return cplx(std::exp(-kPi * (u * u + t[2] * t[2])));
  });
  const auto s2 = SampledField::sample(symbol_grid2(op, 1), [](auto t) {
    return cplx(std::exp(-kPi * (t[0] * t[0] + t[1] * t[1])));
  });
  const auto diff = kernel_threeparam(s3).entries() - kernel_tau({s2, false}, 0.5).entries();
  CHECK(diff.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("Fourier integral operators") {
  const auto one = sym2([](double, double) { return 1.0; });
  const auto gauss = sym2([](double x, double xi) { return std::exp(-kPi * (x * x + xi * xi)); });
  const FioOperator id(one, PhaseSpec::bilinear());
  const FioOperator shift(one, PhaseSpec::shifted(2.0));
  const FioOperator kn(gauss, PhaseSpec::bilinear());
  const auto kn_kernel = kernel_tau(gauss, 1.0);
  for (const auto& f : probes()) {
    CHECK(relative_l2_error(id.apply(f), f) <= 1e-10);
    CHECK(relative_l2_error(shift.apply(f), tf_shift(f, PhasePoint::make(2.0, 0.0))) <= 1e-8);
    CHECK(relative_l2_error(kn.apply(f), kn_kernel.apply(f)) <= 1e-8);
  }
  PhaseSpec::Coefficients c{};
  c[2][2] = 1.0;
  CHECK_THROWS_AS(FioOperator(one, PhaseSpec(c)), Error);
}

TEST_CASE("tau transform") {
  const auto gauss = sym2([](double x, double xi) { return std::exp(-kPi * (x * x + xi * xi)); });
  const auto moved = tau_transform(gauss, 1.0, 0.5);
  CHECK(relative_l2_error(tau_transform(moved, 0.5, 1.0).sigma, gauss.sigma) <= 1e-8);
  const auto ka = kernel_tau(gauss, 1.0), kb = kernel_tau(moved, 0.5);
  CHECK((ka.entries() - kb.entries()).norm() / ka.entries().norm() <= 1e-6);

  // No xi dependence means no change.
  const auto xonly = sym2([](double x, double) { return std::exp(-kPi * x * x / 9.0); });
  CHECK(max_abs_diff(tau_transform(xonly, 1.0, 0.0).sigma, xonly.sigma) <= 1e-12);
  CHECK_THROWS_AS(tau_transform(gauss, 0.3, 0.3), Error);
}

TEST_CASE("conjugated pairings") {
  const GridSpec op = GridSpec::cube(1, 16.0, 256);
  const GridSpec g3 = symbol_grid3(op, 128);
  const auto one = SampledField::sample(g3, [](auto) { return cplx(1.0); });
  CHECK(std::abs(conjugated_pairing(one, PhasePoint{}, PhasePoint{}) - 1.0) <= 1e-10);

  const auto band = band_symbol(g3, {-0.25, -0.25, -0.25}, 0.5, 5, 42);
  const PhasePoint w = PhasePoint::make(0.75, -0.5);
  for (const auto& z : {PhasePoint::make(0.5, 1.0), PhasePoint::make(-1.0, 0.25)}) {
    const cplx a = conjugated_pairing(band, w, z, PairingPath::symbol_translation);
    const cplx b = conjugated_pairing(band, w, z, PairingPath::operator_conjugation);
    CHECK(std::abs(a - b) <= 1e-8);
  }
  const double v0 = std::abs(conjugated_pairing(band, w, PhasePoint::make(0, 0)));
  const double v2 = std::abs(conjugated_pairing(band, w, PhasePoint::make(2, 0)));
  const double v4 = std::abs(conjugated_pairing(band, w, PhasePoint::make(4, 0)));
  CHECK(v0 > v2);
  CHECK(v2 > v4);
}

TEST_CASE("Weyl symmetry and tau adjoints") {
  const auto real = sym2([](double x, double xi) { return std::exp(-kPi * (x * x + 2 * xi * xi)) * (1 + 0.3 * x * xi); });
  const auto& kw = kernel_tau(real, 0.5).entries();
  CHECK((kw - kw.adjoint()).cwiseAbs().maxCoeff() <= 1e-10);
  const auto gauss = sym2([](double x, double xi) { return std::exp(-kPi * (x * x + xi * xi)); });
  const auto diff = kernel_tau(gauss, 0.0).entries() - kernel_tau(gauss, 1.0).entries().adjoint();
  CHECK(diff.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("band-limited operator norms scale with the sup norm") {
  const GridSpec g3 = symbol_grid3(op_grid(), 128);
  double lo = HUGE_VAL, hi = 0.0;
  for (int seed = 0; seed < 10; ++seed) {
    const auto sigma = band_symbol(g3, {-0.25, -0.25, -0.25}, 0.5, 5, 200 + seed);
    double sup = 0.0;
    for (const auto& v : sigma.values()) sup = std::max(sup, std::abs(v));
    const double r = kernel_threeparam(sigma).spectral_norm() / sup;
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  // One constant C with every ratio in [0.8 C, 1.2 C] exists iff max / min <= 1.5.
  CHECK(hi / lo <= 1.5);
  CHECK(hi <= 1.0 + 1e-9);
}

TEST_CASE("FIO Gabor coefficients are bounded by the symbol's modulation sup norm") {
  const Lattice lat(1.0, 4.0);
  const auto pts = lat.points();
  const auto win = WindowSpec::gaussian(1);
  double lo = HUGE_VAL, hi = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double cx = 0.25 * (i % 5) - 0.5, width = 0.6 + 0.1 * i, freq = 0.2 * (i % 4);
    const auto fn = [&](double x, double xi) {
      return std::exp(-kPi * ((x - cx) * (x - cx) + xi * xi) / (width * width)) * (1.0 + 0.5 * std::cos(kTwoPi * freq * x));
    };
    const FioOperator op(sym2(fn), i % 2 ? PhaseSpec::quadratic(0.25, 0.0) : PhaseSpec::bilinear());
    const double sup = gabor_coefficients(op, pts, pts, win, win).cwiseAbs().maxCoeff();
    // The sup norm is a property of the symbol; a coarser grid resolves it at a fraction of the cost.
    const auto coarse = SampledField::sample(GridSpec::cube(2, 16.0, 64), [&](auto t) { return cplx(fn(t[0], t[1])); });
    const double r = sup / modulation_sup_norm(coarse);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi / lo <= 20.0);
}
