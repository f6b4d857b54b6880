#include <cmath>

#include "doctest.h"
#include "locop/gabor_diag.hpp"
#include "locop/quantizers.hpp"

using namespace locop;

namespace {

const GridSpec& grid() {
  static const GridSpec g = GridSpec::cube(1, 32.0, 1024);
  return g;
}

KernelMatrix weyl_gaussian() {
  const SymbolGrid2 s{SampledField::sample(symbol_grid2(grid()), [](auto t) {
                        return cplx(std::exp(-kPi * (t[0] * t[0] + t[1] * t[1])));
                      }),
                      false};
  return kernel_tau(s, 0.5);
}

const WindowSpec win = WindowSpec::gaussian(1);

}  // namespace

TEST_CASE("identity Gabor matrix is a Gaussian in the offset") {
  const ScaledIdentity id(grid(), 1.0);
  const Lattice lat(0.5, 2.0);
  const auto g = gabor_matrix(id, lat, BiLipschitzMap::identity(), win, win);
  REQUIRE(g.coeffs.rows() == static_cast<Eigen::Index>(lat.size()));
  double worst = 0.0;
  for (std::size_t z = 0; z < g.sources.size(); ++z)
    for (std::size_t w = 0; w < g.targets.size(); ++w) {
      const double d = (g.targets[w] - g.sources[z]).norm();
      worst = std::max(worst, std::abs(std::abs(g.coeffs(z, w)) - std::exp(-kPi * d * d / 2)));
    }
  CHECK(worst <= 1e-10);
  CHECK(graph_concentration(g, 2.0).fraction == 1.0);

  const auto env = localization_envelope(g, Weight::constant(2));
  CHECK(env.at(PhasePoint{}) == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("envelope weighted sum of the identity") {
  const ScaledIdentity id(grid(), 1.0);
  const auto g = gabor_matrix(id, Lattice(0.5, 6.0), BiLipschitzMap::identity(), win, win);
  // Sum of exp(-pi |u|^2 / 2) over the offset lattice times step^2 is the integral, 2.
  CHECK(localization_envelope(g, Weight::constant(2)).weighted_sum == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("rank-one and zero operators") {
  const auto phi = win.atom(grid(), PhasePoint{});
  const RankOne r1(phi, phi);
  const Lattice lat(0.5, 3.0);
  const auto g = gabor_matrix(r1, lat, BiLipschitzMap::identity(), win, win);
  const auto v = stft(phi, win, g.sources);
  double worst = 0.0;
  for (std::size_t z = 0; z < g.sources.size(); ++z)
    for (std::size_t w = 0; w < g.targets.size(); ++w)
      worst = std::max(worst, std::abs(g.coeffs(z, w) - std::conj(v[z]) * v[w]));
  CHECK(worst <= 1e-10);
  const auto sv = singular_values(g);
  CHECK(epsilon_rank(sv, 1e-6) == 1);

  const ScaledIdentity zero(grid(), 0.0);
  const auto gz = gabor_matrix(zero, lat, BiLipschitzMap::identity(), win, win);
  CHECK(gz.coeffs.norm() == 0.0);
  CHECK(tail_norm(gz, 1.0, 2.0, 2.0, Weight::constant(2)) == 0.0);
}

TEST_CASE("weak compactness profile") {
  const ScaledIdentity id(grid(), 1.0);
  const auto prof = weak_compactness_profile(id, Lattice(0.5, 6.0), BiLipschitzMap::identity(), 1.0, win, win);
  for (double v : prof.values) CHECK(v == doctest::Approx(1.0).epsilon(1e-9));
  CHECK_FALSE(prof.verdict.decaying);

  const auto op = weyl_gaussian();
  const auto p2 = weak_compactness_profile(op, Lattice(0.5, 6.0), BiLipschitzMap::identity(), 1.0, win, win);
  CHECK(p2.verdict.decaying);
}

TEST_CASE("boundedness ratios") {
  const auto fields = boundedness_test_set(grid());
  CHECK(fields.size() >= 10);
  const Lattice lat(0.5, 6.0);
  const MixedNormSpec spec{2.0, 1.0, Weight::constant(2)};
  const auto one = boundedness_ratio(ScaledIdentity(grid(), 1.0), fields, spec, BiLipschitzMap::identity(), lat, win);
  CHECK(one.max_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(one.min_ratio == doctest::Approx(1.0).epsilon(1e-12));
  const auto two = boundedness_ratio(ScaledIdentity(grid(), 2.0), fields, spec, BiLipschitzMap::identity(), lat, win);
  CHECK(two.max_ratio == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("tail norms") {
  const Lattice lat(0.5, 7.0);
  const auto gw = gabor_matrix(weyl_gaussian(), lat, BiLipschitzMap::identity(), win, win);
  const Weight m = Weight::constant(2);
  CHECK(tail_norm(gw, 6.0, 2.0, 2.0, m) <= 0.1 * tail_norm(gw, 1.0, 2.0, 2.0, m));
  const auto gi = gabor_matrix(ScaledIdentity(grid(), 1.0), lat, BiLipschitzMap::identity(), win, win);
  CHECK(tail_norm(gi, 1.0, 2.0, 2.0, m) >= 0.5 * tail_norm(gi, -1.0, 2.0, 2.0, m));
  // The Weyl Gaussian is compact: its singular values fall off, the identity's do not.
  CHECK(epsilon_rank(singular_values(gw)) < epsilon_rank(singular_values(gi)));
}
