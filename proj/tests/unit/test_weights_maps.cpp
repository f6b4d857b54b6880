#include <cmath>

#include "doctest.h"
#include "locop/error.hpp"
#include "locop/phase.hpp"
#include "locop/weights.hpp"

using namespace locop;

TEST_CASE("weight values") {
  for (double s : {0.0, 1.0, 2.5}) CHECK(Weight::polynomial(s, 2)(Point{0.0, 0.0}) == 1.0);
  CHECK(Weight::polynomial(2.0, 2)(Point{3.0, 4.0}) == doctest::Approx(26.0).epsilon(1e-14));
  const Weight b = Weight::composed(Weight::polynomial(1.0, 2), LinearMap::three_to_two(1));
  CHECK(b(Point{1.0, 2.0, 3.0}) == doctest::Approx(std::sqrt(19.0)).epsilon(1e-14));
  const Weight tensor = Weight::product(Weight::constant(1), b);
  CHECK(tensor(Point{7.0, 1.0, 2.0, 3.0}) == doctest::Approx(std::sqrt(19.0)).epsilon(1e-14));
  CHECK(Weight::exponential(0.5, 0.5, 1)(Point{4.0}) == doctest::Approx(std::exp(1.0)));
  CHECK(b.describe().find("three_to_two") != std::string::npos);
}

TEST_CASE("admissibility") {
  const auto pts = random_points(2, 1000, 8.0, 1);
  const auto shifts = random_points(2, 1000, 8.0, 2);
  for (double s : {0.0, 1.0, 2.0}) {
    const auto rep = check_admissible(Weight::polynomial(s, 2), pts, shifts);
    CHECK(rep.pass);
    CHECK(rep.worst_submultiplicative <= std::pow(2.0, s / 2) + 1e-9);
  }
  // Strict submultiplicativity fails near the origin: nu_2(1, 0) = 2 > nu_2(1/2, 0)^2 = 25/16.
  const Point half{0.5, 0.0};
  const auto strict = check_admissible(Weight::polynomial(2.0, 2), std::span(&half, 1), std::span(&half, 1), 1e-9, 1.0);
  CHECK(strict.worst_submultiplicative == doctest::Approx(32.0 / 25.0));
  CHECK_FALSE(strict.pass);
  const auto theta = check_admissible(Weight::theta(2), pts, shifts);
  CHECK(theta.submultiplicative);
  CHECK_FALSE(theta.subexponential);
  CHECK_FALSE(theta.pass);
  const auto one = check_admissible(Weight::constant(2), pts, shifts);
  CHECK(one.pass);
  CHECK(one.worst_submultiplicative == 1.0);
  CHECK(check_admissible(Weight::exponential(1.0, 0.5, 2), pts, shifts).pass);
}

TEST_CASE("moderateness") {
  CHECK(check_moderate(Weight::polynomial(1.0, 2), Weight::polynomial(2.0, 2), 8.0, 500, 3).sup_doubled <= 1.0 + 1e-12);
  CHECK(check_moderate(Weight::polynomial(1.0, 2), Weight::polynomial(1.0, 2), 8.0, 500, 3).sup_doubled <= 1.0 + 1e-12);
  const auto bad = check_moderate(Weight::polynomial(2.0, 2), Weight::polynomial(1.0, 2), 16.0, 500, 3);
  CHECK_FALSE(bad.pass);
  CHECK(bad.sup_doubled > bad.sup_base);
}

TEST_CASE("linear maps") {
  const auto j = LinearMap::quarter_turn(1).apply(Point{1.0, 2.0});
  CHECK(j == Point{2.0, -1.0});
  const auto u = LinearMap::tau_reflection(0.5, 1).apply(Point{3.0, -4.0});
  CHECK(u[0] == doctest::Approx(-3.0));
  CHECK(u[1] == doctest::Approx(4.0));
  Eigen::MatrixXd two = 2.0 * Eigen::MatrixXd::Identity(2, 2);
  const auto a = BiLipschitzMap::affine(two, Eigen::Vector2d::Zero());
  const auto back = a.inverse(PhasePoint::make(2.0, 2.0));
  CHECK(back.x[0] == doctest::Approx(1.0));
  CHECK(back.xi[0] == doctest::Approx(1.0));
  CHECK_THROWS_AS((void)LinearMap(Eigen::MatrixXd::Zero(2, 2)).inverse(), Error);
}

TEST_CASE("canonical transformations") {
  const auto check_map = [](const PhaseSpec& phase, PhasePoint in, double x, double xi) {
    const auto out = canonical_transform(phase, in);
    CHECK(std::abs(out.x[0] - x) <= 1e-9);
    CHECK(std::abs(out.xi[0] - xi) <= 1e-9);
    const auto back = canonical_inverse(phase, out);
    CHECK(std::abs(back.x[0] - in.x[0]) <= 1e-9);
    CHECK(std::abs(back.xi[0] - in.xi[0]) <= 1e-9);
  };
  check_map(PhaseSpec::bilinear(), PhasePoint::make(1.5, -2.0), 1.5, -2.0);
  check_map(PhaseSpec::quadratic(0.0, 1.0), PhasePoint::make(1.5, -2.0), 3.5, -2.0);  // (y - eta, eta)
  check_map(PhaseSpec::shifted(2.0), PhasePoint::make(1.5, -2.0), 3.5, -2.0);
  check_map(PhaseSpec::quadratic(1.0, 0.0), PhasePoint::make(1.0, 0.5), 1.0, 1.5);
}

TEST_CASE("tameness") {
  CHECK(tameness_check(PhaseSpec::bilinear(), 8.0, 0.5).pass);
  const auto chirp = tameness_check(PhaseSpec::quadratic(1.0, 0.0), 8.0, 0.5);
  CHECK(chirp.pass);
  CHECK(chirp.min_mixed_det == doctest::Approx(1.0));
  PhaseSpec::Coefficients c{};
  c[2][2] = 1.0;  // x^2 xi^2
  const auto degenerate = tameness_check(PhaseSpec(c), 2.0, 0.5);
  CHECK_FALSE(degenerate.pass);
  CHECK(degenerate.min_mixed_det <= 1e-12);
  CHECK(PhaseSpec(c).derivative(1, 1, 1.0, 2.0) == doctest::Approx(8.0));
  CHECK_THROWS_AS(BiLipschitzMap::canonical(PhaseSpec(c), 2.0), Error);
}
