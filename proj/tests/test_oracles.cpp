#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "insulopt/oracles.hpp"

using namespace insulopt;
using doctest::Approx;

namespace {
constexpr double kPi = 3.14159265358979323846;

// Central finite difference of a scalar function.
template <class F>
double fd(F f, double x, double h = 1e-6) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}
}  // namespace

TEST_CASE("unit ball volumes follow the dimension recurrence") {
  CHECK(unit_ball_volume(1) == Approx(2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(2) == Approx(kPi).epsilon(1e-14));
  CHECK(unit_ball_volume(3) == Approx(4.0 * kPi / 3.0).epsilon(1e-14));
  CHECK(unit_ball_volume(4) == Approx(kPi * kPi / 2.0).epsilon(1e-14));
  CHECK(unit_ball_volume(5) == Approx(8.0 * kPi * kPi / 15.0).epsilon(1e-14));
  CHECK(unit_ball_volume(6) == Approx(kPi * kPi * kPi / 6.0).epsilon(1e-14));
  CHECK_THROWS_AS(unit_ball_volume(0), PreconditionError);
}

TEST_CASE("Bessel J0 and J1 match reference values on both evaluation branches") {
  // Series branch (x <= 12).
  CHECK(bessel_j0(0.5) == Approx(0.938469807240813).epsilon(1e-12));
  CHECK(bessel_j1(0.5) == Approx(0.242268457674874).epsilon(1e-12));
  CHECK(bessel_j0(1.0) == Approx(0.765197686557967).epsilon(1e-12));
  CHECK(bessel_j1(1.0) == Approx(0.440050585744933).epsilon(1e-12));
  CHECK(bessel_j0(3.7) == Approx(-0.399230203371191).epsilon(1e-12));
  CHECK(bessel_j1(3.7) == Approx(0.053833987745462).epsilon(1e-12));
  CHECK(bessel_j0(5.0) == Approx(-0.177596771314338).epsilon(1e-12));
  CHECK(bessel_j1(5.0) == Approx(-0.327579137591465).epsilon(1e-12));
  CHECK(bessel_j0(11.5) == Approx(-0.067653948111665).epsilon(1e-11));
  CHECK(bessel_j1(11.5) == Approx(-0.228378620665323).epsilon(1e-11));
  CHECK(bessel_j0(12.0) == Approx(0.047689310796834).epsilon(1e-11));
  // Asymptotic branch (x > 12).
  CHECK(bessel_j0(12.5) == Approx(0.146884054700421).epsilon(1e-11));
  CHECK(bessel_j1(12.5) == Approx(-0.165483804614760).epsilon(1e-11));
  CHECK(bessel_j0(27.3) == Approx(0.029363974018528).epsilon(1e-10));
  CHECK(bessel_j1(27.3) == Approx(0.150406821558601).epsilon(1e-10));
  CHECK(bessel_j0(30.0) == Approx(-0.086367983581040).epsilon(1e-10));
  CHECK(bessel_j1(30.0) == Approx(-0.118751062616623).epsilon(1e-10));
}

TEST_CASE("Bessel functions satisfy their differential identities") {
  for (double x : {0.7, 2.3, 6.1, 9.9, 14.2, 25.6}) {
    // J0' = -J1 and (x J1)' = x J0, via central differences.
    CHECK(fd(bessel_j0, x) == Approx(-bessel_j1(x)).epsilon(5e-9).scale(1.0));
    CHECK(fd([](double t) { return t * bessel_j1(t); }, x) ==
          Approx(x * bessel_j0(x)).epsilon(5e-9).scale(1.0));
  }
}

TEST_CASE("Bessel evaluation is continuous across the series/asymptotic crossover") {
  // The secant across the branch switch must match the true derivative; any
  // branch disagreement would show up as a jump on top of the smooth slope.
  const double h = 1e-7;
  const double secant0 = bessel_j0(12.0 + h) - bessel_j0(12.0 - h);
  CHECK(std::abs(secant0 - 2.0 * h * -bessel_j1(12.0)) < 1e-10);
  const double secant1 = bessel_j1(12.0 + h) - bessel_j1(12.0 - h);
  const double j1_prime = bessel_j0(12.0) - bessel_j1(12.0) / 12.0;
  CHECK(std::abs(secant1 - 2.0 * h * j1_prime) < 1e-10);
}

TEST_CASE("first Bessel roots") {
  const double j01 = bessel_root(BesselRootKind::DirichletJ0);
  const double j1p = bessel_root(BesselRootKind::NeumannJ1Prime);
  CHECK(j01 == Approx(2.404825557695773).epsilon(1e-12));
  CHECK(j1p == Approx(1.841183781340675).epsilon(1e-12));
  CHECK(std::abs(bessel_j0(j01)) < 1e-12);
  // J1'(x) = J0(x) - J1(x)/x vanishes at the Neumann frequency.
  CHECK(std::abs(bessel_j0(j1p) - bessel_j1(j1p) / j1p) < 1e-12);
}

TEST_CASE("bisection resolves roots and validates brackets") {
  const double root = bisect([](double x) { return std::cos(x); }, 1.0, 2.0);
  CHECK(root == Approx(kPi / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(bisect([](double x) { return std::cos(x); }, 0.2, 0.8), PreconditionError);
  CHECK_THROWS_AS(bisect([](double x) { return std::cos(x); }, 2.0, 1.0), PreconditionError);
}

TEST_CASE("one-ball energy closed form") {
  SUBCASE("unit disk, unit budget") {
    const BallEnergy ball = ball_energy(BallSpec(2, 1.0), 1.0);
    CHECK(ball.trace_constant == Approx(0.079577471545948).epsilon(1e-12));
    CHECK(ball.energy == Approx(-0.321349540849362).epsilon(1e-12));
    CHECK(ball.energy == Approx(-(kPi / 4.0 + 0.5) / 4.0).epsilon(1e-14));
  }
  SUBCASE("one dimension reduces to the interval") {
    const BallEnergy ball = ball_energy(BallSpec(1, 1.0), 1.0);
    CHECK(ball.trace_constant == Approx(0.5).epsilon(1e-14));
    CHECK(ball.energy == Approx(-5.0 / 6.0).epsilon(1e-14));
  }
  SUBCASE("three dimensions") {
    const BallEnergy ball = ball_energy(BallSpec(3, 2.0), 0.7);
    CHECK(ball.trace_constant == Approx(0.009284038347027).epsilon(1e-12));
    CHECK(ball.energy == Approx(-4.623598440661040).epsilon(1e-12));
  }
}

TEST_CASE("two-ball optimum concentrates the budget on the large ball") {
  SUBCASE("small first") {
    const TwoBallOptimum split = two_ball_optimum(0.5, 1.0, 2, 1.0);
    CHECK(split.trace_constant_1 == 0.0);
    CHECK(split.trace_constant_2 == Approx(1.0 / (4.0 * kPi)).epsilon(1e-13));
    CHECK(split.energy == Approx(-0.333621387152447).epsilon(1e-12));
    CHECK_FALSE(split.non_unique);
  }
  SUBCASE("argument order does not change the optimum") {
    const TwoBallOptimum split = two_ball_optimum(1.0, 0.5, 2, 1.0);
    CHECK(split.trace_constant_1 == Approx(1.0 / (4.0 * kPi)).epsilon(1e-13));
    CHECK(split.trace_constant_2 == 0.0);
    CHECK(split.energy == Approx(-0.333621387152447).epsilon(1e-12));
  }
  SUBCASE("equal radii admit many optima") {
    const TwoBallOptimum split = two_ball_optimum(1.0, 1.0, 2, 1.0);
    CHECK(split.non_unique);
    CHECK(split.energy == Approx(-0.517699081698724).epsilon(1e-12));
  }
  SUBCASE("three dimensions") {
    const TwoBallOptimum split = two_ball_optimum(0.5, 1.0, 3, 2.0);
    CHECK(split.trace_constant_2 == Approx(0.053051647697298).epsilon(1e-12));
    CHECK(split.energy == Approx(-0.255100774400643).epsilon(1e-12));
  }
  SUBCASE("pairing with one ball") {
    // With the small ball uninsulated, the pair energy is the large ball's
    // insulated energy plus the small ball's Dirichlet energy.
    const TwoBallOptimum split = two_ball_optimum(0.5, 1.0, 2, 1.0);
    const double large = ball_energy(BallSpec(2, 1.0), 1.0).energy;
    const double small_dirichlet = -kPi / (2.0 * 2.0 * 4.0) * std::pow(0.5, 4);
    CHECK(split.energy == Approx(large + small_dirichlet).epsilon(1e-13));
  }
}

TEST_CASE("interval eigenvalue solves its transcendental equation") {
  CHECK(interval_lambda(2.0) == Approx(0.740173884394955).epsilon(1e-12));
  CHECK(interval_lambda(0.5) == Approx(1.599191842172151).epsilon(1e-12));
  CHECK(interval_lambda(10.0) == Approx(0.187351088807722).epsilon(1e-12));
  for (double mass : {0.5, 2.0, 10.0}) {
    const double omega = std::sqrt(interval_lambda(mass));
    CHECK(std::tan(omega) == Approx(2.0 / (mass * omega)).epsilon(1e-10));
  }
  CHECK_THROWS_AS(interval_lambda(0.0), PreconditionError);
}

TEST_CASE("disk radial branch eigenvalue") {
  const double m0 = threshold_m0(1.0);
  CHECK(disk_radial_lambda(1.0, 2.0 * kPi) == Approx(1.576992730808707).epsilon(1e-12));
  CHECK(disk_radial_lambda(1.0, 2.0 * m0) == Approx(2.303981219112156).epsilon(1e-12));
  CHECK(disk_radial_lambda(1.0, 0.5 * m0) == Approx(4.346636582074774).epsilon(1e-12));
  CHECK(disk_radial_lambda(1.0, 0.25 * m0) == Approx(4.996930253096993).epsilon(1e-12));
  CHECK(disk_radial_lambda(1.0, 4.0 * m0) == Approx(1.383375954032138).epsilon(1e-12));

  SUBCASE("branch equation residual vanishes") {
    for (double mass : {1.0, 3.0, 9.0}) {
      const double omega = std::sqrt(disk_radial_lambda(1.0, mass));
      CHECK(mass * omega * bessel_j1(omega) ==
            Approx(2.0 * kPi * bessel_j0(omega)).epsilon(1e-9));
    }
  }
  SUBCASE("meets the Neumann eigenvalue at the threshold budget") {
    const double j1p = bessel_root(BesselRootKind::NeumannJ1Prime);
    CHECK(disk_radial_lambda(1.0, m0) == Approx(j1p * j1p).epsilon(1e-9));
  }
  SUBCASE("radius scaling") {
    CHECK(disk_radial_lambda(2.0, 4.0 * 2.0 * kPi) ==
          Approx(0.394248182702152).epsilon(1e-12));
  }
  SUBCASE("monotone decreasing in the budget") {
    double previous = disk_radial_lambda(1.0, 0.05);
    for (double mass : {0.2, 1.0, 5.0, 25.0, 125.0}) {
      const double lambda = disk_radial_lambda(1.0, mass);
      CHECK(lambda < previous);
      previous = lambda;
    }
  }
  SUBCASE("limits") {
    const double j01 = bessel_root(BesselRootKind::DirichletJ0);
    const double lambda_dirichlet = j01 * j01;
    CHECK(disk_radial_lambda(1.0, 1e-6) < lambda_dirichlet);
    CHECK(disk_radial_lambda(1.0, 1e-6) == Approx(lambda_dirichlet).epsilon(1e-3));
    CHECK(disk_radial_lambda(1.0, 1e6) < 1e-4);
  }
}

TEST_CASE("threshold budget where the radial branch meets the Neumann eigenvalue") {
  CHECK(threshold_m0(1.0) == Approx(1.853470111523370).epsilon(1e-12));
  CHECK(threshold_m0(2.0) == Approx(7.413880446093480).epsilon(1e-12));
  CHECK(threshold_m0(2.0) == Approx(4.0 * threshold_m0(1.0)).epsilon(1e-12));
  for (double radius : {0.5, 1.0, 3.0}) {
    const auto [closed_form, root_find] = threshold_m0_paths(radius);
    CHECK(std::abs(closed_form - root_find) <= 1e-9 * closed_form);
  }
}

TEST_CASE("nonexistence bound for subdivided balls") {
  CHECK(nonexistence_bound(3, 1.0, 1) == Approx(12.0 * kPi).epsilon(1e-12));
  for (int n : {2, 3, 5, 8})
    CHECK(nonexistence_bound(3, 1.0, n) == Approx(12.0 * kPi / n).epsilon(1e-12));
  for (int n : {1, 2, 4})
    CHECK(nonexistence_bound(4, 2.0, n) ==
          Approx(8.0 * kPi * kPi / (2.0 * n * n)).epsilon(1e-12));
  double previous = nonexistence_bound(3, 1.0, 1);
  for (int n = 2; n <= 64; n *= 2) {
    const double bound = nonexistence_bound(3, 1.0, n);
    CHECK(bound < previous);
    previous = bound;
  }
  CHECK(previous < 1.0);
  CHECK_THROWS_AS(nonexistence_bound(2, 1.0, 1), PreconditionError);
  CHECK_THROWS_AS(nonexistence_bound(3, -1.0, 1), PreconditionError);
  CHECK_THROWS_AS(nonexistence_bound(3, 1.0, 0), PreconditionError);
}
