#pragma once

#include <functional>
#include <utility>

#include "insulopt/types.hpp"

namespace insulopt {

/// Volume of the unit ball in `dim` dimensions, via the recurrence
/// omega_d = (2*pi/d) * omega_{d-2} with omega_0 = 1, omega_1 = 2.
double unit_ball_volume(int dim);

struct BallSpec {
  int dim = 2;
  double radius = 1.0;
  double omega_d = 0.0;  // unit ball volume for dim
  BallSpec(int dim_, double radius_);
};

/// Bessel functions of the first kind, orders 0 and 1. Power series up to
/// x = 12 (accumulated in extended precision), Hankel asymptotic expansion
/// beyond; at least 10 significant digits on [0, 50].
double bessel_j0(double x);
double bessel_j1(double x);

enum class BesselRootKind {
  DirichletJ0,     // first zero of J0
  NeumannJ1Prime,  // first zero of J1'
};
double bessel_root(BesselRootKind kind);

/// Sign-change bisection; verifies the bracket and resolves the root to
/// width below `tol`.
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol = 1e-13, int max_iterations = 200);

// Closed forms for the total-heat-loss (energy) problem ----------------------

struct BallEnergy {
  double trace_constant = 0.0;  // boundary value of the optimal state
  double energy = 0.0;
};

/// One ball, uniform unit source: optimal boundary constant
/// m / (d^2 omega_d R^(d-2)) and energy -(R^2/(2d)) (omega_d R^d/(d+2) + m/d).
BallEnergy ball_energy(const BallSpec& ball, double mass);

struct TwoBallOptimum {
  double trace_constant_1 = 0.0;  // ball with radius1
  double trace_constant_2 = 0.0;  // ball with radius2
  double energy = 0.0;
  bool non_unique = false;        // equal radii: any split of the trace sum is optimal
};

/// Two disjoint balls sharing one mass budget: all insulation goes to the
/// larger ball; equal radii give a one-parameter family of optima and the
/// returned pair (0, full) is one representative.
TwoBallOptimum two_ball_optimum(double radius1, double radius2, int dim, double mass);

// Closed forms for the eigenvalue problem ------------------------------------

/// Interval (-1, 1): lambda = omega^2 where omega in (0, pi/2) solves
/// tan(omega) = 2 / (mass * omega).
double interval_lambda(double mass);

/// Radial branch on a disk of given radius: lambda = omega^2 where omega
/// solves mass * omega * J1(omega R) = 2 pi R * J0(omega R) on (0, j01/R).
double disk_radial_lambda(double radius, double mass);

/// Mass threshold where the radial branch meets the first nonzero Neumann
/// eigenvalue (j'11/R)^2. Evaluated two ways (closed form at the Neumann
/// frequency and a root find on the radial branch) which must agree to 1e-9.
double threshold_m0(double radius);
std::pair<double, double> threshold_m0_paths(double radius);  // (closed form, root find)

/// Upper bound d^2 omega_d / (mass n^(d-2)) on the optimal eigenvalue of a
/// ball subdivided into n^d pieces of radius 1/n. Meaningful for dim >= 3
/// only; lower dimensions throw.
double nonexistence_bound(int dim, double mass, int n);

}  // namespace insulopt
