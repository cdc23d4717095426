#include "insulopt/oracles.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace insulopt {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kSeriesCutoff = 12.0;

// Power series J0(x) = sum (-1)^k (x^2/4)^k / (k!)^2 and
// J1(x) = (x/2) sum (-1)^k (x^2/4)^k / (k! (k+1)!), accumulated in long
// double: the alternating terms reach ~4e3 at x = 12 and the extra mantissa
// bits keep the cancellation error far below the 10-digit target.
long double j0_series(long double x) {
  const long double q = x * x / 4.0L;
  long double term = 1.0L;
  long double sum = term;
  for (int k = 1; k <= 80; ++k) {
    term *= -q / (static_cast<long double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) + 1e-300L) break;
  }
  return sum;
}

long double j1_series(long double x) {
  const long double q = x * x / 4.0L;
  long double term = x / 2.0L;
  long double sum = term;
  for (int k = 1; k <= 80; ++k) {
    term *= -q / (static_cast<long double>(k) * (k + 1));
    sum += term;
    if (std::abs(term) < 1e-22L * std::abs(sum) + 1e-300L) break;
  }
  return sum;
}

// Hankel asymptotic expansion
//   J_nu(x) ~ sqrt(2/(pi x)) (P cos(chi) - Q sin(chi)),  chi = x - (2nu+1)pi/4
// with P collecting the even and Q the odd terms of
//   A_k = prod_{j=1..k} (4nu^2 - (2j-1)^2) / (k! 8^k).
double j_asymptotic(int nu, double x) {
  const long double mu = 4.0L * nu * nu;
  const long double chi = static_cast<long double>(x) - (2 * nu + 1) * (kPi / 4.0L);
  long double p_sum = 1.0L;
  long double q_sum = 0.0L;
  long double ratio = 1.0L;  // A_k / x^k
  long double last = std::numeric_limits<long double>::max();
  for (int k = 1; k <= 24; ++k) {
    const long double odd = 2.0L * k - 1.0L;
    ratio *= (mu - odd * odd) / (8.0L * k * x);
    if (std::abs(ratio) >= last) break;  // smallest term of the divergent tail
    last = std::abs(ratio);
    const int quarter = k % 4;
    if (quarter == 1) q_sum += ratio;
    else if (quarter == 2) p_sum -= ratio;
    else if (quarter == 3) q_sum -= ratio;
    else p_sum += ratio;
    if (last < 1e-20L) break;
  }
  const long double amplitude = std::sqrt(2.0L / (kPi * x));
  return static_cast<double>(amplitude * (p_sum * std::cos(chi) - q_sum * std::sin(chi)));
}

double j1_prime(double x) {  // J1'(x) = J0(x) - J1(x)/x
  return bessel_j0(x) - bessel_j1(x) / x;
}

}  // namespace

double unit_ball_volume(int dim) {
  if (dim < 1) throw PreconditionError("dimension must be >= 1");
  double even = 1.0;  // omega_0
  double odd = 2.0;   // omega_1
  if (dim == 1) return odd;
  for (int d = 2; d <= dim; ++d) {
    if (d % 2 == 0)
      even *= 2.0 * kPi / d;
    else
      odd *= 2.0 * kPi / d;
  }
  return (dim % 2 == 0) ? even : odd;
}

BallSpec::BallSpec(int dim_, double radius_) : dim(dim_), radius(radius_) {
  if (dim < 1) throw PreconditionError("ball dimension must be >= 1");
  if (radius <= 0.0) throw PreconditionError("ball radius must be positive");
  omega_d = unit_ball_volume(dim);
}

double bessel_j0(double x) {
  x = std::abs(x);  // J0 is even
  if (x <= kSeriesCutoff) return static_cast<double>(j0_series(x));
  return j_asymptotic(0, x);
}

double bessel_j1(double x) {
  const double sign = (x < 0.0) ? -1.0 : 1.0;  // J1 is odd
  x = std::abs(x);
  if (x <= kSeriesCutoff) return sign * static_cast<double>(j1_series(x));
  return sign * j_asymptotic(1, x);
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol,
              int max_iterations) {
  if (!(hi > lo)) throw PreconditionError("bisection bracket is empty");
  double f_lo = f(lo);
  double f_hi = f(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0))
    throw PreconditionError("bisection bracket [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "] does not change sign");
  for (int it = 0; it < max_iterations && (hi - lo) > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double bessel_root(BesselRootKind kind) {
  switch (kind) {
    case BesselRootKind::DirichletJ0:
      return bisect([](double x) { return bessel_j0(x); }, 2.0, 3.0, 1e-13);
    case BesselRootKind::NeumannJ1Prime:
      return bisect([](double x) { return j1_prime(x); }, 1.5, 2.5, 1e-13);
  }
  throw PreconditionError("unknown root kind");
}

BallEnergy ball_energy(const BallSpec& ball, double mass) {
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  const int d = ball.dim;
  const double R = ball.radius;
  BallEnergy out;
  out.trace_constant = mass / (d * d * ball.omega_d * std::pow(R, d - 2));
  out.energy = -(R * R / (2.0 * d)) * (ball.omega_d * std::pow(R, d) / (d + 2) + mass / d);
  return out;
}

TwoBallOptimum two_ball_optimum(double radius1, double radius2, int dim, double mass) {
  if (radius1 <= 0.0 || radius2 <= 0.0) throw PreconditionError("radii must be positive");
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  const bool swapped = radius1 > radius2;
  const double r_small = std::min(radius1, radius2);
  const double r_large = std::max(radius1, radius2);
  const double omega = unit_ball_volume(dim);
  const int d = dim;

  TwoBallOptimum out;
  out.non_unique = (r_small == r_large);
  const double c_small = 0.0;
  const double c_large = mass / (d * d * omega * std::pow(r_large, d - 2));

  // Energy of the pair with boundary constants (c_small, c_large): Dirichlet
  // parts of both balls, the shared-insulator quadratic, and the linear terms.
  const double dirichlet =
      -omega / (2.0 * d * (d + 2)) * (std::pow(r_small, d + 2) + std::pow(r_large, d + 2));
  const double trace_sum =
      c_small * std::pow(r_small, d - 1) + c_large * std::pow(r_large, d - 1);
  const double quadratic = d * d * omega * omega / (2.0 * mass) * trace_sum * trace_sum;
  const double linear = -omega * (c_small * std::pow(r_small, d) + c_large * std::pow(r_large, d));
  out.energy = dirichlet + quadratic + linear;

  if (swapped) {
    out.trace_constant_1 = c_large;
    out.trace_constant_2 = c_small;
  } else {
    out.trace_constant_1 = c_small;
    out.trace_constant_2 = c_large;
  }
  return out;
}

double interval_lambda(double mass) {
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  // tan(omega) = 2/(mass*omega) on (0, pi/2); rewritten as the increasing
  // function omega*tan(omega) - 2/mass to keep a clean sign change.
  const double target = 2.0 / mass;
  const double omega = bisect(
      [target](double w) { return w * std::tan(w) - target; }, 1e-12, kPi / 2.0 - 1e-12, 1e-13);
  return omega * omega;
}

double disk_radial_lambda(double radius, double mass) {
  if (radius <= 0.0) throw PreconditionError("radius must be positive");
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  const double j01 = bessel_root(BesselRootKind::DirichletJ0);
  const double hi = j01 / radius;
  const double omega = bisect(
      [radius, mass](double w) {
        return mass * w * bessel_j1(w * radius) - 2.0 * kPi * radius * bessel_j0(w * radius);
      },
      1e-12 * hi, hi - 1e-14 * hi, 1e-13 * hi);
  return omega * omega;
}

std::pair<double, double> threshold_m0_paths(double radius) {
  if (radius <= 0.0) throw PreconditionError("radius must be positive");
  const double j1p = bessel_root(BesselRootKind::NeumannJ1Prime);
  const double omega_n = j1p / radius;  // Neumann frequency

  // Path 1: evaluate the radial branch relation at the Neumann frequency.
  const double closed_form =
      2.0 * kPi * radius * bessel_j0(j1p) / (omega_n * bessel_j1(j1p));

  // Path 2: root-find the crossing of the radial branch with the Neumann
  // eigenvalue; the branch is strictly decreasing in the mass.
  const double lambda_n = omega_n * omega_n;
  const double root_path = bisect(
      [radius, lambda_n](double m) { return disk_radial_lambda(radius, m) - lambda_n; },
      0.05 * closed_form, 20.0 * closed_form, 1e-13 * closed_form);
  return {closed_form, root_path};
}

double threshold_m0(double radius) {
  const auto [closed_form, root_path] = threshold_m0_paths(radius);
  if (std::abs(closed_form - root_path) > 1e-9 * std::abs(closed_form))
    throw SolverError("threshold computations disagree: " + std::to_string(closed_form) +
                      " vs " + std::to_string(root_path));
  return closed_form;
}

double nonexistence_bound(int dim, double mass, int n) {
  if (dim < 3)
    throw PreconditionError("subdivision bound vanishes only for dimension >= 3");
  if (mass <= 0.0) throw PreconditionError("mass must be positive");
  if (n < 1) throw PreconditionError("subdivision count must be >= 1");
  return dim * dim * unit_ball_volume(dim) / (mass * std::pow(static_cast<double>(n), dim - 2));
}

}  // namespace insulopt
