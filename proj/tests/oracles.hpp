#pragma once

// Independent reference values for the test suite.  Everything here is
// derived from first principles with its own quadrature (composite Simpson),
// deliberately not reusing the library's integrators, so closed forms in the
// library are checked against an unrelated numeric path.

#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>

namespace oracle {

inline constexpr double pi = std::numbers::pi;

// Composite Simpson rule; n is the (even) number of subintervals.
inline double simpson(const std::function<double(double)>& f, double a,
                      double b, int n = 4096) {
  if (n < 2 || n % 2 != 0) throw std::invalid_argument("simpson: n even, >= 2");
  const double h = (b - a) / n;
  double acc = f(a) + f(b);
  for (int i = 1; i < n; ++i) acc += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

// Simpson over dyadic octaves [a, 2a], [2a, 4a], ...  For integrands that
// scale like 1/rho the per-octave error is uniform (~2e-14 at n = 1024), so
// the result stays near machine accuracy even when b/a is large, where a
// single composite rule loses many digits near the lower endpoint.
inline double dyadic_simpson(const std::function<double(double)>& f, double a,
                             double b) {
  if (!(0.0 < a && a < b))
    throw std::invalid_argument("dyadic_simpson: need 0 < a < b");
  double acc = 0.0;
  double lo = a;
  while (2.0 * lo < b) {
    acc += simpson(f, lo, 2.0 * lo, 1024);
    lo *= 2.0;
  }
  return acc + simpson(f, lo, b, 1024);
}

// Radial profile with unit circulation around the hole: w'(rho) = -1/(2 pi rho).
// Drop of its circle means between radii r < s, computed two ways.
inline double ring_drop(double r, double s) {
  if (!(0.0 < r && r < s)) throw std::invalid_argument("ring_drop: need 0 < r < s");
  const double closed = std::log(s / r) / (2.0 * pi);
  const double quad =
      dyadic_simpson([](double rho) { return 1.0 / (2.0 * pi * rho); }, r, s);
  if (std::abs(quad - closed) > 1e-12 * closed)
    throw std::logic_error("ring_drop: self-check failed");
  return closed;
}

// Dirichlet energy of the same profile over the annulus r < rho < s:
// int |w'|^2 dA = int_r^s (2 pi rho)^{-2} 2 pi rho drho = ln(s/r)/(2 pi).
// This is the additive log-capacity term; domains containing the annulus add
// an r-independent amount, so it is the slope oracle for energy vs |ln r|.
inline double annulus_energy_sq(double r, double s) {
  if (!(0.0 < r && r < s))
    throw std::invalid_argument("annulus_energy_sq: need 0 < r < s");
  const double closed = std::log(s / r) / (2.0 * pi);
  const double quad = dyadic_simpson(
      [](double rho) { return 2.0 * pi * rho / ((2.0 * pi * rho) * (2.0 * pi * rho)); },
      r, s);
  if (std::abs(quad - closed) > 1e-12 * closed)
    throw std::logic_error("annulus_energy_sq: self-check failed");
  return closed;
}

// Normal-incidence reflection between nonmagnetic media with refractive
// indices n_minus (incidence side) and n_plus.
inline double fresnel_normal_r(double n_minus, double n_plus) {
  if (!(n_minus > 0.0) || !(n_plus > 0.0))
    throw std::invalid_argument("fresnel_normal_r: indices must be positive");
  return (n_minus - n_plus) / (n_minus + n_plus);
}

// Energy of the capped log profile min(ln(R/rho), ln(R/r)) / ln(R/r) scaled
// to run from 1 at rho <= r to 0 at rho = R; its gradient squared integrates
// to 2 pi / ln(R/r).  Evaluated by Simpson on the annulus.
inline double capped_log_energy_sq(double r, double R) {
  if (!(0.0 < r && r < R))
    throw std::invalid_argument("capped_log_energy_sq: need 0 < r < R");
  const double L = std::log(R / r);
  return dyadic_simpson(
      [L](double rho) { return 2.0 * pi * rho / ((L * rho) * (L * rho)); }, r, R);
}

}  // namespace oracle
