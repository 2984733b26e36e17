#pragma once

// Shared numeric helpers: small vector types, Gauss-Legendre quadrature,
// deterministic hashing and float formatting for reproducible output.

#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace wirehom {

inline constexpr double pi = std::numbers::pi;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double cross(Vec2 o) const { return x * o.y - y * o.x; }
  double norm2() const { return x * x + y * y; }
  double norm() const { return std::sqrt(norm2()); }
  // Counterclockwise quarter turn; maps a gradient to the rotated gradient.
  Vec2 perp() const { return {-y, x}; }
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Vec3 operator+(Vec3 o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(Vec3 o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  double dot(Vec3 o) const { return x * o.x + y * o.y + z * o.z; }
  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
};

inline Vec3 operator*(double s, Vec3 v) { return v * s; }

inline Vec3 cross(Vec3 a, Vec3 b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

struct GaussRule {
  std::vector<double> nodes;    // on (-1, 1)
  std::vector<double> weights;  // sum to 2
};

// Gauss-Legendre rule computed by Newton iteration on the Legendre roots.
inline GaussRule gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[i] = x;
    rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

// Composite Gauss quadrature over [a, b] split into equal panels.
inline double integrate(const std::function<double(double)>& f, double a,
                        double b, int panels = 16, int points = 8) {
  const GaussRule rule = gauss_legendre(points);
  double total = 0.0;
  const double dx = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    const double lo = a + p * dx;
    const double mid = lo + 0.5 * dx;
    for (int q = 0; q < points; ++q)
      total += rule.weights[q] * f(mid + 0.5 * dx * rule.nodes[q]);
  }
  return total * 0.5 * dx;
}

// Composite Gauss quadrature with geometrically graded panels; suited to
// integrands with an endpoint singularity at a > 0 (e.g. 1/rho terms).
inline double integrate_geometric(const std::function<double(double)>& f,
                                  double a, double b, int panels = 32,
                                  int points = 8) {
  if (!(0.0 < a && a < b))
    throw std::invalid_argument("integrate_geometric: need 0 < a < b");
  const GaussRule rule = gauss_legendre(points);
  const double ratio = std::pow(b / a, 1.0 / panels);
  double total = 0.0;
  double lo = a;
  for (int p = 0; p < panels; ++p) {
    const double hi = (p + 1 == panels) ? b : lo * ratio;
    const double mid = 0.5 * (lo + hi);
    const double half = 0.5 * (hi - lo);
    for (int q = 0; q < points; ++q)
      total += rule.weights[q] * half * f(mid + half * rule.nodes[q]);
    lo = hi;
  }
  return total;
}

// Midpoint rule in polar coordinates over a disk.
inline double disk_quadrature(const std::function<double(Vec2)>& f, Vec2 center,
                              double radius, int n_radial, int n_angular) {
  double total = 0.0;
  const double dr = radius / n_radial;
  const double dth = 2.0 * pi / n_angular;
  for (int i = 0; i < n_radial; ++i) {
    const double rho = (i + 0.5) * dr;
    for (int j = 0; j < n_angular; ++j) {
      const double th = (j + 0.5) * dth;
      const Vec2 p{center.x + rho * std::cos(th), center.y + rho * std::sin(th)};
      total += f(p) * rho;
    }
  }
  return total * dr * dth;
}

inline std::uint64_t splitmix64(std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL;
  v = (v ^ (v >> 30)) * 0xbf58476d1ce4e5b9ULL;
  v = (v ^ (v >> 27)) * 0x94d049bb133111ebULL;
  return v ^ (v >> 31);
}

// Deterministic hash of two indices to [0, 1); used for reproducible jitter.
inline double hash01(std::uint64_t a, std::uint64_t b) {
  const std::uint64_t h = splitmix64(a * 0x632be59bd9b4e019ULL + b + 1);
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

// Shortest-round-trip decimal formatting, used for byte-stable text output.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace wirehom
