#pragma once

// Obstacle geometry: periodic wire cross-sections with gap intervals, and
// grid-sampled volume deformations with trilinear interpolation.
//
// A wire occupies ((0,1) \ I) x B_r(center) in cell coordinates: it runs
// along the first axis, has circular cross-section of radius r centered
// strictly inside the unit square, and is interrupted on the gap set I.
// The guard radius R >= r bounds a ball that must stay inside the square;
// transverse potentials are normalized on its boundary.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wirehom/numerics.hpp"

namespace wirehom {

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double length() const { return hi - lo; }
};

struct WireSpec {
  Vec2 center;                  // in (0,1)^2, more than guard_radius from the edge
  double radius = 0.0;          // cross-section radius r, 0 < r <= guard_radius
  double guard_radius = 0.0;    // normalization radius R
  std::vector<Interval> gaps;   // sorted, pairwise disjoint, inside (0,1)

  double gap_measure() const {
    double m = 0.0;
    for (const Interval& g : gaps) m += g.length();
    return m;
  }

  // True when the axial coordinate t lies in a gap (wire material removed).
  bool in_gap(double t) const {
    for (const Interval& g : gaps)
      if (g.lo < t && t < g.hi) return true;
    return false;
  }

  // True when the 3D cell point (t, p) lies in the wire.
  bool contains(double t, Vec2 p) const {
    if (t <= 0.0 || t >= 1.0 || in_gap(t)) return false;
    return (p - center).norm2() <= radius * radius;
  }
};

// Validates and canonicalizes a wire: sorts gaps, merges touching ones,
// rejects overlaps and geometry that violates the containment rules.
inline WireSpec make_wire(Vec2 center, double radius, double guard_radius,
                          std::vector<Interval> gaps = {}) {
  constexpr double tol = 1e-12;
  if (!(radius > 0.0))
    throw std::invalid_argument("make_wire: radius must be positive");
  if (radius > guard_radius + tol)
    throw std::invalid_argument("make_wire: radius exceeds guard radius");
  const double edge_dist =
      std::min(std::min(center.x, 1.0 - center.x), std::min(center.y, 1.0 - center.y));
  if (!(edge_dist > guard_radius))
    throw std::invalid_argument(
        "make_wire: guard ball must lie strictly inside the unit square");
  for (const Interval& g : gaps) {
    if (!(g.lo >= 0.0 && g.hi <= 1.0 && g.length() > 0.0))
      throw std::invalid_argument("make_wire: gap intervals must be nonempty subsets of (0,1)");
  }
  std::sort(gaps.begin(), gaps.end(),
            [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const Interval& g : gaps) {
    if (!merged.empty()) {
      Interval& last = merged.back();
      if (g.lo < last.hi - tol)
        throw std::invalid_argument("make_wire: overlapping gap intervals");
      if (g.lo <= last.hi + tol) {  // touching intervals merge
        last.hi = std::max(last.hi, g.hi);
        continue;
      }
    }
    merged.push_back(g);
  }
  // Clamp fp noise so that r <= R holds exactly after validation.
  WireSpec spec{center, std::min(radius, guard_radius), guard_radius, merged};
  if (!(spec.gap_measure() < 1.0))
    throw std::invalid_argument("make_wire: gaps must not cover the whole axis");
  return spec;
}

// Set inclusion of the occupied material: a is contained in b iff the
// centers agree, a is no thicker, and every part b removes (its gaps) is
// also removed by a.
inline bool wire_included(const WireSpec& a, const WireSpec& b) {
  constexpr double tol = 1e-12;
  if (std::abs(a.center.x - b.center.x) > tol ||
      std::abs(a.center.y - b.center.y) > tol)
    return false;
  if (a.radius > b.radius + tol) return false;
  for (const Interval& gb : b.gaps) {
    bool covered = false;
    for (const Interval& ga : a.gaps) {
      if (ga.lo <= gb.lo + tol && gb.hi <= ga.hi + tol) {
        covered = true;
        break;
      }
    }
    if (!covered) return false;
  }
  return true;
}

// Volume deformation of the unit cube, stored as samples of phi on a
// regular (n+1)^3 node grid and evaluated by trilinear interpolation.
// Valid maps fix the faces x3 = 0 and x3 = 1 pointwise and have
// phi - id periodic in the first two axes.
class DeformationMap {
 public:
  DeformationMap(int cells_per_axis, std::vector<Vec3> node_samples,
                 double lipschitz_bound)
      : n_(cells_per_axis),
        samples_(std::move(node_samples)),
        lip_bound_(lipschitz_bound) {
    const std::size_t expect = static_cast<std::size_t>(n_ + 1) * (n_ + 1) * (n_ + 1);
    if (n_ < 1 || samples_.size() != expect)
      throw std::invalid_argument("DeformationMap: sample count does not match grid");
  }

  static DeformationMap from_analytic(const std::function<Vec3(Vec3)>& phi,
                                      int cells_per_axis, double lipschitz_bound) {
    const int n = cells_per_axis;
    std::vector<Vec3> samples;
    samples.reserve(static_cast<std::size_t>(n + 1) * (n + 1) * (n + 1));
    for (int k = 0; k <= n; ++k)
      for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
          samples.push_back(phi({double(i) / n, double(j) / n, double(k) / n}));
    return DeformationMap(n, std::move(samples), lipschitz_bound);
  }

  static DeformationMap identity(int cells_per_axis) {
    return from_analytic([](Vec3 p) { return p; }, cells_per_axis, 1.0);
  }

  int cells_per_axis() const { return n_; }
  double lipschitz_bound() const { return lip_bound_; }

  const Vec3& node(int i, int j, int k) const {
    return samples_[(static_cast<std::size_t>(k) * (n_ + 1) + j) * (n_ + 1) + i];
  }

  Vec3 operator()(Vec3 p) const {
    double u, v, w;
    int i, j, k;
    local_coords(p, i, j, k, u, v, w);
    Vec3 out{};
    for (int dk = 0; dk <= 1; ++dk)
      for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di) {
          const double wgt = (di ? u : 1.0 - u) * (dj ? v : 1.0 - v) *
                             (dk ? w : 1.0 - w);
          out = out + wgt * node(i + di, j + dj, k + dk);
        }
    return out;
  }

  // Exact Jacobian of the trilinear interpolant inside the containing cell.
  Eigen::Matrix3d jacobian(Vec3 p) const {
    double u, v, w;
    int i, j, k;
    local_coords(p, i, j, k, u, v, w);
    Eigen::Matrix3d jac = Eigen::Matrix3d::Zero();
    for (int dk = 0; dk <= 1; ++dk)
      for (int dj = 0; dj <= 1; ++dj)
        for (int di = 0; di <= 1; ++di) {
          const Vec3& s = node(i + di, j + dj, k + dk);
          const double fu = di ? u : 1.0 - u, gu = di ? 1.0 : -1.0;
          const double fv = dj ? v : 1.0 - v, gv = dj ? 1.0 : -1.0;
          const double fw = dk ? w : 1.0 - w, gw = dk ? 1.0 : -1.0;
          const Eigen::Vector3d col(s.x, s.y, s.z);
          jac.col(0) += col * (gu * fv * fw * n_);
          jac.col(1) += col * (fu * gv * fw * n_);
          jac.col(2) += col * (fu * fv * gw * n_);
        }
    return jac;
  }

  // Newton inversion on the in-plane periodic extension phi_ext(x) =
  // phi(wrap(x)) + in-plane shift.  Preimages of points close to a side wall
  // can fall just outside the cube (the walls are periodic, not fixed), so the
  // iteration must not clamp the first two coordinates; the returned point is
  // the cube representative of the periodic preimage.  The step is damped by
  // residual-norm backtracking: the interpolant is only C^0 across cell faces
  // and an undamped step can cycle between neighbouring cells.
  Vec3 invert(Vec3 y, double tol = 1e-12, int max_iter = 60) const {
    const auto wrap = [](double t) { return t - std::floor(t); };
    const auto rep = [&](Vec3 x) {
      return Vec3{wrap(x.x), wrap(x.y), std::clamp(x.z, 0.0, 1.0)};
    };
    const auto eval_ext = [&](Vec3 x) {
      const Vec3 w = rep(x);
      const Vec3 f = (*this)(w);
      return Vec3{f.x + (x.x - w.x), f.y + (x.y - w.y), f.z};
    };
    Vec3 x = y;
    double best = (y - eval_ext(x)).norm();
    for (int iter = 0; iter < max_iter && best >= tol; ++iter) {
      const Vec3 res = y - eval_ext(x);
      const Eigen::Matrix3d jac = jacobian(rep(x));
      const Eigen::Vector3d step =
          jac.partialPivLu().solve(Eigen::Vector3d(res.x, res.y, res.z));
      bool accepted = false;
      double lambda = 1.0;
      for (int bt = 0; bt < 24 && !accepted; ++bt, lambda *= 0.5) {
        const Vec3 trial{x.x + lambda * step[0], x.y + lambda * step[1],
                         std::clamp(x.z + lambda * step[2], 0.0, 1.0)};
        const double trial_norm = (y - eval_ext(trial)).norm();
        if (trial_norm < best) {
          x = trial;
          best = trial_norm;
          accepted = true;
        }
      }
      if (!accepted) break;  // stalled below the attainable floor
    }
    if (best < tol) return rep(x);
    throw std::runtime_error("DeformationMap::invert: Newton did not converge");
  }

 private:
  void local_coords(Vec3 p, int& i, int& j, int& k, double& u, double& v,
                    double& w) const {
    const double px = std::clamp(p.x, 0.0, 1.0) * n_;
    const double py = std::clamp(p.y, 0.0, 1.0) * n_;
    const double pz = std::clamp(p.z, 0.0, 1.0) * n_;
    i = std::min(static_cast<int>(px), n_ - 1);
    j = std::min(static_cast<int>(py), n_ - 1);
    k = std::min(static_cast<int>(pz), n_ - 1);
    u = px - i;
    v = py - j;
    w = pz - k;
  }

  int n_;
  std::vector<Vec3> samples_;
  double lip_bound_;
};

struct DeformationReport {
  bool valid = false;
  std::string message;
  double lip_measured = 0.0;      // max singular value of D(phi) over samples
  double inv_lip_measured = 0.0;  // max 1/sigma_min over samples
  double det_min = 0.0;
  double det_max = 0.0;
  double boundary_residual = 0.0;     // max |phi(x) - x| on x3 in {0,1} nodes
  double periodicity_residual = 0.0;  // max mismatch of phi - id across faces
};

// Checks Jacobian bounds in both directions, identity on the horizontal
// boundary faces, and periodicity of phi - id in the first two axes.
// Jacobians are sampled at cell centers (grid-scale sampling); boundary and
// periodicity checks use grid nodes, which trilinear interpolation extends
// exactly to the faces.
inline DeformationReport validate_deformation(const DeformationMap& map,
                                              double tol = 1e-8) {
  DeformationReport rep;
  const int n = map.cells_per_axis();
  if (n < 8) {
    rep.message = "grid must have at least 8 cells per axis";
    return rep;
  }

  rep.det_min = std::numeric_limits<double>::infinity();
  rep.det_max = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < n; ++k)
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const Vec3 c{(i + 0.5) / n, (j + 0.5) / n, (k + 0.5) / n};
        const Eigen::Matrix3d jac = map.jacobian(c);
        const double det = jac.determinant();
        rep.det_min = std::min(rep.det_min, det);
        rep.det_max = std::max(rep.det_max, det);
        // GCC's -Wmaybe-uninitialized fires a false positive on Eigen's SVD
        // result storage; the values are written by the constructor.
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wmaybe-uninitialized"
#endif
        Eigen::JacobiSVD<Eigen::Matrix3d> svd(jac);
        rep.lip_measured = std::max(rep.lip_measured, svd.singularValues()[0]);
        const double smin = svd.singularValues()[2];
#if defined(__GNUC__) && !defined(__clang__)
#pragma GCC diagnostic pop
#endif
        rep.inv_lip_measured =
            std::max(rep.inv_lip_measured, smin > 0.0 ? 1.0 / smin
                                                      : std::numeric_limits<double>::infinity());
      }

  for (int j = 0; j <= n; ++j)
    for (int i = 0; i <= n; ++i) {
      for (int k : {0, n}) {
        const Vec3 x{double(i) / n, double(j) / n, double(k) / n};
        rep.boundary_residual =
            std::max(rep.boundary_residual, (map.node(i, j, k) - x).norm());
      }
    }

  for (int k = 0; k <= n; ++k)
    for (int t = 0; t <= n; ++t) {
      // phi - id across x1 = 0 vs x1 = 1 (t runs over x2) and x2 = 0 vs 1.
      const Vec3 d1a = map.node(0, t, k) - Vec3{0.0, double(t) / n, double(k) / n};
      const Vec3 d1b = map.node(n, t, k) - Vec3{1.0, double(t) / n, double(k) / n};
      const Vec3 d2a = map.node(t, 0, k) - Vec3{double(t) / n, 0.0, double(k) / n};
      const Vec3 d2b = map.node(t, n, k) - Vec3{double(t) / n, 1.0, double(k) / n};
      rep.periodicity_residual = std::max(
          {rep.periodicity_residual, (d1a - d1b).norm(), (d2a - d2b).norm()});
    }

  if (!(rep.det_min > 0.0)) {
    rep.message = "Jacobian determinant is not positive everywhere";
  } else if (rep.boundary_residual > tol) {
    rep.message = "map does not fix the horizontal boundary faces";
  } else if (rep.periodicity_residual > tol) {
    rep.message = "phi - id is not periodic in the first two axes";
  } else if (rep.lip_measured > map.lipschitz_bound() * (1.0 + 1e-9)) {
    rep.message = "measured Lipschitz constant exceeds the declared bound";
  } else {
    rep.valid = true;
    rep.message = "ok";
  }
  return rep;
}

}  // namespace wirehom
