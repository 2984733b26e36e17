#pragma once

// Lifts the transverse 2D profiles to cell functions on the unit cylinder
// slab (0,1)^2 x R (axis of the wire along x1, interface plane x3 = 1/2,
// slab 0 < x3 < 1, constant extension outside the slab).  2D coordinates are
// (z1, z2) = (x2, x3); the 2D unit vector e1 corresponds to the 3D e2.
//
// All norms reduce exactly to 2D integrals times analytic vertical factors
// plus gap-measure-weighted disk terms; no 3D quadrature enters the defect
// computation.  3D midpoint sampling is used only as an independent
// cross-check in the test-suite and in the Piola transport verifier.

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>
#include <string>

#include "wirehom/cell2d.hpp"
#include "wirehom/geometry.hpp"
#include "wirehom/numerics.hpp"

#include <Eigen/Dense>

namespace wirehom {

enum class CellKind { Psi, PhiOrtho, PhiCrit, TrivialE3 };

inline const char* kind_name(CellKind k) {
  switch (k) {
    case CellKind::Psi: return "Psi";
    case CellKind::PhiOrtho: return "PhiOrtho";
    case CellKind::PhiCrit: return "PhiCrit";
    case CellKind::TrivialE3: return "TrivialE3";
  }
  return "?";
}

struct CellFunction3 {
  CellKind kind = CellKind::TrivialE3;
  WireSpec spec;
  std::shared_ptr<const Psi2D> psi;    // kind == Psi
  std::shared_ptr<const Phi2D> phi;    // kind == PhiOrtho
  PhiCrit2D crit;                      // kind == PhiCrit

  // Field value at cell coordinates.  Inside a present wire segment the
  // field is zero (perfect conductor); in gap segments of the connecting
  // function the bump profile fills the ball.
  Vec3 eval(Vec3 x) const {
    const Vec2 z{x.y, x.z};
    switch (kind) {
      case CellKind::Psi: {
        if (x.z >= 1.0) return {0.0, 1.0, 0.0};
        if (x.z <= 0.0) return {0.0, 0.0, 0.0};
        if ((z - spec.center).norm() < spec.radius) {
          if (!spec.in_gap(x.x)) return {0.0, 0.0, 0.0};
          const Vec2 g = psi->inside.grad_perp(z);
          return {0.0, g.x, g.y};
        }
        const Vec2 g = psi->eval(z);
        return {0.0, g.x, g.y};
      }
      case CellKind::PhiOrtho: {
        if (x.z >= 1.0 || x.z <= 0.0) return {0.0, 1.0, 0.0};
        const Vec2 g = phi->eval(z);
        return {0.0, g.x, g.y};
      }
      case CellKind::PhiCrit:
        return {crit.value(z), 0.0, 0.0};
      case CellKind::TrivialE3:
        return {0.0, 0.0, (x.z > 1.0 || x.z < 0.0) ? 1.0 : 0.0};
    }
    return {0.0, 0.0, 0.0};
  }

  // Curl density where it is known in closed form; regions whose curl
  // vanishes only weakly (discrete rotated gradients) report zero, with the
  // weak residual tracked separately by the 2D solvers.
  Vec3 curl_eval(Vec3 x) const {
    const Vec2 z{x.y, x.z};
    switch (kind) {
      case CellKind::Psi:
        if (x.z > 0.0 && x.z < 1.0 && (z - spec.center).norm() < spec.radius &&
            spec.in_gap(x.x))
          return {psi->inside.laplacian(), 0.0, 0.0};
        return {0.0, 0.0, 0.0};
      case CellKind::PhiOrtho:
        return {0.0, 0.0, 0.0};
      case CellKind::PhiCrit: {
        const Vec2 g = crit.grad(z);
        return {0.0, g.y, -g.x};
      }
      case CellKind::TrivialE3:
        return {0.0, 0.0, 0.0};
    }
    return {0.0, 0.0, 0.0};
  }
};

inline CellFunction3 make_cell_function(std::shared_ptr<const Psi2D> psi) {
  if (!psi) throw std::invalid_argument("make_cell_function: null profile");
  CellFunction3 cf;
  cf.kind = CellKind::Psi;
  cf.spec = psi->outside.spec;
  cf.psi = std::move(psi);
  return cf;
}

inline CellFunction3 make_cell_function(std::shared_ptr<const Phi2D> phi) {
  if (!phi) throw std::invalid_argument("make_cell_function: null profile");
  CellFunction3 cf;
  cf.kind = CellKind::PhiOrtho;
  cf.spec = phi->spec;
  cf.phi = std::move(phi);
  return cf;
}

inline CellFunction3 make_cell_function(const PhiCrit2D& crit, const WireSpec& spec) {
  if ((crit.center - spec.center).norm() > 1e-12 ||
      std::abs(crit.r - spec.radius) > 1e-12 ||
      std::abs(crit.R - spec.guard_radius) > 1e-12)
    throw std::invalid_argument(
        "make_cell_function: profile does not match the wire description");
  CellFunction3 cf;
  cf.kind = CellKind::PhiCrit;
  cf.spec = spec;
  cf.crit = crit;
  return cf;
}

inline CellFunction3 make_trivial_e3(const WireSpec& spec) {
  CellFunction3 cf;
  cf.kind = CellKind::TrivialE3;
  cf.spec = spec;
  return cf;
}

// eta-cell defect norms.  a measures the distance of the tiled, rescaled
// field from the constant target; b measures its curl.  Both reduce to the
// unit-cell quantities with weights eta and 1/eta.
struct DefectPair {
  double eta = 0.0;
  CellKind kind = CellKind::TrivialE3;
  double a_sq = 0.0;
  double b_sq = 0.0;
  double r = 0.0;
  double gap_measure = 0.0;
  // Unit-cell breakdown (before the eta weights).
  double field_defect_sq_cell = 0.0;
  double curl_sq_cell = 0.0;
  double weak_curl_residual = 0.0;  // discrete witness for the weakly-zero part

  double a() const { return std::sqrt(a_sq); }
  double b() const { return std::sqrt(b_sq); }
};

inline DefectPair defect_pair(const CellFunction3& cf, double eta) {
  if (!(eta > 0.0) || !(eta <= 1.0))
    throw std::invalid_argument("defect_pair: eta must lie in (0, 1]");
  DefectPair d;
  d.eta = eta;
  d.kind = cf.kind;
  d.r = cf.spec.radius;
  d.gap_measure = cf.spec.gap_measure();
  switch (cf.kind) {
    case CellKind::Psi: {
      const Psi2D& p = *cf.psi;
      d.field_defect_sq_cell =
          p.defect_sq_outside + d.gap_measure * p.defect_sq_inside;
      d.curl_sq_cell = d.gap_measure * p.curl_l2_sq_inside;
      d.weak_curl_residual = p.weak_curl_outside;
      break;
    }
    case CellKind::PhiOrtho: {
      d.field_defect_sq_cell = cf.phi->defect_sq;
      d.curl_sq_cell = 0.0;
      d.weak_curl_residual = cf.phi->weak_curl_interior;
      break;
    }
    case CellKind::PhiCrit: {
      d.field_defect_sq_cell = cf.crit.defect_sq();
      d.curl_sq_cell = cf.crit.energy_closed();
      break;
    }
    case CellKind::TrivialE3: {
      d.field_defect_sq_cell = 1.0;  // unit slab volume, unit target
      d.curl_sq_cell = 0.0;
      break;
    }
  }
  d.a_sq = eta * d.field_defect_sq_cell;
  d.b_sq = d.curl_sq_cell / eta;
  return d;
}

// Defect pair for the critical profile evaluated from ln(r) directly: the
// ladder radii (e.g. r = exp(-1/eta^2)) underflow double long before the
// pair itself becomes uninteresting.
inline DefectPair phicrit_defect_pair_log(double log_r, double R, double eta) {
  if (!(eta > 0.0) || !(eta <= 1.0))
    throw std::invalid_argument("phicrit_defect_pair_log: eta must lie in (0, 1]");
  if (!(log_r <= 2.0 * std::log(R)))
    throw std::invalid_argument(
        "phicrit_defect_pair_log: critical profile requires ln r <= 2 ln R");
  DefectPair d;
  d.eta = eta;
  d.kind = CellKind::PhiCrit;
  d.r = std::exp(log_r);
  d.gap_measure = 0.0;
  d.field_defect_sq_cell = PhiCrit2D::defect_sq_closed_log(log_r, R);
  d.curl_sq_cell = 2.0 * pi / (std::log(R) - log_r);
  d.a_sq = eta * d.field_defect_sq_cell;
  d.b_sq = d.curl_sq_cell / eta;
  return d;
}

inline const char* defect_csv_header() { return "eta,a,b,kind,r,gap_measure"; }

inline std::string defect_csv_row(const DefectPair& d) {
  std::ostringstream os;
  os << fmt_g17(d.eta) << ',' << fmt_g17(d.a()) << ',' << fmt_g17(d.b()) << ','
     << kind_name(d.kind) << ',' << fmt_g17(d.r) << ',' << fmt_g17(d.gap_measure);
  return os.str();
}

// L2 rescaling of a unit-cell field tiled eta-periodically over the unit
// interface area: each of the (1/eta)^2 cells contributes eta^3 times the
// unit-cell field norm and eta times the unit-cell curl norm.
struct TileNorms {
  double field_l2_sq = 0.0;
  double curl_l2_sq = 0.0;
};

inline TileNorms rescale_tile_norms(double field_l2_sq_cell,
                                    double curl_l2_sq_cell, double eta) {
  if (!(eta > 0.0) || !(eta <= 1.0))
    throw std::invalid_argument("rescale_tile_norms: eta must lie in (0, 1]");
  return {eta * field_l2_sq_cell, curl_l2_sq_cell / eta};
}

// Audit of the rescaling identity for eta = 1/n: explicit per-cell summation
// against the closed form.  Exact up to roundoff, returned as the relative
// discrepancy pair.
inline TileNorms tile_rescaling_discrepancy(double field_l2_sq_cell,
                                            double curl_l2_sq_cell, int n) {
  if (n < 1) throw std::invalid_argument("tile_rescaling_discrepancy: n >= 1");
  const double eta = 1.0 / n;
  double field_sum = 0.0, curl_sum = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      (void)i;
      (void)j;
      field_sum += eta * eta * eta * field_l2_sq_cell;
      curl_sum += eta * curl_l2_sq_cell;
    }
  const TileNorms closed = rescale_tile_norms(field_l2_sq_cell, curl_l2_sq_cell, eta);
  const auto rel = [](double s, double c) {
    const double den = std::max(std::abs(c), 1e-300);
    return std::abs(s - c) / den;
  };
  return {rel(field_sum, closed.field_l2_sq), rel(curl_sum, closed.curl_l2_sq)};
}

// Covariant transport of a cell function under a bi-Lipschitz deformation of
// the slab: y = map(x), F(y) = Dmap(x)^{-T} F_hat(x), whose curl transforms
// as det(Dmap)^{-1} Dmap . curl F_hat.  The identity is verified by central
// finite differences on a midpoint sample lattice, with the stencil step an
// eighth of the lattice spacing and each stencil restricted to preimages that
// sit safely inside the smooth annulus region and share one map cell (the
// interpolated map is only C^0 across cell faces).  A grid-refinement
// decrease check and an energy bound from the measured singular-value range
// of the Jacobian complete the report.
struct PiolaReport {
  bool valid = false;
  std::string message;
  int grid = 0;
  double residual_coarse = 0.0;  // max curl identity residual at grid n
  double residual_fine = 0.0;    // same at grid 2n
  int samples_coarse = 0;
  int samples_fine = 0;
  double energy_cell = 0.0;         // midpoint L2^2 of the cell field
  double energy_transported = 0.0;  // midpoint L2^2 of the transported field
  double energy_bound = 0.0;        // inv_lip^2 * det_max * energy_cell
};

namespace detail {

struct PiolaPass {
  double residual = 0.0;
  int samples = 0;
};

inline Vec3 piola_value(const DeformationMap& map, const CellFunction3& cf,
                        Vec3 y) {
  const Vec3 x = map.invert(y);
  const Eigen::Matrix3d J = map.jacobian(x);
  const Vec3 f = cf.eval(x);
  const Eigen::Vector3d v =
      J.transpose().inverse() * Eigen::Vector3d(f.x, f.y, f.z);
  return {v[0], v[1], v[2]};
}

inline PiolaPass piola_curl_pass(const DeformationMap& map,
                                 const CellFunction3& cf, int n,
                                 double safety_margin) {
  PiolaPass pass;
  const double delta = 1.0 / n;       // sample lattice spacing
  const double step = delta / 8.0;    // finite-difference step
  const int nm = map.cells_per_axis();
  const double hm = 1.0 / nm;
  const double inset = 0.1 * hm;
  const double r = cf.spec.radius;
  const double R = cf.spec.guard_radius;
  const Vec2 c = cf.spec.center;
  auto smooth_at = [&](Vec3 x) {
    const double rho = (Vec2{x.y, x.z} - c).norm();
    return rho > r + safety_margin && rho < R - safety_margin && x.z > safety_margin &&
           x.z < 1.0 - safety_margin && x.x > 1e-9 && x.x < 1.0 - 1e-9;
  };
  // Flattened index of the map cell containing x, or -1 when x lies within
  // `inset` of a cell face.  The interpolant is analytic inside each cell but
  // only C^0 across faces, so a finite-difference stencil may not straddle
  // one; confining all preimages to a single inset cell keeps the sampled
  // branch smooth and the central differences second order.
  auto cell_of = [&](Vec3 x) -> long {
    long idx = 0;
    for (double t : {x.x, x.y, x.z}) {
      const double s = t * nm;
      const int cell = std::min(static_cast<int>(s), nm - 1);
      const double frac = s - cell;
      if (frac * hm < inset || (1.0 - frac) * hm < inset) return -1;
      idx = idx * nm + cell;
    }
    return idx;
  };
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) {
        const Vec3 y{(i + 0.5) * delta, (j + 0.5) * delta, (k + 0.5) * delta};
        // Require the whole stencil's preimages inside the smooth annulus
        // band and a common smooth map cell.
        const Vec3 x = map.invert(y);
        const long cell = cell_of(x);
        bool ok = cell >= 0 && smooth_at(x);
        for (int ax = 0; ax < 3 && ok; ++ax)
          for (int s = -1; s <= 1 && ok; s += 2) {
            Vec3 yp = y;
            yp[ax] += s * step;
            const Vec3 xp = map.invert(yp);
            if (!smooth_at(xp) || cell_of(xp) != cell) ok = false;
          }
        if (!ok) continue;

        Vec3 dF[3];  // dF[ax] = (F(y + step e_ax) - F(y - step e_ax)) / (2 step)
        for (int ax = 0; ax < 3; ++ax) {
          Vec3 yp = y, ym = y;
          yp[ax] += step;
          ym[ax] -= step;
          const Vec3 fp = piola_value(map, cf, yp);
          const Vec3 fm = piola_value(map, cf, ym);
          dF[ax] = (fp - fm) * (1.0 / (2.0 * step));
        }
        const Vec3 fd_curl{dF[1].z - dF[2].y, dF[2].x - dF[0].z,
                           dF[0].y - dF[1].x};
        const Eigen::Matrix3d J = map.jacobian(x);
        const Vec3 ch = cf.curl_eval(x);
        const Eigen::Vector3d tc =
            (J * Eigen::Vector3d(ch.x, ch.y, ch.z)) / J.determinant();
        const Vec3 res{fd_curl.x - tc[0], fd_curl.y - tc[1], fd_curl.z - tc[2]};
        pass.residual = std::max(pass.residual, res.norm());
        ++pass.samples;
      }
  return pass;
}

}  // namespace detail

inline PiolaReport piola_transport(const DeformationMap& map,
                                   const CellFunction3& cf, int grid = 16,
                                   double declared_lip = 4.0) {
  if (cf.kind != CellKind::PhiCrit && cf.kind != CellKind::TrivialE3)
    throw std::invalid_argument(
        "piola_transport: finite-difference curl verification requires an "
        "analytic profile (PhiCrit or TrivialE3)");
  if (grid < 8) throw std::invalid_argument("piola_transport: grid too coarse");

  PiolaReport rep;
  rep.grid = grid;

  const DeformationReport def = validate_deformation(map, 1e-8);
  if (!def.valid) {
    rep.message = "deformation rejected: " + def.message;
    return rep;
  }
  if (def.lip_measured > declared_lip * (1.0 + 1e-9)) {
    rep.message = "deformation exceeds the declared Lipschitz bound";
    return rep;
  }

  // Same exclusion margin for both passes so the fine grid samples a subset
  // geometry of the same smooth band and the residual comparison is clean.
  const double margin = 1.3 * (1.0 / grid) * std::max(def.inv_lip_measured, 1.0);
  const detail::PiolaPass coarse = detail::piola_curl_pass(map, cf, grid, margin);
  const detail::PiolaPass fine = detail::piola_curl_pass(map, cf, 2 * grid, margin);
  rep.residual_coarse = coarse.residual;
  rep.residual_fine = fine.residual;
  rep.samples_coarse = coarse.samples;
  rep.samples_fine = fine.samples;

  // Midpoint energies over the slab (0,1)^3 section of the cylinder.
  {
    const int m = 2 * grid;
    const double dm = 1.0 / m;
    double e_cell = 0.0, e_tr = 0.0;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k) {
          const Vec3 y{(i + 0.5) * dm, (j + 0.5) * dm, (k + 0.5) * dm};
          e_cell += cf.eval(y).norm2() * dm * dm * dm;
          e_tr += detail::piola_value(map, cf, y).norm2() * dm * dm * dm;
        }
    rep.energy_cell = e_cell;
    rep.energy_transported = e_tr;
  }
  rep.energy_bound = def.inv_lip_measured * def.inv_lip_measured * def.det_max *
                     rep.energy_cell;

  const bool enough_samples = coarse.samples >= 32 && fine.samples >= 32;
  const bool decreasing =
      fine.residual <= 0.75 * coarse.residual + 1e-12 || coarse.residual < 1e-10;
  const bool energy_ok =
      rep.energy_transported <= rep.energy_bound * 1.05 + 1e-12;
  rep.valid = enough_samples && decreasing && energy_ok;
  if (!rep.valid) {
    if (!enough_samples)
      rep.message = "too few interior samples for the curl identity check";
    else if (!decreasing)
      rep.message = "curl identity residual did not decrease under refinement";
    else
      rep.message = "transported energy exceeds the Jacobian bound";
  } else {
    rep.message = "ok";
  }
  return rep;
}

}  // namespace wirehom
