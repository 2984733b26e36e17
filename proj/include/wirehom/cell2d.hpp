#pragma once

// Transverse (2D) cell potentials on V = (0,1)^2 with the wire cross-section
// B_r(c) removed.
//
//  * v_r: harmonic on V_r = V \ B_r, co-normal derivative -1 on the top
//    edge, 0 on the bottom, 1/|dB_r| on the hole (outward normal of V_r),
//    periodic left/right, ring mean zero on the guard circle |p - c| = R.
//    Its rotated gradient carries unit flux from the top edge into the wire.
//  * u_r: explicit bump potential -|z - c|^2/(4 pi r^2) inside the wire,
//    with -Lap(u_r) = 1/|B_r| and circle co-normal matching v_r.
//  * psi_r = grad_perp(u_r) inside the wire, grad_perp(v_r) outside: the
//    transverse profile of the connecting (H-type) cell function.
//  * u^phi on U = V \ B_R with e2.grad(u) = -1 on top and bottom, zero flux
//    on the guard circle; phi = grad_perp(u^phi) extended by zero onto B_R:
//    the transverse profile of the blocking (E-type) field, direction e2.
//  * phi_r: radial profile (ln|z-c| - ln r)/(ln R - ln r) clipped to [0,1]:
//    the critical-scaling blocking profile (E-type, direction e1), defined
//    for r <= R^2.

#include <cmath>
#include <stdexcept>
#include <utility>

#include "wirehom/fem.hpp"
#include "wirehom/geometry.hpp"
#include "wirehom/mesh.hpp"
#include "wirehom/numerics.hpp"

namespace wirehom {

// Bump potential supported on the wire cross-section: carries the unit flux
// entering through the circle and spreads it as a uniform volumetric sink.
struct RadialBump {
  Vec2 center;
  double r = 0.0;

  double value(Vec2 z) const { return -(z - center).norm2() / (4.0 * pi * r * r); }
  Vec2 grad(Vec2 z) const { return (z - center) * (-1.0 / (2.0 * pi * r * r)); }
  Vec2 grad_perp(Vec2 z) const { return grad(z).perp(); }
  double laplacian() const { return -1.0 / (pi * r * r); }
  // Derivative along the outward ball normal, constant on the circle.
  double circle_conormal() const { return -1.0 / (2.0 * pi * r); }
  // Closed forms over B_r.
  double grad_l2_sq() const { return 1.0 / (8.0 * pi); }
  double laplacian_l2_sq() const { return 1.0 / (pi * r * r); }
};

inline RadialBump eval_u_r(const WireSpec& spec) {
  return RadialBump{spec.center, spec.radius};
}

struct VRSolution {
  WireSpec spec;
  Mesh2 mesh;
  ScalarField2 v;
  VecField2 grad_perp_v;   // psi restricted to V_r
  double energy_sq = 0.0;  // |grad v|^2 = |grad_perp v|^2 over V_r
  double residual_rel = 0.0;
  int iterations = 0;

  double hole_mean(int samples = 512) const {
    return ring_mean(mesh, v, spec.center, spec.radius, samples);
  }
  double guard_mean(int samples = 512) const {
    return ring_mean(mesh, v, spec.center, spec.guard_radius, samples);
  }
};

inline VRSolution solve_v_r(const WireSpec& spec, double h = 0.02,
                            double grading = 0.25) {
  VRSolution out;
  out.spec = spec;
  out.mesh = build_mesh(spec, h, grading);

  PoissonData data;
  data.source = 0.0;
  // Unit flux budget: the discrete hole polygon is slightly shorter than
  // the circle, so the density is scaled to its realized length to keep the
  // data exactly compatible.
  data.flux[EdgeTag::Top] = -1.0;
  data.flux[EdgeTag::Bottom] = 0.0;
  data.flux[EdgeTag::Hole] = 1.0 / out.mesh.tag_length(EdgeTag::Hole);
  data.normalization = Normalization::RingMeanZero;

  PoissonSolution sol = solve_poisson(out.mesh, data);
  out.v = std::move(sol.u);
  out.residual_rel = sol.residual_rel;
  out.iterations = sol.iterations;
  out.grad_perp_v = rotated_gradient(out.mesh, out.v);
  out.energy_sq = l2_norm_sq(out.mesh, out.grad_perp_v);
  return out;
}

// Transverse profile of the connecting cell function: analytic bump field
// inside the wire, discrete rotated gradient outside.
struct Psi2D {
  VRSolution outside;
  RadialBump inside;

  double l2_sq_outside = 0.0;       // = outside.energy_sq
  double l2_sq_inside = 0.0;        // 1/(8 pi)
  double curl_inside = 0.0;         // Lap(u_r), constant on B_r
  double curl_l2_sq_inside = 0.0;   // 1/(pi r^2)
  double weak_curl_outside = 0.0;   // interior circulation residual
  double tangential_mismatch = 0.0; // rel. RMS across the circle, 256 angles
  double defect_sq_outside = 0.0;   // int_{V_r} |psi - e1|^2
  double defect_sq_inside = 0.0;    // int_{B_r} |psi - e1|^2 = 1/(8pi) + pi r^2

  Vec2 eval(Vec2 z) const {
    if ((z - inside.center).norm() < inside.r) return inside.grad_perp(z);
    const int t = outside.mesh.locate(z);
    if (t < 0) throw std::runtime_error("Psi2D::eval: point outside cell");
    return outside.grad_perp_v.values[t];
  }
};

inline Psi2D assemble_psi_r(VRSolution vr, int n_angles = 256,
                            double mismatch_tol = 0.25) {
  Psi2D psi;
  psi.inside = eval_u_r(vr.spec);
  psi.l2_sq_outside = vr.energy_sq;
  psi.l2_sq_inside = psi.inside.grad_l2_sq();
  psi.curl_inside = psi.inside.laplacian();
  psi.curl_l2_sq_inside = psi.inside.laplacian_l2_sq();
  psi.weak_curl_outside = weak_curl_residual(vr.mesh, vr.grad_perp_v);

  const Vec2 c = vr.spec.center;
  const double r = vr.spec.radius;
  psi.defect_sq_inside = psi.inside.grad_l2_sq() + pi * r * r;
  psi.defect_sq_outside = 0.0;
  for (int t = 0; t < vr.mesh.tri_count(); ++t) {
    const Vec2 d = vr.grad_perp_v.values[t] - Vec2{1.0, 0.0};
    psi.defect_sq_outside += vr.mesh.area[t] * d.norm2();
  }

  // Tangential continuity across the circle: the analytic side contributes
  // the constant -1/(2 pi r); the discrete side is sampled inside the first
  // element layer.
  const double rho_out = r + 0.35 * vr.mesh.h_hole;
  const double scale = 1.0 / (2.0 * pi * r);
  double acc = 0.0;
  for (int k = 0; k < n_angles; ++k) {
    const double th = 2.0 * pi * (k + 0.5) / n_angles;
    const Vec2 dir{std::cos(th), std::sin(th)};
    const Vec2 tangent{-dir.y, dir.x};
    const int t = vr.mesh.locate(c + rho_out * dir);
    if (t < 0) throw std::runtime_error("assemble_psi_r: sample outside mesh");
    // Analytic side: tangential component of grad_perp(u_r) on the circle is
    // the constant circle co-normal of u_r itself, -1/(2 pi r).
    const double mismatch =
        vr.grad_perp_v.values[t].dot(tangent) - psi.inside.circle_conormal();
    acc += mismatch * mismatch;
  }
  psi.tangential_mismatch = std::sqrt(acc / n_angles) / scale;
  if (psi.tangential_mismatch > mismatch_tol)
    throw std::runtime_error(
        "assemble_psi_r: tangential mismatch across the circle exceeds tolerance "
        "(mesh too coarse)");

  psi.outside = std::move(vr);
  return psi;
}

// Transverse profile of the blocking field for direction e2.
struct Phi2D {
  WireSpec spec;
  Mesh2 mesh;  // hole radius = guard radius R
  ScalarField2 u;
  VecField2 field;  // grad_perp u on U = V \ B_R
  double residual_rel = 0.0;
  int iterations = 0;
  double weak_curl_interior = 0.0;
  double trace_error_weak = 0.0;       // max |weak phi.e1 - 1| on top/bottom
  double trace_error_pointwise = 0.0;  // mean |phi.e1 - 1| on edge triangles
  double defect_sq = 0.0;              // int_V |Phi - e1|^2 (zero-extended)

  Vec2 eval(Vec2 z) const {
    if ((z - spec.center).norm() <= spec.guard_radius) return {0.0, 0.0};
    const int t = mesh.locate(z);
    if (t < 0) throw std::runtime_error("Phi2D::eval: point outside cell");
    return field.values[t];
  }
};

inline Phi2D solve_phi_ortho(const WireSpec& spec, double h = 0.02,
                             double grading = 0.25) {
  Phi2D out;
  out.spec = spec;
  const double R = spec.guard_radius;
  out.mesh = build_mesh(make_wire(spec.center, R, R), h, grading);

  PoissonData data;
  // e2.grad(u) = -1 on both horizontal edges: co-normal -1 on top, +1 on
  // bottom (outward normals differ in sign); no flux through the circle.
  data.flux[EdgeTag::Top] = -1.0;
  data.flux[EdgeTag::Bottom] = 1.0;
  data.flux[EdgeTag::Hole] = 0.0;
  data.normalization = Normalization::PinFirstNode;

  PoissonSolution sol = solve_poisson(out.mesh, data);
  out.u = std::move(sol.u);
  out.residual_rel = sol.residual_rel;
  out.iterations = sol.iterations;
  out.field = rotated_gradient(out.mesh, out.u);
  out.weak_curl_interior = weak_curl_residual(out.mesh, out.field);

  // Weak trace of phi.e1 on the horizontal edges: the circulation functional
  // of phi at a top/bottom node equals (minus) the weak co-normal flux of u,
  // i.e. the prescribed data up to the solver residual.
  {
    std::vector<double> circ(out.mesh.n_dofs, 0.0), len(out.mesh.n_dofs, 0.0);
    for (int t = 0; t < out.mesh.tri_count(); ++t) {
      const Vec2 rq = out.field.values[t].perp();
      for (int a = 0; a < 3; ++a)
        circ[out.mesh.dof_of_node[out.mesh.tris[t][a]]] -=
            out.mesh.area[t] * rq.dot(out.mesh.grad_basis[t][a]);
    }
    std::vector<char> horizontal(out.mesh.n_dofs, 0);
    for (const BoundaryEdge& e : out.mesh.boundary) {
      if (e.tag != EdgeTag::Top && e.tag != EdgeTag::Bottom) continue;
      const double half = 0.5 * (out.mesh.nodes[e.b] - out.mesh.nodes[e.a]).norm();
      for (int id : {e.a, e.b}) {
        len[out.mesh.dof_of_node[id]] += half;
        horizontal[out.mesh.dof_of_node[id]] = 1;
      }
    }
    for (int d = 0; d < out.mesh.n_dofs; ++d) {
      if (!horizontal[d] || len[d] <= 0.0) continue;
      // co-normal flux is -1 (top) / +1 (bottom); phi.e1 = -(sign) * flux = 1.
      out.trace_error_weak =
          std::max(out.trace_error_weak, std::abs(std::abs(circ[d] / len[d]) - 1.0));
    }
  }
  {
    double acc = 0.0;
    int count = 0;
    for (const BoundaryEdge& e : out.mesh.boundary) {
      if (e.tag != EdgeTag::Top && e.tag != EdgeTag::Bottom) continue;
      const Vec2 mid = (out.mesh.nodes[e.a] + out.mesh.nodes[e.b]) * 0.5;
      const Vec2 inward{0.0, e.tag == EdgeTag::Top ? -1.0 : 1.0};
      const int t = out.mesh.locate(mid + inward * (0.25 * h));
      if (t < 0) continue;
      acc += std::abs(out.field.values[t].x - 1.0);
      ++count;
    }
    out.trace_error_pointwise = count ? acc / count : 0.0;
  }

  out.defect_sq = pi * R * R;  // zero extension inside the guard ball
  for (int t = 0; t < out.mesh.tri_count(); ++t) {
    const Vec2 d = out.field.values[t] - Vec2{1.0, 0.0};
    out.defect_sq += out.mesh.area[t] * d.norm2();
  }
  return out;
}

// Critical-scaling radial profile (E-type, direction e1); requires r <= R^2.
struct PhiCrit2D {
  Vec2 center;
  double r = 0.0;
  double R = 0.0;

  double log_ratio() const { return std::log(R) - std::log(r); }

  double value(Vec2 z) const {
    const double rho = (z - center).norm();
    if (rho <= r) return 0.0;
    if (rho >= R) return 1.0;
    return (std::log(rho) - std::log(r)) / log_ratio();
  }

  Vec2 grad(Vec2 z) const {
    const double rho = (z - center).norm();
    if (rho <= r || rho >= R) return {0.0, 0.0};
    return (z - center) * (1.0 / (log_ratio() * rho * rho));
  }

  double energy_closed() const { return 2.0 * pi / log_ratio(); }

  // Independent radial quadrature of |grad phi_r|^2 (no antiderivative).
  double energy_quadrature(int panels = 48, int points = 8) const {
    const double L = log_ratio();
    return integrate_geometric(
        [&](double rho) { return 2.0 * pi / (L * L * rho); }, r, R, panels, points);
  }

  // int_V (phi_r - 1)^2 over the unit square (profile is 1 outside B_R).
  double defect_sq(int panels = 48, int points = 8) const {
    const double L = log_ratio();
    const double annulus = integrate_geometric(
        [&](double rho) {
          const double d = (std::log(rho) - std::log(R)) / L;
          return 2.0 * pi * rho * d * d;
        },
        r, R, panels, points);
    return annulus + pi * r * r;
  }

  // Same quantity in closed form (substitution t = ln(R/rho)):
  // (2 pi R^2 / L^2) * (1/4 - e^{-2L}(L^2/2 + L/2 + 1/4)) + pi r^2.
  static double defect_sq_closed_log(double log_r, double R) {
    const double L = std::log(R) - log_r;
    const double tail = std::exp(-2.0 * L) * (0.5 * L * L + 0.5 * L + 0.25);
    return (2.0 * pi * R * R / (L * L)) * (0.25 - tail) +
           pi * std::exp(2.0 * log_r);
  }
  double defect_sq_closed() const { return defect_sq_closed_log(std::log(r), R); }
};

inline PhiCrit2D eval_phi_crit(const WireSpec& spec) {
  const double R = spec.guard_radius;
  if (!(spec.radius <= R * R))
    throw std::invalid_argument(
        "eval_phi_crit: critical profile requires r <= R^2");
  return PhiCrit2D{spec.center, spec.radius, R};
}

}  // namespace wirehom
