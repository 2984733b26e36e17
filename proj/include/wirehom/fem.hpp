#pragma once

// P1 finite elements on Mesh2: assembly of the Laplace stiffness with
// periodic identification of the vertical edges, Neumann data per boundary
// tag, a kernel-projected conjugate-gradient solve of the singular
// pure-Neumann system, and the quadrature/postprocessing helpers used by
// the transverse cell problems.

#include <cmath>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseCore>

#include "wirehom/mesh.hpp"
#include "wirehom/numerics.hpp"

namespace wirehom {

struct ScalarField2 {
  std::vector<double> values;  // one per node
};

struct VecField2 {
  std::vector<Vec2> values;  // one per triangle (piecewise constant)
};

enum class Normalization { RingMeanZero, PinFirstNode, None };

struct PoissonData {
  // -Lap(u) = source with co-normal derivative flux[tag] on tagged edges
  // (outward normal of the meshed domain; on the hole it points into the
  // hole). Flux values are densities, constant per tag.
  double source = 0.0;
  std::map<EdgeTag, double> flux;
  Normalization normalization = Normalization::RingMeanZero;
  double solver_tol = 1e-12;
  int max_iterations = 40000;
};

struct PoissonSolution {
  ScalarField2 u;
  double residual_rel = 0.0;  // |K u - b| / |b|
  int iterations = 0;
};

// Mean of a P1 field over the circle |p - center| = s, trapezoidal rule
// with equispaced angles (exact weight 1/n per sample on a closed circle).
inline double ring_mean(const Mesh2& mesh, const ScalarField2& u, Vec2 center,
                        double s, int n_samples = 512) {
  if (n_samples < 256)
    throw std::invalid_argument("ring_mean: need at least 256 samples");
  if (s <= 0.0) throw std::invalid_argument("ring_mean: radius must be positive");
  // The circle must not dip into the hole; its nearest point to the hole
  // center sits at distance |d - s|. Touching the hole boundary is fine
  // (those samples lie on mesh edges).
  const double d = (center - mesh.hole_center).norm();
  if (std::abs(d - s) < mesh.hole_radius * (1.0 - 1e-12) - 1e-15)
    throw std::invalid_argument("ring_mean: circle intersects the hole");
  double total = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double th = 2.0 * pi * k / n_samples;
    const Vec2 p{center.x + s * std::cos(th), center.y + s * std::sin(th)};
    if (p.x < 0.0 || p.x > 1.0 || p.y < 0.0 || p.y > 1.0)
      throw std::invalid_argument("ring_mean: circle leaves the unit square");
    total += mesh.interpolate(u.values, p);
  }
  return total / n_samples;
}

inline PoissonSolution solve_poisson(const Mesh2& mesh, const PoissonData& data) {
  const int n = mesh.n_dofs;
  Eigen::SparseMatrix<double> stiff(n, n);
  {
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(mesh.tris.size() * 9);
    for (int t = 0; t < mesh.tri_count(); ++t)
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          trip.emplace_back(mesh.dof_of_node[mesh.tris[t][a]],
                            mesh.dof_of_node[mesh.tris[t][b]],
                            mesh.area[t] *
                                mesh.grad_basis[t][a].dot(mesh.grad_basis[t][b]));
    stiff.setFromTriplets(trip.begin(), trip.end());
  }

  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  double load_scale = 0.0;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const double w = data.source * mesh.area[t] / 3.0;
    load_scale += std::abs(w) * 3.0;
    for (int a = 0; a < 3; ++a) rhs[mesh.dof_of_node[mesh.tris[t][a]]] += w;
  }
  for (const BoundaryEdge& e : mesh.boundary) {
    const auto it = data.flux.find(e.tag);
    if (it == data.flux.end()) continue;
    const double w = it->second * (mesh.nodes[e.b] - mesh.nodes[e.a]).norm() * 0.5;
    load_scale += std::abs(w) * 2.0;
    rhs[mesh.dof_of_node[e.a]] += w;
    rhs[mesh.dof_of_node[e.b]] += w;
  }

  // Pure Neumann problem: the data must be compatible (total load zero).
  const double imbalance = rhs.sum();
  if (std::abs(imbalance) > 1e-10 * std::max(load_scale, 1e-30))
    throw std::invalid_argument("solve_poisson: incompatible Neumann data (total load " +
                                std::to_string(imbalance) + ")");

  Eigen::VectorXd sol(n);
  double resid = 0.0;
  int iters = 0;
  if (data.normalization == Normalization::PinFirstNode) {
    // Pin dof 0 to zero by row/column elimination; keeps the system SPD.
    std::vector<Eigen::Triplet<double>> trip;
    for (int k = 0; k < stiff.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(stiff, k); it; ++it) {
        if (it.row() == 0 || it.col() == 0) continue;
        trip.emplace_back(it.row(), it.col(), it.value());
      }
    trip.emplace_back(0, 0, 1.0);
    Eigen::SparseMatrix<double> pinned(n, n);
    pinned.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd rhs_p = rhs;
    rhs_p[0] = 0.0;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg(pinned);
    cg.setTolerance(data.solver_tol);
    cg.setMaxIterations(data.max_iterations);
    sol = cg.solve(rhs_p);
    iters = static_cast<int>(cg.iterations());
    resid = (stiff * sol - rhs).norm() / std::max(rhs.norm(), 1e-300);
  } else {
    // Kernel-projected CG on the singular consistent system: project the
    // constant kernel out of the right-hand side and start from zero.
    Eigen::VectorXd rhs_p = rhs;
    rhs_p.array() -= rhs.sum() / n;
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper>
        cg(stiff);
    cg.setTolerance(data.solver_tol);
    cg.setMaxIterations(data.max_iterations);
    sol = cg.solve(rhs_p);
    iters = static_cast<int>(cg.iterations());
    sol.array() -= sol.sum() / n;
    resid = (stiff * sol - rhs_p).norm() / std::max(rhs_p.norm(), 1e-300);
  }
  if (!(resid < 1e-9))
    throw std::runtime_error("solve_poisson: iterative solver did not converge (residual " +
                             std::to_string(resid) + ")");

  PoissonSolution out;
  out.u.values.resize(mesh.nodes.size());
  for (int i = 0; i < mesh.node_count(); ++i)
    out.u.values[i] = sol[mesh.dof_of_node[i]];
  out.residual_rel = resid;
  out.iterations = iters;

  if (data.normalization == Normalization::RingMeanZero) {
    // Exact shift: for the pure-Neumann problem the solution is unique up
    // to constants, so subtracting the ring mean imposes the constraint
    // exactly (same sampling operator as ring_mean).
    const double m = ring_mean(mesh, out.u, mesh.hole_center, mesh.guard_radius);
    for (double& v : out.u.values) v -= m;
  }
  return out;
}

inline VecField2 gradient(const Mesh2& mesh, const ScalarField2& u) {
  VecField2 g;
  g.values.resize(mesh.tris.size());
  for (int t = 0; t < mesh.tri_count(); ++t) {
    Vec2 acc{};
    for (int a = 0; a < 3; ++a)
      acc += u.values[mesh.tris[t][a]] * mesh.grad_basis[t][a];
    g.values[t] = acc;
  }
  return g;
}

// Rotated gradient (-d2 u, d1 u), the 2D counterpart of a 3D curl field.
inline VecField2 rotated_gradient(const Mesh2& mesh, const ScalarField2& u) {
  VecField2 g = gradient(mesh, u);
  for (Vec2& v : g.values) v = v.perp();
  return g;
}

// Exact integral of |q|^2 over the triangles selected by the predicate.
inline double l2_norm_sq(const Mesh2& mesh, const VecField2& q,
                         const std::function<bool(Vec2)>& in_region = {}) {
  double total = 0.0;
  bool any = false;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    if (in_region && !in_region(mesh.centroid(t))) continue;
    any = true;
    total += mesh.area[t] * q.values[t].norm2();
  }
  if (!any) std::cerr << "l2_norm_sq: empty region, returning 0\n";
  return total;
}

// Exact integral of u^2 (P1 mass-matrix formula per triangle).
inline double l2_norm_sq(const Mesh2& mesh, const ScalarField2& u,
                         const std::function<bool(Vec2)>& in_region = {}) {
  double total = 0.0;
  bool any = false;
  for (int t = 0; t < mesh.tri_count(); ++t) {
    if (in_region && !in_region(mesh.centroid(t))) continue;
    any = true;
    const double u0 = u.values[mesh.tris[t][0]];
    const double u1 = u.values[mesh.tris[t][1]];
    const double u2 = u.values[mesh.tris[t][2]];
    total += mesh.area[t] / 6.0 *
             (u0 * u0 + u1 * u1 + u2 * u2 + u0 * u1 + u0 * u2 + u1 * u2);
  }
  if (!any) std::cerr << "l2_norm_sq: empty region, returning 0\n";
  return total;
}

// Flux of a piecewise-constant field through the circle |p - center| = s,
// sampled at equispaced angles.
inline double flux_through_circle(const Mesh2& mesh, const VecField2& q,
                                  Vec2 center, double s, int n_samples = 512) {
  double total = 0.0;
  for (int k = 0; k < n_samples; ++k) {
    const double th = 2.0 * pi * k / n_samples;
    const Vec2 dir{std::cos(th), std::sin(th)};
    const Vec2 p = center + s * dir;
    const int t = mesh.locate(p);
    if (t < 0) throw std::runtime_error("flux_through_circle: sample outside mesh");
    total += q.values[t].dot(dir);
  }
  return total * 2.0 * pi * s / n_samples;
}

// Weak 2D curl of a piecewise-constant field: c_i = -sum_T |T| (J q)|_T .
// grad(phi_i) with J the quarter turn, which equals the circulation
// functional of q on the patch of node i. For q = rotated_gradient(u) this
// reduces to the Galerkin residual rows, so interior values vanish up to
// solver tolerance. Returns max |c_i| over interior (non-boundary) dofs.
inline double weak_curl_residual(const Mesh2& mesh, const VecField2& q) {
  std::vector<double> c(mesh.n_dofs, 0.0);
  for (int t = 0; t < mesh.tri_count(); ++t) {
    const Vec2 rq = q.values[t].perp();  // J q
    for (int a = 0; a < 3; ++a)
      c[mesh.dof_of_node[mesh.tris[t][a]]] -=
          mesh.area[t] * rq.dot(mesh.grad_basis[t][a]);
  }
  std::vector<char> boundary_dof(mesh.n_dofs, 0);
  for (int i = 0; i < mesh.node_count(); ++i)
    if (mesh.node_on_boundary[i]) boundary_dof[mesh.dof_of_node[i]] = 1;
  double worst = 0.0;
  for (int d = 0; d < mesh.n_dofs; ++d)
    if (!boundary_dof[d]) worst = std::max(worst, std::abs(c[d]));
  return worst;
}

inline void export_scalar_field(std::ostream& os, const Mesh2& mesh,
                                const ScalarField2& u) {
  os << "# scalar field v1 (node value)\n" << u.values.size() << '\n';
  for (std::size_t i = 0; i < u.values.size(); ++i)
    os << i << ' ' << fmt_g17(u.values[i]) << '\n';
  (void)mesh;
}

inline void export_vector_field(std::ostream& os, const Mesh2& mesh,
                                const VecField2& q) {
  os << "# vector field v1 (triangle vx vy)\n" << q.values.size() << '\n';
  for (std::size_t t = 0; t < q.values.size(); ++t)
    os << t << ' ' << fmt_g17(q.values[t].x) << ' ' << fmt_g17(q.values[t].y) << '\n';
  (void)mesh;
}

}  // namespace wirehom
