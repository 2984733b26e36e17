#pragma once

// Unstructured triangle meshes of the unit square with one circular hole.
//
// Node layout: the hole boundary carries equally spaced nodes exactly on the
// circle; concentric rings grow geometrically away from the hole until the
// local target size reaches the background size h; the rest of the square is
// covered by a uniform grid whose strictly interior nodes get a small
// deterministic jitter (avoids cocircular degeneracies in the Delaunay
// step). Left and right boundary columns share identical ordinates, which
// makes the periodic node pairing exact. A dedicated ring of nodes is placed
// on the guard circle |p - c| = R when it fits, so normalization circles are
// resolved by the mesh.
//
// Triangulation is incremental Bowyer-Watson with neighbor walks; hole
// triangles are removed afterwards, so the polygon through the circle nodes
// becomes the inner boundary.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "wirehom/geometry.hpp"
#include "wirehom/numerics.hpp"

namespace wirehom {

enum class EdgeTag { Bottom, Top, Left, Right, Hole };

inline const char* edge_tag_name(EdgeTag t) {
  switch (t) {
    case EdgeTag::Bottom: return "bottom";
    case EdgeTag::Top: return "top";
    case EdgeTag::Left: return "left";
    case EdgeTag::Right: return "right";
    case EdgeTag::Hole: return "hole";
  }
  return "?";
}

struct BoundaryEdge {
  int a = -1;
  int b = -1;
  EdgeTag tag = EdgeTag::Bottom;
};

struct MeshAudit {
  double min_angle_deg = 0.0;
  double max_angle_deg = 0.0;
  double min_area = 0.0;
  double max_circle_deviation = 0.0;  // hole nodes vs exact circle
  double near_size = 0.0;             // median hole-boundary edge length
  double far_size = 0.0;              // median edge length away from the hole
  int hole_edge_count = 0;
  bool pairing_ok = false;
  bool conforming = false;  // every interior edge shared by exactly 2 triangles
};

class Mesh2 {
 public:
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> tris;  // CCW
  std::vector<BoundaryEdge> boundary;
  std::vector<std::pair<int, int>> periodic_pairs;  // (right node, left node)
  std::vector<int> ring_markers;                    // nodes on |p - c| = R
  Vec2 hole_center;
  double hole_radius = 0.0;
  double guard_radius = 0.0;
  double h = 0.0;
  double grading = 0.0;
  double h_hole = 0.0;  // realized target size at the hole
  bool hole_refined = false;

  // Derived quantities, filled by finalize().
  std::vector<double> area;
  std::vector<std::array<Vec2, 3>> grad_basis;  // P1 basis gradients per tri
  std::vector<int> dof_of_node;                 // periodic identification
  int n_dofs = 0;
  std::vector<char> node_on_boundary;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int tri_count() const { return static_cast<int>(tris.size()); }

  double tag_length(EdgeTag tag) const {
    double len = 0.0;
    for (const BoundaryEdge& e : boundary)
      if (e.tag == tag) len += (nodes[e.b] - nodes[e.a]).norm();
    return len;
  }

  Vec2 centroid(int t) const {
    const auto& tri = tris[t];
    return (nodes[tri[0]] + nodes[tri[1]] + nodes[tri[2]]) * (1.0 / 3.0);
  }

  // Point location with a uniform bin index; returns triangle id or -1.
  int locate(Vec2 p, double tol = 1e-10) const {
    if (bins_.empty()) return locate_scan(p, tol);
    const int bi = std::clamp(static_cast<int>(p.x * nbins_), 0, nbins_ - 1);
    const int bj = std::clamp(static_cast<int>(p.y * nbins_), 0, nbins_ - 1);
    int best = -1;
    double best_def = -std::numeric_limits<double>::infinity();
    for (int t : bins_[bj * nbins_ + bi]) {
      const double def = bary_deficit(t, p);
      if (def >= -tol) return t;
      if (def > best_def) {
        best_def = def;
        best = t;
      }
    }
    if (best_def > -1e-6) return best;  // grazing the bin border
    return locate_scan(p, tol);
  }

  // Evaluate a P1 nodal field at p (used by circle means and samplers).
  double interpolate(const std::vector<double>& nodal, Vec2 p) const {
    const int t = locate(p);
    if (t < 0) throw std::runtime_error("Mesh2::interpolate: point outside mesh");
    const std::array<double, 3> lam = barycentric(t, p);
    const auto& tri = tris[t];
    return lam[0] * nodal[tri[0]] + lam[1] * nodal[tri[1]] + lam[2] * nodal[tri[2]];
  }

  std::array<double, 3> barycentric(int t, Vec2 p) const {
    const auto& tri = tris[t];
    const Vec2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
    const double inv = 1.0 / (2.0 * area[t]);
    return {(b - p).cross(c - p) * inv, (c - p).cross(a - p) * inv,
            (a - p).cross(b - p) * inv};
  }

  void finalize() {
    orient_and_cache();
    build_dofs();
    build_bins();
  }

  MeshAudit audit() const {
    MeshAudit a;
    a.min_angle_deg = 180.0;
    a.max_angle_deg = 0.0;
    a.min_area = std::numeric_limits<double>::infinity();
    for (int t = 0; t < tri_count(); ++t) {
      a.min_area = std::min(a.min_area, area[t]);
      for (int k = 0; k < 3; ++k) {
        const Vec2 p0 = nodes[tris[t][k]];
        const Vec2 p1 = nodes[tris[t][(k + 1) % 3]];
        const Vec2 p2 = nodes[tris[t][(k + 2) % 3]];
        const Vec2 u = p1 - p0, v = p2 - p0;
        const double ang =
            std::atan2(std::abs(u.cross(v)), u.dot(v)) * 180.0 / pi;
        a.min_angle_deg = std::min(a.min_angle_deg, ang);
        a.max_angle_deg = std::max(a.max_angle_deg, ang);
      }
    }
    std::vector<double> hole_lens, far_lens;
    for (const BoundaryEdge& e : boundary)
      if (e.tag == EdgeTag::Hole) {
        ++a.hole_edge_count;
        hole_lens.push_back((nodes[e.b] - nodes[e.a]).norm());
        for (int id : {e.a, e.b})
          a.max_circle_deviation =
              std::max(a.max_circle_deviation,
                       std::abs((nodes[id] - hole_center).norm() - hole_radius));
      }
    for (int t = 0; t < tri_count(); ++t) {
      if ((centroid(t) - hole_center).norm() < guard_radius + 2.0 * h) continue;
      for (int k = 0; k < 3; ++k)
        far_lens.push_back((nodes[tris[t][(k + 1) % 3]] - nodes[tris[t][k]]).norm());
    }
    auto median = [](std::vector<double>& v) {
      if (v.empty()) return 0.0;
      std::nth_element(v.begin(), v.begin() + v.size() / 2, v.end());
      return v[v.size() / 2];
    };
    a.near_size = median(hole_lens);
    a.far_size = median(far_lens);

    a.pairing_ok = !periodic_pairs.empty();
    for (const auto& [rn, ln] : periodic_pairs)
      if (std::abs(nodes[rn].y - nodes[ln].y) > 1e-12 ||
          std::abs(nodes[rn].x - 1.0) > 1e-12 || std::abs(nodes[ln].x) > 1e-12)
        a.pairing_ok = false;

    std::map<std::pair<int, int>, int> edge_count;
    for (const auto& tri : tris)
      for (int k = 0; k < 3; ++k) {
        const int u = tri[k], v = tri[(k + 1) % 3];
        ++edge_count[{std::min(u, v), std::max(u, v)}];
      }
    a.conforming = true;
    std::size_t boundary_edges = 0;
    for (const auto& [e, cnt] : edge_count) {
      if (cnt > 2) a.conforming = false;
      if (cnt == 1) ++boundary_edges;
    }
    if (boundary_edges != boundary.size()) a.conforming = false;
    return a;
  }

  // Plain-text export: node, triangle, boundary-edge, pairing and marker
  // tables; see docs/interface_reference.md for the column layout.
  void export_text(std::ostream& os) const {
    os << "# mesh v1\n";
    os << "hole " << fmt_g17(hole_center.x) << ' ' << fmt_g17(hole_center.y)
       << ' ' << fmt_g17(hole_radius) << ' ' << fmt_g17(guard_radius) << ' '
       << fmt_g17(h) << ' ' << fmt_g17(grading) << '\n';
    os << "nodes " << nodes.size() << '\n';
    for (std::size_t i = 0; i < nodes.size(); ++i)
      os << i << ' ' << fmt_g17(nodes[i].x) << ' ' << fmt_g17(nodes[i].y) << '\n';
    os << "triangles " << tris.size() << '\n';
    for (std::size_t t = 0; t < tris.size(); ++t)
      os << t << ' ' << tris[t][0] << ' ' << tris[t][1] << ' ' << tris[t][2] << '\n';
    os << "edges " << boundary.size() << '\n';
    for (const BoundaryEdge& e : boundary)
      os << e.a << ' ' << e.b << ' ' << edge_tag_name(e.tag) << '\n';
    os << "pairs " << periodic_pairs.size() << '\n';
    for (const auto& [rn, ln] : periodic_pairs) os << rn << ' ' << ln << '\n';
    os << "ring " << ring_markers.size() << '\n';
    for (int id : ring_markers) os << id << '\n';
  }

 private:
  double bary_deficit(int t, Vec2 p) const {
    const std::array<double, 3> lam = barycentric(t, p);
    return std::min({lam[0], lam[1], lam[2]});
  }

  int locate_scan(Vec2 p, double tol) const {
    int best = -1;
    double best_def = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < tri_count(); ++t) {
      const double def = bary_deficit(t, p);
      if (def > best_def) {
        best_def = def;
        best = t;
      }
      if (def >= -tol) return t;
    }
    return best_def > -1e-9 ? best : -1;
  }

  void orient_and_cache() {
    area.resize(tris.size());
    grad_basis.resize(tris.size());
    for (std::size_t t = 0; t < tris.size(); ++t) {
      auto& tri = tris[t];
      Vec2 a = nodes[tri[0]], b = nodes[tri[1]], c = nodes[tri[2]];
      double twice = (b - a).cross(c - a);
      if (twice < 0.0) {
        std::swap(tri[1], tri[2]);
        std::swap(b, c);
        twice = -twice;
      }
      if (!(twice > 0.0))
        throw std::runtime_error("Mesh2: degenerate triangle");
      area[t] = 0.5 * twice;
      // grad of basis i is the inward normal of the opposite edge / (2A).
      grad_basis[t][0] = (c - b).perp() * (1.0 / twice);
      grad_basis[t][1] = (a - c).perp() * (1.0 / twice);
      grad_basis[t][2] = (b - a).perp() * (1.0 / twice);
    }
    node_on_boundary.assign(nodes.size(), 0);
    for (const BoundaryEdge& e : boundary) {
      node_on_boundary[e.a] = 1;
      node_on_boundary[e.b] = 1;
    }
  }

  void build_dofs() {
    dof_of_node.assign(nodes.size(), -1);
    std::vector<int> right_partner(nodes.size(), -1);
    for (const auto& [rn, ln] : periodic_pairs) right_partner[rn] = ln;
    int next = 0;
    for (int i = 0; i < node_count(); ++i)
      if (right_partner[i] < 0) dof_of_node[i] = next++;
    for (int i = 0; i < node_count(); ++i)
      if (right_partner[i] >= 0) dof_of_node[i] = dof_of_node[right_partner[i]];
    n_dofs = next;
  }

  void build_bins() {
    nbins_ = std::max(4, static_cast<int>(std::floor(1.0 / std::max(h, 1e-3))));
    nbins_ = std::min(nbins_, 512);
    bins_.assign(static_cast<std::size_t>(nbins_) * nbins_, {});
    for (int t = 0; t < tri_count(); ++t) {
      double x0 = 1e30, x1 = -1e30, y0 = 1e30, y1 = -1e30;
      for (int k = 0; k < 3; ++k) {
        const Vec2 p = nodes[tris[t][k]];
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
      }
      const int i0 = std::clamp(static_cast<int>(x0 * nbins_) - 1, 0, nbins_ - 1);
      const int i1 = std::clamp(static_cast<int>(x1 * nbins_) + 1, 0, nbins_ - 1);
      const int j0 = std::clamp(static_cast<int>(y0 * nbins_) - 1, 0, nbins_ - 1);
      const int j1 = std::clamp(static_cast<int>(y1 * nbins_) + 1, 0, nbins_ - 1);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          bins_[static_cast<std::size_t>(j) * nbins_ + i].push_back(t);
    }
  }

  int nbins_ = 0;
  std::vector<std::vector<int>> bins_;
};

namespace detail {

// Incremental Delaunay triangulation (Bowyer-Watson with neighbor walks).
class Delaunay {
 public:
  explicit Delaunay(const std::vector<Vec2>& pts) : pts_(pts) {
    pts_.insert(pts_.begin(), {Vec2{-20.0, -20.0}, Vec2{40.0, -20.0}, Vec2{0.5, 45.0}});
    tris_.push_back({{0, 1, 2}, {-1, -1, -1}, true});
    std::vector<int> order(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) order[i] = static_cast<int>(i) + 3;
    std::mt19937 rng(0x5eedu);
    std::shuffle(order.begin(), order.end(), rng);
    int hint = 0;
    for (int id : order) hint = insert(id, hint);
  }

  // Triangles by original point ids, super-triangle removed.
  std::vector<std::array<int, 3>> triangles() const {
    std::vector<std::array<int, 3>> out;
    for (const Tri& t : tris_) {
      if (!t.alive) continue;
      if (t.v[0] < 3 || t.v[1] < 3 || t.v[2] < 3) continue;
      out.push_back({t.v[0] - 3, t.v[1] - 3, t.v[2] - 3});
    }
    return out;
  }

 private:
  struct Tri {
    std::array<int, 3> v;
    std::array<int, 3> nb;  // neighbor across edge (v[k], v[k+1])
    bool alive = true;
  };

  static double orient(Vec2 a, Vec2 b, Vec2 c) { return (b - a).cross(c - a); }

  bool in_circle(const Tri& t, Vec2 p) const {
    const Vec2 a = pts_[t.v[0]], b = pts_[t.v[1]], c = pts_[t.v[2]];
    const double ax = a.x - p.x, ay = a.y - p.y;
    const double bx = b.x - p.x, by = b.y - p.y;
    const double cx = c.x - p.x, cy = c.y - p.y;
    const double det = (ax * ax + ay * ay) * (bx * cy - cx * by) -
                       (bx * bx + by * by) * (ax * cy - cx * ay) +
                       (cx * cx + cy * cy) * (ax * by - bx * ay);
    if (std::abs(det) > 1e-18) return det > 0.0;
    // Near-degenerate: recompute in extended precision.
    const long double axl = a.x - (long double)p.x, ayl = a.y - (long double)p.y;
    const long double bxl = b.x - (long double)p.x, byl = b.y - (long double)p.y;
    const long double cxl = c.x - (long double)p.x, cyl = c.y - (long double)p.y;
    const long double detl = (axl * axl + ayl * ayl) * (bxl * cyl - cxl * byl) -
                             (bxl * bxl + byl * byl) * (axl * cyl - cxl * ayl) +
                             (cxl * cxl + cyl * cyl) * (axl * byl - bxl * ayl);
    return detl > 0.0L;
  }

  int locate(Vec2 p, int hint) const {
    int cur = hint;
    for (int guard = 0; guard < 1 << 20; ++guard) {
      const Tri& t = tris_[cur];
      int next = -1;
      for (int k = 0; k < 3; ++k) {
        const Vec2 a = pts_[t.v[k]], b = pts_[t.v[(k + 1) % 3]];
        if (orient(a, b, p) < -1e-15) {
          next = t.nb[k];
          break;
        }
      }
      if (next < 0) return cur;
      cur = next;
    }
    throw std::runtime_error("Delaunay::locate: walk did not terminate");
  }

  int insert(int pid, int hint) {
    const Vec2 p = pts_[pid];
    const int seed = locate(p, hint);

    // Grow the cavity of triangles whose circumcircle contains p.
    std::vector<int> cavity;
    std::vector<char> in_cavity(tris_.size(), 0);
    std::vector<int> stack{seed};
    in_cavity[seed] = 1;
    while (!stack.empty()) {
      const int ti = stack.back();
      stack.pop_back();
      cavity.push_back(ti);
      for (int nb : tris_[ti].nb) {
        if (nb < 0 || in_cavity[nb]) continue;
        if (in_circle(tris_[nb], p)) {
          in_cavity[nb] = 1;
          stack.push_back(nb);
        }
      }
    }

    // Collect the boundary fan of the cavity: edges whose neighbor is
    // outside, ordered (u, w) so that new triangles (p, u, w) are CCW.
    struct FanEdge {
      int u, w, outside;
    };
    std::vector<FanEdge> fan;
    for (int ti : cavity) {
      const Tri& t = tris_[ti];
      for (int k = 0; k < 3; ++k) {
        const int nb = t.nb[k];
        if (nb >= 0 && in_cavity[nb]) continue;
        fan.push_back({t.v[k], t.v[(k + 1) % 3], nb});
      }
    }
    for (int ti : cavity) tris_[ti].alive = false;

    std::map<int, int> next_of;  // u -> fan index, to chain edges around p
    for (std::size_t f = 0; f < fan.size(); ++f) next_of[fan[f].u] = static_cast<int>(f);

    std::vector<int> created(fan.size());
    for (std::size_t f = 0; f < fan.size(); ++f) {
      created[f] = static_cast<int>(tris_.size());
      tris_.push_back({{pid, fan[f].u, fan[f].w}, {-1, fan[f].outside, -1}, true});
      in_cavity.push_back(0);
    }
    for (std::size_t f = 0; f < fan.size(); ++f) {
      Tri& t = tris_[created[f]];
      // Edge (p, u): neighbor is the fan triangle ending at u.
      // Edge (w, p): neighbor is the fan triangle starting at w.
      const int succ = next_of.at(fan[f].w);
      t.nb[2] = created[succ];
      tris_[created[succ]].nb[0] = created[f];
      const int out = fan[f].outside;
      if (out >= 0) {
        Tri& o = tris_[out];
        for (int k = 0; k < 3; ++k)
          if ((o.v[k] == fan[f].w && o.v[(k + 1) % 3] == fan[f].u)) o.nb[k] = created[f];
      }
    }
    return created.empty() ? seed : created[0];
  }

  std::vector<Vec2> pts_;
  std::vector<Tri> tris_;
};

}  // namespace detail

// Graded periodic mesh of the unit square minus the hole B_r(center).
// h: background target size; grading: near-hole size factor (the realized
// near-hole size is min(grading*h, r/4), with a warning when the r/4 clamp
// fires because h > r).
inline Mesh2 build_mesh(const WireSpec& spec, double h = 0.02,
                        double grading = 0.25) {
  if (!(h > 0.0 && h < 0.5))
    throw std::invalid_argument("build_mesh: h out of range");
  if (!(grading > 0.0 && grading <= 1.0))
    throw std::invalid_argument("build_mesh: grading must lie in (0, 1]");
  const Vec2 c = spec.center;
  const double r = spec.radius;
  const double R = spec.guard_radius;

  Mesh2 mesh;
  mesh.hole_center = c;
  mesh.hole_radius = r;
  mesh.guard_radius = R;
  mesh.h = h;
  mesh.grading = grading;
  mesh.hole_refined = grading * h > 0.25 * r;
  if (mesh.hole_refined)
    std::cerr << "build_mesh: near-hole size clamped to r/4 = " << 0.25 * r
              << " (h too coarse for hole radius " << r << ")\n";
  const double lam0_target = std::min(grading * h, 0.25 * r);

  const int n_circle = std::max(32, static_cast<int>(std::lround(2.0 * pi * r / lam0_target)));
  const double lam0 = 2.0 * pi * r / n_circle;
  mesh.h_hole = lam0;

  const double edge_dist =
      std::min(std::min(c.x, 1.0 - c.x), std::min(c.y, 1.0 - c.y));
  const double max_reach = edge_dist - 1.2 * h;

  // Local target size at distance d from the hole boundary.
  const double slope = std::clamp((h - lam0) / (2.0 * r), 0.08, 0.5);
  const auto local_size = [&](double d) { return std::min(h, lam0 + slope * d); };

  std::vector<Vec2> pts;
  std::vector<int> circle_ids, ring_marker_ids;

  // Hole boundary nodes, exactly on the circle.
  for (int k = 0; k < n_circle; ++k) {
    const double th = 2.0 * pi * k / n_circle;
    circle_ids.push_back(static_cast<int>(pts.size()));
    pts.push_back({c.x + r * std::cos(th), c.y + r * std::sin(th)});
  }

  // Graded concentric rings; one ring snaps onto the guard circle R when
  // the growth passes it.
  double s = r;
  double last_ring = r;
  bool guard_done = (R <= r * (1.0 + 1e-12)) || (R >= max_reach);
  if (R <= r * (1.0 + 1e-12)) ring_marker_ids = circle_ids;
  int ring_index = 0;
  while (true) {
    const double lam = local_size(s - r);
    double s_next = s + lam;
    bool on_guard = false;
    if (!guard_done && s_next >= R - 0.25 * lam) {
      s_next = R;
      on_guard = true;
    }
    if (s_next >= max_reach) break;
    const double lam_here = local_size(s_next - r);
    const int count = std::max(12, static_cast<int>(std::lround(2.0 * pi * s_next / lam_here)));
    const double offset = (ring_index % 2 ? 0.5 : 0.0) * 2.0 * pi / count + 0.03 * ring_index;
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * pi * k / count + offset;
      const Vec2 p{c.x + s_next * std::cos(th), c.y + s_next * std::sin(th)};
      if (p.x < 0.45 * h || p.x > 1.0 - 0.45 * h || p.y < 0.45 * h ||
          p.y > 1.0 - 0.45 * h)
        continue;
      if (on_guard) ring_marker_ids.push_back(static_cast<int>(pts.size()));
      pts.push_back(p);
    }
    if (on_guard) guard_done = true;
    s = s_next;
    last_ring = s_next;
    ++ring_index;
    if (local_size(s - r) >= h * 0.999) break;
  }

  // Standalone guard ring when the graded zone stopped before reaching R.
  bool standalone_guard = false;
  if (!guard_done && R < max_reach) {
    standalone_guard = true;
    const int count = std::max(16, static_cast<int>(std::lround(2.0 * pi * R / h)));
    for (int k = 0; k < count; ++k) {
      const double th = 2.0 * pi * k / count + 0.015;
      const Vec2 p{c.x + R * std::cos(th), c.y + R * std::sin(th)};
      if (p.x < 0.45 * h || p.x > 1.0 - 0.45 * h || p.y < 0.45 * h ||
          p.y > 1.0 - 0.45 * h)
        continue;
      ring_marker_ids.push_back(static_cast<int>(pts.size()));
      pts.push_back(p);
    }
    guard_done = true;
  }

  // Background grid; boundary nodes stay exact, interior nodes get a small
  // deterministic jitter. Nodes too close to the ring zones are dropped.
  const int nx = std::max(4, static_cast<int>(std::lround(1.0 / h)));
  const double gx = 1.0 / nx;
  const double keepout = last_ring + 0.55 * std::max(local_size(last_ring - r), gx);
  for (int j = 0; j <= nx; ++j)
    for (int i = 0; i <= nx; ++i) {
      Vec2 p{i * gx, j * gx};
      const bool on_bd = (i == 0 || i == nx || j == 0 || j == nx);
      const double dist_c = (p - c).norm();
      if (!on_bd) {
        if (dist_c < keepout) continue;
        if (standalone_guard && std::abs(dist_c - R) < 0.5 * h) continue;
        p.x += 0.10 * gx * (hash01(i, j) - 0.5);
        p.y += 0.10 * gx * (hash01(j + 7919, i) - 0.5);
      } else if (dist_c < last_ring + 0.3 * gx) {
        throw std::runtime_error("build_mesh: hole grading zone touches the outer boundary");
      }
      pts.push_back(p);
    }

  detail::Delaunay dt(pts);
  mesh.nodes = pts;
  for (const auto& tri : dt.triangles()) {
    const Vec2 g = (pts[tri[0]] + pts[tri[1]] + pts[tri[2]]) * (1.0 / 3.0);
    if ((g - c).norm() < r) continue;  // hole triangle
    mesh.tris.push_back(tri);
  }

  // Boundary edges = edges with exactly one adjacent triangle.
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : mesh.tris)
    for (int k = 0; k < 3; ++k) {
      const int u = tri[k], v = tri[(k + 1) % 3];
      ++edge_count[{std::min(u, v), std::max(u, v)}];
    }
  const double btol = 1e-12;
  for (const auto& [e, cnt] : edge_count) {
    if (cnt != 1) continue;
    const Vec2 pa = mesh.nodes[e.first], pb = mesh.nodes[e.second];
    EdgeTag tag;
    if (pa.y < btol && pb.y < btol) tag = EdgeTag::Bottom;
    else if (pa.y > 1.0 - btol && pb.y > 1.0 - btol) tag = EdgeTag::Top;
    else if (pa.x < btol && pb.x < btol) tag = EdgeTag::Left;
    else if (pa.x > 1.0 - btol && pb.x > 1.0 - btol) tag = EdgeTag::Right;
    else {
      const double da = std::abs((pa - c).norm() - r);
      const double db = std::abs((pb - c).norm() - r);
      if (da < 1e-9 && db < 1e-9) tag = EdgeTag::Hole;
      else throw std::runtime_error("build_mesh: unclassifiable boundary edge");
    }
    mesh.boundary.push_back({e.first, e.second, tag});
  }

  // Periodic pairing: identical ordinate sets on the two vertical edges.
  std::vector<std::pair<double, int>> left, right;
  for (int i = 0; i < mesh.node_count(); ++i) {
    if (mesh.nodes[i].x < btol) left.push_back({mesh.nodes[i].y, i});
    else if (mesh.nodes[i].x > 1.0 - btol) right.push_back({mesh.nodes[i].y, i});
  }
  std::sort(left.begin(), left.end());
  std::sort(right.begin(), right.end());
  if (left.size() != right.size())
    throw std::runtime_error("build_mesh: periodic boundary node counts differ");
  for (std::size_t k = 0; k < left.size(); ++k) {
    if (std::abs(left[k].first - right[k].first) > 1e-12)
      throw std::runtime_error("build_mesh: periodic boundary nodes do not match");
    mesh.periodic_pairs.push_back({right[k].second, left[k].second});
  }

  mesh.ring_markers = ring_marker_ids;
  mesh.finalize();
  return mesh;
}

}  // namespace wirehom
