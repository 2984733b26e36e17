#include <catch2/catch_amalgamated.hpp>

#include <wirehom/mesh.hpp>

#include <cmath>
#include <sstream>

using namespace wirehom;

namespace {

void check_mesh_sanity(const Mesh2& mesh, const WireSpec& spec) {
  const MeshAudit a = mesh.audit();
  INFO("min_angle=" << a.min_angle_deg << " max_angle=" << a.max_angle_deg
                    << " nodes=" << mesh.node_count()
                    << " tris=" << mesh.tri_count());
  CHECK(a.conforming);
  CHECK(a.pairing_ok);
  CHECK(a.min_angle_deg > 5.0);
  CHECK(a.max_angle_deg < 170.0);
  CHECK(a.min_area > 0.0);
  CHECK(a.max_circle_deviation < 1e-12);

  // Unit-square sides have length exactly 1.
  for (EdgeTag tag : {EdgeTag::Top, EdgeTag::Bottom, EdgeTag::Left, EdgeTag::Right})
    CHECK(std::abs(mesh.tag_length(tag) - 1.0) < 1e-12);

  // Hole polygon perimeter: inscribed n-gon, deficit ~ (pi/n)^2/6.
  const double perim = mesh.tag_length(EdgeTag::Hole);
  const double target = 2.0 * pi * spec.radius;
  const int n = a.hole_edge_count;
  REQUIRE(n >= 32);
  CHECK(std::abs(perim - target) < target * 2.0 * (pi * pi / 6.0) / (n * n));

  // Triangle areas sum to the area of the punctured square (polygonal hole).
  double total = 0.0;
  for (int t = 0; t < mesh.tri_count(); ++t) total += mesh.area[t];
  const double hole_area = 0.5 * n * spec.radius * spec.radius *
                           std::sin(2.0 * pi / n);
  CHECK(std::abs(total - (1.0 - hole_area)) < 1e-10);

  // Every left-boundary node is periodically paired with a right node.
  int left_nodes = 0;
  for (const Vec2& p : mesh.nodes)
    if (p.x == 0.0) ++left_nodes;
  CHECK(static_cast<int>(mesh.periodic_pairs.size()) == left_nodes);

  // Guard-ring markers sit exactly on the circle of radius R.
  REQUIRE(!mesh.ring_markers.empty());
  for (int id : mesh.ring_markers)
    CHECK(std::abs((mesh.nodes[id] - spec.center).norm() - spec.guard_radius) <
          1e-12);
}

}  // namespace

TEST_CASE("default graded mesh passes the structural audit") {
  const WireSpec spec = make_wire({0.5, 0.5}, 0.05, 0.25);
  const Mesh2 mesh = build_mesh(spec);
  check_mesh_sanity(mesh, spec);

  const MeshAudit a = mesh.audit();
  // Graded sizes: near the hole close to the realized target, far field ~ h.
  CHECK(a.near_size > 0.5 * mesh.h_hole);
  CHECK(a.near_size < 2.0 * mesh.h_hole);
  CHECK(a.far_size > 0.5 * mesh.h);
  CHECK(a.far_size < 2.0 * mesh.h);
  CHECK_FALSE(mesh.hole_refined);  // h fine enough for r = 0.05
}

TEST_CASE("mesh point location and P1 interpolation reproduce linears") {
  const WireSpec spec = make_wire({0.5, 0.5}, 0.05, 0.25);
  const Mesh2 mesh = build_mesh(spec);

  std::vector<double> linear(mesh.nodes.size());
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i)
    linear[i] = 3.0 * mesh.nodes[i].x + 2.0 * mesh.nodes[i].y;

  for (const Vec2 p : {Vec2{0.1, 0.1}, Vec2{0.9, 0.2}, Vec2{0.5, 0.58},
                       Vec2{0.47, 0.44}, Vec2{0.05, 0.95}}) {
    const int t = mesh.locate(p);
    REQUIRE(t >= 0);
    const auto lam = mesh.barycentric(t, p);
    CHECK(std::min({lam[0], lam[1], lam[2]}) > -1e-9);
    CHECK(std::abs(lam[0] + lam[1] + lam[2] - 1.0) < 1e-12);
    CHECK(std::abs(mesh.interpolate(linear, p) - (3.0 * p.x + 2.0 * p.y)) < 1e-12);
  }

  // Points in the hole or outside the square are not located.
  CHECK(mesh.locate({0.5, 0.5}) < 0);
  CHECK(mesh.locate({1.5, 0.5}) < 0);
  CHECK_THROWS_AS(mesh.interpolate(linear, {0.5, 0.5}), std::runtime_error);
}

TEST_CASE("meshes stay sound for off-center wires and wide guards") {
  const WireSpec spec = make_wire({0.42, 0.61}, 0.01, 0.3);
  const Mesh2 mesh = build_mesh(spec);
  check_mesh_sanity(mesh, spec);
}

TEST_CASE("meshes handle very small hole radii with the r/4 clamp") {
  const double r = std::ldexp(1.0, -12);
  const WireSpec spec = make_wire({0.5, 0.5}, r, 0.25);
  const Mesh2 mesh = build_mesh(spec, 0.04);
  CHECK(mesh.hole_refined);  // grading*h > r/4 fires the clamp
  check_mesh_sanity(mesh, spec);
  CHECK(mesh.h_hole <= 0.25 * r * 1.05);
}

TEST_CASE("mesh builder rejects out-of-range parameters") {
  const WireSpec spec = make_wire({0.5, 0.5}, 0.05, 0.25);
  CHECK_THROWS_AS(build_mesh(spec, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(spec, 0.7), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(spec, 0.02, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(build_mesh(spec, 0.02, 1.5), std::invalid_argument);
}

TEST_CASE("plain-text mesh export lists every table with matching counts") {
  const WireSpec spec = make_wire({0.5, 0.5}, 0.05, 0.25);
  const Mesh2 mesh = build_mesh(spec, 0.05);
  std::ostringstream os;
  mesh.export_text(os);
  std::istringstream is(os.str());

  std::string word;
  is >> word;
  CHECK(word == "#");
  std::getline(is, word);  // rest of header line

  is >> word;
  REQUIRE(word == "hole");
  double cx, cy, r, R, h, grading;
  is >> cx >> cy >> r >> R >> h >> grading;
  CHECK(cx == 0.5);
  CHECK(r == 0.05);

  std::size_t count;
  is >> word >> count;
  REQUIRE(word == "nodes");
  CHECK(count == mesh.nodes.size());
  for (std::size_t i = 0; i < count; ++i) {
    std::size_t id;
    double x, y;
    is >> id >> x >> y;
    REQUIRE(id == i);
  }
  is >> word >> count;
  REQUIRE(word == "triangles");
  CHECK(count == mesh.tris.size());
}
