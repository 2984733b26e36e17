#include <catch2/catch_amalgamated.hpp>

#include <wirehom/cell3d.hpp>

#include <cmath>
#include <memory>

using namespace wirehom;

namespace {

// Shared expensive FEM profiles (built once per test binary).
std::shared_ptr<const Psi2D> gapped_psi() {
  static const auto psi = std::make_shared<const Psi2D>(assemble_psi_r(
      solve_v_r(make_wire({0.5, 0.5}, 0.1, 0.25, {{0.495, 0.505}}))));
  return psi;
}

std::shared_ptr<const Phi2D> standard_phi() {
  static const auto phi = std::make_shared<const Phi2D>(
      solve_phi_ortho(make_wire({0.5, 0.5}, 0.05, 0.25)));
  return phi;
}

PhiCrit2D wide_crit() { return PhiCrit2D{{0.5, 0.5}, 0.04, 0.4}; }

WireSpec wide_spec() { return make_wire({0.5, 0.5}, 0.04, 0.4); }

}  // namespace

TEST_CASE("connecting cell function obeys the slab and wire conventions") {
  const CellFunction3 cf = make_cell_function(gapped_psi());
  REQUIRE(cf.kind == CellKind::Psi);

  // Above the slab: the transported target; below: zero.
  const Vec3 above = cf.eval({0.3, 0.4, 1.5});
  CHECK(above.x == 0.0);
  CHECK(above.y == 1.0);
  CHECK(above.z == 0.0);
  CHECK(cf.eval({0.3, 0.4, -0.2}).norm() == 0.0);

  // Inside the ball where the wire is present the conductor forces zero.
  CHECK(cf.eval({0.2, 0.55, 0.5}).norm() == 0.0);

  // Inside the ball across a gap the bump profile fills the section.
  const Vec3 in_gap = cf.eval({0.5, 0.55, 0.5});
  const Vec2 bump = gapped_psi()->inside.grad_perp({0.55, 0.5});
  CHECK(in_gap.x == 0.0);
  CHECK(std::abs(in_gap.y - bump.x) < 1e-15);
  CHECK(std::abs(in_gap.z - bump.y) < 1e-15);

  // The curl is the constant Laplacian along the axis in gap sections only.
  const Vec3 curl_gap = cf.curl_eval({0.5, 0.55, 0.5});
  CHECK(std::abs(curl_gap.x - gapped_psi()->inside.laplacian()) < 1e-15);
  CHECK(curl_gap.y == 0.0);
  CHECK(cf.curl_eval({0.2, 0.55, 0.5}).norm() == 0.0);
  CHECK(cf.curl_eval({0.5, 0.9, 0.5}).norm() == 0.0);
}

TEST_CASE("blocking cell functions extend by their targets outside the slab") {
  const CellFunction3 ortho = make_cell_function(standard_phi());
  CHECK(ortho.eval({0.5, 0.5, 1.4}).y == 1.0);
  CHECK(ortho.eval({0.5, 0.5, -0.4}).y == 1.0);
  CHECK(ortho.eval({0.5, 0.5, 0.5}).norm() == 0.0);  // inside guard ball
  CHECK(ortho.curl_eval({0.5, 0.3, 0.5}).norm() == 0.0);

  const CellFunction3 crit = make_cell_function(wide_crit(), wide_spec());
  CHECK(crit.eval({0.5, 0.5, 0.5}).norm() == 0.0);       // on the wire
  CHECK(crit.eval({0.5, 0.5 + 0.45, 0.5}).x == 1.0);     // outside guard ball
  // Curl in the annulus: rotate the 2D gradient into the (e2, e3) plane.
  const Vec3 c = crit.curl_eval({0.5, 0.5 + 0.1, 0.5});
  const Vec2 g = wide_crit().grad({0.6, 0.5});
  CHECK(c.x == 0.0);
  CHECK(std::abs(c.y - g.y) < 1e-15);
  CHECK(std::abs(c.z + g.x) < 1e-15);

  const CellFunction3 triv = make_trivial_e3(wide_spec());
  CHECK(triv.eval({0.5, 0.5, 0.5}).norm() == 0.0);
  CHECK(triv.eval({0.5, 0.5, 1.2}).z == 1.0);
  CHECK(triv.eval({0.5, 0.5, -0.2}).z == 1.0);
  CHECK(triv.curl_eval({0.5, 0.5, 0.5}).norm() == 0.0);
}

TEST_CASE("cell function constructors validate their inputs") {
  CHECK_THROWS_AS(make_cell_function(std::shared_ptr<const Psi2D>{}),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_cell_function(std::shared_ptr<const Phi2D>{}),
                  std::invalid_argument);
  // Profile/wire mismatch is rejected.
  CHECK_THROWS_AS(
      make_cell_function(wide_crit(), make_wire({0.5, 0.5}, 0.05, 0.4)),
      std::invalid_argument);
}

TEST_CASE("defect pairs apply the closed-form eta weights per kind") {
  const double eta = 0.125;

  SECTION("trivial vertical target") {
    const DefectPair d = defect_pair(make_trivial_e3(wide_spec()), eta);
    CHECK(std::abs(d.a_sq - eta) < 1e-15);
    CHECK(d.b_sq == 0.0);
    CHECK(std::abs(d.a() - std::sqrt(eta)) < 1e-15);
  }

  SECTION("connecting kind with a gap") {
    const auto psi = gapped_psi();
    const DefectPair d = defect_pair(make_cell_function(psi), eta);
    const double gap = d.gap_measure;
    const double r = 0.1;
    CHECK(std::abs(gap - 0.01) < 1e-15);
    // Inside contributions are frozen closed forms weighted by |I|.
    const double inside = gap * (1.0 / (8.0 * pi) + pi * r * r);
    CHECK(std::abs(d.field_defect_sq_cell -
                   (psi->defect_sq_outside + inside)) < 1e-15);
    const double curl = gap / (pi * r * r);
    CHECK(std::abs(d.curl_sq_cell - curl) < 1e-12 * curl);
    CHECK(std::abs(d.a_sq - eta * d.field_defect_sq_cell) < 1e-15);
    CHECK(std::abs(d.b_sq - curl / eta) < 1e-12 * curl / eta);
    CHECK(d.weak_curl_residual < 1e-8);
  }

  SECTION("blocking kind, orthogonal direction") {
    const auto phi = standard_phi();
    const DefectPair d = defect_pair(make_cell_function(phi), eta);
    CHECK(std::abs(d.a_sq - eta * phi->defect_sq) < 1e-15);
    CHECK(d.b_sq == 0.0);
  }

  SECTION("blocking kind, critical profile") {
    const DefectPair d =
        defect_pair(make_cell_function(wide_crit(), wide_spec()), eta);
    const double L = std::log(0.4) - std::log(0.04);
    CHECK(std::abs(d.b_sq - 2.0 * pi / (L * eta)) < 1e-12);
    CHECK(d.a_sq > 0.0);
  }

  SECTION("eta domain") {
    CHECK_THROWS_AS(defect_pair(make_trivial_e3(wide_spec()), 0.0),
                    std::invalid_argument);
    CHECK_THROWS_AS(defect_pair(make_trivial_e3(wide_spec()), 1.5),
                    std::invalid_argument);
  }
}

TEST_CASE("log-domain critical ladder matches the direct path") {
  const double R = 0.4, eta = 0.0625;
  const double r = 0.02;
  const DefectPair direct =
      defect_pair(make_cell_function(PhiCrit2D{{0.5, 0.5}, r, R},
                                     make_wire({0.5, 0.5}, r, R)),
                  eta);
  const DefectPair via_log = phicrit_defect_pair_log(std::log(r), R, eta);
  CHECK(std::abs(direct.a_sq - via_log.a_sq) < 1e-5 * via_log.a_sq);
  CHECK(std::abs(direct.b_sq - via_log.b_sq) < 1e-12 * via_log.b_sq);

  // Underflowing radii remain finite in the log domain.
  const DefectPair deep = phicrit_defect_pair_log(-4096.0, R, 1.0 / 64.0);
  CHECK(std::isfinite(deep.a_sq));
  CHECK(std::isfinite(deep.b_sq));
  CHECK(deep.a_sq > 0.0);
  CHECK(deep.r == 0.0);  // the radius itself underflows; the pair does not

  CHECK_THROWS_AS(phicrit_defect_pair_log(std::log(0.3), 0.4, 0.125),
                  std::invalid_argument);
  CHECK_THROWS_AS(phicrit_defect_pair_log(-10.0, 0.4, 0.0),
                  std::invalid_argument);
}

TEST_CASE("defect CSV rows carry the ladder fields in order") {
  const DefectPair d = defect_pair(make_trivial_e3(wide_spec()), 0.25);
  const std::string row = defect_csv_row(d);
  CHECK(std::string(defect_csv_header()) == "eta,a,b,kind,r,gap_measure");
  CHECK(row.find("0.25") == 0);
  CHECK(row.find("TrivialE3") != std::string::npos);
}

TEST_CASE("tiling rescaling identity is exact and matches 3D sampling") {
  SECTION("per-cell summation audit") {
    for (int n : {1, 2, 4, 16}) {
      const TileNorms rel = tile_rescaling_discrepancy(0.37, 1.21, n);
      CHECK(rel.field_l2_sq < 1e-12);
      CHECK(rel.curl_l2_sq < 1e-12);
    }
    CHECK_THROWS_AS(tile_rescaling_discrepancy(1.0, 1.0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(rescale_tile_norms(1.0, 1.0, 0.0), std::invalid_argument);
  }

  SECTION("independent midpoint integration of a tiled profile") {
    // Tile the analytic blocking profile with period eta = 1/4 and integrate
    // |F(x/eta mod 1)|^2 over one slab layer (0,1)^2 x (0, eta) by midpoint
    // sampling; compare with eta * (unit-cell norm) from the identity.
    const CellFunction3 cf = make_cell_function(wide_crit(), wide_spec());
    const double eta = 0.25;

    double cell = 0.0;
    const int m = 96;
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        for (int k = 0; k < m; ++k)
          cell += cf.eval({(i + 0.5) / m, (j + 0.5) / m, (k + 0.5) / m}).norm2();
    cell /= double(m) * m * m;

    double tiled = 0.0;
    const int nx = 256, nz = 64;
    for (int i = 0; i < nx; ++i)
      for (int j = 0; j < nx; ++j)
        for (int k = 0; k < nz; ++k) {
          const Vec3 x{(i + 0.5) / nx, (j + 0.5) / nx, (k + 0.5) / nz * eta};
          const Vec3 cell_coord{std::fmod(x.x / eta, 1.0),
                                std::fmod(x.y / eta, 1.0), x.z / eta};
          tiled += cf.eval(cell_coord).norm2();
        }
    tiled *= eta / (double(nx) * nx * nz);  // volume of the layer: 1*1*eta

    const TileNorms closed = rescale_tile_norms(cell, 0.0, eta);
    INFO("tiled " << tiled << " closed " << closed.field_l2_sq);
    CHECK(std::abs(tiled - closed.field_l2_sq) <
          0.05 * std::max(closed.field_l2_sq, 1e-12));
  }
}

TEST_CASE("covariant transport validates on analytic profiles") {
  const CellFunction3 crit = make_cell_function(wide_crit(), wide_spec());

  SECTION("identity map is transparent") {
    const PiolaReport rep = piola_transport(DeformationMap::identity(16), crit);
    INFO(rep.message << " coarse " << rep.residual_coarse << " fine "
                     << rep.residual_fine << " samples " << rep.samples_coarse);
    REQUIRE(rep.valid);
    CHECK(rep.samples_coarse >= 32);
    CHECK(std::abs(rep.energy_transported - rep.energy_cell) <
          1e-12 * rep.energy_cell);
    CHECK(rep.residual_fine <= 0.75 * rep.residual_coarse + 1e-12);
  }

  SECTION("smooth shear map passes the refinement test") {
    auto phi_map = [](Vec3 p) {
      const double bump = std::sin(pi * p.z);
      return Vec3{p.x + 0.02 * bump * std::sin(2.0 * pi * p.y),
                  p.y - 0.015 * bump * std::cos(2.0 * pi * p.x), p.z};
    };
    const DeformationMap map = DeformationMap::from_analytic(phi_map, 16, 2.0);
    const PiolaReport rep = piola_transport(map, crit);
    INFO(rep.message << " coarse " << rep.residual_coarse << " fine "
                     << rep.residual_fine);
    REQUIRE(rep.valid);
    CHECK(rep.energy_transported <= rep.energy_bound * 1.05 + 1e-12);
  }

  SECTION("trivial profile transports with zero residual") {
    const PiolaReport rep =
        piola_transport(DeformationMap::identity(16), make_trivial_e3(wide_spec()));
    REQUIRE(rep.valid);
    CHECK(rep.residual_coarse < 1e-10);
  }

  SECTION("discrete profiles and bad grids are rejected") {
    CHECK_THROWS_AS(
        piola_transport(DeformationMap::identity(16),
                        make_cell_function(standard_phi())),
        std::invalid_argument);
    CHECK_THROWS_AS(piola_transport(DeformationMap::identity(16), crit, 4),
                    std::invalid_argument);
  }

  SECTION("invalid deformations produce a diagnostic, not a verdict") {
    auto phi_map = [](Vec3 p) {
      return Vec3{p.x, p.y, p.z + 0.05};  // moves the horizontal faces
    };
    const PiolaReport rep = piola_transport(
        DeformationMap::from_analytic(phi_map, 16, 2.0), crit);
    CHECK_FALSE(rep.valid);
    CHECK(rep.message.find("rejected") != std::string::npos);
  }
}
