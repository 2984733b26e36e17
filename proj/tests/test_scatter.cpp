#include <catch2/catch_amalgamated.hpp>

#include <wirehom/scatter.hpp>

#include <algorithm>
#include <cmath>
#include <complex>

#include "oracles.hpp"

using namespace wirehom;

namespace {

MediaPair vacuum_pair() { return {}; }

MediaPair glass_pair() {
  MediaPair m;
  m.eps_plus = {4.0, 0.0};
  return m;
}

Incidence normal_hit() { return {}; }

double cabs(cplx v) { return std::abs(v); }

}  // namespace

TEST_CASE("normal incidence on matched media reproduces the kind identities") {
  const MediaPair m = vacuum_pair();
  const Incidence inc = normal_hit();

  SECTION("reflecting interface: R = -I, T = 0") {
    const ScatteringResult s = scattering_matrices(m, inc, InterfaceKind::Reflecting);
    CHECK(s.comp1.r == cplx{-1.0, 0.0});
    CHECK(s.comp2.r == cplx{-1.0, 0.0});
    CHECK(s.comp1.t == cplx{0.0, 0.0});
    CHECK(s.comp2.t == cplx{0.0, 0.0});
    CHECK(s.R(1, 2) == cplx{0.0, 0.0});
    CHECK(s.R(2, 1) == cplx{0.0, 0.0});
  }
  SECTION("inactive interface on matched media: R = 0, T = I") {
    const ScatteringResult s = scattering_matrices(m, inc, InterfaceKind::Inactive);
    CHECK(cabs(s.comp1.r) < 1e-15);
    CHECK(cabs(s.comp2.r) < 1e-15);
    CHECK(cabs(s.comp1.t - 1.0) < 1e-15);
    CHECK(cabs(s.comp2.t - 1.0) < 1e-15);
  }
  SECTION("polarizing interfaces act per component") {
    const ScatteringResult p1 =
        scattering_matrices(m, inc, InterfaceKind::PolarizingE1);
    CHECK(p1.R(1, 1) == cplx{-1.0, 0.0});
    CHECK(cabs(p1.R(2, 2)) < 1e-15);
    CHECK(p1.T(1, 1) == cplx{0.0, 0.0});
    CHECK(cabs(p1.T(2, 2) - 1.0) < 1e-15);

    const ScatteringResult p2 =
        scattering_matrices(m, inc, InterfaceKind::PolarizingE2);
    CHECK(cabs(p2.R(1, 1)) < 1e-15);
    CHECK(p2.R(2, 2) == cplx{-1.0, 0.0});
    CHECK(cabs(p2.T(1, 1) - 1.0) < 1e-15);
    CHECK(p2.T(2, 2) == cplx{0.0, 0.0});
  }
  SECTION("every matched-media kind conserves power exactly") {
    for (InterfaceKind k :
         {InterfaceKind::Reflecting, InterfaceKind::Inactive,
          InterfaceKind::PolarizingE1, InterfaceKind::PolarizingE2}) {
      const EnergyBalance eb = energy_balance(scattering_matrices(m, inc, k));
      CHECK(eb.lossless);
      CHECK(std::abs(eb.component1 - 1.0) < 1e-12);
      CHECK(std::abs(eb.component2 - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("normal-incidence quarter-space matches the index-contrast formula") {
  const ScatteringResult s =
      scattering_matrices(glass_pair(), normal_hit(), InterfaceKind::Inactive);

  const double r_expected = oracle::fresnel_normal_r(1.0, 2.0);
  CHECK(std::abs(r_expected + 1.0 / 3.0) < 1e-15);  // oracle self-check
  for (int i : {1, 2}) {
    CHECK(cabs(s.component(i).r - r_expected) < 1e-14);
    CHECK(cabs(s.component(i).t - (1.0 + r_expected)) < 1e-14);
  }
  CHECK(cabs(s.k3_minus - cplx{1.0, 0.0}) < 1e-14);  // omega = 1
  CHECK(cabs(s.k3_plus - cplx{2.0, 0.0}) < 1e-14);

  const EnergyBalance eb = energy_balance(s);
  CHECK(std::abs(eb.component1 - 1.0) < 1e-15);
  CHECK(std::abs(eb.component2 - 1.0) < 1e-15);

  // Reversing the media contrast flips the reflection sign.
  MediaPair swapped;
  swapped.eps_minus = {4.0, 0.0};
  const ScatteringResult sw =
      scattering_matrices(swapped, normal_hit(), InterfaceKind::Inactive);
  CHECK(cabs(sw.comp1.r + s.comp1.r) < 1e-14);
}

TEST_CASE("oblique incidence splits into the classic S and P coefficients") {
  Incidence inc;
  inc.plane = IncidencePlane::Plane13;
  inc.theta_deg = 30.0;

  CHECK(component_polarization(IncidencePlane::Plane13, 1) == Polarization::P);
  CHECK(component_polarization(IncidencePlane::Plane13, 2) == Polarization::S);
  CHECK(component_polarization(IncidencePlane::Plane23, 1) == Polarization::S);
  CHECK(component_polarization(IncidencePlane::Plane23, 2) == Polarization::P);

  const ScatteringResult s =
      scattering_matrices(glass_pair(), inc, InterfaceKind::Inactive);

  // Independent angle-domain formulas (Snell + cosine admittances, n2 = 2).
  const double th = 30.0 * pi / 180.0;
  const double cos_i = std::cos(th);
  const double cos_t = std::sqrt(1.0 - std::pow(std::sin(th) / 2.0, 2));
  const double rs = (cos_i - 2.0 * cos_t) / (cos_i + 2.0 * cos_t);
  const double rp = (1.0 / cos_i - 2.0 / cos_t) / (1.0 / cos_i + 2.0 / cos_t);

  CHECK(cabs(s.comp2.r - rs) < 1e-14);        // comp2 is S in the e1-e3 plane
  CHECK(cabs(s.comp1.r - rp) < 1e-14);        // comp1 is P
  CHECK(cabs(s.comp1.t - (1.0 + rp)) < 1e-14);
  CHECK(std::abs(s.kt - std::sin(th)) < 1e-15);

  const EnergyBalance eb = energy_balance(s);
  CHECK(std::abs(eb.component1 - 1.0) < 1e-12);
  CHECK(std::abs(eb.component2 - 1.0) < 1e-12);

  // The same physics in the e2-e3 plane swaps the component labels.
  Incidence inc23 = inc;
  inc23.plane = IncidencePlane::Plane23;
  const ScatteringResult s23 =
      scattering_matrices(glass_pair(), inc23, InterfaceKind::Inactive);
  CHECK(cabs(s23.comp1.r - rs) < 1e-14);
  CHECK(cabs(s23.comp2.r - rp) < 1e-14);
}

TEST_CASE("power balances to roundoff across a randomized lossless sweep") {
  const InterfaceKind kinds[] = {InterfaceKind::Reflecting,
                                 InterfaceKind::Inactive,
                                 InterfaceKind::PolarizingE1,
                                 InterfaceKind::PolarizingE2};
  int checked = 0;
  for (std::uint64_t trial = 0; trial < 60; ++trial) {
    MediaPair m;
    m.eps_minus = {1.0 + 2.0 * hash01(trial, 0), 0.0};
    m.eps_plus = {0.5 + 3.5 * hash01(trial, 1), 0.0};
    m.mu_minus = {0.5 + 1.5 * hash01(trial, 2), 0.0};
    m.mu_plus = {0.5 + 1.5 * hash01(trial, 3), 0.0};
    m.omega = 0.5 + 2.0 * hash01(trial, 4);

    Incidence inc;
    const double theta = 80.0 * hash01(trial, 5);
    if (theta < 1.0) {
      inc.plane = IncidencePlane::Normal;
      inc.theta_deg = 0.0;
    } else {
      inc.plane = hash01(trial, 6) < 0.5 ? IncidencePlane::Plane13
                                         : IncidencePlane::Plane23;
      inc.theta_deg = theta;
    }

    const InterfaceKind kind = kinds[trial % 4];
    const ScatteringResult s = scattering_matrices(m, inc, kind);
    const EnergyBalance eb = energy_balance(s);
    REQUIRE(eb.lossless);
    // Total internal reflection included: evanescent transmission carries no
    // real power and |r| = 1, so the balance still closes exactly.
    CHECK(std::abs(eb.component1 - 1.0) < 1e-12);
    CHECK(std::abs(eb.component2 - 1.0) < 1e-12);
    ++checked;
  }
  CHECK(checked == 60);
}

TEST_CASE("dirichlet reflection ignores the media entirely") {
  MediaPair m;
  m.eps_minus = {2.3, 0.0};
  m.eps_plus = {0.7, 1.9};
  m.mu_plus = {1.4, 0.2};
  m.omega = 3.0;
  const ScatteringResult s =
      scattering_matrices(m, normal_hit(), InterfaceKind::Reflecting);
  CHECK(s.comp1.r == cplx{-1.0, 0.0});
  CHECK(s.comp1.t == cplx{0.0, 0.0});
}

TEST_CASE("a lossy transmission side absorbs part of the power") {
  MediaPair m;
  m.eps_plus = {2.0, 1.0};
  const ScatteringResult s =
      scattering_matrices(m, normal_hit(), InterfaceKind::Inactive);
  const EnergyBalance eb = energy_balance(s);
  CHECK_FALSE(eb.lossless);
  CHECK(eb.component1 < 1.0);
  CHECK(eb.component1 > 0.0);
  CHECK(cabs(s.comp1.r) < 1.0);
}

TEST_CASE("incidence and media validation rejects unusable inputs") {
  const MediaPair m = vacuum_pair();

  Incidence bad = normal_hit();
  bad.theta_deg = -1.0;
  CHECK_THROWS_AS(scattering_matrices(m, bad, InterfaceKind::Inactive),
                  std::invalid_argument);

  bad.theta_deg = 89.95;
  bad.plane = IncidencePlane::Plane13;
  CHECK_THROWS_AS(scattering_matrices(m, bad, InterfaceKind::Inactive),
                  std::invalid_argument);

  bad.plane = IncidencePlane::Normal;
  bad.theta_deg = 10.0;
  CHECK_THROWS_AS(scattering_matrices(m, bad, InterfaceKind::Inactive),
                  std::invalid_argument);

  // Oblique incidence from a lossy half-space is refused; normal is fine.
  MediaPair lossy = m;
  lossy.eps_minus = {1.0, 0.5};
  Incidence oblique;
  oblique.plane = IncidencePlane::Plane13;
  oblique.theta_deg = 30.0;
  CHECK_THROWS_AS(scattering_matrices(lossy, oblique, InterfaceKind::Inactive),
                  std::invalid_argument);
  CHECK_NOTHROW(scattering_matrices(lossy, normal_hit(), InterfaceKind::Inactive));

  CHECK_THROWS_AS(scattering_matrices(m, normal_hit(), InterfaceKind::Unclassified),
                  std::invalid_argument);

  MediaPair active = m;
  active.eps_plus = {1.0, -0.1};
  CHECK_THROWS_AS(scattering_matrices(active, normal_hit(), InterfaceKind::Inactive),
                  std::invalid_argument);

  MediaPair zero_omega = m;
  zero_omega.omega = 0.0;
  CHECK_THROWS_AS(scattering_matrices(zero_omega, normal_hit(), InterfaceKind::Inactive),
                  std::invalid_argument);

  MediaPair zero_eps = m;
  zero_eps.eps_plus = {0.0, 0.0};
  CHECK_THROWS_AS(scattering_matrices(zero_eps, normal_hit(), InterfaceKind::Inactive),
                  std::invalid_argument);

  const ScatteringResult ok =
      scattering_matrices(m, normal_hit(), InterfaceKind::Inactive);
  CHECK_THROWS_AS(ok.component(3), std::invalid_argument);
  CHECK_THROWS_AS(component_polarization(IncidencePlane::Plane13, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(component_closure(InterfaceKind::Unclassified, 1),
                  std::invalid_argument);
}

TEST_CASE("field profiles realize the boundary behaviour of each kind") {
  SECTION("reflector: tangential E vanishes on the plane, nothing transmits") {
    const ScatteringResult s = scattering_matrices(
        vacuum_pair(), normal_hit(), InterfaceKind::Reflecting);
    const auto rows = field_profile(s, 201);
    REQUIRE(rows.size() == 201);
    CHECK(rows.front().x3 == -1.0);
    CHECK(rows.back().x3 == 1.0);
    const FieldSample& mid = rows[100];
    CHECK(mid.x3 == 0.0);
    CHECK(cabs(mid.E[0]) < 1e-14);
    CHECK(cabs(mid.H[1]) > 1.0);  // standing-wave H antinode at the wall
    for (const auto& row : rows)
      if (row.x3 > 0.0) CHECK(cabs(row.E[0]) < 1e-15);
  }
  SECTION("matched transparent interface: plane wave passes unchanged") {
    const ScatteringResult s = scattering_matrices(
        vacuum_pair(), normal_hit(), InterfaceKind::Inactive);
    for (const auto& row : field_profile(s, 101)) {
      CHECK(std::abs(cabs(row.E[0]) - 1.0) < 1e-14);
      CHECK(std::abs(cabs(row.H[1]) - 1.0) < 1e-14);
      CHECK(cabs(row.E[1]) < 1e-15);  // A2 = 0: nothing in the other component
      CHECK(cabs(row.H[0]) < 1e-15);
    }
  }
  SECTION("tangential E stays continuous across a material jump") {
    Incidence inc;
    inc.plane = IncidencePlane::Plane13;
    inc.theta_deg = 30.0;
    const ScatteringResult s =
        scattering_matrices(glass_pair(), inc, InterfaceKind::Inactive);
    const auto rows = field_profile(s, 2001);
    const auto at = [&](double x3) {
      return *std::min_element(rows.begin(), rows.end(),
                               [&](const FieldSample& a, const FieldSample& b) {
                                 return std::abs(a.x3 - x3) < std::abs(b.x3 - x3);
                               });
    };
    const FieldSample below = at(-1e-3), above = at(1e-3);
    CHECK(cabs(above.E[0] - below.E[0]) < 0.02);
    // P polarization carries a longitudinal E3 component off normal.
    CHECK(cabs(below.E[2]) > 0.1);
  }
  SECTION("S polarization carries longitudinal H3 instead of E3") {
    Incidence inc;
    inc.plane = IncidencePlane::Plane13;
    inc.theta_deg = 40.0;
    inc.A1 = {0.0, 0.0};
    inc.A2 = {1.0, 0.0};  // component 2 is S in this plane
    const ScatteringResult s =
        scattering_matrices(glass_pair(), inc, InterfaceKind::Inactive);
    const auto rows = field_profile(s, 41);
    bool saw_h3 = false;
    for (const auto& row : rows) {
      CHECK(cabs(row.E[2]) < 1e-15);
      if (cabs(row.H[2]) > 0.1) saw_h3 = true;
    }
    CHECK(saw_h3);
  }
  SECTION("sample-count validation") {
    const ScatteringResult s = scattering_matrices(
        vacuum_pair(), normal_hit(), InterfaceKind::Inactive);
    CHECK_THROWS_AS(field_profile(s, 2), std::invalid_argument);
  }
}

TEST_CASE("CSV rows line up with their headers") {
  const ScatteringResult s = scattering_matrices(
      glass_pair(), normal_hit(), InterfaceKind::Inactive);
  const EnergyBalance eb = energy_balance(s);

  const std::string header = scattering_csv_header();
  const std::string row = scattering_csv_row(s, eb);
  CHECK(std::count(header.begin(), header.end(), ',') ==
        std::count(row.begin(), row.end(), ','));
  CHECK(row.rfind("Inactive,normal,0", 0) == 0);

  const std::string fheader = field_profile_csv_header();
  const std::string frow = field_profile_csv_row(field_profile(s, 3)[0]);
  CHECK(std::count(fheader.begin(), fheader.end(), ',') ==
        std::count(frow.begin(), frow.end(), ','));
}
