#pragma once

// Plane-wave scattering of the homogenized limit system at the effective
// interface x3 = 0.  Time convention exp(-i w t): curl E = i w mu H,
// curl H = -i w eps E.  Tangential E is always continuous across the
// interface; the interface kind adds per-component conditions:
//   Reflecting    E1 = E2 = 0 on the plane           (both components close
//                                                     like a conductor)
//   Inactive      [H1] = [H2] = 0                    (full transparency)
//   PolarizingE1  E1 = 0 on the plane, [H1] = 0      (component along the
//                                                     wires reflects, the
//                                                     orthogonal one passes)
//   PolarizingE2  mirrored.
//
// For axis-aligned planes of incidence the two tangential components
// decouple into the classic perpendicular (S) and parallel (P) polarizations
// with tangential admittances Y_S = k3/(w mu) and Y_P = w eps / k3, and each
// component closes either as a Dirichlet reflector (r = -1, t = 0) or as a
// transparent impedance match (r = (Y- - Y+)/(Y- + Y+), t = 1 + r).

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "wirehom/classify.hpp"
#include "wirehom/numerics.hpp"

namespace wirehom {

using cplx = std::complex<double>;

struct MediaPair {
  cplx eps_minus{1.0, 0.0};
  cplx eps_plus{1.0, 0.0};
  cplx mu_minus{1.0, 0.0};
  cplx mu_plus{1.0, 0.0};
  double omega = 1.0;

  bool lossless() const {
    return eps_minus.imag() == 0.0 && eps_plus.imag() == 0.0 &&
           mu_minus.imag() == 0.0 && mu_plus.imag() == 0.0;
  }
};

inline void validate_media(const MediaPair& m) {
  if (!(m.omega > 0.0))
    throw std::invalid_argument("media: omega must be positive");
  for (cplx v : {m.eps_minus, m.eps_plus, m.mu_minus, m.mu_plus}) {
    if (v.imag() < 0.0)
      throw std::invalid_argument("media: passivity requires Im(eps), Im(mu) >= 0");
    if (v == cplx{0.0, 0.0})
      throw std::invalid_argument("media: eps and mu must be nonzero");
  }
}

enum class IncidencePlane { Normal, Plane13, Plane23 };

inline const char* incidence_plane_name(IncidencePlane p) {
  switch (p) {
    case IncidencePlane::Normal: return "normal";
    case IncidencePlane::Plane13: return "e1-e3";
    case IncidencePlane::Plane23: return "e2-e3";
  }
  return "?";
}

struct Incidence {
  IncidencePlane plane = IncidencePlane::Normal;
  double theta_deg = 0.0;  // measured from the interface normal
  cplx A1{1.0, 0.0};       // incident tangential E along e1
  cplx A2{0.0, 0.0};       // incident tangential E along e2
};

inline void validate_incidence(const Incidence& inc, const MediaPair& media) {
  if (!(inc.theta_deg >= 0.0))
    throw std::invalid_argument("incidence: angle must be >= 0");
  if (inc.theta_deg > 89.9)
    throw std::invalid_argument(
        "incidence: grazing angles above 89.9 degrees are ill-conditioned");
  if (inc.plane == IncidencePlane::Normal && inc.theta_deg != 0.0)
    throw std::invalid_argument("incidence: normal incidence requires theta = 0");
  if (inc.theta_deg > 0.0 &&
      (media.eps_minus.imag() != 0.0 || media.mu_minus.imag() != 0.0))
    throw std::invalid_argument(
        "incidence: oblique incidence requires a lossless incidence half-space");
}

enum class Polarization { S, P };  // E perpendicular / parallel to the plane

// Which classic polarization carries tangential component i (1 or 2).
inline Polarization component_polarization(IncidencePlane plane, int comp) {
  if (comp != 1 && comp != 2)
    throw std::invalid_argument("component index must be 1 or 2");
  switch (plane) {
    case IncidencePlane::Plane13: return comp == 1 ? Polarization::P : Polarization::S;
    case IncidencePlane::Plane23: return comp == 1 ? Polarization::S : Polarization::P;
    case IncidencePlane::Normal:  // degenerate; the labels are interchangeable
      return comp == 1 ? Polarization::P : Polarization::S;
  }
  return Polarization::S;
}

enum class ComponentClosure { DirichletReflect, FresnelTransparent };

inline ComponentClosure component_closure(InterfaceKind kind, int comp) {
  if (comp != 1 && comp != 2)
    throw std::invalid_argument("component index must be 1 or 2");
  switch (kind) {
    case InterfaceKind::Reflecting: return ComponentClosure::DirichletReflect;
    case InterfaceKind::Inactive: return ComponentClosure::FresnelTransparent;
    case InterfaceKind::PolarizingE1:
      return comp == 1 ? ComponentClosure::DirichletReflect
                       : ComponentClosure::FresnelTransparent;
    case InterfaceKind::PolarizingE2:
      return comp == 2 ? ComponentClosure::DirichletReflect
                       : ComponentClosure::FresnelTransparent;
    case InterfaceKind::Unclassified:
      throw std::invalid_argument(
          "scattering is undefined for an Unclassified interface");
  }
  throw std::invalid_argument("unknown interface kind");
}

// Vertical wavenumber with the decaying branch (Im >= 0).  Passivity puts
// eps*mu*w^2 - kt^2 in the closed upper half-plane, where the principal
// square root already has nonnegative imaginary part.
inline cplx vertical_wavenumber(cplx eps, cplx mu, double omega, double kt) {
  const cplx k3 = std::sqrt(eps * mu * omega * omega - kt * kt);
  return k3.imag() < 0.0 ? -k3 : k3;
}

inline cplx tangential_admittance(Polarization pol, cplx eps, cplx mu,
                                  double omega, cplx k3) {
  if (pol == Polarization::S) return k3 / (omega * mu);
  return omega * eps / k3;
}

struct ComponentWave {
  Polarization pol = Polarization::S;
  ComponentClosure closure = ComponentClosure::FresnelTransparent;
  cplx r{0.0, 0.0};
  cplx t{0.0, 0.0};
  cplx Y_minus{0.0, 0.0};
  cplx Y_plus{0.0, 0.0};
};

struct ScatteringResult {
  MediaPair media;
  Incidence inc;
  InterfaceKind kind = InterfaceKind::Inactive;
  double kt = 0.0;
  cplx k3_minus{0.0, 0.0};
  cplx k3_plus{0.0, 0.0};
  ComponentWave comp1, comp2;

  const ComponentWave& component(int i) const {
    if (i == 1) return comp1;
    if (i == 2) return comp2;
    throw std::invalid_argument("component index must be 1 or 2");
  }
  // R and T as diagonal 2x2 matrices on (A1, A2).
  cplx R(int i, int j) const {
    return i == j ? component(i).r : cplx{0.0, 0.0};
  }
  cplx T(int i, int j) const {
    return i == j ? component(i).t : cplx{0.0, 0.0};
  }
};

inline ScatteringResult scattering_matrices(const MediaPair& media,
                                            const Incidence& inc,
                                            InterfaceKind kind) {
  validate_media(media);
  validate_incidence(inc, media);
  if (kind == InterfaceKind::Unclassified)
    throw std::invalid_argument(
        "scattering is undefined for an Unclassified interface");

  ScatteringResult res;
  res.media = media;
  res.inc = inc;
  res.kind = kind;

  const double n_minus =
      std::sqrt((media.eps_minus * media.mu_minus).real());  // lossless below
  res.kt = media.omega * n_minus * std::sin(inc.theta_deg * pi / 180.0);
  res.k3_minus =
      vertical_wavenumber(media.eps_minus, media.mu_minus, media.omega, res.kt);
  res.k3_plus =
      vertical_wavenumber(media.eps_plus, media.mu_plus, media.omega, res.kt);
  if (std::abs(res.k3_minus) < 1e-14 * media.omega)
    throw std::invalid_argument("incidence: vanishing vertical wavenumber");

  for (int i : {1, 2}) {
    ComponentWave w;
    w.pol = component_polarization(inc.plane, i);
    w.closure = component_closure(kind, i);
    w.Y_minus = tangential_admittance(w.pol, media.eps_minus, media.mu_minus,
                                      media.omega, res.k3_minus);
    w.Y_plus = tangential_admittance(w.pol, media.eps_plus, media.mu_plus,
                                     media.omega, res.k3_plus);
    if (w.closure == ComponentClosure::DirichletReflect) {
      w.r = {-1.0, 0.0};
      w.t = {0.0, 0.0};
    } else {
      const cplx den = w.Y_minus + w.Y_plus;
      if (std::abs(den) < 1e-14 * (std::abs(w.Y_minus) + std::abs(w.Y_plus)))
        throw std::runtime_error(
            "scattering: admittance sum vanishes (interface resonance)");
      w.r = (w.Y_minus - w.Y_plus) / den;
      w.t = cplx{1.0, 0.0} + w.r;
    }
    (i == 1 ? res.comp1 : res.comp2) = w;
  }
  return res;
}

// (reflected + transmitted power) / (incident power), per tangential
// component.  Exact to roundoff for lossless media; for lossy media the
// value is reported (<= 1) and the equality check is the caller's to skip.
struct EnergyBalance {
  double component1 = 0.0;
  double component2 = 0.0;
  bool lossless = false;
};

inline EnergyBalance energy_balance(const ScatteringResult& res) {
  EnergyBalance out;
  out.lossless = res.media.lossless();
  auto balance = [&](const ComponentWave& w) {
    const double incident = w.Y_minus.real();
    if (!(incident > 0.0))
      throw std::runtime_error("energy_balance: no propagating incident wave");
    return std::norm(w.r) + std::norm(w.t) * w.Y_plus.real() / incident;
  };
  out.component1 = balance(res.comp1);
  out.component2 = balance(res.comp2);
  return out;
}

// Sampled field along the interface normal at the in-plane origin:
// incident + reflected superposition below, transmitted wave above.
struct FieldSample {
  double x3 = 0.0;
  cplx E[3];
  cplx H[3];
};

inline std::vector<FieldSample> field_profile(const ScatteringResult& res,
                                              int samples = 201) {
  if (samples < 3) throw std::invalid_argument("field_profile: samples >= 3");
  std::vector<FieldSample> rows(samples);

  const cplx I{0.0, 1.0};
  const double kt = res.kt;
  const double w = res.media.omega;

  for (int s = 0; s < samples; ++s) {
    const double x3 = -1.0 + 2.0 * s / (samples - 1);
    FieldSample& row = rows[s];
    row.x3 = x3;

    for (int i : {1, 2}) {
      const ComponentWave& c = res.component(i);
      const cplx A = i == 1 ? res.inc.A1 : res.inc.A2;
      if (A == cplx{0.0, 0.0}) continue;
      // Companion tangential H index and orientation: H_t = Y (e3 x E_t) for
      // the forward wave, i.e. e1 -> +e2 and e2 -> -e1.
      const int j = i == 1 ? 2 : 1;
      const double sigma = i == 1 ? 1.0 : -1.0;

      cplx E_t, H_t, E_long{0.0, 0.0}, H_long{0.0, 0.0};
      if (x3 <= 0.0) {
        const cplx up = std::exp(I * res.k3_minus * x3);
        const cplx dn = std::exp(-I * res.k3_minus * x3);
        E_t = A * (up + c.r * dn);
        H_t = sigma * c.Y_minus * A * (up - c.r * dn);
        if (c.pol == Polarization::P && kt != 0.0)
          E_long = -(kt / res.k3_minus) * A * (up - c.r * dn);
        if (c.pol == Polarization::S && kt != 0.0)
          H_long = -sigma * (kt / (w * res.media.mu_minus)) * E_t;
      } else {
        const cplx wv = std::exp(I * res.k3_plus * x3);
        E_t = A * c.t * wv;
        H_t = sigma * c.Y_plus * A * c.t * wv;
        if (c.pol == Polarization::P && kt != 0.0)
          E_long = -(kt / res.k3_plus) * A * c.t * wv;
        if (c.pol == Polarization::S && kt != 0.0)
          H_long = -sigma * (kt / (w * res.media.mu_plus)) * E_t;
      }
      row.E[i - 1] += E_t;
      row.H[j - 1] += H_t;
      row.E[2] += E_long;
      row.H[2] += H_long;
    }
  }
  return rows;
}

// ---- CSV interfaces -------------------------------------------------------

inline const char* scattering_csv_header() {
  return "kind,plane,theta_deg,eps_minus_re,eps_minus_im,eps_plus_re,"
         "eps_plus_im,mu_minus_re,mu_minus_im,mu_plus_re,mu_plus_im,"
         "r1_re,r1_im,r2_re,r2_im,t1_re,t1_im,t2_re,t2_im,balance1,balance2";
}

inline std::string scattering_csv_row(const ScatteringResult& res,
                                      const EnergyBalance& eb) {
  std::ostringstream os;
  auto put = [&os](double v) { os << ',' << fmt_g17(v); };
  os << interface_kind_name(res.kind) << ','
     << incidence_plane_name(res.inc.plane);
  put(res.inc.theta_deg);
  for (cplx v : {res.media.eps_minus, res.media.eps_plus, res.media.mu_minus,
                 res.media.mu_plus}) {
    put(v.real());
    put(v.imag());
  }
  for (cplx v : {res.comp1.r, res.comp2.r, res.comp1.t, res.comp2.t}) {
    put(v.real());
    put(v.imag());
  }
  put(eb.component1);
  put(eb.component2);
  return os.str();
}

inline const char* field_profile_csv_header() {
  return "x3,E1_re,E1_im,E2_re,E2_im,E3_re,E3_im,H1_re,H1_im,H2_re,H2_im,"
         "H3_re,H3_im";
}

inline std::string field_profile_csv_row(const FieldSample& s) {
  std::ostringstream os;
  os << fmt_g17(s.x3);
  for (const cplx* f : {s.E, s.H})
    for (int k = 0; k < 3; ++k)
      os << ',' << fmt_g17(f[k].real()) << ',' << fmt_g17(f[k].imag());
  return os.str();
}

}  // namespace wirehom
