#pragma once

// Classification of wire-family sequence laws eta -> (r_eta, |I_eta|) into
// per-direction connectivity verdicts and the effective interface kind.
//
// Two dimensionless scalings decide everything that is decidable:
//   * wire log-scaling   W(eta) = eta * |ln r_eta|
//   * gap load           G(eta) = eta^{-1} * r_eta^{-2} * |I_eta|
// W -> 0 and G -> 0 yield a connecting family along the wire axis;
// W -> infinity with an empty gap set yields a disconnected family; every
// other combination (including finite nonzero critical limits) is left
// Indeterminate rather than guessed.  The direction orthogonal to the wire
// axis is always disconnected: transverse sections are disjoint disks.
//
// Closed-form limits are cross-checked against a numeric ladder
// eta = 2^-3 .. 2^-16 evaluated entirely in the log domain (the raw scalings
// overflow/underflow double for the interesting laws).  A ladder trend that
// contradicts the closed form is a logic error; an inconclusive trend is
// recorded in the certificate.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wirehom/numerics.hpp"

namespace wirehom {

enum class RadiusLawType { Power, StretchedExp, Constant };
enum class Axis { E1, E2 };
enum class Connectivity { Connecting, Disconnected, Indeterminate };
enum class InterfaceKind { Reflecting, Inactive, PolarizingE1, PolarizingE2, Unclassified };
enum class LimitClass { Zero, Finite, Infinite };

inline const char* connectivity_name(Connectivity c) {
  switch (c) {
    case Connectivity::Connecting: return "Connecting";
    case Connectivity::Disconnected: return "Disconnected";
    case Connectivity::Indeterminate: return "Indeterminate";
  }
  return "?";
}

inline const char* interface_kind_name(InterfaceKind k) {
  switch (k) {
    case InterfaceKind::Reflecting: return "Reflecting";
    case InterfaceKind::Inactive: return "Inactive";
    case InterfaceKind::PolarizingE1: return "PolarizingE1";
    case InterfaceKind::PolarizingE2: return "PolarizingE2";
    case InterfaceKind::Unclassified: return "Unclassified";
  }
  return "?";
}

inline const char* limit_class_name(LimitClass c) {
  switch (c) {
    case LimitClass::Zero: return "zero";
    case LimitClass::Finite: return "finite";
    case LimitClass::Infinite: return "infinite";
  }
  return "?";
}

inline const char* axis_name(Axis a) { return a == Axis::E1 ? "e1" : "e2"; }

// r_eta parametric families.  log_r is the primary accessor: the interesting
// stretched-exponential laws underflow double well inside the ladder.
struct RadiusLaw {
  RadiusLawType type = RadiusLawType::Power;
  double amplitude = 1.0;  // a  (Power, Constant)
  double exponent = 1.0;   // p  (Power) or q (StretchedExp)
  double rate = 1.0;       // c  (StretchedExp)

  static RadiusLaw power(double a, double p) {
    if (!(a > 0.0) || !(p >= 0.0))
      throw std::invalid_argument("RadiusLaw::power: need a > 0, p >= 0");
    RadiusLaw l;
    l.type = RadiusLawType::Power;
    l.amplitude = a;
    l.exponent = p;
    return l;
  }
  static RadiusLaw stretched_exp(double c, double q) {
    if (!(c > 0.0) || !(q > 0.0))
      throw std::invalid_argument("RadiusLaw::stretched_exp: need c > 0, q > 0");
    RadiusLaw l;
    l.type = RadiusLawType::StretchedExp;
    l.rate = c;
    l.exponent = q;
    return l;
  }
  static RadiusLaw constant(double a) {
    if (!(a > 0.0)) throw std::invalid_argument("RadiusLaw::constant: need a > 0");
    RadiusLaw l;
    l.type = RadiusLawType::Constant;
    l.amplitude = a;
    l.exponent = 0.0;
    return l;
  }

  double log_r(double eta) const {
    switch (type) {
      case RadiusLawType::Power:
        return std::log(amplitude) + exponent * std::log(eta);
      case RadiusLawType::StretchedExp:
        return -rate * std::pow(eta, -exponent);
      case RadiusLawType::Constant:
        return std::log(amplitude);
    }
    return 0.0;
  }
  double r(double eta) const { return std::exp(log_r(eta)); }

  std::string describe() const {
    switch (type) {
      case RadiusLawType::Power:
        return "r = " + std::string(fmt_g17(amplitude)) + " * eta^" + fmt_g17(exponent);
      case RadiusLawType::StretchedExp:
        return "r = exp(-" + std::string(fmt_g17(rate)) + " * eta^-" + fmt_g17(exponent) + ")";
      case RadiusLawType::Constant:
        return "r = " + std::string(fmt_g17(amplitude));
    }
    return "?";
  }
};

// |I_eta| gap-measure law; the realized gap set is a single interval of that
// length centered on the axis period, so measure ordering certifies set
// inclusion between two laws.
struct GapLaw {
  bool zero = true;
  double amplitude = 0.0;  // g
  double exponent = 0.0;   // s

  static GapLaw none() { return {}; }
  static GapLaw power(double g, double s) {
    if (!(g > 0.0) || !(s >= 0.0))
      throw std::invalid_argument("GapLaw::power: need g > 0, s >= 0");
    GapLaw l;
    l.zero = false;
    l.amplitude = g;
    l.exponent = s;
    return l;
  }

  double measure(double eta) const {
    return zero ? 0.0 : amplitude * std::pow(eta, exponent);
  }
  double log_measure(double eta) const {
    if (zero) throw std::logic_error("GapLaw::log_measure on empty gap set");
    return std::log(amplitude) + exponent * std::log(eta);
  }
  std::string describe() const {
    if (zero) return "|I| = 0";
    return "|I| = " + std::string(fmt_g17(amplitude)) + " * eta^" + fmt_g17(exponent);
  }
};

struct RegimeLaw {
  RadiusLaw radius;
  GapLaw gap;
  Axis axis = Axis::E1;
  double guard_radius = 0.25;
  bool compactly_contained = false;
};

struct ScalingLimit {
  LimitClass cls = LimitClass::Zero;
  double value = 0.0;  // meaningful only when cls == Finite
};

inline std::vector<double> classification_ladder() {
  std::vector<double> eta;
  for (int k = 3; k <= 16; ++k) eta.push_back(std::ldexp(1.0, -k));
  return eta;
}

struct ScalingCertificate {
  std::string name;
  ScalingLimit closed_form;
  std::vector<double> ladder_eta;        // admissible rungs only
  std::vector<double> ladder_log_value;  // ln of the scaling at each rung
  LimitClass ladder_trend = LimitClass::Finite;
  bool trend_conclusive = false;
  bool consistent = true;
  std::string note;
};

namespace detail {

// Spec'd trend rule: over the last 6 points, successive ratios uniformly
// <= 0.95 declare decay to zero, >= 1.05 declare divergence; anything else
// is inconclusive at ladder depth.
inline void detect_trend(ScalingCertificate& cert) {
  const auto& lv = cert.ladder_log_value;
  if (lv.size() < 6) {
    cert.trend_conclusive = false;
    cert.ladder_trend = LimitClass::Finite;
    return;
  }
  const double down = std::log(0.95), up = std::log(1.05);
  bool all_down = true, all_up = true;
  for (std::size_t i = lv.size() - 6; i + 1 < lv.size(); ++i) {
    const double d = lv[i + 1] - lv[i];
    if (!(d <= down)) all_down = false;
    if (!(d >= up)) all_up = false;
  }
  if (all_down) {
    cert.ladder_trend = LimitClass::Zero;
    cert.trend_conclusive = true;
  } else if (all_up) {
    cert.ladder_trend = LimitClass::Infinite;
    cert.trend_conclusive = true;
  } else {
    cert.ladder_trend = LimitClass::Finite;
    cert.trend_conclusive = false;
  }
}

inline void check_consistency(ScalingCertificate& cert) {
  if (!cert.trend_conclusive) {
    cert.consistent = true;
    if (cert.note.empty())
      cert.note =
          "ladder trend not resolved at depth 2^-16; closed form authoritative";
    return;
  }
  if (cert.ladder_trend == cert.closed_form.cls) {
    cert.consistent = true;
    return;
  }
  cert.consistent = false;
  throw std::logic_error("scaling '" + cert.name +
                         "': numeric ladder trend (" +
                         limit_class_name(cert.ladder_trend) +
                         ") contradicts the closed-form limit (" +
                         limit_class_name(cert.closed_form.cls) + ")");
}

}  // namespace detail

// Closed-form limit of W(eta) = eta |ln r_eta|.
inline ScalingLimit wire_scaling_limit(const RadiusLaw& rl) {
  switch (rl.type) {
    case RadiusLawType::Power:
    case RadiusLawType::Constant:
      return {LimitClass::Zero, 0.0};
    case RadiusLawType::StretchedExp:
      if (rl.exponent > 1.0) return {LimitClass::Infinite, 0.0};
      if (rl.exponent == 1.0) return {LimitClass::Finite, rl.rate};
      return {LimitClass::Zero, 0.0};
  }
  return {LimitClass::Zero, 0.0};
}

// Closed-form limit of G(eta) = eta^{-1} r_eta^{-2} |I_eta|.
inline ScalingLimit gap_load_limit(const RadiusLaw& rl, const GapLaw& gl) {
  if (gl.zero) return {LimitClass::Zero, 0.0};
  if (rl.type == RadiusLawType::StretchedExp) return {LimitClass::Infinite, 0.0};
  const double p = rl.type == RadiusLawType::Power ? rl.exponent : 0.0;
  const double t = gl.exponent - 1.0 - 2.0 * p;
  if (t > 0.0) return {LimitClass::Zero, 0.0};
  if (t < 0.0) return {LimitClass::Infinite, 0.0};
  return {LimitClass::Finite, gl.amplitude / (rl.amplitude * rl.amplitude)};
}

// Admissible evaluation tail: rungs with r(eta) <= R (and gap measure < 1).
// Laws that never produce enough admissible rungs cannot be classified.
inline std::vector<double> admissible_ladder(const RegimeLaw& law) {
  std::vector<double> out;
  const double logR = std::log(law.guard_radius);
  for (double eta : classification_ladder()) {
    if (law.radius.log_r(eta) > logR + 1e-12) continue;
    if (!law.gap.zero && law.gap.measure(eta) >= 1.0) continue;
    out.push_back(eta);
  }
  if (out.size() < 8)
    throw std::invalid_argument(
        "regime law admits fewer than 8 evaluation rungs with r <= R and "
        "gap measure < 1; classification refused");
  return out;
}

struct ScalingPair {
  ScalingCertificate wire;
  ScalingCertificate gap;
  double tail_eta = 0.0;  // first admissible rung
};

// Both decisive scalings: closed-form limits plus the log-domain ladder
// cross-check.  Throws std::logic_error on a genuine contradiction.
inline ScalingPair regime_limits(const RegimeLaw& law) {
  ScalingPair out;
  const std::vector<double> ladder = admissible_ladder(law);
  out.tail_eta = ladder.front();

  out.wire.name = "wire log-scaling eta*|ln r|";
  out.wire.closed_form = wire_scaling_limit(law.radius);
  for (double eta : ladder) {
    const double lr = law.radius.log_r(eta);
    out.wire.ladder_eta.push_back(eta);
    out.wire.ladder_log_value.push_back(std::log(eta) + std::log(-lr));
  }
  detail::detect_trend(out.wire);
  detail::check_consistency(out.wire);

  out.gap.name = "gap load (1/eta)*r^-2*|I|";
  out.gap.closed_form = gap_load_limit(law.radius, law.gap);
  if (law.gap.zero) {
    out.gap.trend_conclusive = true;
    out.gap.ladder_trend = LimitClass::Zero;
    out.gap.consistent = true;
    out.gap.note = "gap set empty; load identically zero";
  } else {
    for (double eta : ladder) {
      const double lr = law.radius.log_r(eta);
      out.gap.ladder_eta.push_back(eta);
      out.gap.ladder_log_value.push_back(-std::log(eta) - 2.0 * lr +
                                         law.gap.log_measure(eta));
    }
    detail::detect_trend(out.gap);
    detail::check_consistency(out.gap);
  }
  return out;
}

struct DirectionVerdict {
  Connectivity status = Connectivity::Indeterminate;
  std::string certificate;
};

struct ConnectivityVerdict {
  Axis axis = Axis::E1;
  DirectionVerdict e1, e2;
  ScalingCertificate wire, gap;
  double tail_eta = 0.0;
  bool compactly_contained = false;

  const DirectionVerdict& along(Axis a) const { return a == Axis::E1 ? e1 : e2; }
};

inline ConnectivityVerdict connectivity_verdict(const RegimeLaw& law) {
  ConnectivityVerdict v;
  v.axis = law.axis;
  v.compactly_contained = law.compactly_contained;

  if (law.compactly_contained) {
    DirectionVerdict d;
    d.status = Connectivity::Disconnected;
    d.certificate =
        "obstacle family compactly contained in the open cell: blocking "
        "fields equal to the target off a fixed compact set exist in every "
        "direction";
    v.e1 = v.e2 = d;
    v.tail_eta = classification_ladder().front();
    return v;
  }

  const ScalingPair limits = regime_limits(law);
  v.wire = limits.wire;
  v.gap = limits.gap;
  v.tail_eta = limits.tail_eta;

  DirectionVerdict axis_v;
  const LimitClass W = limits.wire.closed_form.cls;
  const LimitClass G = limits.gap.closed_form.cls;
  if (W == LimitClass::Zero && G == LimitClass::Zero) {
    axis_v.status = Connectivity::Connecting;
    axis_v.certificate =
        "wire log-scaling eta*|ln r| -> 0 and gap load (1/eta)*r^-2*|I| -> 0: "
        "the connecting construction carries unit flux with vanishing defect "
        "pair";
  } else if (W == LimitClass::Infinite && law.gap.zero) {
    axis_v.status = Connectivity::Disconnected;
    axis_v.certificate =
        "wire log-scaling eta*|ln r| -> infinity with empty gap set: wires "
        "too thin to carry flux; the blocking construction succeeds";
  } else if (W == LimitClass::Infinite) {
    axis_v.status = Connectivity::Indeterminate;
    axis_v.certificate =
        "wire log-scaling diverges but the gap set is nonempty; the decision "
        "table covers only gapless families here (inclusion monotonicity "
        "would extend disconnection to gapped wires)";
  } else {
    axis_v.status = Connectivity::Indeterminate;
    axis_v.certificate =
        "critical or unresolved scaling (wire log-scaling " +
        std::string(limit_class_name(W)) + ", gap load " + limit_class_name(G) +
        "): neither construction is certified";
  }

  DirectionVerdict ortho_v;
  ortho_v.status = Connectivity::Disconnected;
  ortho_v.certificate =
      "transverse sections of the wire family are disjoint disks for every "
      "radius and gap law: the orthogonal direction is always disconnected";

  if (law.axis == Axis::E1) {
    v.e1 = axis_v;
    v.e2 = ortho_v;
  } else {
    v.e2 = axis_v;
    v.e1 = ortho_v;
  }
  return v;
}

inline InterfaceKind interface_kind(const ConnectivityVerdict& v) {
  const Connectivity c1 = v.e1.status, c2 = v.e2.status;
  if (c1 == Connectivity::Indeterminate || c2 == Connectivity::Indeterminate)
    return InterfaceKind::Unclassified;
  if (c1 == Connectivity::Connecting && c2 == Connectivity::Connecting)
    return InterfaceKind::Reflecting;
  if (c1 == Connectivity::Disconnected && c2 == Connectivity::Disconnected)
    return InterfaceKind::Inactive;
  return c1 == Connectivity::Connecting ? InterfaceKind::PolarizingE1
                                        : InterfaceKind::PolarizingE2;
}

// Union of two obstacle families: a direction connected by either family
// stays connected when obstacles are added (inclusion monotonicity); a
// direction is reported disconnected only when every family is separately
// disconnected in it.
inline ConnectivityVerdict combine_families(const ConnectivityVerdict& a,
                                            const ConnectivityVerdict& b) {
  auto combine = [](const DirectionVerdict& x, const DirectionVerdict& y) {
    DirectionVerdict out;
    if (x.status == Connectivity::Connecting || y.status == Connectivity::Connecting) {
      out.status = Connectivity::Connecting;
      out.certificate =
          "a subfamily already connects this direction; enlarging the "
          "obstacle set preserves connection: " +
          (x.status == Connectivity::Connecting ? x.certificate : y.certificate);
    } else if (x.status == Connectivity::Indeterminate ||
               y.status == Connectivity::Indeterminate) {
      out.status = Connectivity::Indeterminate;
      out.certificate = "at least one family unresolved in this direction";
    } else {
      out.status = Connectivity::Disconnected;
      out.certificate = "every family separately disconnected in this direction";
    }
    return out;
  };
  ConnectivityVerdict v;
  v.axis = a.axis;
  v.e1 = combine(a.e1, b.e1);
  v.e2 = combine(a.e2, b.e2);
  v.tail_eta = std::max(a.tail_eta, b.tail_eta);
  v.compactly_contained = a.compactly_contained && b.compactly_contained;
  return v;
}

// Inclusion-monotonicity audit of a verdict pair for families a included in b
// (less metal in a: smaller radius, larger gap set).  A contradiction is a
// Connecting verdict for a paired with Disconnected for b in the same
// direction; Indeterminate never contradicts, but missed strengthenings are
// reported as incompleteness.
struct MonotoneReport {
  bool inclusion_certified = false;
  bool contradiction = false;
  bool incomplete = false;
  std::string note;
};

inline MonotoneReport monotone_consistency(const RegimeLaw& a, const RegimeLaw& b,
                                           const ConnectivityVerdict& va,
                                           const ConnectivityVerdict& vb) {
  MonotoneReport rep;
  if (a.axis != b.axis) {
    rep.note = "families on different axes; inclusion not certifiable";
    return rep;
  }
  // Radius ordering on the common admissible ladder.
  bool radius_ok = true;
  for (double eta : classification_ladder())
    if (a.radius.log_r(eta) > b.radius.log_r(eta) + 1e-12) radius_ok = false;
  // Gap sets realized as centered intervals: containment is measure ordering.
  bool gap_ok;
  if (b.gap.zero) {
    gap_ok = true;  // empty set included in any gap set of a
  } else if (a.gap.zero) {
    gap_ok = false;  // a has metal where b has a gap
  } else {
    gap_ok = true;
    for (double eta : classification_ladder())
      if (a.gap.log_measure(eta) < b.gap.log_measure(eta) - 1e-12) gap_ok = false;
  }
  rep.inclusion_certified = radius_ok && gap_ok;
  if (!rep.inclusion_certified) {
    rep.note = "per-eta inclusion of a in b not certified; no claim checked";
    return rep;
  }

  auto check_dir = [&](const DirectionVerdict& da, const DirectionVerdict& db,
                       const char* dir) {
    if (da.status == Connectivity::Connecting &&
        db.status == Connectivity::Disconnected) {
      rep.contradiction = true;
      rep.note += std::string("direction ") + dir +
                  ": smaller family Connecting but larger family Disconnected; ";
    }
    if (da.status == Connectivity::Connecting &&
        db.status == Connectivity::Indeterminate) {
      rep.incomplete = true;
      rep.note += std::string("direction ") + dir +
                  ": larger family could be strengthened to Connecting; ";
    }
    if (db.status == Connectivity::Disconnected &&
        da.status == Connectivity::Indeterminate) {
      rep.incomplete = true;
      rep.note += std::string("direction ") + dir +
                  ": smaller family could be strengthened to Disconnected; ";
    }
  };
  check_dir(va.e1, vb.e1, "e1");
  check_dir(va.e2, vb.e2, "e2");
  if (rep.note.empty()) rep.note = "consistent";
  return rep;
}

// ---- JSON records ---------------------------------------------------------

inline nlohmann::json to_json(const ScalingCertificate& c) {
  nlohmann::json j;
  j["name"] = c.name;
  j["closed_form"] = limit_class_name(c.closed_form.cls);
  if (c.closed_form.cls == LimitClass::Finite)
    j["closed_form_value"] = c.closed_form.value;
  j["ladder_eta"] = c.ladder_eta;
  j["ladder_log_value"] = c.ladder_log_value;
  j["ladder_trend"] = limit_class_name(c.ladder_trend);
  j["trend_conclusive"] = c.trend_conclusive;
  j["consistent"] = c.consistent;
  if (!c.note.empty()) j["note"] = c.note;
  return j;
}

inline nlohmann::json to_json(const ConnectivityVerdict& v) {
  nlohmann::json j;
  j["axis"] = axis_name(v.axis);
  j["e1"] = {{"status", connectivity_name(v.e1.status)},
             {"certificate", v.e1.certificate}};
  j["e2"] = {{"status", connectivity_name(v.e2.status)},
             {"certificate", v.e2.certificate}};
  j["compactly_contained"] = v.compactly_contained;
  j["tail_eta"] = v.tail_eta;
  if (!v.wire.name.empty()) j["wire_scaling"] = to_json(v.wire);
  if (!v.gap.name.empty()) j["gap_load"] = to_json(v.gap);
  return j;
}

inline nlohmann::json classification_record(const RegimeLaw& law,
                                            const ConnectivityVerdict& v,
                                            InterfaceKind kind) {
  nlohmann::json j;
  j["law"] = {{"radius", law.radius.describe()},
              {"gap", law.gap.describe()},
              {"axis", axis_name(law.axis)},
              {"guard_radius", law.guard_radius},
              {"compactly_contained", law.compactly_contained}};
  j["verdict"] = to_json(v);
  j["kind"] = interface_kind_name(kind);
  return j;
}

}  // namespace wirehom
