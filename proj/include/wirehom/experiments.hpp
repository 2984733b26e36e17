#pragma once

// Experiment orchestration: config -> task dispatch -> deterministic CSV/JSON
// artifacts + run manifest.  Exit status 0 = all assertions passed, 1 = an
// assertion failed; configuration errors throw std::invalid_argument and are
// mapped to exit code 2 by the CLI.

#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "wirehom/cell2d.hpp"
#include "wirehom/cell3d.hpp"
#include "wirehom/classify.hpp"
#include "wirehom/config.hpp"
#include "wirehom/scatter.hpp"
#include "wirehom/version.hpp"

namespace wirehom {

struct Tolerances {
  std::string profile = "default";
  double closed_form_rel = 1e-12;  // analytic identities
  double quadrature_rel = 1e-6;    // independent quadrature vs closed form
  double ring_mean_rel = 0.02;     // FEM ring mean vs (ln R - ln r)/(2 pi)
  double fem_constant_rel = 0.02;  // FEM quadrature of analytic constants
  double energy_slope_rel = 0.15;  // energy growth slope vs 1/(2 pi)
  double defect_final = 0.1;       // final squared defects on the ladder
  double power_balance = 1e-12;    // lossless scattering balance
  double piola_halving = 0.65;     // residual ratio under grid doubling

  static Tolerances named(const std::string& name) {
    Tolerances t;
    if (name == "default") return t;
    if (name == "strict") {
      t.profile = "strict";
      t.ring_mean_rel = 0.01;
      t.fem_constant_rel = 0.01;
      t.energy_slope_rel = 0.10;
      t.defect_final = 0.05;
      t.piola_halving = 0.60;
      return t;
    }
    throw std::invalid_argument("unknown tolerance profile '" + name +
                                "' (expected 'default' or 'strict')");
  }

  nlohmann::json to_json() const {
    return {{"profile", profile},
            {"closed_form_rel", closed_form_rel},
            {"quadrature_rel", quadrature_rel},
            {"ring_mean_rel", ring_mean_rel},
            {"fem_constant_rel", fem_constant_rel},
            {"energy_slope_rel", energy_slope_rel},
            {"defect_final", defect_final},
            {"power_balance", power_balance},
            {"piola_halving", piola_halving}};
  }
};

struct RunOptions {
  std::string out_dir = "out";
  int jobs = 1;
  unsigned long seed = 0;
  std::string tolerance_profile = "default";
};

// Index-parallel dispatch with deterministic result placement; the first
// worker exception is rethrown on the caller thread.
template <class F>
inline void parallel_for(int n, int jobs, F&& body) {
  if (n <= 0) return;
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr first_error = nullptr;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(jobs);
  for (int w = 0; w < jobs; ++w)
    pool.emplace_back([&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
          return;
        }
      }
    });
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace detail {

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& content) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

inline void write_csv(const std::filesystem::path& path, const std::string& header,
                      const std::vector<std::string>& rows) {
  std::ostringstream os;
  os << header << '\n';
  for (const std::string& r : rows) os << r << '\n';
  write_text_file(path, os.str());
}

inline void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace detail

// ---- config parsers ------------------------------------------------------

inline WireSpec wire_from_config(const ConfigMap& cfg,
                                 const std::string& prefix = "wire.") {
  const Vec2 center{cfg.get_double(prefix + "cx", 0.5),
                    cfg.get_double(prefix + "cy", 0.5)};
  const double r = cfg.get_double(prefix + "r");
  const double R = cfg.get_double(prefix + "R", 0.25);
  std::vector<Interval> gaps;
  if (cfg.has(prefix + "gaps")) {
    std::string s = cfg.get_string(prefix + "gaps");
    std::replace(s.begin(), s.end(), ',', ' ');
    std::istringstream is(s);
    std::string tok;
    while (is >> tok) {
      const std::size_t colon = tok.find(':');
      if (colon == std::string::npos)
        throw std::invalid_argument("config: wire gaps expect 'lo:hi' pairs");
      gaps.push_back({std::stod(tok.substr(0, colon)), std::stod(tok.substr(colon + 1))});
    }
  }
  return make_wire(center, r, R, gaps);
}

inline RegimeLaw law_from_config(const ConfigMap& cfg,
                                 const std::string& prefix = "law.") {
  RegimeLaw law;
  const std::string rt = cfg.get_string(prefix + "radius_type", "power");
  if (rt == "power") {
    law.radius = RadiusLaw::power(cfg.get_double(prefix + "a", 1.0),
                                  cfg.get_double(prefix + "p", 1.0));
  } else if (rt == "stretched-exp") {
    law.radius = RadiusLaw::stretched_exp(cfg.get_double(prefix + "c", 1.0),
                                          cfg.get_double(prefix + "q", 1.0));
  } else if (rt == "constant") {
    law.radius = RadiusLaw::constant(cfg.get_double(prefix + "a"));
  } else {
    throw std::invalid_argument("config: unknown radius law type '" + rt + "'");
  }
  const std::string gt = cfg.get_string(prefix + "gap_type", "none");
  if (gt == "none") {
    law.gap = GapLaw::none();
  } else if (gt == "power") {
    law.gap = GapLaw::power(cfg.get_double(prefix + "g"),
                            cfg.get_double(prefix + "s"));
  } else {
    throw std::invalid_argument("config: unknown gap law type '" + gt + "'");
  }
  const std::string ax = cfg.get_string(prefix + "axis", "e1");
  if (ax == "e1")
    law.axis = Axis::E1;
  else if (ax == "e2")
    law.axis = Axis::E2;
  else
    throw std::invalid_argument("config: axis must be e1 or e2");
  law.guard_radius = cfg.get_double(prefix + "R", 0.25);
  law.compactly_contained = cfg.get_bool(prefix + "compactly_contained", false);
  return law;
}

inline MediaPair media_from_config(const ConfigMap& cfg,
                                   const std::string& prefix = "media.") {
  MediaPair m;
  auto read = [&](const std::string& base, cplx dflt) {
    return cplx{cfg.get_double(prefix + base, dflt.real()),
                cfg.get_double(prefix + base + "_im", dflt.imag())};
  };
  m.eps_minus = read("eps_minus", {1.0, 0.0});
  m.eps_plus = read("eps_plus", {1.0, 0.0});
  m.mu_minus = read("mu_minus", {1.0, 0.0});
  m.mu_plus = read("mu_plus", {1.0, 0.0});
  m.omega = cfg.get_double(prefix + "omega", 1.0);
  validate_media(m);
  return m;
}

inline Incidence incidence_from_config(const ConfigMap& cfg,
                                       const std::string& prefix = "incidence.") {
  Incidence inc;
  const std::string plane = cfg.get_string(prefix + "plane", "normal");
  if (plane == "normal")
    inc.plane = IncidencePlane::Normal;
  else if (plane == "e1-e3")
    inc.plane = IncidencePlane::Plane13;
  else if (plane == "e2-e3")
    inc.plane = IncidencePlane::Plane23;
  else
    throw std::invalid_argument(
        "config: incidence plane must be normal, e1-e3 or e2-e3");
  inc.theta_deg = cfg.get_double(prefix + "theta_deg", 0.0);
  inc.A1 = {cfg.get_double(prefix + "A1", 1.0), cfg.get_double(prefix + "A1_im", 0.0)};
  inc.A2 = {cfg.get_double(prefix + "A2", 0.0), cfg.get_double(prefix + "A2_im", 0.0)};
  return inc;
}

inline InterfaceKind kind_from_string(const std::string& s) {
  if (s == "Reflecting") return InterfaceKind::Reflecting;
  if (s == "Inactive") return InterfaceKind::Inactive;
  if (s == "PolarizingE1") return InterfaceKind::PolarizingE1;
  if (s == "PolarizingE2") return InterfaceKind::PolarizingE2;
  if (s == "Unclassified") return InterfaceKind::Unclassified;
  throw std::invalid_argument("config: unknown interface kind '" + s + "'");
}

// ---- assertion bookkeeping -------------------------------------------------

struct Checklist {
  std::vector<std::string> lines;
  bool all_passed = true;

  void check(bool ok, const std::string& what) {
    lines.push_back(std::string(ok ? "PASS" : "FAIL") + "  " + what);
    all_passed = all_passed && ok;
  }
  void note(const std::string& what) { lines.push_back("      " + what); }
  std::string text() const {
    std::string out;
    for (const auto& l : lines) out += l + "\n";
    out += all_passed ? "RESULT  PASS\n" : "RESULT  FAIL\n";
    return out;
  }
};

namespace detail {

inline void write_manifest(const std::filesystem::path& out_dir,
                           const ConfigMap& cfg, const RunOptions& opt,
                           const Tolerances& tol, const std::string& task) {
  nlohmann::json j;
  j["tool"] = "wirehom";
  j["version"] = version_string;
  j["task"] = task;
  j["config"] = nlohmann::json(cfg.values);
  j["options"] = {{"out", opt.out_dir},
                  {"jobs", opt.jobs},
                  {"seed", opt.seed},
                  {"tolerance_profile", opt.tolerance_profile}};
  j["tolerances"] = tol.to_json();
  write_json(out_dir / "manifest.json", j);
}

inline std::string solve_summary_json(const VRSolution& vr) {
  nlohmann::json j;
  j["energy_sq"] = vr.energy_sq;
  j["residual_rel"] = vr.residual_rel;
  j["iterations"] = vr.iterations;
  j["hole_ring_mean"] = vr.hole_mean();
  j["guard_ring_mean"] = vr.guard_mean();
  const MeshAudit audit = vr.mesh.audit();
  j["mesh"] = {{"nodes", vr.mesh.nodes.size()},
               {"triangles", vr.mesh.tris.size()},
               {"min_angle_deg", audit.min_angle_deg},
               {"max_angle_deg", audit.max_angle_deg},
               {"near_size", audit.near_size},
               {"far_size", audit.far_size},
               {"hole_edge_count", audit.hole_edge_count},
               {"pairing_ok", audit.pairing_ok},
               {"conforming", audit.conforming}};
  return j.dump(2) + "\n";
}

}  // namespace detail

// ---- task runners ----------------------------------------------------------

inline int run_cell2d_solve(const ConfigMap& cfg, const RunOptions& opt,
                            const Tolerances& tol, std::ostream& log) {
  (void)tol;
  namespace fs = std::filesystem;
  const fs::path out = opt.out_dir;
  const WireSpec wire = wire_from_config(cfg);
  const double h = cfg.get_double("mesh.h", 0.02);
  const double grading = cfg.get_double("mesh.grading", 0.25);

  VRSolution vr = solve_v_r(wire, h, grading);
  {
    std::ostringstream os;
    export_scalar_field(os, vr.mesh, vr.v);
    detail::write_text_file(out / "vr_potential.csv", os.str());
  }
  {
    std::ostringstream os;
    export_vector_field(os, vr.mesh, vr.grad_perp_v);
    detail::write_text_file(out / "vr_field.csv", os.str());
  }
  if (cfg.get_bool("mesh.export", false)) {
    std::ostringstream os;
    vr.mesh.export_text(os);
    detail::write_text_file(out / "vr_mesh.txt", os.str());
  }
  detail::write_text_file(out / "vr_summary.json", detail::solve_summary_json(vr));

  Phi2D phi = solve_phi_ortho(wire, h, grading);
  {
    std::ostringstream os;
    export_scalar_field(os, phi.mesh, phi.u);
    detail::write_text_file(out / "phi_potential.csv", os.str());
  }
  {
    std::ostringstream os;
    export_vector_field(os, phi.mesh, phi.field);
    detail::write_text_file(out / "phi_field.csv", os.str());
  }
  {
    nlohmann::json j;
    j["defect_sq"] = phi.defect_sq;
    j["residual_rel"] = phi.residual_rel;
    j["iterations"] = phi.iterations;
    j["weak_curl_interior"] = phi.weak_curl_interior;
    j["trace_error_weak"] = phi.trace_error_weak;
    j["trace_error_pointwise"] = phi.trace_error_pointwise;
    detail::write_text_file(out / "phi_summary.json", j.dump(2) + "\n");
  }

  log << "cell2d-solve: wire r=" << fmt_g17(wire.radius)
      << " R=" << fmt_g17(wire.guard_radius) << " energy_sq="
      << fmt_g17(vr.energy_sq) << "\n";
  return 0;
}

inline int run_verify_estimates(const ConfigMap& cfg, const RunOptions& opt,
                                const Tolerances& tol, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path out = opt.out_dir;
  const double R = cfg.get_double("wire.R", 0.25);
  const double h = cfg.get_double("mesh.h", 0.02);
  const double grading = cfg.get_double("mesh.grading", 0.25);
  std::vector<double> exponents =
      cfg.has("verify.r_exponents") ? cfg.get_double_list("verify.r_exponents")
                                    : std::vector<double>{4, 5, 6, 7, 8, 9};
  if (exponents.size() < 3)
    throw std::invalid_argument("verify-estimates: need at least 3 radii");

  struct Row {
    double r = 0, energy = 0, bound_ratio = 0, ring_mean = 0, ring_mean_exact = 0;
  };
  std::vector<Row> rows(exponents.size());
  parallel_for(static_cast<int>(exponents.size()), opt.jobs, [&](int i) {
    const double r = std::ldexp(1.0, -static_cast<int>(exponents[i]));
    const WireSpec wire = make_wire({0.5, 0.5}, r, R);
    const VRSolution vr = solve_v_r(wire, h, grading);
    Row& row = rows[i];
    row.r = r;
    row.energy = vr.energy_sq;
    row.bound_ratio = vr.energy_sq / std::abs(std::log(r));
    row.ring_mean = vr.hole_mean();
    row.ring_mean_exact = (std::log(R) - std::log(r)) / (2.0 * pi);
  });

  std::vector<std::string> csv;
  for (const Row& row : rows) {
    std::ostringstream os;
    os << fmt_g17(row.r) << ',' << fmt_g17(row.energy) << ','
       << fmt_g17(row.bound_ratio) << ',' << fmt_g17(row.ring_mean) << ','
       << fmt_g17(row.ring_mean_exact);
    csv.push_back(os.str());
  }
  detail::write_csv(out / "estimates.csv",
                    "r,energy,bound_ratio,ring_mean,ring_mean_exact", csv);

  Checklist list;
  for (const Row& row : rows) {
    const double rel =
        std::abs(row.ring_mean - row.ring_mean_exact) / row.ring_mean_exact;
    std::ostringstream what;
    what << "ring mean at r=" << fmt_g17(row.r) << " matches (ln R - ln r)/(2 pi) "
         << "rel.err=" << fmt_g17(rel) << " <= " << fmt_g17(tol.ring_mean_rel);
    list.check(rel <= tol.ring_mean_rel, what.str());
  }
  // Least-squares fit energy ~ slope * |ln r| + intercept.
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const int n = static_cast<int>(rows.size());
    for (const Row& row : rows) {
      const double x = std::abs(std::log(row.r));
      sx += x;
      sy += row.energy;
      sxx += x * x;
      sxy += x * row.energy;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double target = 1.0 / (2.0 * pi);
    std::ostringstream what;
    what << "energy growth slope vs |ln r| = " << fmt_g17(slope)
         << " within " << fmt_g17(tol.energy_slope_rel * 100.0) << "% of 1/(2 pi)";
    list.check(std::abs(slope - target) <= tol.energy_slope_rel * target,
               what.str());
    double c1 = 0.0;
    for (const Row& row : rows) c1 = std::max(c1, row.bound_ratio);
    list.note("fitted C1 (energy <= C1 |ln r|): " + std::string(fmt_g17(c1)));
  }
  detail::write_text_file(out / "summary.txt", list.text());
  log << list.text();
  return list.all_passed ? 0 : 1;
}

inline int run_defect_ladder(const ConfigMap& cfg, const RunOptions& opt,
                             const Tolerances& tol, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path out = opt.out_dir;
  const std::string kind_s = cfg.get_string("defect.kind", "Psi");
  const RegimeLaw law = law_from_config(cfg);
  const double R = law.guard_radius;
  const double h = cfg.get_double("mesh.h", 0.02);
  const double grading = cfg.get_double("mesh.grading", 0.25);
  const int k_min = static_cast<int>(cfg.get_int("defect.eta_exp_min", 3));
  const int k_max = static_cast<int>(cfg.get_int("defect.eta_exp_max", 8));
  if (k_min < 1 || k_max < k_min)
    throw std::invalid_argument("defect-ladder: need 1 <= eta_exp_min <= eta_exp_max");

  std::vector<double> etas;
  for (int k = k_min; k <= k_max; ++k) etas.push_back(std::ldexp(1.0, -k));
  std::vector<DefectPair> pairs(etas.size());

  auto wire_at = [&](double eta) {
    const double r = law.radius.r(eta);
    if (!(r >= 1e-6))
      throw std::invalid_argument(
          "defect-ladder: radius below the supported FEM range (1e-6)");
    std::vector<Interval> gaps;
    const double m = law.gap.measure(eta);
    if (m > 0.0) gaps.push_back({0.5 - 0.5 * m, 0.5 + 0.5 * m});
    return make_wire({0.5, 0.5}, r, R, gaps);
  };

  if (kind_s == "Psi") {
    parallel_for(static_cast<int>(etas.size()), opt.jobs, [&](int i) {
      const WireSpec wire = wire_at(etas[i]);
      auto psi = std::make_shared<Psi2D>(assemble_psi_r(solve_v_r(wire, h, grading)));
      pairs[i] = defect_pair(make_cell_function(psi), etas[i]);
    });
  } else if (kind_s == "PhiOrtho") {
    const WireSpec wire = wire_at(etas.front());
    auto phi = std::make_shared<Phi2D>(solve_phi_ortho(wire, h, grading));
    const CellFunction3 cf = make_cell_function(phi);
    for (std::size_t i = 0; i < etas.size(); ++i) pairs[i] = defect_pair(cf, etas[i]);
  } else if (kind_s == "PhiCrit") {
    for (std::size_t i = 0; i < etas.size(); ++i)
      pairs[i] = phicrit_defect_pair_log(law.radius.log_r(etas[i]), R, etas[i]);
  } else if (kind_s == "TrivialE3") {
    const CellFunction3 cf = make_trivial_e3(make_wire({0.5, 0.5}, 0.05, R));
    for (std::size_t i = 0; i < etas.size(); ++i) pairs[i] = defect_pair(cf, etas[i]);
  } else {
    throw std::invalid_argument("defect-ladder: unknown kind '" + kind_s + "'");
  }

  std::vector<std::string> csv;
  for (const DefectPair& p : pairs) csv.push_back(defect_csv_row(p));
  detail::write_csv(out / "defects.csv", defect_csv_header(), csv);

  Checklist list;
  if (cfg.get_bool("defect.assert_monotone", true)) {
    bool a_mono = true, b_mono = true;
    for (std::size_t i = 0; i + 1 < pairs.size(); ++i) {
      if (pairs[i + 1].a_sq > pairs[i].a_sq * (1.0 + 1e-12)) a_mono = false;
      if (pairs[i + 1].b_sq > pairs[i].b_sq * (1.0 + 1e-12)) b_mono = false;
    }
    list.check(a_mono, "squared field defect a^2 non-increasing along the ladder");
    list.check(b_mono, "squared curl defect b^2 non-increasing along the ladder");
    list.check(pairs.back().a_sq < tol.defect_final,
               "final a^2 = " + std::string(fmt_g17(pairs.back().a_sq)) + " < " +
                   fmt_g17(tol.defect_final));
    list.check(pairs.back().b_sq < tol.defect_final,
               "final b^2 = " + std::string(fmt_g17(pairs.back().b_sq)) + " < " +
                   fmt_g17(tol.defect_final));
    list.note("unsquared final defects: a = " +
              std::string(fmt_g17(pairs.back().a())) + ", b = " +
              fmt_g17(pairs.back().b()));
  }
  detail::write_text_file(out / "summary.txt", list.text());
  log << list.text();
  return list.all_passed ? 0 : 1;
}

inline int run_classify(const ConfigMap& cfg, const RunOptions& opt,
                        const Tolerances& tol, std::ostream& log) {
  (void)tol;
  namespace fs = std::filesystem;
  const fs::path out = opt.out_dir;
  const RegimeLaw law = law_from_config(cfg);
  ConnectivityVerdict v = connectivity_verdict(law);
  nlohmann::json record;
  if (cfg.has("law2.radius_type") || cfg.get_bool("law2.compactly_contained", false)) {
    const RegimeLaw law2 = law_from_config(cfg, "law2.");
    const ConnectivityVerdict v2 = connectivity_verdict(law2);
    const ConnectivityVerdict combined = combine_families(v, v2);
    const InterfaceKind kind = interface_kind(combined);
    record = classification_record(law, combined, kind);
    record["family2"] = classification_record(law2, v2, interface_kind(v2));
    log << "classify: combined kind = " << interface_kind_name(kind) << "\n";
  } else {
    const InterfaceKind kind = interface_kind(v);
    record = classification_record(law, v, kind);
    log << "classify: " << law.radius.describe() << ", " << law.gap.describe()
        << " -> e1 " << connectivity_name(v.e1.status) << ", e2 "
        << connectivity_name(v.e2.status) << ", kind "
        << interface_kind_name(kind) << "\n";
  }
  detail::write_json(out / "verdict.json", record);
  return 0;
}

inline int run_scatter(const ConfigMap& cfg, const RunOptions& opt,
                       const Tolerances& tol, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path out = opt.out_dir;
  const MediaPair media = media_from_config(cfg);
  const Incidence inc = incidence_from_config(cfg);
  InterfaceKind kind;
  if (cfg.has("scatter.kind")) {
    kind = kind_from_string(cfg.get_string("scatter.kind"));
  } else {
    const RegimeLaw law = law_from_config(cfg);
    kind = interface_kind(connectivity_verdict(law));
  }
  const ScatteringResult res = scattering_matrices(media, inc, kind);
  const EnergyBalance eb = energy_balance(res);
  detail::write_csv(out / "scattering.csv", scattering_csv_header(),
                    {scattering_csv_row(res, eb)});
  const int samples = static_cast<int>(cfg.get_int("scatter.samples", 201));
  std::vector<std::string> rows;
  for (const FieldSample& s : field_profile(res, samples))
    rows.push_back(field_profile_csv_row(s));
  detail::write_csv(out / "field_profile.csv", field_profile_csv_header(), rows);

  Checklist list;
  if (eb.lossless) {
    list.check(std::abs(eb.component1 - 1.0) <= tol.power_balance,
               "component 1 power balance = 1 within " +
                   std::string(fmt_g17(tol.power_balance)));
    list.check(std::abs(eb.component2 - 1.0) <= tol.power_balance,
               "component 2 power balance = 1 within " +
                   std::string(fmt_g17(tol.power_balance)));
  } else {
    list.note("lossy media: balance reported without equality check: " +
              std::string(fmt_g17(eb.component1)) + ", " + fmt_g17(eb.component2));
  }
  detail::write_text_file(out / "summary.txt", list.text());
  log << list.text();
  return list.all_passed ? 0 : 1;
}

inline int run_sweep(const ConfigMap& cfg, const RunOptions& opt,
                     const Tolerances& tol, std::ostream& log) {
  namespace fs = std::filesystem;
  const fs::path out = opt.out_dir;
  const std::string parameter = cfg.get_string("sweep.parameter", "theta");

  if (parameter == "theta") {
    const MediaPair media = media_from_config(cfg);
    Incidence base = incidence_from_config(cfg);
    if (base.plane == IncidencePlane::Normal) base.plane = IncidencePlane::Plane13;
    const InterfaceKind kind = kind_from_string(cfg.get_string("scatter.kind"));
    const double lo = cfg.get_double("sweep.theta_min", 0.0);
    const double hi = cfg.get_double("sweep.theta_max", 80.0);
    const int steps = static_cast<int>(cfg.get_int("sweep.steps", 17));
    if (steps < 2 || !(hi > lo))
      throw std::invalid_argument("sweep: need steps >= 2 and theta_max > theta_min");

    std::vector<std::string> rows(steps);
    std::atomic<int> failures{0};
    parallel_for(steps, opt.jobs, [&](int i) {
      Incidence inc = base;
      inc.theta_deg = lo + (hi - lo) * i / (steps - 1);
      const ScatteringResult res = scattering_matrices(media, inc, kind);
      const EnergyBalance eb = energy_balance(res);
      if (eb.lossless && (std::abs(eb.component1 - 1.0) > tol.power_balance ||
                          std::abs(eb.component2 - 1.0) > tol.power_balance))
        failures.fetch_add(1);
      rows[i] = scattering_csv_row(res, eb);
    });
    detail::write_csv(out / "sweep_scattering.csv", scattering_csv_header(), rows);

    Checklist list;
    list.check(failures.load() == 0,
               "power balance = 1 at every sweep angle (lossless media)");
    detail::write_text_file(out / "summary.txt", list.text());
    log << list.text();
    return list.all_passed ? 0 : 1;
  }

  if (parameter == "radius") {
    const double R = cfg.get_double("wire.R", 0.25);
    const double h = cfg.get_double("mesh.h", 0.02);
    const double grading = cfg.get_double("mesh.grading", 0.25);
    const std::vector<double> exps = cfg.get_double_list("sweep.r_exponents");
    if (exps.size() < 2) throw std::invalid_argument("sweep: need >= 2 radii");
    std::vector<std::string> rows(exps.size());
    parallel_for(static_cast<int>(exps.size()), opt.jobs, [&](int i) {
      const double r = std::ldexp(1.0, -static_cast<int>(exps[i]));
      const VRSolution vr = solve_v_r(make_wire({0.5, 0.5}, r, R), h, grading);
      std::ostringstream os;
      os << fmt_g17(r) << ',' << fmt_g17(vr.energy_sq) << ','
         << fmt_g17(vr.hole_mean()) << ',' << fmt_g17(vr.residual_rel);
      rows[i] = os.str();
    });
    detail::write_csv(out / "sweep_radius.csv", "r,energy,ring_mean,residual_rel",
                      rows);
    log << "sweep: " << exps.size() << " radius points written\n";
    return 0;
  }

  throw std::invalid_argument("sweep: unknown parameter '" + parameter +
                              "' (expected theta or radius)");
}

// Dispatch a parsed config.  Returns the process exit status (0 pass,
// 1 assertion failure); std::invalid_argument marks config errors.
inline int run(const ConfigMap& cfg, const RunOptions& opt, std::ostream& log,
               const std::string& task_override = "") {
  const std::string task =
      !task_override.empty() ? task_override : cfg.get_string("task");
  if (cfg.has("task") && !task_override.empty() &&
      cfg.get_string("task") != task_override)
    throw std::invalid_argument("config task '" + cfg.get_string("task") +
                                "' does not match the subcommand '" +
                                task_override + "'");
  const Tolerances tol = Tolerances::named(opt.tolerance_profile);

  std::filesystem::create_directories(opt.out_dir);
  detail::write_manifest(opt.out_dir, cfg, opt, tol, task);

  if (task == "cell2d-solve") return run_cell2d_solve(cfg, opt, tol, log);
  if (task == "verify-estimates") return run_verify_estimates(cfg, opt, tol, log);
  if (task == "defect-ladder") return run_defect_ladder(cfg, opt, tol, log);
  if (task == "classify") return run_classify(cfg, opt, tol, log);
  if (task == "scatter") return run_scatter(cfg, opt, tol, log);
  if (task == "sweep") return run_sweep(cfg, opt, tol, log);
  throw std::invalid_argument(
      "unknown task '" + task +
      "' (expected cell2d-solve, verify-estimates, defect-ladder, classify, "
      "scatter or sweep)");
}

}  // namespace wirehom
