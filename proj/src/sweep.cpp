#include "abpole/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <ostream>
#include <set>

#include <nlohmann/json.hpp>

namespace abpole {

using nlohmann::json;
using nlohmann::ordered_json;

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void StudyConfig::validate() const {
  if (!(domain.radius > 0.0)) throw PreconditionError("study: domain radius must be positive");
  if (!(domain.distance_to_boundary(limit_pole) > 0.0)) throw PreconditionError("study: limit pole must be interior");
  if (n0 < 1) throw PreconditionError("study: n0 must be at least 1");
  if (a_fractions.size() < 3) throw PreconditionError("study: rate fits need at least three |a| values");
  for (std::size_t i = 0; i < a_fractions.size(); ++i) {
    if (!(a_fractions[i] > 0.0 && a_fractions[i] < 1.0)) throw PreconditionError("study: |a| fractions must lie in (0, 1)");
    if (i > 0 && !(a_fractions[i] < a_fractions[i - 1]))
      throw PreconditionError("study: |a| values must be strictly decreasing");
  }
  if (mesh_h.empty() || (mesh_h.size() != 1 && mesh_h.size() != a_fractions.size()))
    throw PreconditionError("study: mesh_h needs one entry or one per |a|");
  for (double h : mesh_h)
    if (!(h > 0.0 && h < domain.radius)) throw PreconditionError("study: mesh sizes must lie in (0, radius)");
  if (crack.radii.size() != 3) throw PreconditionError("study: crack extrapolation needs three radii");
  if (profile_k < 1 || profile_k % 2 == 0) throw PreconditionError("study: profile_k must be odd");
}

std::vector<std::string> StudyConfig::warnings() const {
  std::vector<std::string> out;
  if (!a_fractions.empty() && a_fractions.back() < 0.025)
    out.push_back("smallest |a| is below 0.025 dist(b, boundary); discretization error may dominate");
  if (!require_simple) out.push_back("simplicity requirement overridden");
  out.push_back("acceptance tolerances are engineering choices; the asymptotic rate of the limits is not quantified");
  return out;
}

namespace {

template <class T>
void take(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

Point2 point_from(const json& j) {
  if (!j.is_array() || j.size() != 2) throw PreconditionError("study config: points are [x, y]");
  return {j[0].get<double>(), j[1].get<double>()};
}

}  // namespace

StudyConfig read_study_config(std::istream& is) {
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("study config: ") + e.what());
  }
  static const std::set<std::string> known{"domain", "limit_pole", "n0", "ray_angles", "angles_relative",
                                           "a_fractions", "mesh_h", "grading_exponent", "crack",
                                           "profile_alphas", "profile_k", "gap_tol", "require_simple",
                                           "refinement_guard", "seed", "tolerances"};
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw PreconditionError("study config: unknown key '" + key + "'");
  StudyConfig cfg;
  try {
    if (j.contains("domain")) {
      const json& d = j.at("domain");
      if (d.contains("center")) cfg.domain.center = point_from(d.at("center"));
      take(d, "radius", cfg.domain.radius);
    }
    if (j.contains("limit_pole")) cfg.limit_pole = point_from(j.at("limit_pole"));
    take(j, "n0", cfg.n0);
    take(j, "ray_angles", cfg.ray_angles);
    take(j, "angles_relative", cfg.angles_relative);
    take(j, "a_fractions", cfg.a_fractions);
    take(j, "mesh_h", cfg.mesh_h);
    take(j, "grading_exponent", cfg.grading_exponent);
    if (j.contains("crack")) {
      const json& c = j.at("crack");
      take(c, "h", cfg.crack.h);
      take(c, "grading_exponent", cfg.crack.grading_exponent);
      take(c, "radii", cfg.crack.radii);
      take(c, "omega_samples", cfg.crack.omega_samples);
    }
    take(j, "profile_alphas", cfg.profile_alphas);
    take(j, "profile_k", cfg.profile_k);
    take(j, "gap_tol", cfg.gap_tol);
    take(j, "require_simple", cfg.require_simple);
    take(j, "refinement_guard", cfg.refinement_guard);
    take(j, "seed", cfg.seed);
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      take(t, "slope_lambda", cfg.tol.slope_lambda);
      take(t, "slope_E", cfg.tol.slope_E);
      take(t, "prefactor_rel", cfg.tol.prefactor_rel);
      take(t, "prefactor_ortho", cfg.tol.prefactor_ortho);
      take(t, "energy_rel", cfg.tol.energy_rel);
      take(t, "sign_cos_threshold", cfg.tol.sign_cos_threshold);
    }
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("study config: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

StudyConfig read_study_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open study config " + path.string());
  return read_study_config(in);
}

void write_study_config(std::ostream& os, const StudyConfig& cfg) {
  ordered_json j;
  j["domain"] = {{"center", {cfg.domain.center.x, cfg.domain.center.y}}, {"radius", cfg.domain.radius}};
  j["limit_pole"] = {cfg.limit_pole.x, cfg.limit_pole.y};
  j["n0"] = cfg.n0;
  j["ray_angles"] = cfg.ray_angles;
  j["angles_relative"] = cfg.angles_relative;
  j["a_fractions"] = cfg.a_fractions;
  j["mesh_h"] = cfg.mesh_h;
  j["grading_exponent"] = cfg.grading_exponent;
  j["crack"] = {{"h", cfg.crack.h},
                {"grading_exponent", cfg.crack.grading_exponent},
                {"radii", cfg.crack.radii},
                {"omega_samples", cfg.crack.omega_samples}};
  j["profile_alphas"] = cfg.profile_alphas;
  j["profile_k"] = cfg.profile_k;
  j["gap_tol"] = cfg.gap_tol;
  j["require_simple"] = cfg.require_simple;
  j["refinement_guard"] = cfg.refinement_guard;
  j["seed"] = cfg.seed;
  j["tolerances"] = {{"slope_lambda", cfg.tol.slope_lambda},     {"slope_E", cfg.tol.slope_E},
                     {"prefactor_rel", cfg.tol.prefactor_rel},   {"prefactor_ortho", cfg.tol.prefactor_ortho},
                     {"energy_rel", cfg.tol.energy_rel},         {"sign_cos_threshold", cfg.tol.sign_cos_threshold}};
  os << j.dump(2) << '\n';
}

namespace {

struct PairResult {
  double lambda_a = 0.0, lambda0 = 0.0, energy = 0.0;
};

PairResult solve_pair(const StudyConfig& cfg, double h, double abs_a, double alpha) {
  AbMeshConfig mc;
  mc.domain = cfg.domain;
  mc.h = h;
  mc.grading_exponent = cfg.grading_exponent;
  SolveOptions so;
  so.gap_tol = cfg.gap_tol;
  so.eigen.seed = cfg.seed;
  const Point2 b = cfg.limit_pole;
  const auto setup = make_ab_setup(mc, b, b + polar(abs_a, alpha), alpha);
  const AbEigenResult u0 = solve_ab(setup, PoleChoice::Anchor, cfg.n0, so);
  const AbEigenResult ua = normalize_pair(solve_ab(setup, PoleChoice::Pole, cfg.n0, so), u0);
  return {ua.lambda, u0.lambda, energy_discrepancy(ua, u0)};
}

template <class F>
void run_jobs(int count, int jobs, F&& f) {
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(count));
  const int threads = std::max(1, jobs);
  (void)threads;
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < count; ++i) {
    try {
      f(i);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Limits of y / |a|^k, extrapolated linearly in |a|.
double prefactor_limit(const std::vector<double>& a, const std::vector<double>& y, int k) {
  std::vector<double> q(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) q[i] = y[i] / std::pow(a[i], k);
  return fit_line(a, q).intercept;
}

}  // namespace

RateStudy run_rate_study(const StudyConfig& cfg, int jobs) {
  cfg.validate();
  RateStudy study;
  study.config = cfg;
  study.warnings = cfg.warnings();
  const double dist = cfg.domain.distance_to_boundary(cfg.limit_pole);

  // Limit problem and blow-up at b.
  AbMeshConfig mc;
  mc.domain = cfg.domain;
  mc.h = cfg.mesh_size(0);
  mc.grading_exponent = cfg.grading_exponent;
  SolveOptions so;
  so.gap_tol = cfg.gap_tol;
  so.eigen.seed = cfg.seed;
  const auto setup0 = make_ab_setup(mc, cfg.limit_pole, cfg.limit_pole, 0.0);
  const AbEigenResult u0 = solve_ab(setup0, PoleChoice::Anchor, cfg.n0, so);
  study.lambda0 = u0.lambda;
  study.simple = u0.simple;
  if (!u0.simple) {
    if (cfg.require_simple) throw NumericalError("rate study: eigenvalue at the limit pole is not simple");
    study.warnings.push_back("eigenvalue at the limit pole failed the simplicity check");
  }
  study.blowup = fit_blowup(u0, default_blowup_radii(*setup0));
  const int k = study.blowup.k;

  // Crack-side predictions.
  std::vector<CrackSolution> we;
  for (double R : cfg.crack.radii) we.push_back(solve_we(k, R, cfg.crack));
  study.m_k = extrapolate_crack(we).m.limit;
  study.C0 = -4.0 * study.blowup.amplitude_sq() * study.m_k;

  const std::size_t nr = cfg.ray_angles.size(), na = cfg.a_fractions.size();
  study.records.resize(nr);
  std::vector<double> offsets(nr);
  for (std::size_t i = 0; i < nr; ++i) {
    RateRecord& rec = study.records[i];
    const double given = cfg.ray_angles[i];
    rec.alpha = wrap_angle(cfg.angles_relative ? study.blowup.alpha0 + given : given);
    rec.offset = wrap_angle(cfg.angles_relative ? given : rec.alpha - study.blowup.alpha0);
    if (std::min(rec.offset, kTwoPi - rec.offset) < 1e-9) rec.offset = 0.0;
    offsets[i] = rec.offset;
    rec.rows.resize(na);
  }
  const ProfileReport Lp = L_profile(k, offsets, cfg.crack);

  run_jobs(static_cast<int>(nr * na), jobs, [&](int j) {
    const std::size_t i = static_cast<std::size_t>(j) / na, m = static_cast<std::size_t>(j) % na;
    const double abs_a = cfg.a_fractions[m] * dist;
    const PairResult r = solve_pair(cfg, cfg.mesh_size(m), abs_a, study.records[i].alpha);
    study.records[i].rows[m] = {abs_a, r.lambda_a, r.lambda0, r.lambda0 - r.lambda_a, r.energy};
  });

  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < nr; ++i) {
    RateRecord& rec = study.records[i];
    std::vector<double> a, dl, E;
    for (const RateRow& row : rec.rows) {
      a.push_back(row.abs_a);
      dl.push_back(row.dlambda);
      E.push_back(row.energy);
    }
    const bool dl_positive = std::all_of(dl.begin(), dl.end(), [](double v) { return v > 0.0; });
    if (dl_positive) {
      const LineFit f = fit_loglog(a, dl);
      rec.slope_lambda = f.slope;
      rec.loglog_residual_lambda = f.rms_residual;
    } else {
      rec.slope_lambda = nan;
      rec.loglog_residual_lambda = nan;
    }
    const LineFit fe = fit_loglog(a, E);
    rec.slope_E = fe.slope;
    rec.loglog_residual_E = fe.rms_residual;
    rec.limit_lambda = prefactor_limit(a, dl, k);
    rec.limit_E = prefactor_limit(a, E, k);
    const double c = std::cos(k * rec.offset);
    rec.pred_C0cos = study.C0 * c;
    rec.L_p = Lp.rows[i].L;
    rec.pred_L = study.blowup.amplitude_sq() * rec.L_p;
    if (std::abs(c) > cfg.tol.sign_cos_threshold) {
      const double s = std::copysign(1.0, rec.pred_C0cos);
      rec.sign_consistent = std::copysign(1.0, rec.limit_lambda) == s &&
                            std::all_of(dl.begin(), dl.end(), [s](double v) { return std::copysign(1.0, v) == s; });
      if (!rec.sign_consistent)
        study.warnings.push_back("sign mismatch between limit_lambda, C0 cos and lambda0 - lambda_a at alpha = " +
                                 format_g17(rec.alpha));
    }
  }

  // Scale-separation guard on the ray with the strongest eigenvalue variation.
  if (cfg.refinement_guard && nr > 0) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < nr; ++i)
      if (std::abs(std::cos(k * study.records[i].offset)) > std::abs(std::cos(k * study.records[best].offset)))
        best = i;
    const RateRecord& rec = study.records[best];
    const RateRow& last = rec.rows[na - 1];
    const PairResult fine = solve_pair(cfg, 0.5 * cfg.mesh_size(na - 1), last.abs_a, rec.alpha);
    const double change = std::abs((fine.lambda0 - fine.lambda_a) - last.dlambda);
    const double increment = std::abs(rec.rows[na - 2].dlambda - last.dlambda);
    if (!(change < increment))
      throw NumericalError("rate study: halving h changes lambda0 - lambda_a by " + format_g17(change) +
                           ", more than the |a| increment " + format_g17(increment));
  }
  return study;
}

ProfileStudy run_L_profile_study(const StudyConfig& cfg, const RateStudy* rates) {
  ProfileStudy out;
  out.k = cfg.profile_k;
  out.profile = L_profile(cfg.profile_k, cfg.profile_alphas, cfg.crack);
  if (rates) {
    const double amp = rates->blowup.amplitude_sq();
    for (const RateRecord& rec : rates->records) {
      MergedRow m;
      m.offset = rec.offset;
      m.L_crack = rec.L_p;
      m.L_rate = rec.limit_E / amp;
      m.rel = std::abs(m.L_rate - m.L_crack) / m.L_crack;
      out.merged.push_back(m);
    }
  }
  return out;
}

void write_rate_csv(std::ostream& os, const RateStudy& study) {
  os << "alpha,abs_a,lambda_a,lambda0,dlambda,energy_discrepancy,slope_lambda,limit_lambda,slope_E,limit_E,"
        "pred_C0cos,pred_L\n";
  for (const RateRecord& rec : study.records)
    for (const RateRow& row : rec.rows) {
      const double v[12] = {rec.alpha,        row.abs_a,        row.lambda_a,     row.lambda0,
                            row.dlambda,      row.energy,       rec.slope_lambda, rec.limit_lambda,
                            rec.slope_E,      rec.limit_E,      rec.pred_C0cos,   rec.pred_L};
      for (int c = 0; c < 12; ++c) os << (c ? "," : "") << format_g17(v[c]);
      os << '\n';
    }
}

namespace {

ordered_json number(double v) {
  return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr);
}

ordered_json summary_json(const RateStudy& s, const ProfileStudy* p) {
  ordered_json j;
  j["lambda0"] = s.lambda0;
  j["simple"] = s.simple;
  const BlowupFit& b = s.blowup;
  j["blowup"] = {{"k", b.k},
                 {"beta1", b.beta1},
                 {"beta2", b.beta2},
                 {"amplitude_sq", b.amplitude_sq()},
                 {"alpha0", b.alpha0},
                 {"residuals", b.residuals}};
  j["m_k"] = s.m_k;
  j["C0"] = s.C0;
  ordered_json recs = ordered_json::array();
  for (const RateRecord& r : s.records) {
    ordered_json rows = ordered_json::array();
    for (const RateRow& row : r.rows)
      rows.push_back({{"abs_a", row.abs_a},
                      {"lambda_a", row.lambda_a},
                      {"lambda0", row.lambda0},
                      {"dlambda", row.dlambda},
                      {"energy_discrepancy", row.energy}});
    recs.push_back({{"alpha", r.alpha},
                    {"offset", r.offset},
                    {"slope_lambda", number(r.slope_lambda)},
                    {"limit_lambda", r.limit_lambda},
                    {"slope_E", r.slope_E},
                    {"limit_E", r.limit_E},
                    {"loglog_residual_lambda", number(r.loglog_residual_lambda)},
                    {"loglog_residual_E", r.loglog_residual_E},
                    {"pred_C0cos", r.pred_C0cos},
                    {"pred_L", r.pred_L},
                    {"L_p", r.L_p},
                    {"sign_consistent", r.sign_consistent},
                    {"rows", rows}});
  }
  j["records"] = recs;
  if (p) {
    ordered_json prof = ordered_json::array();
    for (const ProfileRow& row : p->profile.rows)
      prof.push_back({{"alpha", row.alpha}, {"L", row.L}, {"J", row.J}, {"omega1", row.omega1}});
    ordered_json merged = ordered_json::array();
    for (const MergedRow& m : p->merged)
      merged.push_back({{"offset", m.offset}, {"L_crack", m.L_crack}, {"L_rate", m.L_rate}, {"rel", m.rel}});
    j["profile"] = {{"k", p->k},
                    {"rows", prof},
                    {"evenness", p->profile.evenness},
                    {"periodicity", p->profile.periodicity},
                    {"all_positive", p->profile.all_positive},
                    {"merged", merged}};
  }
  j["warnings"] = s.warnings;
  return j;
}

void open_for_write(std::ofstream& f, const std::filesystem::path& path) {
  f.open(path, std::ios::binary | std::ios::trunc);
  if (!f) throw PreconditionError("cannot write " + path.string());
}

}  // namespace

void validate_summary_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("summary: ") + e.what());
  }
  for (const char* key : {"lambda0", "simple", "blowup", "m_k", "C0", "records", "warnings"})
    if (!j.contains(key)) throw PreconditionError(std::string("summary: missing key ") + key);
  for (const char* key : {"k", "beta1", "beta2", "alpha0", "residuals"})
    if (!j["blowup"].contains(key)) throw PreconditionError(std::string("summary: blowup lacks ") + key);
  if (!j["records"].is_array()) throw PreconditionError("summary: records must be an array");
  for (const json& r : j["records"]) {
    for (const char* key : {"alpha", "slope_lambda", "limit_lambda", "slope_E", "limit_E", "pred_C0cos", "pred_L", "rows"})
      if (!r.contains(key)) throw PreconditionError(std::string("summary: record lacks ") + key);
    for (const json& row : r["rows"])
      for (const char* key : {"abs_a", "lambda_a", "lambda0", "dlambda", "energy_discrepancy"})
        if (!row.contains(key)) throw PreconditionError(std::string("summary: row lacks ") + key);
  }
}

void emit_reports(const RateStudy& study, const ProfileStudy* profile, const std::filesystem::path& out_dir,
                  ReportFormat format) {
  if (study.records.empty()) throw PreconditionError("emit_reports: no records");
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw PreconditionError("cannot create output directory " + out_dir.string());
  std::ofstream f;
  if (format != ReportFormat::Json) {
    open_for_write(f, out_dir / "rate.csv");
    write_rate_csv(f, study);
    f.close();
  }
  if (format != ReportFormat::Csv) {
    open_for_write(f, out_dir / "summary.json");
    f << summary_json(study, profile).dump(2) << '\n';
    f.close();
  }
  for (std::size_t i = 0; i < study.records.size(); ++i) {
    open_for_write(f, out_dir / ("energy_" + std::to_string(i) + ".dat"));
    for (const RateRow& row : study.records[i].rows)
      f << format_g17(std::log(row.abs_a)) << ' ' << format_g17(std::log(row.energy)) << '\n';
    f.close();
  }
  open_for_write(f, out_dir / "L_profile.dat");
  if (profile) {
    for (const ProfileRow& row : profile->profile.rows) f << format_g17(row.alpha) << ' ' << format_g17(row.L) << '\n';
  } else {
    for (const RateRecord& rec : study.records) f << format_g17(rec.offset) << ' ' << format_g17(rec.L_p) << '\n';
  }
}

}  // namespace abpole
