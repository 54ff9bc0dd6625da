#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "abpole/blowup.hpp"
#include "abpole/crack.hpp"
#include "abpole/fitting.hpp"

namespace abpole {

struct StudyTolerances {
  double slope_lambda = 0.15;
  double slope_E = 0.2;
  double prefactor_rel = 0.10;     ///< limit_lambda vs C0 cos at offset 0
  double prefactor_ortho = 0.10;   ///< |limit_lambda| / |C0| where cos vanishes
  double energy_rel = 0.15;        ///< limit_E / |beta|^2 vs L_p
  double sign_cos_threshold = 0.2;
};

struct StudyConfig {
  DiskDomain domain;
  Point2 limit_pole{0.3, 0.0};
  int n0 = 1;
  /// Ray angles; offsets from the fitted nodal direction alpha0 when
  /// angles_relative, absolute polar angles otherwise.
  std::vector<double> ray_angles{0.0, 0.7853981633974483, 1.5707963267948966};
  bool angles_relative = true;
  /// |a| as fractions of dist(b, boundary), strictly decreasing.
  std::vector<double> a_fractions{0.1, 0.05, 0.025};
  /// Mesh size per |a| (a single entry applies to all).
  std::vector<double> mesh_h{0.02};
  double grading_exponent = 0.5;
  CrackOptions crack;
  /// Crack-angle grid of the profile study and its vanishing order.
  std::vector<double> profile_alphas;
  int profile_k = 1;
  double gap_tol = 1e-3;
  bool require_simple = true;
  bool refinement_guard = true;
  std::uint64_t seed = 0x5eed;
  StudyTolerances tol;

  /// Throws PreconditionError on an invalid configuration.
  void validate() const;
  [[nodiscard]] double mesh_size(std::size_t i) const { return mesh_h.size() == 1 ? mesh_h[0] : mesh_h.at(i); }
  [[nodiscard]] std::vector<std::string> warnings() const;
};

/// JSON round trip. Unknown keys are rejected; missing keys keep defaults.
StudyConfig read_study_config(std::istream& is);
StudyConfig read_study_config(const std::filesystem::path& path);
void write_study_config(std::ostream& os, const StudyConfig& cfg);

struct RateRow {
  double abs_a = 0.0;
  double lambda_a = 0.0;
  double lambda0 = 0.0;  ///< limit-pole eigenvalue on the same mesh
  double dlambda = 0.0;
  double energy = 0.0;   ///< energy discrepancy E(a)
};

struct RateRecord {
  double alpha = 0.0;   ///< absolute ray angle
  double offset = 0.0;  ///< alpha - alpha0, reduced to [0, 2pi)
  std::vector<RateRow> rows;
  double slope_lambda = 0.0;  ///< NaN when some lambda0 - lambda_a <= 0
  double limit_lambda = 0.0;
  double slope_E = 0.0;
  double limit_E = 0.0;
  double loglog_residual_lambda = 0.0;
  double loglog_residual_E = 0.0;
  double pred_C0cos = 0.0;
  double pred_L = 0.0;
  double L_p = 0.0;
  bool sign_consistent = true;
};

struct RateStudy {
  StudyConfig config;
  double lambda0 = 0.0;
  bool simple = true;
  BlowupFit blowup;
  double m_k = 0.0;
  double C0 = 0.0;
  std::vector<RateRecord> records;
  std::vector<std::string> warnings;
};

/// Eigenvalue and eigenfunction rate study. Jobs over (ray, |a|) run on up to
/// `jobs` OpenMP threads; results are reduced in configuration order.
RateStudy run_rate_study(const StudyConfig& cfg, int jobs = 1);

struct MergedRow {
  double offset = 0.0;
  double L_crack = 0.0;
  double L_rate = 0.0;  ///< limit_E / |beta|^2
  double rel = 0.0;
};

struct ProfileStudy {
  int k = 1;
  ProfileReport profile;
  std::vector<MergedRow> merged;
};

/// L profile from crack solves on cfg.profile_alphas; merged with the rate
/// study where one is supplied.
ProfileStudy run_L_profile_study(const StudyConfig& cfg, const RateStudy* rates = nullptr);

enum class ReportFormat { Csv, Json, All };

/// Writes rate.csv, summary.json, L_profile.dat and energy_<i>.dat
/// (log|a|, log E) into out_dir. Throws PreconditionError if there is nothing
/// to report or the directory is not writable.
void emit_reports(const RateStudy& study, const ProfileStudy* profile, const std::filesystem::path& out_dir,
                  ReportFormat format = ReportFormat::All);

/// CSV with the fixed column schema and 17 significant digits.
void write_rate_csv(std::ostream& os, const RateStudy& study);

/// Throws PreconditionError unless the summary has every required key.
void validate_summary_json(const std::string& text);

/// printf("%.17g") for locale-independent, round-trippable output.
std::string format_g17(double v);

}  // namespace abpole
