#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "abpole/sweep.hpp"

#ifdef ABPOLE_HAVE_OPENMP
#include <omp.h>
#endif

namespace fs = std::filesystem;
using namespace abpole;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string config;
  std::string out = ".";
  int jobs = 1;
  std::uint64_t seed = 0x5eed;
  bool seed_given = false;
};

StudyConfig load(const Common& c) {
  StudyConfig cfg = c.config.empty() ? StudyConfig{} : read_study_config(fs::path(c.config));
  if (c.seed_given) cfg.seed = c.seed;
  cfg.validate();
  return cfg;
}

std::ofstream open_out(const Common& c, const std::string& name) {
  fs::create_directories(c.out);
  std::ofstream f(fs::path(c.out) / name, std::ios::binary | std::ios::trunc);
  if (!f) throw PreconditionError("cannot write " + (fs::path(c.out) / name).string());
  return f;
}

AbMeshConfig mesh_config(const StudyConfig& cfg) {
  AbMeshConfig mc;
  mc.domain = cfg.domain;
  mc.h = cfg.mesh_size(0);
  mc.grading_exponent = cfg.grading_exponent;
  return mc;
}

int cmd_mesh(const Common& c) {
  const StudyConfig cfg = load(c);
  const auto setup = make_ab_setup(mesh_config(cfg), cfg.limit_pole, cfg.limit_pole, 0.0);
  auto f = open_out(c, "mesh.abmesh");
  write_abmesh(f, setup->mesh);
  std::printf("mesh: %zu nodes, %zu triangles -> %s\n", setup->mesh.num_nodes(), setup->mesh.base.num_triangles(),
              (fs::path(c.out) / "mesh.abmesh").string().c_str());
  return 0;
}

int cmd_eig(const Common& c) {
  const StudyConfig cfg = load(c);
  const auto setup = make_ab_setup(mesh_config(cfg), cfg.limit_pole, cfg.limit_pole, 0.0);
  SolveOptions so;
  so.gap_tol = cfg.gap_tol;
  so.eigen.seed = cfg.seed;
  const AbEigenResult r = solve_ab(setup, PoleChoice::Anchor, cfg.n0, so);
  ordered_json j;
  j["n0"] = r.n0;
  j["lambda"] = r.lambda;
  j["simple"] = r.simple;
  j["dofs"] = r.system->dim();
  ordered_json values = ordered_json::array(), residuals = ordered_json::array();
  for (const EigenPair& p : r.pairs) {
    values.push_back(p.value);
    residuals.push_back(p.residual);
  }
  j["eigenvalues"] = values;
  j["residuals"] = residuals;
  auto f = open_out(c, "eig.json");
  f << j.dump(2) << '\n';
  auto g = open_out(c, "blowup.json");
  write_blowup_json(g, fit_blowup(r, default_blowup_radii(*setup)));
  std::printf("lambda_%d = %.12g (simple: %s)\n", r.n0, r.lambda, r.simple ? "yes" : "no");
  return 0;
}

int cmd_rate(const Common& c) {
  const StudyConfig cfg = load(c);
  const RateStudy study = run_rate_study(cfg, c.jobs);
  const ProfileStudy profile = run_L_profile_study(cfg, &study);
  emit_reports(study, &profile, c.out);
  for (const RateRecord& r : study.records)
    std::printf("alpha-alpha0 = %.6f  slope_lambda = %.4f  limit_lambda = %.6f (pred %.6f)  slope_E = %.4f  "
                "limit_E = %.6f (pred %.6f)\n",
                r.offset, r.slope_lambda, r.limit_lambda, r.pred_C0cos, r.slope_E, r.limit_E, r.pred_L);
  for (const std::string& w : study.warnings) std::printf("warning: %s\n", w.c_str());
  return 0;
}

int cmd_crack(const Common& c, double alpha, int k) {
  const StudyConfig cfg = load(c);
  std::vector<CrackSolution> sols;
  for (double R : cfg.crack.radii) {
    sols.push_back(solve_crack(alpha, k, R, cfg.crack));
    auto f = open_out(c, "crack_R" + format_g17(R) + ".json");
    write_crack_json(f, sols.back());
  }
  auto field = open_out(c, "crack_field.txt");
  write_crack_field(field, sols.back());
  const CrackLimit lim = extrapolate_crack(sols);
  ordered_json j;
  j["alpha"] = lim.alpha;
  j["k"] = lim.k;
  j["radii"] = lim.radii;
  j["L"] = lim.L.limit;
  j["L_q"] = lim.L.q;
  j["L_fit_residual"] = lim.L.max_residual;
  j["J"] = lim.J.limit;
  j["omega1"] = lim.omega1.limit;
  if (sols.front().half_plane) j["m_k"] = lim.m.limit;
  auto f = open_out(c, "crack_limit.json");
  f << j.dump(2) << '\n';
  std::printf("alpha = %.6f k = %d: L = %.8g  J = %.8g  omega1 = %.8g\n", lim.alpha, k, lim.L.limit, lim.J.limit,
              lim.omega1.limit);
  return 0;
}

std::vector<double> uniform_grid(int n) {
  std::vector<double> out;
  for (int j = 0; j < n; ++j) out.push_back(kTwoPi * j / n);
  return out;
}

int cmd_lprofile(const Common& c) {
  StudyConfig cfg = load(c);
  if (cfg.profile_alphas.empty()) cfg.profile_alphas = uniform_grid(8);
  const ProfileStudy p = run_L_profile_study(cfg);
  auto f = open_out(c, "L_profile.dat");
  for (const ProfileRow& row : p.profile.rows) f << format_g17(row.alpha) << ' ' << format_g17(row.L) << '\n';
  ordered_json j;
  j["k"] = p.k;
  j["evenness"] = p.profile.evenness;
  j["periodicity"] = p.profile.periodicity;
  j["all_positive"] = p.profile.all_positive;
  ordered_json rows = ordered_json::array();
  for (const ProfileRow& row : p.profile.rows)
    rows.push_back({{"alpha", row.alpha}, {"L", row.L}, {"J", row.J}, {"omega1", row.omega1}, {"tail_q", row.tail_q}});
  j["rows"] = rows;
  auto g = open_out(c, "lprofile.json");
  g << j.dump(2) << '\n';
  std::printf("k = %d: evenness %.3g, periodicity %.3g, positive: %s\n", p.k, p.profile.evenness,
              p.profile.periodicity, p.profile.all_positive ? "yes" : "no");
  return 0;
}

struct Checks {
  ordered_json log = ordered_json::array();
  bool ok = true;
  void add(const std::string& name, double value, double limit, bool pass) {
    std::printf("%s %s: %.6g (limit %.3g)\n", pass ? "PASS" : "FAIL", name.c_str(), value, limit);
    log.push_back({{"check", name}, {"value", value}, {"limit", limit}, {"pass", pass}});
    ok = ok && pass;
  }
};

int cmd_verify(const Common& c) {
  const StudyConfig cfg = load(c);
  Checks checks;
  std::vector<CrackSolution> we;
  for (double R : cfg.crack.radii) we.push_back(solve_we(1, R, cfg.crack));
  const double m1 = extrapolate_crack(we).m.limit;
  checks.add("m_1 < 0", m1, 0.0, m1 < 0.0);

  for (double alpha : {0.25 * kPi, 0.5 * kPi, 0.75 * kPi, kPi}) {
    std::vector<CrackSolution> sols;
    for (double R : cfg.crack.radii) sols.push_back(solve_wp(alpha, 1, R, cfg.crack));
    const IdentityReport id = identity_suite(extrapolate_crack(sols), m1);
    const std::string tag = " (alpha = " + format_g17(alpha) + ")";
    checks.add("identity r1" + tag, id.r1, 0.02, id.r1 <= 0.02);
    checks.add("identity r2" + tag, id.r2, 0.02, id.r2 <= 0.02);
    checks.add("identity r3" + tag, id.r3, 0.02, id.r3 <= 0.02);

    // Minimality against random admissible perturbations.
    const CrackSolution& s = sols.front();
    const ReducedSystem& sys = s.problem->reduced;
    UniformStream rng(cfg.seed);
    double worst = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 20; ++t) {
      const Vector v = sys.P * rng.vector(sys.dim());
      for (double eps : {1e-3, -1e-3}) worst = std::min(worst, s.functional(s.w + eps * v) - s.J);
    }
    checks.add("minimality" + tag, worst, 0.0, worst >= -1e-12 * std::max(1.0, std::abs(s.J)));
  }
  for (const InequalityCheck& q : inequality_suite(0.5 * kPi)) checks.add(q.name, q.margin(), -1e-3, q.margin() >= -1e-3);

  auto f = open_out(c, "verify.json");
  f << checks.log.dump(2) << '\n';
  return checks.ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aharonov-Bohm pole convergence toolkit"};
  app.require_subcommand(1);
  Common common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config, "study configuration (JSON)");
    sub->add_option("--out", common.out, "output directory");
    sub->add_option("--jobs", common.jobs, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& s) { common.seed = s, common.seed_given = true; },
        "seed for random test fields");
  };
  CLI::App* mesh = app.add_subcommand("mesh", "mesh of the limit-pole problem");
  CLI::App* eig = app.add_subcommand("eig", "eigenpairs and blow-up at the limit pole");
  CLI::App* rate = app.add_subcommand("rate", "eigenvalue and eigenfunction rate study");
  CLI::App* crack = app.add_subcommand("crack", "crack problem at one angle");
  CLI::App* lprofile = app.add_subcommand("lprofile", "L profile over an angle grid");
  CLI::App* verify = app.add_subcommand("verify", "identity, minimality and inequality suites");
  for (CLI::App* s : {mesh, eig, rate, crack, lprofile, verify}) add_common(s);
  double alpha = 0.5 * kPi;
  int k = 1;
  crack->add_option("--alpha", alpha, "ray angle of the segment Gamma_p");
  crack->add_option("--k", k, "vanishing order (odd)");

  CLI11_PARSE(app, argc, argv);
#ifdef ABPOLE_HAVE_OPENMP
  omp_set_num_threads(common.jobs);
#endif
  try {
    if (*mesh) return cmd_mesh(common);
    if (*eig) return cmd_eig(common);
    if (*rate) return cmd_rate(common);
    if (*crack) return cmd_crack(common, alpha, k);
    if (*lprofile) return cmd_lprofile(common);
    if (*verify) return cmd_verify(common);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}
