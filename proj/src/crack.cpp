#include "abpole/crack.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <exception>
#include <map>
#include <ostream>

#include <Eigen/SparseCholesky>
#include <nlohmann/json.hpp>

#include "abpole/blowup.hpp"

namespace abpole {

namespace {

using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

void check_problem(int k, double R) {
  if (k < 1 || k % 2 == 0) throw PreconditionError("vanishing order k must be a positive odd integer");
  if (!(R >= 4.0)) throw PreconditionError("truncation radius must be at least 4");
}

// Size h at unit distance from the tips, growing like dist^exponent up to the outer circle.
SizingField crack_sizing(const CrackOptions& opt, double R, std::vector<GradingPoint> points) {
  if (!(opt.h > 0.0 && opt.h < 1.0)) throw PreconditionError("crack mesh size must lie in (0, 1)");
  SizingField s;
  s.h = opt.h;
  s.reference_length = 1.0;
  s.points = std::move(points);
  s.cap_ratio = std::pow(2.0 * R, opt.grading_exponent);
  return s;
}

Vector solve_spd(const SparseSymMatrix& A, const Vector& rhs) {
  Factor f(A.lower);
  if (f.info() != Eigen::Success) throw NumericalError("crack system: factorization failed");
  if ((f.vectorD().array() <= 0.0).any()) throw NumericalError("crack system is not positive definite");
  return f.solve(rhs);
}

bool is_zero_angle(double alpha) {
  const double a = wrap_angle(alpha);
  return std::min(a, kTwoPi - a) < 1e-12;
}

// One polyline p -> 0 -> (R, 0): the origin is an interior corner, so each of
// the two sectors meeting there keeps its own trace value.
std::vector<CutSpec> crack_cuts(Point2 p, double R) {
  return {{{p, {0.0, 0.0}, {R, 0.0}}, {kSegmentGamma, kSegmentS0}}};
}

std::vector<std::pair<int, int>> part_edges(const Mesh& mesh, EdgeKind kind, int id) {
  std::vector<std::pair<int, int>> out;
  for (const TaggedEdge& e : mesh.tagged_edges)
    if (e.tag.kind == kind && e.tag.id == id) out.emplace_back(e.a, e.b);
  return out;
}

}  // namespace

double CrackSolution::functional(const Vector& u) const {
  return 0.5 * problem->K.quad(u) + problem->linear.dot(u);
}

CrackSolution solve_wp(double alpha, int k, double R, const CrackOptions& opt) {
  check_problem(k, R);
  if (is_zero_angle(alpha)) throw PreconditionError("solve_wp needs alpha != 0 mod 2pi; use solve_we");
  const double a = wrap_angle(alpha);
  const Point2 o{0.0, 0.0}, p = polar(1.0, a);
  const std::vector<CutSpec> cuts = crack_cuts(p, R);
  const GradingPoint grading[2] = {{o, opt.grading_exponent}, {p, opt.grading_exponent}};
  const Mesh mesh = generate_disk_mesh(o, R, crack_sizing(opt, R, {grading[0], grading[1]}), cuts);

  auto prob = std::make_shared<CrackProblem>();
  prob->mesh = cut_mesh(mesh, cuts);
  const CrackedMesh& cm = prob->mesh;
  prob->K = assemble_stiffness(cm);

  // Jump term of the functional. The segment runs p -> 0, so its Minus side
  // is the side whose outward normal is nu = (sin a, -cos a).
  const Vector f = assemble_segment_load(cm, kSegmentGamma, {psi_normal_derivative(1.0, a, k), 0.5 * k - 1.0, o});
  prob->linear = Vector::Zero(static_cast<Eigen::Index>(cm.num_nodes()));
  for (int node : cm.segment(kSegmentGamma).chain) {
    const int other = cm.twin[node];
    if (other < 0) continue;
    prob->linear[other] += f[node];
    prob->linear[node] -= f[node];
  }

  const JumpConstraint constraints[2] = {
      {kSegmentS0, JumpKind::Antiperiodic, {}},
      {kSegmentGamma, JumpKind::InhomogeneousSum, [k](Point2 x) { return -2.0 * psi(x, k); }}};
  const std::vector<int> dirichlet = dirichlet_nodes(cm);
  prob->reduced = reduce(prob->K, prob->K, cm, constraints, dirichlet);

  const ReducedSystem& sys = prob->reduced;
  const Vector y = solve_spd(sys.K, sys.f - sys.restrict_load(prob->linear));

  CrackSolution sol;
  sol.alpha = a;
  sol.k = k;
  sol.R = R;
  sol.h = opt.h;
  sol.w = sys.expand(y);
  sol.problem = prob;
  sol.J = sol.functional(sol.w);
  sol.L_trunc = prob->K.quad(sol.w);
  sol.omega1 = omega(sol, 1.0, opt.omega_samples);
  return sol;
}

CrackSolution solve_we(int k, double R, const CrackOptions& opt) {
  check_problem(k, R);
  const Point2 o{0.0, 0.0}, e{1.0, 0.0};
  const Mesh half = generate_half_disk_mesh(
      R, crack_sizing(opt, R, {{o, opt.grading_exponent}, {e, opt.grading_exponent}}));

  // Direct minimization of 1/2 |grad u|^2 - load(u) on the half disk.
  const CrackedMesh hc = uncut(half);
  const SparseSymMatrix Kh = assemble_stiffness(hc);
  const auto free_edges = part_edges(half, EdgeKind::Outer, half_disk::kAxisFree);
  const Vector load = assemble_edge_load(half, free_edges, {0.5 * k, 0.5 * k - 1.0, o});
  const int parts[2] = {half_disk::kArc, half_disk::kAxisDirichlet};
  const ReducedSystem hs = reduce(Kh, Kh, hc, {}, dirichlet_nodes(hc, parts));
  const Vector x = hs.expand(solve_spd(hs.K, hs.f + hs.restrict_load(load)));

  CrackSolution sol;
  sol.alpha = 0.0;
  sol.k = k;
  sol.R = R;
  sol.h = opt.h;
  sol.half_plane = true;
  sol.m_direct = 0.5 * Kh.quad(x) - load.dot(x);

  // Even reflection, then the energy identity evaluated on the full disk.
  std::vector<int> image;
  const Mesh full = mirror_across_axis(half, &image);
  auto prob = std::make_shared<CrackProblem>();
  prob->mesh = uncut(full);
  prob->K = assemble_stiffness(prob->mesh);
  sol.w = Vector::Zero(static_cast<Eigen::Index>(full.vertices.size()));
  for (std::size_t v = 0; v < image.size(); ++v) {
    sol.w[static_cast<Eigen::Index>(v)] = x[static_cast<Eigen::Index>(v)];
    sol.w[image[v]] = x[static_cast<Eigen::Index>(v)];
  }
  const auto gamma_edges = part_edges(full, EdgeKind::Constraint, half_disk::kAxisFree);
  const Vector trace_load = assemble_edge_load(full, gamma_edges, {psi_normal_derivative(1.0, 0.0, k), 0.5 * k - 1.0, o});
  prob->linear = 2.0 * trace_load;

  std::vector<int> dirichlet = prob->mesh.base.outer_boundary_vertices();
  for (std::size_t v = 0; v < full.vertices.size(); ++v)
    if (full.vertices[v].y == 0.0 && full.vertices[v].x >= 1.0) dirichlet.push_back(static_cast<int>(v));
  std::sort(dirichlet.begin(), dirichlet.end());
  dirichlet.erase(std::unique(dirichlet.begin(), dirichlet.end()), dirichlet.end());
  prob->reduced = reduce(prob->K, prob->K, prob->mesh, {}, dirichlet);
  sol.problem = prob;

  const double energy = dirichlet_energy(full, sol.w);
  sol.m_identity = 0.5 * (0.5 * energy + 2.0 * trace_load.dot(sol.w));
  sol.J = sol.functional(sol.w);
  sol.L_trunc = energy;
  sol.omega1 = omega(sol, 1.0, opt.omega_samples);
  return sol;
}

CrackSolution solve_crack(double alpha, int k, double R, const CrackOptions& opt) {
  return is_zero_angle(alpha) ? solve_we(k, R, opt) : solve_wp(alpha, k, R, opt);
}

double omega(const CrackSolution& sol, double r, int samples) {
  if (!(r > 0.0 && r < sol.R)) throw PreconditionError("omega radius must lie in (0, R)");
  if (samples < 8) throw PreconditionError("omega needs at least 8 samples");
  const Mesh& mesh = sol.problem->mesh.base;
  const PointLocator locator(mesh);
  const std::span<const double> values(sol.w.data(), static_cast<std::size_t>(sol.w.size()));
  double sum = 0.0;
  for (int j = 0; j < samples; ++j) {
    const double t = (j + 0.5) * kTwoPi / samples;
    sum += locator.interpolate(values, polar(r, t)) * std::sin(0.5 * sol.k * t);
  }
  return sum * kTwoPi / samples;
}

namespace {

std::vector<double> radii_of(std::span<const CrackSolution> sols) {
  if (sols.size() != 3) throw PreconditionError("extrapolation uses exactly three radii");
  for (const CrackSolution& s : sols)
    if (s.k != sols[0].k || std::abs(s.alpha - sols[0].alpha) > 1e-12 || s.half_plane != sols[0].half_plane)
      throw PreconditionError("extrapolation needs solutions of one problem");
  return {sols[0].R, sols[1].R, sols[2].R};
}

}  // namespace

InverseFit extrapolate_scalar(std::span<const CrackSolution> sols,
                              const std::function<double(const CrackSolution&)>& value) {
  const std::vector<double> R = radii_of(sols);
  const double v[3] = {value(sols[0]), value(sols[1]), value(sols[2])};
  return fit_inverse_powers(R, v);
}

double extrapolate_L(std::span<const CrackSolution> sols) {
  const std::vector<double> R = radii_of(sols);
  const double L[3] = {sols[0].L_trunc, sols[1].L_trunc, sols[2].L_trunc};
  return fit_tail(R, L).limit;
}

CrackLimit extrapolate_crack(std::span<const CrackSolution> sols) {
  CrackLimit lim;
  lim.radii = radii_of(sols);
  lim.alpha = sols[0].alpha;
  lim.k = sols[0].k;
  lim.L = fit_tail(lim.radii, std::vector<double>{sols[0].L_trunc, sols[1].L_trunc, sols[2].L_trunc});
  lim.J = extrapolate_scalar(sols, [](const CrackSolution& s) { return s.J; });
  lim.omega1 = extrapolate_scalar(sols, [](const CrackSolution& s) { return s.omega1; });
  if (sols[0].half_plane) lim.m = extrapolate_scalar(sols, [](const CrackSolution& s) { return s.m_direct; });
  return lim;
}

OmegaScaling omega_scaling(std::span<const CrackSolution> sols, std::span<const double> radii) {
  if (radii.empty()) throw PreconditionError("omega scaling needs at least one radius");
  OmegaScaling out;
  out.radii.assign(radii.begin(), radii.end());
  const int k = sols.empty() ? 1 : sols[0].k;
  for (double r : radii) {
    const InverseFit fit = extrapolate_scalar(sols, [r](const CrackSolution& s) { return omega(s, r); });
    out.scaled.push_back(fit.limit * std::pow(r, 0.5 * k));
  }
  double mean = 0.0;
  for (double v : out.scaled) mean += v;
  mean /= static_cast<double>(out.scaled.size());
  if (mean == 0.0) throw NumericalError("omega scaling: mean vanishes");
  for (double v : out.scaled) out.spread = std::max(out.spread, std::abs(v - mean) / std::abs(mean));
  return out;
}

IdentityReport identity_suite(double alpha, int k, double J, double omega1, double mk) {
  if (!(mk != 0.0)) throw PreconditionError("identity suite needs m_k != 0");
  const double scale = std::abs(2.0 * mk);
  const double c = std::cos(k * alpha);
  IdentityReport r;
  r.r1 = std::abs(k * omega1 + 4.0 * mk * c) / scale;
  r.r2 = std::abs(omega1 + (2.0 / k) * J) / scale;
  r.r3 = std::abs(J - 2.0 * mk * c) / scale;
  return r;
}

IdentityReport identity_suite(const CrackLimit& lim, double mk) {
  return identity_suite(lim.alpha, lim.k, lim.J.limit, lim.omega1.limit, mk);
}

IdentityReport identity_suite(const CrackSolution& sol, double mk) {
  return identity_suite(sol.alpha, sol.k, sol.functional(sol.w), omega(sol, 1.0), mk);
}

ProfileReport L_profile(int k, std::span<const double> alphas, const CrackOptions& opt) {
  ProfileReport rep;
  if (alphas.empty()) return rep;
  if (opt.radii.size() != 3) throw PreconditionError("L profile needs three truncation radii");
  const int na = static_cast<int>(alphas.size());
  const int jobs = na * 3;
  std::vector<CrackSolution> sols(static_cast<std::size_t>(jobs));
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
#pragma omp parallel for schedule(dynamic, 1)
  for (int j = 0; j < jobs; ++j) {
    try {
      sols[j] = solve_crack(alphas[j / 3], k, opt.radii[j % 3], opt);
    } catch (...) {
      errors[j] = std::current_exception();
    }
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  double Lmax = 0.0;
  for (int i = 0; i < na; ++i) {
    const std::span<const CrackSolution> triple(sols.data() + 3 * i, 3);
    const CrackLimit lim = extrapolate_crack(triple);
    rep.rows.push_back({wrap_angle(alphas[i]), lim.L.limit, lim.J.limit, lim.omega1.limit, lim.L.q});
    rep.all_positive = rep.all_positive && lim.L.limit > 0.0;
    Lmax = std::max(Lmax, std::abs(lim.L.limit));
  }
  auto find = [&](double target) -> const ProfileRow* {
    for (const ProfileRow& row : rep.rows) {
      const double d = std::abs(wrap_angle(row.alpha - target + 0.5 * kTwoPi) - 0.5 * kTwoPi);
      if (d < 1e-9) return &row;
    }
    return nullptr;
  };
  for (const ProfileRow& row : rep.rows) {
    if (const ProfileRow* m = find(kTwoPi - row.alpha)) {
      rep.evenness = std::max(rep.evenness, std::abs(row.L - m->L) / Lmax);
      ++rep.even_pairs;
    }
    if (const ProfileRow* m = find(row.alpha + kTwoPi / k)) {
      rep.periodicity = std::max(rep.periodicity, std::abs(row.L - m->L) / Lmax);
      ++rep.periodic_pairs;
    }
  }
  return rep;
}

Point2 rotate_2pi_over_k(Point2 x, int k) {
  const double c = std::cos(kTwoPi / k), s = std::sin(kTwoPi / k);
  return {c * x.x - s * x.y, s * x.x + c * x.y};
}

Point2 reflect_x2(Point2 x) { return {x.x, -x.y}; }

namespace {

// Degree-5 seven-point rule on the reference triangle (barycentric, weights sum to 1).
struct QuadPoint {
  double l0, l1, l2, w;
};
constexpr double kA1 = 0.059715871789770, kB1 = 0.470142064105115, kW1 = 0.132394152788506;
constexpr double kA2 = 0.797426985353087, kB2 = 0.101286507323456, kW2 = 0.125939180544827;
constexpr QuadPoint kRule[7] = {{1.0 / 3, 1.0 / 3, 1.0 / 3, 0.225},
                                {kA1, kB1, kB1, kW1}, {kB1, kA1, kB1, kW1}, {kB1, kB1, kA1, kW1},
                                {kA2, kB2, kB2, kW2}, {kB2, kA2, kB2, kW2}, {kB2, kB2, kA2, kW2}};

/// Integral of weight(x) * u_h(x)^2 for the P1 interpolant u_h.
double weighted_l2(const Mesh& mesh, const Vector& u, const std::function<double(Point2)>& weight) {
  double sum = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const auto& tri = mesh.triangles[t];
    const double u0 = u[tri[0]], u1 = u[tri[1]], u2 = u[tri[2]];
    if (u0 == 0.0 && u1 == 0.0 && u2 == 0.0) continue;
    const Point2 a = mesh.vertices[tri[0]], b = mesh.vertices[tri[1]], c = mesh.vertices[tri[2]];
    double acc = 0.0;
    for (const QuadPoint& q : kRule) {
      const Point2 x = q.l0 * a + q.l1 * b + q.l2 * c;
      const double v = q.l0 * u0 + q.l1 * u1 + q.l2 * u2;
      acc += q.w * weight(x) * v * v;
    }
    sum += acc * mesh.triangle_area(t);
  }
  return sum;
}

/// Nodal values of a field defined off the cuts; duplicated nodes take the
/// limit from their own side.
Vector sample_two_sided(const CrackedMesh& cm, const std::function<double(Point2)>& u) {
  std::vector<Point2> offset(cm.num_nodes(), Point2{0.0, 0.0});
  for (const CutSegment& s : cm.segments) {
    const Point2 d = s.to - s.from;
    const Point2 left = (1.0 / norm(d)) * Point2{-d.y, d.x};
    for (int node : s.chain) {
      if (cm.twin[node] < 0) continue;
      offset[node] = 1e-9 * left;
      offset[cm.twin[node]] = -1e-9 * left;
    }
  }
  Vector out(static_cast<Eigen::Index>(cm.num_nodes()));
  for (std::size_t v = 0; v < cm.num_nodes(); ++v) out[static_cast<Eigen::Index>(v)] = u(cm.base.vertices[v] + offset[v]);
  return out;
}

double bump(double r, double r1, double r2) {
  if (r <= r1 || r >= r2) return 0.0;
  const double s = (r - r1) * (r2 - r) / (0.25 * (r2 - r1) * (r2 - r1));
  return s * s;
}

struct Family {
  std::string name;
  std::function<double(Point2)> u;
};

// Radial profiles: bumps in r, plus one bump in log r that stays close to the
// Hardy extremal scaling over a long range.
struct Profile {
  double r1, r2;
  bool log_scale;
  [[nodiscard]] double operator()(double r) const {
    return log_scale ? bump(std::log(r), std::log(r1), std::log(r2)) : bump(r, r1, r2);
  }
};

std::vector<Family> half_mode_family() {
  std::vector<Family> out;
  const Profile profiles[5] = {
      {0.2, 1.0, false}, {0.5, 2.5, false}, {0.1, 3.8, false}, {1.2, 3.0, false}, {0.05, 3.9, true}};
  for (int m : {1, 3, 5})
    for (int c = 0; c < 2; ++c)
      for (const Profile& prof : profiles) {
        char name[96];
        std::snprintf(name, sizeof name, "%s(%dt/2)*%s[%g,%g]", c ? "cos" : "sin", m,
                      prof.log_scale ? "logbump" : "bump", prof.r1, prof.r2);
        out.push_back({name, [=](Point2 x) {
                         const double r = norm(x);
                         if (r == 0.0) return 0.0;
                         const double t = wrap_angle(std::atan2(x.y, x.x));
                         const double ang = c ? std::cos(0.5 * m * t) : std::sin(0.5 * m * t);
                         return prof(r) * ang;
                       }});
      }
  return out;
}

// Adds fields that jump across the segment from 0 to p: z sqrt(1 - p/z) has
// its branch cut exactly there, and sin(t/2) keeps the traces on s0 at zero.
std::vector<Family> jump_family(double alpha) {
  std::vector<Family> out = half_mode_family();
  const std::complex<double> p = std::polar(1.0, alpha);
  const double weights[3] = {1.0, -2.0, 4.0};
  const double supports[3][2] = {{0.2, 1.5}, {0.1, 3.0}, {0.5, 2.0}};
  for (int v = 0; v < 3; ++v) {
    const Family base = out[static_cast<std::size_t>(v * 6)];
    const double c = weights[v], r1 = supports[v][0], r2 = supports[v][1];
    const bool imag = v != 1;
    char name[96];
    std::snprintf(name, sizeof name, "%s + %g*jump_%s[%g,%g]", base.name.c_str(), c, imag ? "im" : "re", r1, r2);
    out.push_back({name, [=](Point2 x) {
                     const std::complex<double> z(x.x, x.y);
                     const std::complex<double> g = z * std::sqrt(1.0 - p / z);
                     const double t = wrap_angle(std::atan2(x.y, x.x));
                     const double j = (imag ? g.imag() : g.real()) * std::sin(0.5 * t);
                     return base.u(x) + c * bump(norm(x), r1, r2) * j;
                   }});
  }
  return out;
}

CrackedMesh inequality_mesh(std::span<const CutSpec> cuts, std::vector<GradingPoint> grading, double h) {
  SizingField s;
  s.h = h;
  s.reference_length = 1.0;
  s.points = std::move(grading);
  s.cap_ratio = 2.0;
  return cut_mesh(generate_disk_mesh({0.0, 0.0}, 4.0, s, cuts), cuts);
}

}  // namespace

std::vector<InequalityCheck> inequality_suite(double alpha, double h) {
  if (is_zero_angle(alpha)) throw PreconditionError("inequality suite needs p != e");
  const double a = wrap_angle(alpha);
  const Point2 o{0.0, 0.0}, p = polar(1.0, a);
  std::vector<InequalityCheck> out;

  {
    const std::vector<CutSpec> cuts{{{o, {4.0, 0.0}}, {kSegmentS0}}};
    const CrackedMesh cm = inequality_mesh(cuts, {{o, 0.5}}, h);
    const SparseSymMatrix K = assemble_stiffness(cm);
    for (const Family& f : half_mode_family()) {
      const Vector u = sample_two_sided(cm, f.u);
      const double rhs = 0.25 * weighted_l2(cm.base, u, [](Point2 x) { return 1.0 / dot(x, x); });
      out.push_back({"hardy: " + f.name, K.quad(u), rhs});
    }
  }
  {
    const std::vector<CutSpec> cuts = crack_cuts(p, 4.0);
    const CrackedMesh cm = inequality_mesh(cuts, {{o, 0.5}, {p, 0.5}}, h);
    const SparseSymMatrix K = assemble_stiffness(cm);
    for (const Family& f : jump_family(a)) {
      const Vector u = sample_two_sided(cm, f.u);
      const double energy = K.quad(u);
      const double inner = weighted_l2(cm.base, u, [](Point2 x) { return dot(x, x) < 1.0 ? 1.0 : 0.0; });
      const double outer = weighted_l2(cm.base, u, [](Point2 x) { return dot(x, x) > 1.0 ? 1.0 / dot(x, x) : 0.0; });
      out.push_back({"poincare: " + f.name, energy, inner / 6.0});
      out.push_back({"exterior hardy: " + f.name, energy, 0.25 * outer});
    }
  }
  return out;
}

void write_crack_json(std::ostream& os, const CrackSolution& sol) {
  nlohmann::ordered_json j;
  j["alpha"] = sol.alpha;
  j["k"] = sol.k;
  j["R"] = sol.R;
  j["h"] = sol.h;
  j["half_plane"] = sol.half_plane;
  j["nodes"] = sol.w.size();
  j["dofs"] = sol.problem ? sol.problem->reduced.dim() : 0;
  j["J"] = sol.J;
  j["L_trunc"] = sol.L_trunc;
  j["omega1"] = sol.omega1;
  if (sol.half_plane) {
    j["m_direct"] = sol.m_direct;
    j["m_identity"] = sol.m_identity;
  }
  os << j.dump(2) << '\n';
}

void write_crack_field(std::ostream& os, const CrackSolution& sol) {
  write_abmesh(os, sol.problem->mesh);
  os << "W " << sol.w.size() << '\n';
  char buf[40];
  for (Eigen::Index i = 0; i < sol.w.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g\n", sol.w[i]);
    os << buf;
  }
}

}  // namespace abpole
