#include "abpole/abo.hpp"

#include <cmath>

namespace abpole {

double AngleChart::theta(Point2 x) const {
  if (x == anchor) throw PreconditionError("angle is undefined at the chart anchor");
  return wrap_angle(std::atan2(x.y - anchor.y, x.x - anchor.x), alpha);
}

std::complex<double> AngleChart::half_phase(Point2 x) const {
  return std::polar(1.0, 0.5 * theta(x));
}

namespace {

Point2 ray_exit(const DiskDomain& d, Point2 from, double alpha) {
  const Point2 dir = polar(1.0, alpha);
  const Point2 o = from - d.center;
  const double b = dot(o, dir);
  const double c = dot(o, o) - d.radius * d.radius;
  const double t = -b + std::sqrt(b * b - c);
  return from + t * dir;
}

}  // namespace

std::shared_ptr<const AbSetup> make_ab_setup(const AbMeshConfig& cfg, Point2 anchor, Point2 pole, double alpha) {
  const DiskDomain& dom = cfg.domain;
  if (!(dom.distance_to_boundary(anchor) > 1e-9 * dom.radius))
    throw PreconditionError("anchor must lie inside the domain");
  if (!(dom.distance_to_boundary(pole) > 1e-9 * dom.radius))
    throw PreconditionError("pole must lie inside the domain");
  const double offset = distance(pole, anchor);
  const Point2 dir = polar(1.0, alpha);
  if (offset > 0.0 &&
      (std::abs(cross(pole - anchor, dir)) > 1e-9 * offset || dot(pole - anchor, dir) <= 0.0))
    throw PreconditionError("pole must lie on the cut ray from the anchor");

  auto setup = std::make_shared<AbSetup>();
  setup->config = cfg;
  setup->chart = {anchor, alpha};
  setup->pole = pole;

  const Point2 exit = ray_exit(dom, anchor, alpha);
  CutSpec cut;
  std::vector<GradingPoint> grading{{anchor, cfg.grading_exponent}};
  if (offset > 0.0) {
    cut.polyline = {anchor, pole, exit};
    cut.segment_ids = {kSegmentAnchorPole, kSegmentPoleBoundary};
    grading.push_back({pole, cfg.grading_exponent});
  } else {
    cut.polyline = {anchor, exit};
    cut.segment_ids = {kSegmentPoleBoundary};
  }
  const Mesh mesh = generate_disk_mesh(dom.center, dom.radius, cfg.h, grading, std::span(&cut, 1));
  setup->mesh = cut_mesh(mesh, std::span(&cut, 1));
  auto sys = assemble_system(setup->mesh);
  setup->K = std::move(sys.K);
  setup->M = std::move(sys.M);
  setup->dirichlet = dirichlet_nodes(setup->mesh);
  return setup;
}

AbEigenResult solve_ab(std::shared_ptr<const AbSetup> setup, PoleChoice choice, int n0, const SolveOptions& opt) {
  if (n0 < 1) throw PreconditionError("n0 must be at least 1");
  const bool split = setup->pole != setup->chart.anchor;
  std::vector<JumpConstraint> constraints{{kSegmentPoleBoundary, JumpKind::Antiperiodic, {}}};
  if (split)
    constraints.push_back(
        {kSegmentAnchorPole, choice == PoleChoice::Pole ? JumpKind::Continuous : JumpKind::Antiperiodic, {}});
  auto system = std::make_shared<const ReducedSystem>(
      reduce(setup->K, setup->M, setup->mesh, constraints, setup->dirichlet));

  AbEigenResult r;
  r.setup = setup;
  r.system = system;
  r.choice = choice;
  r.pole = choice == PoleChoice::Pole ? setup->pole : setup->chart.anchor;
  r.alpha = setup->chart.alpha;
  r.n0 = n0;
  r.pairs = smallest_eigenpairs(*system, n0 + 1, opt.eigen);
  r.simple = detect_simplicity(r.pairs, n0, opt.gap_tol);
  EigenPair& p = r.pairs[n0 - 1];
  r.lambda = p.value;
  r.u = system->expand(p.vector);
  const double scale = r.u.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < r.u.size(); ++i) {
    if (std::abs(r.u[i]) > 1e-8 * scale) {
      if (r.u[i] < 0.0) {
        r.u = -r.u;
        p.vector = -p.vector;
      }
      break;
    }
  }
  r.normalized = choice == PoleChoice::Anchor;
  return r;
}

AbEigenResult solve_ab(const AbMeshConfig& cfg, Point2 anchor, Point2 pole, double alpha, int n0,
                       const SolveOptions& opt) {
  return solve_ab(make_ab_setup(cfg, anchor, pole, alpha), PoleChoice::Pole, n0, opt);
}

AbEigenResult normalize_pair(const AbEigenResult& result_a, const AbEigenResult& result_0) {
  if (result_a.setup != result_0.setup) throw PreconditionError("normalize_pair: results live on different meshes");
  const double ip = result_a.u.dot(result_a.setup->M.apply(result_0.u));
  if (std::abs(ip) <= 1e-10) throw NumericalError("normalize_pair: phase condition degenerate (inner product ~ 0)");
  AbEigenResult out = result_a;
  if (ip < 0.0) {
    out.u = -out.u;
    out.pairs[out.n0 - 1].vector = -out.pairs[out.n0 - 1].vector;
  }
  out.normalized = true;
  return out;
}

double energy_discrepancy(const AbEigenResult& result_a, const AbEigenResult& result_0) {
  if (result_a.setup != result_0.setup) throw PreconditionError("energy_discrepancy: results live on different meshes");
  if (!result_a.normalized || !result_0.normalized)
    throw PreconditionError("energy_discrepancy: inputs must be sign-normalized");
  return dirichlet_energy(result_a.setup->mesh.base, result_a.u - result_0.u);
}

double weak_residual(const AbEigenResult& r, std::uint64_t seed, int samples) {
  const AbSetup& s = *r.setup;
  const Vector res = s.K.apply(r.u) - r.lambda * s.M.apply(r.u);
  UniformStream rng(seed);
  double worst = 0.0;
  for (int i = 0; i < samples; ++i) {
    const Vector v = r.system->P * rng.vector(r.system->dim());
    const double norm_v = std::sqrt(s.K.quad(v) + s.M.quad(v));
    worst = std::max(worst, std::abs(v.dot(res)) / norm_v);
  }
  return worst;
}

}  // namespace abpole
