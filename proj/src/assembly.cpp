#include "abpole/assembly.hpp"

#include <algorithm>
#include <cstdio>
#include <map>
#include <numeric>
#include <ostream>

namespace abpole {

Vector SparseSymMatrix::apply(const Vector& x) const {
  return lower.selfadjointView<Eigen::Lower>() * x;
}

SparseMatrix SparseSymMatrix::full() const {
  SparseMatrix f = lower.selfadjointView<Eigen::Lower>();
  return f;
}

std::array<std::array<double, 3>, 3> local_stiffness(Point2 a, Point2 b, Point2 c) {
  const double area2 = cross(b - a, c - a);
  // Gradients of barycentric coordinates times area2.
  const Point2 g[3] = {{b.y - c.y, c.x - b.x}, {c.y - a.y, a.x - c.x}, {a.y - b.y, b.x - a.x}};
  std::array<std::array<double, 3>, 3> k{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) k[i][j] = dot(g[i], g[j]) / (2.0 * area2);
  return k;
}

std::array<std::array<double, 3>, 3> local_mass(Point2 a, Point2 b, Point2 c) {
  const double area = 0.5 * cross(b - a, c - a);
  std::array<std::array<double, 3>, 3> m{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m[i][j] = area / 12.0 * (i == j ? 2.0 : 1.0);
  return m;
}

namespace {

/// Lower-triangle pattern plus, for every stored entry, the ordered list of
/// (element, local slot) contributions.
struct AssemblyPlan {
  int n = 0;
  std::vector<int> outer;     // column starts
  std::vector<int> inner;     // row indices
  std::vector<int> src_start; // per nnz, into src
  std::vector<int> src;       // element * 9 + a * 3 + b

  explicit AssemblyPlan(const Mesh& mesh) {
    n = static_cast<int>(mesh.vertices.size());
    const int ne = static_cast<int>(mesh.triangles.size());
    struct Entry {
      int col, row, source;
    };
    std::vector<Entry> entries;
    entries.reserve(static_cast<std::size_t>(ne) * 6);
    for (int e = 0; e < ne; ++e) {
      const auto& t = mesh.triangles[e];
      for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
          if (t[a] >= t[b]) entries.push_back({t[b], t[a], e * 9 + a * 3 + b});
    }
    std::stable_sort(entries.begin(), entries.end(),
                     [](const Entry& l, const Entry& r) { return l.col != r.col ? l.col < r.col : l.row < r.row; });
    outer.assign(n + 1, 0);
    src.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      if (i == 0 || entries[i].col != entries[i - 1].col || entries[i].row != entries[i - 1].row) {
        inner.push_back(entries[i].row);
        src_start.push_back(static_cast<int>(src.size()));
        ++outer[entries[i].col + 1];
      }
      src.push_back(entries[i].source);
    }
    src_start.push_back(static_cast<int>(src.size()));
    std::partial_sum(outer.begin(), outer.end(), outer.begin());
  }

  [[nodiscard]] SparseSymMatrix gather(const std::vector<double>& local, Backend backend) const {
    const int nnz = static_cast<int>(inner.size());
    std::vector<double> values(nnz);
    auto body = [&](int k) {
      double s = 0.0;
      for (int q = src_start[k]; q < src_start[k + 1]; ++q) s += local[src[q]];
      values[k] = s;
    };
    if (backend == Backend::Parallel) {
#pragma omp parallel for schedule(static)
      for (int k = 0; k < nnz; ++k) body(k);
    } else {
      for (int k = 0; k < nnz; ++k) body(k);
    }
    SparseSymMatrix out;
    out.lower = Eigen::Map<const SparseMatrix>(n, n, nnz, outer.data(), inner.data(), values.data());
    out.lower.prune(0.0);
    return out;
  }
};

template <class Kernel>
std::vector<double> element_values(const Mesh& mesh, Kernel kernel, Backend backend) {
  const int ne = static_cast<int>(mesh.triangles.size());
  std::vector<double> local(static_cast<std::size_t>(ne) * 9);
  auto body = [&](int e) {
    const auto& t = mesh.triangles[e];
    const auto m = kernel(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) local[e * 9 + a * 3 + b] = m[a][b];
  };
  if (backend == Backend::Parallel) {
#pragma omp parallel for schedule(static)
    for (int e = 0; e < ne; ++e) body(e);
  } else {
    for (int e = 0; e < ne; ++e) body(e);
  }
  return local;
}

/// Reference path: triplets summed by Eigen in insertion order.
template <class Kernel>
SparseSymMatrix assemble_serial(const Mesh& mesh, Kernel kernel) {
  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(mesh.triangles.size() * 6);
  for (const auto& t : mesh.triangles) {
    const auto m = kernel(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        if (t[a] >= t[b]) trips.emplace_back(t[a], t[b], m[a][b]);
  }
  const int n = static_cast<int>(mesh.vertices.size());
  SparseSymMatrix out;
  out.lower.resize(n, n);
  out.lower.setFromTriplets(trips.begin(), trips.end());
  out.lower.prune(0.0);
  return out;
}

}  // namespace

SparseSymMatrix assemble_stiffness(const CrackedMesh& cm, Backend backend) {
  if (backend == Backend::Serial) return assemble_serial(cm.base, local_stiffness);
  AssemblyPlan plan(cm.base);
  return plan.gather(element_values(cm.base, local_stiffness, backend), backend);
}

SparseSymMatrix assemble_mass(const CrackedMesh& cm, Backend backend) {
  if (backend == Backend::Serial) return assemble_serial(cm.base, local_mass);
  AssemblyPlan plan(cm.base);
  return plan.gather(element_values(cm.base, local_mass, backend), backend);
}

StiffnessAndMass assemble_system(const CrackedMesh& cm, Backend backend) {
  if (backend == Backend::Serial)
    return {assemble_serial(cm.base, local_stiffness), assemble_serial(cm.base, local_mass)};
  AssemblyPlan plan(cm.base);
  return {plan.gather(element_values(cm.base, local_stiffness, backend), backend),
          plan.gather(element_values(cm.base, local_mass, backend), backend)};
}

Vector assemble_edge_load(const Mesh& mesh, std::span<const std::pair<int, int>> edges, const PowerDensity& d) {
  Vector load = Vector::Zero(static_cast<Eigen::Index>(mesh.vertices.size()));
  const double g1 = d.power + 1.0, g2 = d.power + 2.0;
  if (!(g1 > 0.0)) throw PreconditionError("edge load density must be integrable (power > -1)");
  for (auto [i, j] : edges) {
    double t0 = distance(mesh.vertices[i], d.origin), t1 = distance(mesh.vertices[j], d.origin);
    if (t0 > t1) std::swap(t0, t1), std::swap(i, j);
    const double len = t1 - t0;
    if (len <= 0.0) continue;
    const double dist_edge = distance(mesh.vertices[i], mesh.vertices[j]);
    if (std::abs(dist_edge - len) > 1e-9 * (1.0 + t1))
      throw PreconditionError("edge load: edge does not lie on a ray from the density origin");
    const double p1 = (std::pow(t1, g1) - std::pow(t0, g1)) / g1;  // int t^power
    const double p2 = (std::pow(t1, g2) - std::pow(t0, g2)) / g2;  // int t^(power+1)
    load[i] += d.coeff * (t1 * p1 - p2) / len;
    load[j] += d.coeff * (p2 - t0 * p1) / len;
  }
  return load;
}

Vector assemble_segment_load(const CrackedMesh& cm, int segment_id, const PowerDensity& density) {
  const CutSegment& s = cm.segment(segment_id);
  std::vector<std::pair<int, int>> edges;
  for (std::size_t i = 0; i + 1 < s.chain.size(); ++i) edges.emplace_back(s.chain[i], s.chain[i + 1]);
  return assemble_edge_load(cm.base, edges, density);
}

namespace {

struct NodeRule {
  bool cont = false, anti = false, inh = false;
  double g = 0.0;
};

}  // namespace

ReducedSystem reduce(const SparseSymMatrix& K, const SparseSymMatrix& M, const CrackedMesh& cm,
                     std::span<const JumpConstraint> constraints, std::span<const int> dirichlet) {
  const int n = static_cast<int>(cm.num_nodes());
  if (K.dim() != n || M.dim() != n) throw PreconditionError("reduce: matrix size does not match mesh");

  std::map<int, NodeRule> rules;  // keyed by Plus-side (or tip) node
  std::vector<int> seen_segments;
  for (const JumpConstraint& c : constraints) {
    if (std::find(seen_segments.begin(), seen_segments.end(), c.segment) != seen_segments.end())
      throw PreconditionError("conflicting constraints on cut segment " + std::to_string(c.segment));
    seen_segments.push_back(c.segment);
    const CutSegment& seg = cm.segment(c.segment);
    if (c.kind == JumpKind::InhomogeneousSum && !c.g) throw PreconditionError("inhomogeneous sum needs data g");
    for (int node : seg.chain) {
      NodeRule& r = rules[node];
      switch (c.kind) {
        case JumpKind::Continuous: r.cont = true; break;
        case JumpKind::Antiperiodic: r.anti = true; break;
        case JumpKind::InhomogeneousSum: {
          const double g = c.g(cm.base.vertices[node]);
          if (r.inh && std::abs(g - r.g) > 1e-12 * (1.0 + std::abs(g)))
            throw PreconditionError("inconsistent jump data at a shared node");
          r.inh = true;
          r.g = g;
          break;
        }
      }
    }
  }

  // Per full node: dof index (or -1 when fixed), sign and lifted value.
  std::vector<int> dof(n, -2);
  std::vector<double> sign(n, 1.0), lift(n, 0.0);
  for (int d : dirichlet) {
    if (d < 0 || d >= n) throw PreconditionError("Dirichlet node out of range");
    dof[d] = -1;
  }
  int next = 0;
  for (int v = 0; v < n; ++v) {
    if (dof[v] != -2) continue;
    const int tw = cm.twin[v];
    if (tw >= 0 && cm.side[v] == Side::Minus) continue;  // handled with its Plus twin
    auto it = rules.find(v);
    if (it == rules.end()) {
      dof[v] = next++;
      if (tw >= 0 && dof[tw] == -2) dof[tw] = next++;
      continue;
    }
    const NodeRule& r = it->second;
    if (r.anti && r.inh && std::abs(r.g) > 1e-12) throw PreconditionError("antiperiodic and inhomogeneous sum conflict");
    const bool inh = r.inh && !r.anti;
    const bool anti = r.anti;
    if (tw < 0) {  // crack tip: both traces coincide
      if (inh) {
        dof[v] = -1, lift[v] = 0.5 * r.g;
      } else if (anti) {
        dof[v] = -1;
      } else {
        dof[v] = next++;
      }
      continue;
    }
    if (dof[tw] == -1) {  // twin already pinned by Dirichlet data
      dof[v] = -1;
      continue;
    }
    if (r.cont && (anti || inh)) {
      dof[v] = dof[tw] = -1;
      lift[v] = lift[tw] = inh ? 0.5 * r.g : 0.0;
    } else if (r.cont) {
      dof[v] = dof[tw] = next++;
    } else if (anti) {
      dof[v] = dof[tw] = next++;
      sign[tw] = -1.0;
    } else if (inh) {
      dof[v] = dof[tw] = next++;
      sign[tw] = -1.0;
      lift[v] = lift[tw] = 0.5 * r.g;
    } else {
      dof[v] = next++;
      dof[tw] = next++;
    }
  }

  for (int v = 0; v < n; ++v)
    if (dof[v] == -2) dof[v] = rules.count(cm.twin[v]) ? -1 : next++;  // Minus twin of a Dirichlet node

  ReducedSystem rs;
  rs.lift = Vector::Zero(n);
  std::vector<Eigen::Triplet<double>> trips;
  for (int v = 0; v < n; ++v) {
    rs.lift[v] = lift[v];
    if (dof[v] >= 0) trips.emplace_back(v, dof[v], sign[v]);
  }
  rs.P.resize(n, next);
  rs.P.setFromTriplets(trips.begin(), trips.end());

  const SparseMatrix Kf = K.full(), Mf = M.full();
  const SparseMatrix Pt = rs.P.transpose();
  const SparseMatrix Kr = Pt * Kf * rs.P;
  const SparseMatrix Mr = Pt * Mf * rs.P;
  rs.K.lower = Kr.triangularView<Eigen::Lower>();
  rs.M.lower = Mr.triangularView<Eigen::Lower>();
  rs.K.lower.prune(0.0);
  rs.M.lower.prune(0.0);
  rs.f = -(Pt * (Kf * rs.lift));
  return rs;
}

std::vector<int> dirichlet_nodes(const CrackedMesh& cm, std::span<const int> parts) {
  std::vector<int> out;
  for (const TaggedEdge& e : cm.base.tagged_edges) {
    if (e.tag.kind != EdgeKind::Outer) continue;
    if (!parts.empty() && std::find(parts.begin(), parts.end(), e.tag.id) == parts.end()) continue;
    out.push_back(e.a);
    out.push_back(e.b);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double dirichlet_energy(const Mesh& mesh, const Vector& u) {
  double e = 0.0;
  for (const auto& t : mesh.triangles) {
    const auto k = local_stiffness(mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]);
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b) e += u[t[a]] * k[a][b] * u[t[b]];
  }
  return e;
}

void write_matrix(std::ostream& os, const SparseSymMatrix& A) {
  std::vector<std::tuple<int, int, double>> entries;
  for (int c = 0; c < A.lower.outerSize(); ++c)
    for (SparseMatrix::InnerIterator it(A.lower, c); it; ++it)
      entries.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
  std::sort(entries.begin(), entries.end(),
            [](const auto& l, const auto& r) { return std::tie(std::get<0>(l), std::get<1>(l)) < std::tie(std::get<0>(r), std::get<1>(r)); });
  char buf[64];
  for (const auto& [i, j, v] : entries) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << i << ' ' << j << ' ' << buf << '\n';
  }
}

}  // namespace abpole
