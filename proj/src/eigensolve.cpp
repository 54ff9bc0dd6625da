#include "abpole/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCholesky>

namespace abpole {

Vector UniformStream::vector(Eigen::Index n) {
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = next();
  return v;
}

namespace {

using Factor = Eigen::SimplicialLDLT<SparseMatrix, Eigen::Lower, Eigen::AMDOrdering<int>>;

void factorize(Factor& f, const SparseSymMatrix& K) {
  f.compute(K.lower);
  if (f.info() != Eigen::Success) throw NumericalError("LDLT factorization failed");
  const Vector d = f.vectorD();
  const double scale = d.cwiseAbs().maxCoeff();
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    if (!(d[i] > 1e-14 * scale)) {
      const int original = f.permutationPinv().indices()[i];
      throw NumericalError("LDLT breakdown: non-positive pivot " + std::to_string(i) + " (matrix row " +
                           std::to_string(original) + ")");
    }
  }
}

class Lanczos {
public:
  Lanczos(const SparseSymMatrix& K, const SparseSymMatrix& M, const Factor& f, const EigenOptions& opt)
      : K_(K), M_(M), f_(f), opt_(opt) {}

  /// One run in the M-orthogonal complement of `locked`; returns the `count`
  /// largest Ritz values of the inverse operator as eigenpairs.
  std::vector<EigenPair> run(const std::vector<EigenPair>& locked, int count, UniformStream& rng) const {
    const Eigen::Index n = K_.dim();
    const int room = static_cast<int>(n - static_cast<Eigen::Index>(locked.size()));
    if (room <= 0) return {};
    count = std::min(count, room);
    const int cap = std::min(room, 50 * count + 20);

    std::vector<Vector> Q, MQ;
    std::vector<double> alpha, beta;
    Vector q = fresh_start(locked, Q, MQ, rng);

    for (int j = 0; j < cap; ++j) {
      const Vector Mq = M_.apply(q);
      Q.push_back(q);
      MQ.push_back(Mq);
      Vector w = f_.solve(Mq);
      const double a = w.dot(Mq);
      alpha.push_back(a);
      w -= a * q;
      if (j > 0) w -= beta.back() * Q[j - 1];
      orthogonalize(w, locked, Q, MQ);
      double b = std::sqrt(std::max(0.0, w.dot(M_.apply(w))));
      const bool breakdown = b <= 1e-12 * std::abs(a);
      const int m = j + 1;
      if (m >= count && (breakdown || m % 4 == 0 || m == cap)) {
        auto pairs = ritz(Q, alpha, beta, breakdown ? 0.0 : b, count);
        if (!pairs.empty()) return pairs;
      }
      if (m == cap) break;
      if (breakdown) {
        q = fresh_start(locked, Q, MQ, rng);
        b = 0.0;
      } else {
        q = w / b;
      }
      beta.push_back(b);
    }
    throw NumericalError("Lanczos iteration did not converge within " + std::to_string(cap) + " steps");
  }

private:
  Vector fresh_start(const std::vector<EigenPair>& locked, const std::vector<Vector>& Q,
                     const std::vector<Vector>& MQ, UniformStream& rng) const {
    for (int attempt = 0; attempt < 8; ++attempt) {
      Vector v = rng.vector(K_.dim());
      orthogonalize(v, locked, Q, MQ);
      const double nv = std::sqrt(v.dot(M_.apply(v)));
      if (nv > 1e-8) return v / nv;
    }
    throw NumericalError("Lanczos: unable to build a start vector in the complement");
  }

  void orthogonalize(Vector& w, const std::vector<EigenPair>& locked, const std::vector<Vector>& Q,
                     const std::vector<Vector>& MQ) const {
    for (int sweep = 0; sweep < 2; ++sweep) {
      if (!locked.empty()) {
        const Vector Mw = M_.apply(w);
        for (const EigenPair& p : locked) w -= p.vector.dot(Mw) * p.vector;
      }
      for (std::size_t i = 0; i < Q.size(); ++i) w -= MQ[i].dot(w) * Q[i];
    }
  }

  std::vector<EigenPair> ritz(const std::vector<Vector>& Q, const std::vector<double>& alpha,
                              const std::vector<double>& beta, double b_last, int count) const {
    const int m = static_cast<int>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      T(i, i) = alpha[i];
      if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta[i];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
    // Largest theta first: these map to the smallest lambda = 1/theta.
    for (int r = 0; r < count; ++r) {
      const int c = m - 1 - r;
      const double theta = es.eigenvalues()[c];
      if (!(theta > 0.0)) return {};
      if (std::abs(b_last * es.eigenvectors()(m - 1, c)) > 1e-11 * theta) return {};
    }
    std::vector<EigenPair> out;
    for (int r = 0; r < count; ++r) {
      const int c = m - 1 - r;
      Vector x = Vector::Zero(K_.dim());
      for (int i = 0; i < m; ++i) x += es.eigenvectors()(i, c) * Q[i];
      const Vector Mx = M_.apply(x);
      x /= std::sqrt(x.dot(Mx));
      EigenPair p;
      p.vector = std::move(x);
      p.value = p.vector.dot(K_.apply(p.vector));  // Rayleigh quotient, |x|_M = 1
      p.residual = (K_.apply(p.vector) - p.value * M_.apply(p.vector)).norm();
      if (p.residual > opt_.tol) return {};
      out.push_back(std::move(p));
    }
    return out;
  }

  const SparseSymMatrix& K_;
  const SparseSymMatrix& M_;
  const Factor& f_;
  const EigenOptions& opt_;
};

}  // namespace

std::vector<EigenPair> smallest_eigenpairs(const SparseSymMatrix& K, const SparseSymMatrix& M, int count,
                                           const EigenOptions& opt) {
  if (count <= 0) throw PreconditionError("eigenpair count must be positive");
  if (K.dim() != M.dim()) throw PreconditionError("K and M differ in size");
  if (count > K.dim()) throw PreconditionError("eigenpair count exceeds the dimension");
  Factor f;
  factorize(f, K);
  Lanczos lanczos(K, M, f, opt);
  UniformStream rng(opt.seed);

  std::vector<EigenPair> found;
  for (int pass = 0; pass <= count + 1; ++pass) {
    auto fresh = lanczos.run(found, count, rng);
    if (fresh.empty()) break;
    const bool improves = static_cast<int>(found.size()) < count ||
                          fresh.front().value < found[count - 1].value * (1.0 - 1e-10);
    if (!improves) break;
    for (auto& p : fresh) found.push_back(std::move(p));
    std::stable_sort(found.begin(), found.end(),
                     [](const EigenPair& l, const EigenPair& r) { return l.value < r.value; });
  }
  found.resize(std::min<std::size_t>(found.size(), count));
  for (int i = 0; i < static_cast<int>(found.size()); ++i) found[i].index = i;
  return found;
}

bool detect_simplicity(std::span<const EigenPair> pairs, int n0, double gap_tol) {
  if (n0 < 1 || n0 >= static_cast<int>(pairs.size()))
    throw PreconditionError("simplicity check needs the eigenvalues n0-1..n0+1");
  const double lam = pairs[n0 - 1].value;
  const double above = (pairs[n0].value - lam) / std::abs(lam);
  const double below = n0 >= 2 ? (lam - pairs[n0 - 2].value) / std::abs(lam) : INFINITY;
  return above > gap_tol && below > gap_tol;
}

}  // namespace abpole
