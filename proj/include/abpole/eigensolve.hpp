#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "abpole/assembly.hpp"

namespace abpole {

struct EigenPair {
  double value = 0.0;
  Vector vector;          ///< reduced coefficients, M-normalized
  double residual = 0.0;  ///< |K x - lambda M x| / |x|_M
  int index = 0;          ///< 0-based position in the sorted spectrum
};

struct EigenOptions {
  double tol = 1e-9;
  std::uint64_t seed = 0x5eed;
};

/// Lowest eigenpairs of K x = lambda M x by shift-invert Lanczos (shift 0)
/// with full reorthogonalization. Repeated eigenvalues are captured by
/// restarting in the M-orthogonal complement of the converged vectors.
std::vector<EigenPair> smallest_eigenpairs(const SparseSymMatrix& K, const SparseSymMatrix& M, int count,
                                           const EigenOptions& opt = {});

inline std::vector<EigenPair> smallest_eigenpairs(const ReducedSystem& sys, int count, const EigenOptions& opt = {}) {
  return smallest_eigenpairs(sys.K, sys.M, count, opt);
}

/// True iff the n0-th eigenvalue (1-based) is separated from its neighbours
/// by a relative gap above gap_tol on both sides.
bool detect_simplicity(std::span<const EigenPair> pairs, int n0, double gap_tol);

/// Uniform doubles in [-1, 1) built directly from mt19937_64 bits, so the
/// sequence does not depend on the standard library's distributions.
class UniformStream {
public:
  explicit UniformStream(std::uint64_t seed) : engine_(seed) {}
  double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-52 - 1.0; }
  Vector vector(Eigen::Index n);

private:
  std::mt19937_64 engine_;
};

}  // namespace abpole
