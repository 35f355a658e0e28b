#pragma once

// Small dense-vector helpers. Ambient dimensions here are tiny (2..8), so
// plain std::vector<double> with span views is enough.

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace furstenberg {

using Vec = std::vector<double>;
using ConstVecView = std::span<const double>;

/// Hard ceiling on ambient dimension; counting keys are fixed-width arrays.
inline constexpr int kMaxDim = 8;

inline double dot(ConstVecView a, ConstVecView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(ConstVecView a) { return std::sqrt(dot(a, a)); }

inline double distance(ConstVecView a, ConstVecView b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    s += diff * diff;
  }
  return std::sqrt(s);
}

inline Vec axpy(double alpha, ConstVecView x, ConstVecView y) {
  Vec out(y.begin(), y.end());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] += alpha * x[i];
  return out;
}

inline Vec scaled(double alpha, ConstVecView x) {
  Vec out(x.begin(), x.end());
  for (double& v : out) v *= alpha;
  return out;
}

/// x minus its component along the unit vector u.
inline Vec reject(ConstVecView x, ConstVecView unit) { return axpy(-dot(x, unit), unit, x); }

inline Vec basis_vector(int d, int i) {
  Vec e(static_cast<std::size_t>(d), 0.0);
  e[static_cast<std::size_t>(i)] = 1.0;
  return e;
}

/// Orthonormal basis of the orthogonal complement of a unit vector.
/// Gram-Schmidt over e_0..e_{d-1}, skipping the basis vector most aligned
/// with `unit` (lowest index on ties). Deterministic for a given input.
std::vector<Vec> complement_frame(ConstVecView unit);

}  // namespace furstenberg
