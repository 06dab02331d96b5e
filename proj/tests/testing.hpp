// Shared generators and comparisons for the unit tests.

#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "spdwave/linalg.hpp"
#include "spdwave/rng.hpp"
#include "spdwave/spd_core.hpp"

namespace spdwave::testing {

inline double frob_diff(const SymMat& a, const SymMat& b) { return frobenius_norm(a - b); }
inline double frob_diff(const SpdMat& a, const SpdMat& b) { return frobenius_norm(a.sym() - b.sym()); }

inline SymMat sym2(double a11, double a12, double a22) {
  const double u[] = {a11, a12, a22};
  return SymMat::from_upper(2, u);
}

inline SymMat diag(std::initializer_list<double> d) {
  std::vector<double> v(d);
  return SymMat::diagonal(v);
}

inline SpdMat spd_diag(std::initializer_list<double> d) { return SpdMat(diag(d)); }

/// Symmetric matrix with entries uniform in [-r, r].
inline SymMat random_sym(RngStream& rng, std::size_t d, double r) {
  SymMat a(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) a.at(i, j) = r * (2.0 * rng.uniform() - 1.0);
  return a;
}

/// exp of a random symmetric log with entries in [-r, r].
inline SpdMat random_spd(RngStream& rng, std::size_t d, double r = 2.0) {
  return mat_exp(random_sym(rng, d, r));
}

inline std::vector<SpdMat> random_spd_sequence(RngStream& rng, std::size_t n, std::size_t d,
                                               double r = 2.0) {
  std::vector<SpdMat> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_spd(rng, d, r));
  return out;
}

/// Haar-like random orthogonal matrix by Gram-Schmidt on Gaussian columns.
inline Matrix random_orthogonal(RngStream& rng, std::size_t d) {
  Matrix q(d, d);
  for (std::size_t c = 0; c < d; ++c) {
    std::vector<double> v(d);
    for (auto& x : v) x = rng.normal();
    for (std::size_t p = 0; p < c; ++p) {
      double s = 0.0;
      for (std::size_t r = 0; r < d; ++r) s += v[r] * q(r, p);
      for (std::size_t r = 0; r < d; ++r) v[r] -= s * q(r, p);
    }
    double n = 0.0;
    for (double x : v) n += x * x;
    n = std::sqrt(n);
    for (std::size_t r = 0; r < d; ++r) q(r, c) = v[r] / n;
  }
  return q;
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace spdwave::testing
