// Copyright 2026 The spdwave Authors.
// SPDX-License-Identifier: Apache-2.0

// Log-Euclidean geometry on symmetric positive-definite matrices.
//
// Every manifold operation here reduces to linear algebra on matrix
// logarithms: log is a global isometry from Sym+(d) with the log-Euclidean
// metric onto Sym(d) with the Frobenius inner product.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spdwave/errors.hpp"
#include "spdwave/linalg.hpp"

namespace spdwave {

/// Number of free entries of a d x d symmetric matrix.
constexpr std::size_t tri_size(std::size_t d) noexcept { return d * (d + 1) / 2; }

/// Inverts tri_size; returns nullopt when q is not a triangular number.
inline std::optional<std::size_t> tri_root(std::size_t q) noexcept {
  std::size_t d = 0;
  while (tri_size(d) < q) ++d;
  if (tri_size(d) != q) return std::nullopt;
  return d;
}

/// Real symmetric d x d matrix stored as its row-major upper triangle.
/// Symmetry holds by construction; entries are always finite.
class SymMat {
 public:
  SymMat() = default;
  explicit SymMat(std::size_t dim) : dim_(dim), upper_(tri_size(dim), 0.0) {}

  static SymMat from_upper(std::size_t dim, std::span<const double> upper) {
    if (upper.size() != tri_size(dim))
      throw DimensionMismatch("SymMat::from_upper: expected " + std::to_string(tri_size(dim)) +
                              " entries, got " + std::to_string(upper.size()));
    SymMat s(dim);
    std::copy(upper.begin(), upper.end(), s.upper_.begin());
    s.require_finite();
    return s;
  }

  /// Row-major dense input; must be exactly symmetric.
  static SymMat from_dense(std::size_t dim, std::span<const double> dense) {
    if (dense.size() != dim * dim)
      throw DimensionMismatch("SymMat::from_dense: expected d*d entries");
    SymMat s(dim);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) {
        if (dense[i * dim + j] != dense[j * dim + i])
          throw InvalidArgument("SymMat::from_dense: input is not symmetric");
        s.at(i, j) = dense[i * dim + j];
      }
    s.require_finite();
    return s;
  }

  static SymMat identity(std::size_t dim) {
    SymMat s(dim);
    for (std::size_t i = 0; i < dim; ++i) s.at(i, i) = 1.0;
    return s;
  }

  static SymMat diagonal(std::span<const double> diag) {
    SymMat s(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) s.at(i, i) = diag[i];
    s.require_finite();
    return s;
  }

  std::size_t dim() const noexcept { return dim_; }

  double operator()(std::size_t i, std::size_t j) const {
    return i <= j ? upper_[index(i, j)] : upper_[index(j, i)];
  }

  /// Writable access to the upper-triangle slot for (i, j), i <= j.
  double& at(std::size_t i, std::size_t j) {
    return i <= j ? upper_[index(i, j)] : upper_[index(j, i)];
  }

  std::span<const double> upper() const noexcept { return upper_; }

  Matrix dense() const {
    Matrix m(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  double trace() const {
    double t = 0.0;
    for (std::size_t i = 0; i < dim_; ++i) t += (*this)(i, i);
    return t;
  }

  SymMat& operator+=(const SymMat& o) {
    check_same(o);
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] += o.upper_[i];
    return *this;
  }
  SymMat& operator-=(const SymMat& o) {
    check_same(o);
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] -= o.upper_[i];
    return *this;
  }
  SymMat& operator*=(double s) {
    for (double& v : upper_) v *= s;
    return *this;
  }
  /// this += a * x
  SymMat& axpy(double a, const SymMat& x) {
    check_same(x);
    for (std::size_t i = 0; i < upper_.size(); ++i) upper_[i] += a * x.upper_[i];
    return *this;
  }

  friend SymMat operator+(SymMat a, const SymMat& b) { return a += b; }
  friend SymMat operator-(SymMat a, const SymMat& b) { return a -= b; }
  friend SymMat operator*(double s, SymMat a) { return a *= s; }
  friend SymMat operator*(SymMat a, double s) { return a *= s; }

  bool all_finite() const {
    return std::all_of(upper_.begin(), upper_.end(), [](double v) { return std::isfinite(v); });
  }

  bool operator==(const SymMat&) const = default;

 private:
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    return i * dim_ - i * (i + 1) / 2 + j;
  }
  void check_same(const SymMat& o) const {
    if (o.dim_ != dim_) throw DimensionMismatch("SymMat: dimension mismatch");
  }
  void require_finite() const {
    if (!all_finite()) throw InvalidArgument("SymMat: entries must be finite");
  }

  std::size_t dim_ = 0;
  std::vector<double> upper_;
};

inline double frobenius_inner(const SymMat& a, const SymMat& b) {
  if (a.dim() != b.dim()) throw DimensionMismatch("frobenius_inner: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    s += a(i, i) * b(i, i);
    for (std::size_t j = i + 1; j < a.dim(); ++j) s += 2.0 * a(i, j) * b(i, j);
  }
  return s;
}

inline double frobenius_norm(const SymMat& a) { return std::sqrt(frobenius_inner(a, a)); }

struct SymEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column i pairs with values[i]
};

namespace detail {

inline std::vector<double> dense_copy(const SymMat& s) {
  const auto m = s.dense();
  return {m.values().begin(), m.values().end()};
}

}  // namespace detail

inline constexpr int kJacobiMaxSweeps = 100;

/// Cyclic Jacobi eigendecomposition. Sweeps until the off-diagonal Frobenius
/// norm is at most 1e-14 * ||S||_F; throws NumericalFailure after 100 sweeps.
inline SymEigen sym_eigen(const SymMat& s) {
  const std::size_t d = s.dim();
  Matrix a = s.dense();
  Matrix v = Matrix::identity(d);
  const double tol = 1e-14 * frobenius_norm(s);

  auto off_norm = [&] {
    double o = 0.0;
    for (std::size_t p = 0; p < d; ++p)
      for (std::size_t q = p + 1; q < d; ++q) o += 2.0 * a(p, q) * a(p, q);
    return std::sqrt(o);
  };

  int sweep = 0;
  while (off_norm() > tol) {
    if (++sweep > kJacobiMaxSweeps)
      throw NumericalFailure("sym_eigen: Jacobi iteration did not converge", detail::dense_copy(s));
    for (std::size_t p = 0; p + 1 < d; ++p) {
      for (std::size_t q = p + 1; q < d; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;
        for (std::size_t k = 0; k < d; ++k) {
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = c * akp - sn * akq;
          a(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < d; ++k) {
          const double apk = a(p, k);
          const double aqk = a(q, k);
          a(p, k) = c * apk - sn * aqk;
          a(q, k) = sn * apk + c * aqk;
        }
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - sn * vkq;
          v(k, q) = sn * vkp + c * vkq;
        }
      }
    }
  }

  std::vector<std::size_t> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) > a(j, j); });
  SymEigen out{std::vector<double>(d), Matrix(d, d)};
  for (std::size_t c = 0; c < d; ++c) {
    out.values[c] = a(order[c], order[c]);
    for (std::size_t r = 0; r < d; ++r) out.vectors(r, c) = v(r, order[c]);
  }
  return out;
}

/// Q diag(f(lambda)) Q^T, assembled on the upper triangle only.
template <class F>
SymMat spectral_map(const SymEigen& e, F&& f) {
  const std::size_t d = e.values.size();
  std::vector<double> fl(d);
  for (std::size_t k = 0; k < d; ++k) fl[k] = f(e.values[k]);
  SymMat out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += e.vectors(i, k) * fl[k] * e.vectors(j, k);
      out.at(i, j) = s;
    }
  return out;
}

/// Symmetric matrix with strictly positive spectrum (no tolerance).
class SpdMat {
 public:
  explicit SpdMat(SymMat s) : s_(std::move(s)) {
    if (s_.dim() == 0) throw InvalidArgument("SpdMat: dimension must be positive");
    const auto e = sym_eigen(s_);
    if (!(e.values.back() > 0.0))
      throw NotPositiveDefinite("SpdMat: smallest eigenvalue " + std::to_string(e.values.back()) +
                                " is not positive");
  }

  static SpdMat identity(std::size_t d) { return SpdMat(SymMat::identity(d), Trusted{}); }

  std::size_t dim() const noexcept { return s_.dim(); }
  double operator()(std::size_t i, std::size_t j) const { return s_(i, j); }
  const SymMat& sym() const noexcept { return s_; }

  bool operator==(const SpdMat&) const = default;

 private:
  struct Trusted {};
  SpdMat(SymMat s, Trusted) : s_(std::move(s)) {}

  friend SpdMat mat_exp(const SymMat& a);

  SymMat s_;
};

/// Principal matrix logarithm.
inline SymMat mat_log(const SpdMat& s) {
  const auto e = sym_eigen(s.sym());
  if (!(e.values.back() > 0.0)) throw NotPositiveDefinite("mat_log: eigenvalue <= 0");
  return spectral_map(e, [](double l) { return std::log(l); });
}

/// Logarithm of a symmetric matrix if it is positive definite; nullopt
/// otherwise. Used where non-SPD candidates are expected (rejection sampling).
inline std::optional<SymMat> log_if_spd(const SymMat& s) {
  const auto e = sym_eigen(s);
  if (!(e.values.back() > 0.0)) return std::nullopt;
  return spectral_map(e, [](double l) { return std::log(l); });
}

inline SpdMat mat_exp(const SymMat& a) {
  const auto e = sym_eigen(a);
  for (double l : e.values) {
    const double x = std::exp(l);
    if (!std::isfinite(x) || !(x > 0.0))
      throw OverflowError("mat_exp: eigenvalue " + std::to_string(l) +
                          " outside the representable exp range");
  }
  return SpdMat(spectral_map(e, [](double l) { return std::exp(l); }), SpdMat::Trusted{});
}

inline double determinant(const SymMat& s) {
  const auto e = sym_eigen(s);
  double p = 1.0;
  for (double l : e.values) p *= l;
  return p;
}

inline double le_distance(const SpdMat& s1, const SpdMat& s2) {
  if (s1.dim() != s2.dim()) throw DimensionMismatch("le_distance: dimension mismatch");
  return frobenius_norm(mat_log(s2) - mat_log(s1));
}

/// sum_i w_i A_i over log-domain values.
inline SymMat weighted_sum(std::span<const SymMat> values, std::span<const double> weights) {
  if (values.empty()) throw InvalidArgument("weighted_sum: empty input");
  if (values.size() != weights.size())
    throw DimensionMismatch("weighted_sum: value and weight counts differ");
  SymMat acc(values.front().dim());
  for (std::size_t i = 0; i < values.size(); ++i) acc.axpy(weights[i], values[i]);
  return acc;
}

/// Weighted Frechet mean under the log-Euclidean metric, exp(sum w_i log S_i).
/// Negative weights are allowed; the weights must sum to one within 1e-12.
inline SpdMat weighted_ave(std::span<const SpdMat> matrices, std::span<const double> weights) {
  if (matrices.empty()) throw InvalidArgument("weighted_ave: empty input");
  if (matrices.size() != weights.size())
    throw DimensionMismatch("weighted_ave: matrix and weight counts differ");
  double total = 0.0;
  for (double w : weights) {
    if (!std::isfinite(w)) throw InvalidArgument("weighted_ave: non-finite weight");
    total += w;
  }
  if (std::abs(total - 1.0) >= 1e-12)
    throw InvalidArgument("weighted_ave: weights sum to " + std::to_string(total) + ", not 1");
  const std::size_t d = matrices.front().dim();
  SymMat acc(d);
  for (std::size_t i = 0; i < matrices.size(); ++i) {
    if (matrices[i].dim() != d) throw DimensionMismatch("weighted_ave: dimension mismatch");
    acc.axpy(weights[i], mat_log(matrices[i]));
  }
  return mat_exp(acc);
}

/// Log-Euclidean geodesic through S1 (t = 0) and S2 (t = 1); any real t.
inline SpdMat geodesic(double t, const SpdMat& s1, const SpdMat& s2) {
  if (s1.dim() != s2.dim()) throw DimensionMismatch("geodesic: dimension mismatch");
  const SpdMat pair[2] = {s1, s2};
  const double w[2] = {1.0 - t, t};
  return weighted_ave(pair, w);
}

/// Isometric coordinates of Sym(d): diagonal first, then the row-wise upper
/// off-diagonal entries scaled by sqrt(2).
struct EtaVec {
  std::vector<double> values;

  std::size_t q() const noexcept { return values.size(); }
};

inline EtaVec eta_vec(const SymMat& a) {
  const std::size_t d = a.dim();
  EtaVec x{std::vector<double>(tri_size(d))};
  std::size_t pos = 0;
  for (std::size_t i = 0; i < d; ++i) x.values[pos++] = a(i, i);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i + 1; j < d; ++j) x.values[pos++] = std::sqrt(2.0) * a(i, j);
  return x;
}

inline SymMat eta_inv(std::span<const double> x) {
  const auto d = tri_root(x.size());
  if (!d) throw DimensionMismatch("eta_inv: length " + std::to_string(x.size()) +
                                  " is not of the form d(d+1)/2");
  SymMat a(*d);
  std::size_t pos = 0;
  for (std::size_t i = 0; i < *d; ++i) a.at(i, i) = x[pos++];
  for (std::size_t i = 0; i < *d; ++i)
    for (std::size_t j = i + 1; j < *d; ++j) a.at(i, j) = x[pos++] / std::sqrt(2.0);
  if (!a.all_finite()) throw InvalidArgument("eta_inv: entries must be finite");
  return a;
}

inline SymMat eta_inv(const EtaVec& x) { return eta_inv(std::span<const double>(x.values)); }

/// O S O^T for a square (typically orthogonal) O.
inline SymMat congruence(const Matrix& o, const SymMat& s) {
  const std::size_t d = s.dim();
  if (o.rows() != d || o.cols() != d) throw DimensionMismatch("congruence: shape mismatch");
  const Matrix os = o * s.dense();
  SymMat out(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) {
      double v = 0.0;
      for (std::size_t k = 0; k < d; ++k) v += os(i, k) * o(j, k);
      out.at(i, j) = v;
    }
  return out;
}

inline SpdMat congruence(const Matrix& o, const SpdMat& s) {
  return SpdMat(congruence(o, s.sym()));
}

}  // namespace spdwave
