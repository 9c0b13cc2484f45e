#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "noisynn/error.hpp"
#include "noisynn/rng.hpp"

namespace noisynn::linalg {

/// Dense square matrix, row-major. Only used for small n x n problems
/// (Gram, geodesic and kernel matrices).
struct SquareMatrix {
  std::size_t n = 0;
  std::vector<double> a;

  SquareMatrix() = default;
  explicit SquareMatrix(std::size_t size, double fill = 0.0) : n(size), a(size * size, fill) {}

  double& operator()(std::size_t i, std::size_t j) noexcept { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return a[i * n + j]; }
};

struct EigenDecomposition {
  std::vector<double> values;                 // descending
  std::vector<std::vector<double>> vectors;   // unit norm, matching values
};

/// Cyclic Jacobi rotations; exact up to rounding for any symmetric matrix.
/// Used as the Rayleigh-Ritz step of the subspace iteration below.
inline EigenDecomposition jacobi_eigen(SquareMatrix m) {
  const std::size_t n = m.n;
  SquareMatrix v(n);
  for (std::size_t i = 0; i < n; ++i) v(i, i) = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        total += m(i, j) * m(i, j);
        if (i != j) off += m(i, j) * m(i, j);
      }
    }
    if (off <= 1e-30 * total || off == 0.0) break;
    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = m(p, q);
        if (apq == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) { return m(i, i) > m(j, j); });
  EigenDecomposition out;
  for (std::size_t idx : order) {
    out.values.push_back(m(idx, idx));
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = v(k, idx);
    out.vectors.push_back(std::move(col));
  }
  return out;
}

struct SubspaceOptions {
  double angle_tolerance = 1e-10;
  std::size_t max_iterations = 10000;
  double tie_tolerance = 1e-12;  // relative gap below which eigenvalues count as tied
  std::size_t extra_block = 8;
};

struct TopEigenpairs {
  std::vector<double> values;                // `count` leading values, plus the next one if n > count
  std::vector<std::vector<double>> vectors;  // `count` leading vectors
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;  // last wanted eigenvalue tied with the next one
};

namespace detail {

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void matvec(const SquareMatrix& m, std::span<const double> x, std::span<double> y) {
  for (std::size_t i = 0; i < m.n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m.n; ++j) s += m(i, j) * x[j];
    y[i] = s;
  }
}

// Modified Gram-Schmidt (two passes). Columns that collapse are replaced with
// fresh pseudo-random directions so the block keeps full rank.
inline void orthonormalize(std::vector<std::vector<double>>& cols, Stream& refill) {
  for (std::size_t c = 0; c < cols.size(); ++c) {
    auto& v = cols[c];
    for (int attempt = 0; attempt < 8; ++attempt) {
      const double before = std::sqrt(dot(v, v));
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t p = 0; p < c; ++p) {
          const double proj = dot(v, cols[p]);
          for (std::size_t i = 0; i < v.size(); ++i) v[i] -= proj * cols[p][i];
        }
      }
      const double norm = std::sqrt(dot(v, v));
      if (norm > 1e-10 * before && norm > 0.0) {
        for (double& e : v) e /= norm;
        break;
      }
      for (double& e : v) e = refill.uniform01() - 0.5;
    }
  }
}

}  // namespace detail

/// Leading `count` eigenpairs (largest algebraic values) of a symmetric matrix
/// by shifted subspace iteration with a Rayleigh-Ritz step. The shift makes the
/// matrix positive semidefinite so "largest magnitude" equals "largest value".
/// Convergence: every wanted Ritz vector moves by less than the angle tolerance.
inline TopEigenpairs top_eigenpairs(const SquareMatrix& m, std::size_t count,
                                    const SubspaceOptions& opts = {}) {
  const std::size_t n = m.n;
  if (count == 0 || count > n) throw InvalidParameter("top_eigenpairs: bad eigenpair count");
  for (double v : m.a) {
    if (!std::isfinite(v)) throw DomainError("top_eigenpairs: non-finite matrix entry");
  }

  double shift = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double radius = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) radius += std::abs(m(i, j));
    }
    shift = std::max(shift, radius - m(i, i));
  }
  SquareMatrix b = m;
  for (std::size_t i = 0; i < n; ++i) b(i, i) += shift;

  const std::size_t block = std::min(n, count + opts.extra_block);
  Stream rng(0x5EEDF00DULL + n);
  std::vector<std::vector<double>> q(block, std::vector<double>(n));
  for (auto& col : q) {
    for (double& e : col) e = rng.uniform01() - 0.5;
  }
  detail::orthonormalize(q, rng);

  TopEigenpairs out;
  std::vector<std::vector<double>> z(block, std::vector<double>(n));
  std::vector<double> ritz;
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    for (std::size_t c = 0; c < block; ++c) detail::matvec(b, q[c], z[c]);
    detail::orthonormalize(z, rng);

    SquareMatrix h(block);
    std::vector<double> bz(n);
    for (std::size_t c = 0; c < block; ++c) {
      detail::matvec(b, z[c], bz);
      for (std::size_t r = 0; r < block; ++r) h(r, c) = detail::dot(z[r], bz);
    }
    for (std::size_t r = 0; r < block; ++r) {
      for (std::size_t c = r + 1; c < block; ++c) {
        const double avg = 0.5 * (h(r, c) + h(c, r));
        h(r, c) = avg;
        h(c, r) = avg;
      }
    }
    const auto small = jacobi_eigen(h);

    std::vector<std::vector<double>> next(block, std::vector<double>(n, 0.0));
    for (std::size_t c = 0; c < block; ++c) {
      for (std::size_t r = 0; r < block; ++r) {
        const double w = small.vectors[c][r];
        for (std::size_t i = 0; i < n; ++i) next[c][i] += w * z[r][i];
      }
    }

    bool done = true;
    for (std::size_t c = 0; c < count; ++c) {
      const double s = detail::dot(next[c], q[c]) >= 0.0 ? 1.0 : -1.0;
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i) diff += (next[c][i] - s * q[c][i]) * (next[c][i] - s * q[c][i]);
      if (std::sqrt(diff) >= opts.angle_tolerance) done = false;
    }
    q = std::move(next);
    ritz = small.values;
    out.iterations = it;
    if (block > count && it >= 20) {
      // Tied Ritz values never separate; stop early and let the caller see the tie.
      const double scale = std::max(std::abs(ritz.front() - shift), std::abs(ritz[count - 1] - shift));
      if (std::abs(ritz[count - 1] - ritz[count]) < opts.tie_tolerance * std::max(scale, 1e-300)) break;
    }
    if (done || block == n) {
      // A full-size block is an exact Rayleigh-Ritz solve.
      out.converged = true;
      break;
    }
  }

  const std::size_t keep = std::min(block, count + 1);
  for (std::size_t c = 0; c < keep; ++c) out.values.push_back(ritz[c] - shift);
  for (std::size_t c = 0; c < count; ++c) out.vectors.push_back(q[c]);
  if (keep > count) {
    const double scale = std::max({std::abs(out.values.front()), std::abs(out.values[count - 1]), 1e-300});
    out.degenerate = std::abs(out.values[count - 1] - out.values[count]) < opts.tie_tolerance * scale;
  }
  return out;
}

// Flips v so that its entry of largest magnitude is positive.
inline void orient_by_largest_entry(std::vector<double>& v) {
  if (v.empty()) return;
  const auto it = std::max_element(v.begin(), v.end(),
                                   [](double a, double b) { return std::abs(a) < std::abs(b); });
  if (*it < 0.0) {
    for (double& e : v) e = -e;
  }
}

}  // namespace noisynn::linalg
