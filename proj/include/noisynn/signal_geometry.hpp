#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "noisynn/error.hpp"
#include "noisynn/noise_model.hpp"
#include "noisynn/summation.hpp"

namespace noisynn {

/// Ground-truth query point x and two candidate neighbors y, z.
struct TripleSignal {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> z;

  [[nodiscard]] std::size_t dim() const noexcept { return x.size(); }

  void validate() const {
    if (x.empty()) throw InvalidParameter("triple: vectors must be nonempty");
    if (y.size() != x.size() || z.size() != x.size()) {
      throw InvalidParameter("triple: x, y, z must have identical length");
    }
    auto finite = [](const std::vector<double>& v) {
      return std::all_of(v.begin(), v.end(), [](double e) { return std::isfinite(e); });
    };
    if (!finite(x) || !finite(y) || !finite(z)) {
      throw InvalidParameter("triple: entries must be finite");
    }
  }
};

/// Geometric quantities of a triple restricted to its first d coordinates.
struct TripleStats {
  std::size_t d = 0;
  double dist_xy_sq = 0.0;   // ||x - y||^2
  double dist_xz_sq = 0.0;   // ||x - z||^2
  double cross_inner = 0.0;  // <x - y, x - z>
  double delta_inf = 0.0;    // max(||x - y||_inf, ||x - z||_inf)
  double delta_two = 0.0;    // max(||x - y||, ||x - z||)

  // ||x - z||^2 - ||x - y||^2; positive when y is the true closer neighbor.
  [[nodiscard]] double gap() const noexcept { return dist_xz_sq - dist_xy_sq; }
};

/// Stats of every prefix length in `dims` (ascending, each <= t.dim()) in a
/// single pass over the coordinates.
inline std::vector<TripleStats> prefix_triple_stats(const TripleSignal& t,
                                                    std::span<const std::size_t> dims) {
  t.validate();
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i] == 0 || dims[i] > t.dim() || (i > 0 && dims[i] <= dims[i - 1])) {
      throw InvalidParameter("triple stats: dims must be strictly increasing within [1, dim]");
    }
  }
  std::vector<TripleStats> out;
  out.reserve(dims.size());
  CompensatedSum xy, xz, cross;
  double dinf = 0.0;
  std::size_t next = 0;
  for (std::size_t k = 0; k < t.dim() && next < dims.size(); ++k) {
    const double a = t.x[k] - t.y[k];
    const double b = t.x[k] - t.z[k];
    xy.add(a * a);
    xz.add(b * b);
    cross.add(a * b);
    dinf = std::max({dinf, std::abs(a), std::abs(b)});
    if (k + 1 == dims[next]) {
      TripleStats s;
      s.d = k + 1;
      s.dist_xy_sq = xy.value();
      s.dist_xz_sq = xz.value();
      s.cross_inner = cross.value();
      s.delta_inf = dinf;
      s.delta_two = std::sqrt(std::max(s.dist_xy_sq, s.dist_xz_sq));
      out.push_back(s);
      ++next;
    }
  }
  return out;
}

inline TripleStats triple_stats(const TripleSignal& t) {
  const std::size_t d = t.dim();
  if (d == 0) throw InvalidParameter("triple: vectors must be nonempty");
  return prefix_triple_stats(t, std::span<const std::size_t>(&d, 1)).front();
}

// Variance of z(d) = ||n_x - n_y + x - y||^2 - ||n_x - n_z + x - z||^2.
inline double squared_difference_variance(const TripleStats& s, const NoiseSpec& noise) {
  return 2.0 * static_cast<double>(s.d) * noise.noise_floor() +
         8.0 * noise.variance() * (s.dist_xy_sq + s.dist_xz_sq - s.cross_inner);
}

/// Standardized signal gap; the asymptotic preservation probability is Phi(zeta).
inline double zeta(const TripleStats& s, const NoiseSpec& noise) {
  const double var = squared_difference_variance(s, noise);
  if (!(var > 0.0)) {
    throw DomainError("zeta: squared-distance difference has zero variance (degenerate noise)");
  }
  return s.gap() / std::sqrt(var);
}

inline double predicted_preservation_prob(const TripleStats& s, const NoiseSpec& noise) {
  return std::clamp(std_normal_cdf(zeta(s, noise)), 0.0, 1.0);
}

/// Decay rate alpha of the sequence z_k = k^(-1/alpha), with alpha = inf
/// meaning the all-ones sequence. Accepts alpha >= 2 so that the harmonic
/// boundary case can be simulated; the closed forms need HyperharmonicSpec.
class GrowthRate {
 public:
  static GrowthRate of(double alpha) {
    if (std::isnan(alpha) || alpha < 2.0) {
      throw InvalidParameter("growth rate alpha must be >= 2 or infinite");
    }
    return GrowthRate(alpha);
  }
  static GrowthRate infinite() { return GrowthRate(std::numeric_limits<double>::infinity()); }

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] bool is_infinite() const noexcept { return std::isinf(alpha_); }
  // Growth exponent 1 - 2/alpha of ||z^(d)||^2.
  [[nodiscard]] double norm_sq_exponent() const noexcept {
    return is_infinite() ? 1.0 : 1.0 - 2.0 / alpha_;
  }
  [[nodiscard]] double coordinate(std::size_t k) const noexcept {
    return is_infinite() ? 1.0 : std::pow(static_cast<double>(k), -1.0 / alpha_);
  }

  friend bool operator==(const GrowthRate&, const GrowthRate&) = default;

 private:
  explicit GrowthRate(double alpha) : alpha_(alpha) {}
  double alpha_;
};

/// Hyperharmonic family parameter: alpha > 2 strictly, or infinite.
class HyperharmonicSpec {
 public:
  static HyperharmonicSpec of(double alpha) {
    if (std::isnan(alpha) || !(alpha > 2.0)) {
      throw InvalidParameter("hyperharmonic alpha must be > 2 or infinite");
    }
    return HyperharmonicSpec(alpha);
  }
  static HyperharmonicSpec infinite() {
    return HyperharmonicSpec(std::numeric_limits<double>::infinity());
  }

  [[nodiscard]] double alpha() const noexcept { return alpha_; }
  [[nodiscard]] bool is_infinite() const noexcept { return std::isinf(alpha_); }
  [[nodiscard]] GrowthRate rate() const { return is_infinite() ? GrowthRate::infinite() : GrowthRate::of(alpha_); }

 private:
  explicit HyperharmonicSpec(double alpha) : alpha_(alpha) {}
  double alpha_;
};

inline std::vector<double> growth_sequence(const GrowthRate& rate, std::size_t d) {
  if (d == 0) throw InvalidParameter("growth sequence: dimension must be >= 1");
  std::vector<double> z(d);
  for (std::size_t k = 0; k < d; ++k) z[k] = rate.coordinate(k + 1);
  return z;
}

// Exact ||z^(d)||^2 = sum_{k<=d} k^(-2/alpha).
inline double growth_norm_sq(const GrowthRate& rate, std::size_t d) {
  if (d == 0) throw InvalidParameter("growth norm: dimension must be >= 1");
  if (rate.is_infinite()) return static_cast<double>(d);
  CompensatedSum acc;
  const double p = -2.0 / rate.alpha();
  // Smallest terms first.
  for (std::size_t k = d; k >= 1; --k) acc.add(std::pow(static_cast<double>(k), p));
  return acc.value();
}

inline std::vector<double> hyperharmonic_z(const HyperharmonicSpec& spec, std::size_t d) {
  return growth_sequence(spec.rate(), d);
}

enum class NormMode { Exact, Approx };

/// ||z^(d)(alpha)||^2, either summed exactly or via the integral
/// approximation (alpha / (alpha - 2)) (d^(1 - 2/alpha) - 1).
inline double hyperharmonic_norm_sq(const HyperharmonicSpec& spec, std::size_t d, NormMode mode) {
  if (d == 0) throw InvalidParameter("hyperharmonic norm: dimension must be >= 1");
  if (spec.is_infinite()) return static_cast<double>(d);
  if (mode == NormMode::Exact) return growth_norm_sq(spec.rate(), d);
  const double a = spec.alpha();
  return (a / (a - 2.0)) * (std::pow(static_cast<double>(d), 1.0 - 2.0 / a) - 1.0);
}

/// d -> inf limit of P(noisy x closer to y than to z) for x = y = 0, z = z(alpha).
inline double limiting_probability(const HyperharmonicSpec& spec, const NoiseSpec& noise) {
  if (spec.is_infinite() || spec.alpha() > 4.0) return 1.0;
  if (spec.alpha() < 4.0) return 0.5;
  if (!(noise.noise_floor() > 0.0)) {
    throw DomainError("limiting probability at alpha = 4 needs nondegenerate noise");
  }
  return std_normal_cdf(std::sqrt(2.0 / noise.noise_floor()));
}

/// Builtin triples: x = y = 0 and z one of the validation growth patterns.
enum class BuiltinTriple {
  BoundedBounded,      // z = e_1
  UnboundedBounded,    // z = (1, ..., 1)
  UnboundedUnbounded,  // z_k = k^(1/4 - 0.01)
};

inline TripleSignal builtin_triple(BuiltinTriple kind, std::size_t d) {
  if (d == 0) throw InvalidParameter("builtin triple: dimension must be >= 1");
  TripleSignal t{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0),
                 std::vector<double>(d, 0.0)};
  switch (kind) {
    case BuiltinTriple::BoundedBounded:
      t.z[0] = 1.0;
      break;
    case BuiltinTriple::UnboundedBounded:
      std::fill(t.z.begin(), t.z.end(), 1.0);
      break;
    case BuiltinTriple::UnboundedUnbounded:
      for (std::size_t k = 0; k < d; ++k) t.z[k] = std::pow(static_cast<double>(k + 1), 0.24);
      break;
  }
  return t;
}

inline TripleSignal growth_triple(const GrowthRate& rate, std::size_t d) {
  return TripleSignal{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0),
                      growth_sequence(rate, d)};
}

}  // namespace noisynn
