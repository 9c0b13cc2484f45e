#pragma once

#include <cmath>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "noisynn/error.hpp"
#include "noisynn/rng.hpp"

namespace noisynn {

enum class NoiseFamily {
  UniformSymmetric,  // U[-a, a]
  Gaussian,          // N(0, s^2)
  Zero,              // point mass at 0; noiseless reference runs only
};

/// A symmetric marginal noise law with its variance and raw fourth moment.
/// Only symmetric families can be constructed.
class NoiseSpec {
 public:
  static NoiseSpec uniform(double half_width) {
    if (!(half_width > 0.0) || !std::isfinite(half_width)) {
      throw InvalidParameter("uniform noise half-width must be positive and finite");
    }
    const double a2 = half_width * half_width;
    return NoiseSpec(NoiseFamily::UniformSymmetric, half_width, a2 / 3.0, a2 * a2 / 5.0);
  }

  static NoiseSpec gaussian(double std_dev) {
    if (!(std_dev > 0.0) || !std::isfinite(std_dev)) {
      throw InvalidParameter("gaussian noise standard deviation must be positive and finite");
    }
    const double s2 = std_dev * std_dev;
    return NoiseSpec(NoiseFamily::Gaussian, std_dev, s2, 3.0 * s2 * s2);
  }

  static NoiseSpec zero() { return NoiseSpec(NoiseFamily::Zero, 0.0, 0.0, 0.0); }

  [[nodiscard]] NoiseFamily family() const noexcept { return family_; }
  // Half-width for the uniform family, standard deviation for the gaussian one.
  [[nodiscard]] double param() const noexcept { return param_; }
  [[nodiscard]] double variance() const noexcept { return variance_; }
  [[nodiscard]] double fourth_moment() const noexcept { return fourth_moment_; }
  [[nodiscard]] bool is_zero() const noexcept { return family_ == NoiseFamily::Zero; }

  // mu'_4 + 3 sigma^4, the per-coordinate noise floor of the squared-distance difference.
  [[nodiscard]] double noise_floor() const noexcept {
    return fourth_moment_ + 3.0 * variance_ * variance_;
  }

  [[nodiscard]] std::string family_name() const {
    switch (family_) {
      case NoiseFamily::UniformSymmetric: return "uniform";
      case NoiseFamily::Gaussian: return "gaussian";
      case NoiseFamily::Zero: return "zero";
    }
    return "unknown";
  }

  // One draw from the marginal law. Gaussian draws consume exactly two
  // uniforms (Box-Muller, cosine branch) so stream prefixes stay aligned
  // with coordinate prefixes.
  double draw(Stream& stream) const noexcept {
    switch (family_) {
      case NoiseFamily::UniformSymmetric:
        return (2.0 * stream.uniform01() - 1.0) * param_;
      case NoiseFamily::Gaussian: {
        const double u1 = 1.0 - stream.uniform01();  // (0, 1]
        const double u2 = stream.uniform01();
        return param_ * std::sqrt(-2.0 * std::log(u1)) *
               std::cos(2.0 * std::numbers::pi * u2);
      }
      case NoiseFamily::Zero:
        return 0.0;
    }
    return 0.0;
  }

  friend bool operator==(const NoiseSpec&, const NoiseSpec&) = default;

 private:
  NoiseSpec(NoiseFamily family, double param, double variance, double fourth)
      : family_(family), param_(param), variance_(variance), fourth_moment_(fourth) {
    if (fourth_moment_ < variance_ * variance_ * (1.0 - 1e-12)) {
      throw InvalidParameter("noise law violates mu'_4 >= sigma^4");
    }
  }

  NoiseFamily family_;
  double param_;
  double variance_;
  double fourth_moment_;
};

inline NoiseSpec make_uniform(double half_width) { return NoiseSpec::uniform(half_width); }
inline NoiseSpec make_gaussian(double std_dev) { return NoiseSpec::gaussian(std_dev); }

inline void fill_noise(const NoiseSpec& spec, Stream& stream, std::span<double> out) noexcept {
  for (double& v : out) v = spec.draw(stream);
}

inline std::vector<double> sample_noise(const NoiseSpec& spec, std::size_t d, Stream& stream) {
  if (d == 0) throw InvalidParameter("sample_noise: dimension must be >= 1");
  std::vector<double> out(d);
  fill_noise(spec, stream, out);
  return out;
}

/// Standard normal CDF, absolute error well below 1e-12.
inline double std_normal_cdf(double t) {
  if (std::isnan(t)) throw InvalidParameter("std_normal_cdf: NaN argument");
  return 0.5 * std::erfc(-t / std::numbers::sqrt2);
}

/// Inverse of the standard normal CDF on (0, 1).
inline double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw InvalidParameter("std_normal_quantile: probability must lie in (0, 1)");
  }
  return boost::math::quantile(boost::math::normal_distribution<double>{}, p);
}

// E||n_x - n_y||^2 for two independent noise vectors of length d.
inline double expected_noise_sq_distance(const NoiseSpec& spec, std::size_t d) {
  if (d == 0) throw InvalidParameter("expected_noise_sq_distance: dimension must be >= 1");
  return 2.0 * static_cast<double>(d) * spec.variance();
}

}  // namespace noisynn
