#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "noisynn/error.hpp"
#include "noisynn/noise_model.hpp"
#include "noisynn/summation.hpp"

namespace noisynn {

inline constexpr double kZ95 = 1.959963984540054;

struct WilsonInterval {
  double center = 0.0;
  double half_width = 0.0;
  [[nodiscard]] double lower() const noexcept { return center - half_width; }
  [[nodiscard]] double upper() const noexcept { return center + half_width; }
};

/// Wilson score interval for a binomial proportion (95% by default).
inline WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z = kZ95) {
  if (trials == 0) throw InvalidParameter("wilson_interval: zero trials");
  if (successes > trials) throw InvalidParameter("wilson_interval: successes exceed trials");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {center, half};
}

inline double mean(std::span<const double> v) {
  if (v.empty()) throw InvalidParameter("mean: empty sample");
  return compensated_sum(v) / static_cast<double>(v.size());
}

// Unbiased sample variance.
inline double variance(std::span<const double> v) {
  if (v.size() < 2) throw InvalidParameter("variance: need at least two samples");
  const double m = mean(v);
  CompensatedSum acc;
  for (double e : v) acc.add((e - m) * (e - m));
  return acc.value() / static_cast<double>(v.size() - 1);
}

inline double standard_error(std::span<const double> v) {
  return std::sqrt(variance(v) / static_cast<double>(v.size()));
}

// Moment skewness g1.
inline double skewness(std::span<const double> v) {
  if (v.size() < 3) throw InvalidParameter("skewness: need at least three samples");
  const double m = mean(v);
  CompensatedSum m2, m3;
  for (double e : v) {
    const double c = e - m;
    m2.add(c * c);
    m3.add(c * c * c);
  }
  const double n = static_cast<double>(v.size());
  const double s2 = m2.value() / n;
  if (!(s2 > 0.0)) throw DomainError("skewness: zero-variance sample");
  return (m3.value() / n) / std::pow(s2, 1.5);
}

inline double pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidParameter("pearson: length mismatch");
  if (a.size() < 2) throw InvalidParameter("pearson: need at least two samples");
  const double ma = mean(a);
  const double mb = mean(b);
  CompensatedSum sab, saa, sbb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma;
    const double db = b[i] - mb;
    sab.add(da * db);
    saa.add(da * da);
    sbb.add(db * db);
  }
  if (!(saa.value() > 0.0) || !(sbb.value() > 0.0)) {
    throw DomainError("pearson: zero-variance input");
  }
  return std::clamp(sab.value() / std::sqrt(saa.value() * sbb.value()), -1.0, 1.0);
}

/// 1-based ranks with ties replaced by their average rank.
inline std::vector<double> average_ranks(std::span<const double> v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
  std::vector<double> ranks(v.size());
  std::size_t i = 0;
  while (i < idx.size()) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double spearman(std::span<const double> a, std::span<const double> b) {
  const auto ra = average_ranks(a);
  const auto rb = average_ranks(b);
  return pearson(ra, rb);
}

/// Kolmogorov-Smirnov distance between the empirical CDF of `samples` and Phi.
inline double ks_statistic_vs_std_normal(std::span<const double> samples) {
  if (samples.size() < 8) throw InvalidParameter("ks statistic: need at least 8 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = std_normal_cdf(sorted[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n});
  }
  return d;
}

// Phi^{-1}((i - 0.5) / n), i = 1..n.
inline std::vector<double> normal_plotting_positions(std::size_t n) {
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) {
    q[i] = std_normal_quantile((static_cast<double>(i) + 0.5) / static_cast<double>(n));
  }
  return q;
}

/// Correlation of the normal Q-Q plot: sorted samples against normal plotting positions.
inline double qq_correlation(std::span<const double> samples) {
  if (samples.size() < 3) throw InvalidParameter("qq correlation: need at least 3 samples");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  if (sorted.front() == sorted.back()) throw DomainError("qq correlation: zero-variance samples");
  const auto q = normal_plotting_positions(sorted.size());
  return pearson(sorted, q);
}

}  // namespace noisynn
