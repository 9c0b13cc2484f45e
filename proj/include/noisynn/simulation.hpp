#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "noisynn/error.hpp"
#include "noisynn/noise_model.hpp"
#include "noisynn/parallel.hpp"
#include "noisynn/rng.hpp"
#include "noisynn/signal_geometry.hpp"
#include "noisynn/stats.hpp"
#include "noisynn/summation.hpp"

namespace noisynn {

/// Monte Carlo settings shared by all simulation entry points. Replicate r,
/// point p always draws from seed.stream(r, p), and coordinate k of that point
/// is the k-th draw, so every d in `dims` sees a prefix of the same noise.
struct SimConfig {
  std::size_t replicates = 5000;
  SeedSpec seed{};
  std::vector<std::size_t> dims;  // strictly increasing; empty = full dimension
  unsigned workers = 0;           // 0 = all cores; never affects results

  void validate() const {
    if (replicates == 0) throw InvalidParameter("simulation: replicates must be >= 1");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i] == 0 || (i > 0 && dims[i] <= dims[i - 1])) {
        throw InvalidParameter("simulation: dims must be positive and strictly increasing");
      }
    }
  }

  [[nodiscard]] std::vector<std::size_t> resolved_dims(std::size_t full) const {
    if (dims.empty()) return {full};
    if (dims.back() > full) {
      throw InvalidParameter("simulation: dims exceed the dimension of the input points");
    }
    return dims;
  }
};

struct SimRecord {
  std::size_t d = 0;
  double p_hat = 0.0;
  double ci_half_width = 0.0;         // 95% Wilson
  std::optional<double> predicted;    // Phi(zeta) at this d
  std::vector<double> y_samples;      // standardized z(d), one per replicate
  std::optional<double> ks;           // KS distance of y_samples to N(0, 1)
  std::optional<double> qq;           // normal Q-Q correlation of y_samples
  std::optional<double> rc_mean;      // mean relative contrast
  std::optional<double> noise_dist_mean;
};

struct SimResult {
  std::vector<SimRecord> records;
};

struct SimOptions {
  bool keep_y_samples = true;
  bool normality = true;  // fill ks / qq from y_samples
};

namespace detail {

// z(d) for every replicate (row-major [dim index][replicate]).
inline std::vector<double> simulate_squared_differences(const TripleSignal& t, const NoiseSpec& noise,
                                                        const SimConfig& cfg,
                                                        std::span<const std::size_t> dims) {
  const std::size_t reps = cfg.replicates;
  std::vector<double> z(dims.size() * reps);
  const std::size_t last = dims.back();
  parallel_for(reps, cfg.workers, [&](std::size_t r) {
    Stream sx = cfg.seed.stream(r, 0);
    Stream sy = cfg.seed.stream(r, 1);
    Stream sz = cfg.seed.stream(r, 2);
    CompensatedSum xy, xz;
    std::size_t next = 0;
    for (std::size_t k = 0; k < last; ++k) {
      const double nx = noise.draw(sx);
      const double ny = noise.draw(sy);
      const double nz = noise.draw(sz);
      const double a = (t.x[k] + nx) - (t.y[k] + ny);
      const double b = (t.x[k] + nx) - (t.z[k] + nz);
      xy.add(a * a);
      xz.add(b * b);
      if (k + 1 == dims[next]) {
        z[next * reps + r] = xy.value() - xz.value();
        ++next;
      }
    }
  });
  return z;
}

}  // namespace detail

/// Empirical P(||x + n_x - y - n_y|| <= ||x + n_x - z - n_z||) for each d,
/// with fresh noise for all three points in every replicate, plus the
/// standardized statistic y(d) = (z(d) - mu) / sigma.
inline SimResult simulate_preservation(const TripleSignal& t, const NoiseSpec& noise,
                                       const SimConfig& cfg, const SimOptions& opts = {}) {
  t.validate();
  cfg.validate();
  const auto dims = cfg.resolved_dims(t.dim());
  const auto stats = prefix_triple_stats(t, dims);
  const auto z = detail::simulate_squared_differences(t, noise, cfg, dims);
  const std::size_t reps = cfg.replicates;

  SimResult result;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const std::span<const double> zi(z.data() + i * reps, reps);
    const auto hits = static_cast<std::size_t>(
        std::count_if(zi.begin(), zi.end(), [](double v) { return v <= 0.0; }));
    SimRecord rec;
    rec.d = dims[i];
    rec.p_hat = static_cast<double>(hits) / static_cast<double>(reps);
    rec.ci_half_width = wilson_interval(hits, reps).half_width;
    if (!noise.is_zero()) {
      rec.predicted = predicted_preservation_prob(stats[i], noise);
      const double mu = -stats[i].gap();
      const double sigma = std::sqrt(squared_difference_variance(stats[i], noise));
      std::vector<double> y(reps);
      for (std::size_t r = 0; r < reps; ++r) y[r] = (zi[r] - mu) / sigma;
      if (opts.normality && reps >= 8) {
        rec.ks = ks_statistic_vs_std_normal(y);
        rec.qq = qq_correlation(y);
      }
      if (opts.keep_y_samples) rec.y_samples = std::move(y);
    }
    result.records.push_back(std::move(rec));
  }
  return result;
}

/// R draws of y(d) for each d in the grid.
inline std::vector<std::vector<double>> standardized_samples(const TripleSignal& t,
                                                             const NoiseSpec& noise,
                                                             const SimConfig& cfg) {
  if (noise.is_zero() || !(noise.variance() > 0.0)) {
    throw DomainError("standardized samples: noise has zero variance");
  }
  auto res = simulate_preservation(t, noise, cfg, SimOptions{true, false});
  std::vector<std::vector<double>> out;
  out.reserve(res.records.size());
  for (auto& rec : res.records) out.push_back(std::move(rec.y_samples));
  return out;
}

/// Relative contrast max/min - 1 over all pairwise noisy distances, one value
/// per replicate and per d. Pairs with identical ground truth are included.
inline std::vector<std::vector<double>> relative_contrast_samples(
    std::span<const std::vector<double>> points, const NoiseSpec& noise, const SimConfig& cfg) {
  cfg.validate();
  if (points.size() < 2) throw InvalidParameter("relative contrast: need at least two points");
  const std::size_t full = points.front().size();
  if (full == 0) throw InvalidParameter("relative contrast: points must be nonempty");
  for (const auto& p : points) {
    if (p.size() != full) throw InvalidParameter("relative contrast: points differ in length");
  }
  const auto dims = cfg.resolved_dims(full);
  const std::size_t n = points.size();
  const std::size_t pairs = n * (n - 1) / 2;
  // Without noise every replicate is identical.
  const std::size_t reps = noise.is_zero() ? 1 : cfg.replicates;
  std::vector<double> rc(dims.size() * reps);

  parallel_for(reps, cfg.workers, [&](std::size_t r) {
    std::vector<Stream> streams;
    streams.reserve(n);
    for (std::size_t p = 0; p < n; ++p) streams.push_back(cfg.seed.stream(r, p));
    std::vector<CompensatedSum> acc(pairs);
    std::vector<double> noisy(n);
    std::size_t next = 0;
    for (std::size_t k = 0; k < dims.back(); ++k) {
      for (std::size_t p = 0; p < n; ++p) noisy[p] = points[p][k] + noise.draw(streams[p]);
      std::size_t q = 0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++q) {
          const double diff = noisy[i] - noisy[j];
          acc[q].add(diff * diff);
        }
      }
      if (k + 1 == dims[next]) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = 0.0;
        for (const auto& a : acc) {
          lo = std::min(lo, a.value());
          hi = std::max(hi, a.value());
        }
        if (!(lo > 0.0)) throw DomainError("relative contrast: coincident noisy points");
        rc[next * reps + r] = std::sqrt(hi / lo) - 1.0;
        ++next;
      }
    }
  });

  std::vector<std::vector<double>> out(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (noise.is_zero()) {
      out[i].assign(cfg.replicates, rc[i]);
    } else {
      out[i].assign(rc.begin() + static_cast<std::ptrdiff_t>(i * reps),
                    rc.begin() + static_cast<std::ptrdiff_t>((i + 1) * reps));
    }
  }
  return out;
}

/// Monte Carlo mean of ||n_1 - n_2|| for every d in cfg.dims.
inline std::vector<double> empirical_noise_distances(const NoiseSpec& noise, const SimConfig& cfg) {
  cfg.validate();
  if (cfg.dims.empty()) throw InvalidParameter("noise distance: dims must be given");
  const auto& dims = cfg.dims;
  const std::size_t reps = cfg.replicates;
  std::vector<double> dist(dims.size() * reps);
  parallel_for(reps, cfg.workers, [&](std::size_t r) {
    Stream s1 = cfg.seed.stream(r, 0);
    Stream s2 = cfg.seed.stream(r, 1);
    CompensatedSum acc;
    std::size_t next = 0;
    for (std::size_t k = 0; k < dims.back(); ++k) {
      const double diff = noise.draw(s1) - noise.draw(s2);
      acc.add(diff * diff);
      if (k + 1 == dims[next]) {
        dist[next * reps + r] = std::sqrt(acc.value());
        ++next;
      }
    }
  });
  std::vector<double> out(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    out[i] = mean(std::span<const double>(dist.data() + i * reps, reps));
  }
  return out;
}

inline double empirical_noise_distance(const NoiseSpec& noise, std::size_t d, SimConfig cfg) {
  if (d == 0) throw InvalidParameter("noise distance: dimension must be >= 1");
  cfg.dims = {d};
  return empirical_noise_distances(noise, cfg).front();
}

}  // namespace noisynn
