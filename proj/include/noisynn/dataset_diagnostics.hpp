#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "noisynn/data_matrix.hpp"
#include "noisynn/error.hpp"
#include "noisynn/noise_model.hpp"
#include "noisynn/signal_geometry.hpp"

namespace noisynn {

/// Largest pairwise Euclidean distance (brute force over all pairs).
inline double dataset_diameter(const DataMatrix& m) {
  if (m.rows() < 2) throw InvalidParameter("diameter: need at least two rows");
  double best = 0.0;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t j = i + 1; j < m.rows(); ++j) {
      best = std::max(best, squared_distance(m.row(i), m.row(j)));
    }
  }
  return std::sqrt(best);
}

struct InversionRecord {
  std::size_t index = 0;
  std::size_t closest = 0;
  std::size_t furthest = 0;
  double probability = 0.0;  // predicted P(noisy furthest no further than noisy closest)
};

struct InversionReport {
  std::vector<InversionRecord> points;
  double max_probability = 0.0;
  std::size_t argmax = 0;
};

/// For each row, the predicted probability that its true furthest neighbor
/// appears no further than its true closest neighbor once noise is added.
/// Neighbor ties go to the lowest row index.
inline InversionReport inversion_probabilities(const DataMatrix& m, const NoiseSpec& noise) {
  if (m.rows() < 3) throw InvalidParameter("inversion probabilities: need at least three rows");
  const std::size_t n = m.rows();
  const auto d2 = pairwise_squared_distances(m);
  InversionReport report;
  report.points.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t lo = n;
    std::size_t hi = n;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      if (lo == n || d2[i * n + j] < d2[i * n + lo]) lo = j;
      if (hi == n || d2[i * n + j] > d2[i * n + hi]) hi = j;
    }
    // y = furthest, z = closest: Phi(zeta) is the probability of the inversion.
    TripleSignal t;
    const auto row = m.row(i);
    t.x.assign(row.begin(), row.end());
    t.y.assign(m.row(hi).begin(), m.row(hi).end());
    t.z.assign(m.row(lo).begin(), m.row(lo).end());
    const double p = predicted_preservation_prob(triple_stats(t), noise);
    report.points.push_back({i, lo, hi, p});
    if (i == 0 || p > report.max_probability) {
      report.max_probability = p;
      report.argmax = i;
    }
  }
  return report;
}

/// Discriminator growth over a grid of dimensions.
struct GrowthSeries {
  std::vector<double> dims;
  std::vector<double> gap;
  double delta_inf_sup = 0.0;

  void validate() const {
    if (dims.size() != gap.size()) throw InvalidParameter("growth series: length mismatch");
    if (dims.size() < 3) throw InvalidParameter("growth series: need at least three grid points");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (!(dims[i] > 0.0) || (i > 0 && dims[i] <= dims[i - 1])) {
        throw InvalidParameter("growth series: dims must be positive and strictly increasing");
      }
      if (!(gap[i] > 0.0)) throw DomainError("growth series: gaps must be positive");
    }
  }
};

enum class PhaseLabel { Random, Truthful, Critical };

inline std::string to_string(PhaseLabel label) {
  switch (label) {
    case PhaseLabel::Random: return "Random";
    case PhaseLabel::Truthful: return "Truthful";
    case PhaseLabel::Critical: return "Critical";
  }
  return "Unknown";
}

struct PhaseVerdict {
  double exponent = 0.0;
  std::pair<double, double> band{0.45, 0.55};
  PhaseLabel label = PhaseLabel::Critical;
};

enum class ExponentFit {
  // Slope of log(gap) against log(d).
  LogLog,
  // Slope of log(gap increments) against log(d). Insensitive to an additive
  // constant in the gap, e.g. the zeta(2/alpha) offset of a hyperharmonic sum.
  // Falls back to LogLog when the gap is not strictly increasing.
  Increments,
};

namespace detail {

inline double ols_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
  }
  return sxy / sxx;
}

}  // namespace detail

inline PhaseLabel classify_exponent(double exponent, std::pair<double, double> band) {
  if (exponent < band.first) return PhaseLabel::Random;
  if (exponent > band.second) return PhaseLabel::Truthful;
  return PhaseLabel::Critical;
}

/// Fits the growth exponent beta of gap ~ d^beta and labels it against the
/// critical exponent 1/2: Random below the band, Truthful above it.
inline PhaseVerdict estimate_growth_exponent(const GrowthSeries& s,
                                             std::pair<double, double> band = {0.45, 0.55},
                                             ExponentFit fit = ExponentFit::Increments) {
  s.validate();
  if (!(band.first <= band.second)) throw InvalidParameter("phase band: low must not exceed high");
  const bool increasing = std::adjacent_find(s.gap.begin(), s.gap.end(),
                                             [](double a, double b) { return b <= a; }) == s.gap.end();
  std::vector<double> xs;
  std::vector<double> ys;
  if (fit == ExponentFit::Increments && increasing) {
    for (std::size_t i = 0; i + 1 < s.dims.size(); ++i) {
      xs.push_back(std::log(s.dims[i]));
      ys.push_back(std::log(s.gap[i + 1] - s.gap[i]));
    }
    // c d_{i+1}^beta - c d_i^beta = c d_i^beta (r_i^beta - 1) with r_i = d_{i+1} / d_i.
    // The factor is constant on geometric grids; otherwise iterate it out.
    double beta = xs.size() >= 2 ? detail::ols_slope(xs, ys) : 0.0;
    if (xs.size() >= 2) {
      for (int it = 0; it < 50; ++it) {
        std::vector<double> adj(ys.size());
        for (std::size_t i = 0; i < ys.size(); ++i) {
          const double ratio = s.dims[i + 1] / s.dims[i];
          const double factor = std::abs(beta) < 1e-12 ? std::log(ratio)
                                                       : (std::pow(ratio, beta) - 1.0) / beta;
          adj[i] = ys[i] - std::log(factor);
        }
        const double next = detail::ols_slope(xs, adj);
        if (std::abs(next - beta) < 1e-14) {
          beta = next;
          break;
        }
        beta = next;
      }
      return {beta, band, classify_exponent(beta, band)};
    }
  }
  xs.clear();
  ys.clear();
  for (std::size_t i = 0; i < s.dims.size(); ++i) {
    xs.push_back(std::log(s.dims[i]));
    ys.push_back(std::log(s.gap[i]));
  }
  const double beta = detail::ols_slope(xs, ys);
  return {beta, band, classify_exponent(beta, band)};
}

/// Directed k-nearest-neighbor graph; neighbors[i] sorted by distance, then index.
struct KnnGraph {
  std::size_t k = 0;
  std::vector<std::vector<std::size_t>> neighbors;

  [[nodiscard]] bool has_edge(std::size_t from, std::size_t to) const {
    const auto& nb = neighbors[from];
    return std::find(nb.begin(), nb.end(), to) != nb.end();
  }
};

inline KnnGraph knn_graph_from_distances(const std::vector<double>& d2, std::size_t n, std::size_t k) {
  if (k == 0 || k >= n) throw InvalidParameter("knn graph: need 1 <= k < n");
  KnnGraph g;
  g.k = k;
  g.neighbors.resize(n);
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < n; ++i) {
    order.clear();
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order.push_back(j);
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        const double da = d2[i * n + a];
                        const double db = d2[i * n + b];
                        return da < db || (da == db && a < b);
                      });
    g.neighbors[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
  }
  return g;
}

inline KnnGraph knn_graph(const DataMatrix& m, std::size_t k) {
  if (k == 0 || k >= m.rows()) throw InvalidParameter("knn graph: need 1 <= k < n");
  return knn_graph_from_distances(pairwise_squared_distances(m), m.rows(), k);
}

/// Fraction of the ground-truth kNN edges that survive in the observed data.
inline double knn_agreement(const DataMatrix& ground, const DataMatrix& observed, std::size_t k) {
  if (ground.rows() != observed.rows() || ground.cols() != observed.cols()) {
    throw InvalidParameter("knn agreement: matrices differ in shape");
  }
  const auto g = knn_graph(ground, k);
  const auto o = knn_graph(observed, k);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < g.neighbors.size(); ++i) {
    const std::set<std::size_t> obs(o.neighbors[i].begin(), o.neighbors[i].end());
    for (std::size_t j : g.neighbors[i]) kept += obs.count(j);
  }
  return static_cast<double>(kept) / static_cast<double>(g.neighbors.size() * k);
}

}  // namespace noisynn
