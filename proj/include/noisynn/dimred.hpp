#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <queue>
#include <string>
#include <utility>
#include <vector>

#include "noisynn/data_matrix.hpp"
#include "noisynn/dataset_diagnostics.hpp"
#include "noisynn/error.hpp"
#include "noisynn/linalg.hpp"
#include "noisynn/noise_model.hpp"
#include "noisynn/parallel.hpp"
#include "noisynn/rng.hpp"
#include "noisynn/signal_geometry.hpp"
#include "noisynn/stats.hpp"

namespace noisynn {

/// n evenly spaced points from the origin to z^(d)(alpha): row i = i/(n-1) * z.
inline DataMatrix make_line_points(std::size_t n, const GrowthRate& rate, std::size_t d) {
  if (n < 2) throw InvalidParameter("line points: need at least two points");
  const auto z = growth_sequence(rate, d);
  DataMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / static_cast<double>(n - 1);
    auto row = m.row(i);
    for (std::size_t k = 0; k < d; ++k) row[k] = t * z[k];
  }
  return m;
}

namespace detail {

inline std::vector<double> leading_scores(const linalg::SquareMatrix& m, const char* what) {
  const auto eig = linalg::top_eigenpairs(m, 1);
  if (eig.degenerate) throw DomainError(std::string(what) + ": top two eigenvalues are tied");
  if (!eig.converged) throw DomainError(std::string(what) + ": eigen-solver did not converge");
  const double lambda = eig.values.front();
  if (!(lambda > 0.0)) throw DomainError(std::string(what) + ": no positive leading eigenvalue");
  std::vector<double> scores = eig.vectors.front();
  const double scale = std::sqrt(lambda);
  for (double& v : scores) v *= scale;
  linalg::orient_by_largest_entry(scores);
  return scores;
}

}  // namespace detail

/// Projections of the centered rows onto the leading principal direction.
/// Works on the n x n Gram matrix when n <= d, else on the d x d covariance.
inline std::vector<double> pca_1d(const DataMatrix& m) {
  const std::size_t n = m.rows();
  const std::size_t d = m.cols();
  if (n < 2) throw InvalidParameter("pca: need at least two rows");
  std::vector<double> centroid(d, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) centroid[k] += m(i, k);
  }
  for (double& c : centroid) c /= static_cast<double>(n);
  DataMatrix xc(n, d);
  bool any = false;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      xc(i, k) = m(i, k) - centroid[k];
      any = any || xc(i, k) != 0.0;
    }
  }
  if (!any) throw DomainError("pca: all rows are identical");

  if (n <= d) {
    linalg::SquareMatrix gram(n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i; j < n; ++j) {
        double s = 0.0;
        const auto a = xc.row(i);
        const auto b = xc.row(j);
        for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
        gram(i, j) = s;
        gram(j, i) = s;
      }
    }
    return detail::leading_scores(gram, "pca");
  }

  linalg::SquareMatrix cov(d);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = xc.row(i);
    for (std::size_t a = 0; a < d; ++a) {
      for (std::size_t b = 0; b < d; ++b) cov(a, b) += r[a] * r[b];
    }
  }
  const auto eig = linalg::top_eigenpairs(cov, 1);
  if (eig.degenerate) throw DomainError("pca: top two eigenvalues are tied");
  if (!eig.converged) throw DomainError("pca: eigen-solver did not converge");
  std::vector<double> scores(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto r = xc.row(i);
    for (std::size_t k = 0; k < d; ++k) scores[i] += r[k] * eig.vectors.front()[k];
  }
  linalg::orient_by_largest_entry(scores);
  return scores;
}

/// Classical MDS coordinates from a matrix of squared distances.
inline std::vector<double> classical_mds_1d(const std::vector<double>& d2, std::size_t n) {
  // B = -1/2 J D^2 J with J = I - 11^T / n.
  std::vector<double> row_mean(n, 0.0);
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) row_mean[i] += d2[i * n + j];
    grand += row_mean[i];
    row_mean[i] /= static_cast<double>(n);
  }
  grand /= static_cast<double>(n * n);
  linalg::SquareMatrix b(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      b(i, j) = -0.5 * (d2[i * n + j] - row_mean[i] - row_mean[j] + grand);
    }
  }
  return detail::leading_scores(b, "mds");
}

/// Geodesic distances over the symmetrized kNN graph.
inline std::vector<double> knn_geodesic_distances(const DataMatrix& m, std::size_t k) {
  const std::size_t n = m.rows();
  const auto d2 = pairwise_squared_distances(m);
  const auto graph = knn_graph_from_distances(d2, n, k);
  std::vector<std::vector<std::pair<std::size_t, double>>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : graph.neighbors[i]) {
      const double w = std::sqrt(d2[i * n + j]);
      adj[i].emplace_back(j, w);
      adj[j].emplace_back(i, w);
    }
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> geo(n * n, inf);
  using Item = std::pair<double, std::size_t>;
  for (std::size_t src = 0; src < n; ++src) {
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    double* dist = geo.data() + src * n;
    dist[src] = 0.0;
    heap.emplace(0.0, src);
    while (!heap.empty()) {
      const auto [du, u] = heap.top();
      heap.pop();
      if (du > dist[u]) continue;
      for (const auto& [v, w] : adj[u]) {
        if (du + w < dist[v]) {
          dist[v] = du + w;
          heap.emplace(dist[v], v);
        }
      }
    }
    for (std::size_t j = 0; j < n; ++j) {
      if (dist[j] == inf) throw DisconnectedGraph("isomap: neighborhood graph is disconnected");
    }
  }
  // Shortest paths are symmetric up to rounding; make it exact.
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = std::min(geo[i * n + j], geo[j * n + i]);
      geo[i * n + j] = v;
      geo[j * n + i] = v;
    }
  }
  return geo;
}

inline std::vector<double> isomap_1d(const DataMatrix& m, std::size_t k) {
  if (k == 0 || k >= m.rows()) throw InvalidParameter("isomap: need 1 <= k < n");
  const std::size_t n = m.rows();
  auto geo = knn_geodesic_distances(m, k);
  for (double& v : geo) v *= v;
  return classical_mds_1d(geo, n);
}

/// Kernel bandwidth epsilon in exp(-||xi - xj||^2 / epsilon). Unset means the
/// median rule: epsilon = (median pairwise distance)^2.
struct Bandwidth {
  std::optional<double> epsilon;

  static Bandwidth median() { return {}; }
  static Bandwidth fixed(double eps) { return {eps}; }
};

/// Second diffusion coordinate of the row-normalized Gaussian kernel.
inline std::vector<double> diffusion_map_1d(const DataMatrix& m, Bandwidth bw = Bandwidth::median()) {
  const std::size_t n = m.rows();
  if (n < 3) throw InvalidParameter("diffusion map: need at least three rows");
  const auto d2 = pairwise_squared_distances(m);
  double eps = 0.0;
  if (bw.epsilon) {
    eps = *bw.epsilon;
  } else {
    std::vector<double> dist;
    dist.reserve(n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) dist.push_back(std::sqrt(d2[i * n + j]));
    }
    std::sort(dist.begin(), dist.end());
    const std::size_t mid = dist.size() / 2;
    const double med = dist.size() % 2 == 1 ? dist[mid] : 0.5 * (dist[mid - 1] + dist[mid]);
    eps = med * med;
  }
  if (!(eps > 0.0) || !std::isfinite(eps)) throw DomainError("diffusion map: zero bandwidth");

  linalg::SquareMatrix kernel(n);
  std::vector<double> degree(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      kernel(i, j) = std::exp(-d2[i * n + j] / eps);
      degree[i] += kernel(i, j);
    }
  }
  // Symmetric conjugate D^{-1/2} K D^{-1/2} of the transition matrix D^{-1} K.
  linalg::SquareMatrix sym(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      sym(i, j) = kernel(i, j) / std::sqrt(degree[i] * degree[j]);
    }
  }
  const auto eig = linalg::top_eigenpairs(sym, 2);
  if (eig.degenerate) throw DomainError("diffusion map: second and third eigenvalues are tied");
  if (!eig.converged) throw DomainError("diffusion map: eigen-solver did not converge");
  std::vector<double> scores(n);
  for (std::size_t i = 0; i < n; ++i) scores[i] = eig.vectors[1][i] / std::sqrt(degree[i]);
  linalg::orient_by_largest_entry(scores);
  return scores;
}

/// |Spearman| between a reference ordering and 1-d scores; the sign of a
/// 1-d embedding is arbitrary.
inline double spearman_abs(std::span<const double> true_order, std::span<const double> scores) {
  if (true_order.size() != scores.size()) throw InvalidParameter("spearman: length mismatch");
  if (scores.size() < 3) throw InvalidParameter("spearman: need at least three points");
  return std::abs(spearman(true_order, scores));
}

inline double pearson_abs(std::span<const double> true_order, std::span<const double> scores) {
  if (true_order.size() != scores.size()) throw InvalidParameter("pearson: length mismatch");
  if (scores.size() < 3) throw InvalidParameter("pearson: need at least three points");
  return std::abs(pearson(true_order, scores));
}

enum class DimredMethod { Pca, Isomap, DiffusionMap };

struct MethodSpec {
  DimredMethod kind = DimredMethod::Pca;
  std::size_t k = 10;     // isomap neighbors
  Bandwidth bandwidth{};  // diffusion map

  static MethodSpec pca() { return {DimredMethod::Pca, 10, {}}; }
  static MethodSpec isomap(std::size_t k = 10) { return {DimredMethod::Isomap, k, {}}; }
  static MethodSpec diffusion(Bandwidth bw = Bandwidth::median()) {
    return {DimredMethod::DiffusionMap, 10, bw};
  }

  [[nodiscard]] std::string label() const {
    switch (kind) {
      case DimredMethod::Pca: return "pca";
      case DimredMethod::Isomap: return "isomap:" + std::to_string(k);
      case DimredMethod::DiffusionMap: return "diffusion";
    }
    return "unknown";
  }

  [[nodiscard]] std::vector<double> embed(const DataMatrix& m) const {
    switch (kind) {
      case DimredMethod::Pca: return pca_1d(m);
      case DimredMethod::Isomap: return isomap_1d(m, k);
      case DimredMethod::DiffusionMap: return diffusion_map_1d(m, bandwidth);
    }
    throw InvalidParameter("unknown dimensionality reduction method");
  }
};

enum class OrderCorrelation { Spearman, Pearson };

struct LineExperimentConfig {
  std::size_t n = 25;
  GrowthRate alpha = GrowthRate::infinite();
  std::vector<std::size_t> dims{100, 1000, 10000};
  NoiseSpec noise = NoiseSpec::uniform(1.25);
  std::size_t replicates = 100;
  std::vector<MethodSpec> methods{MethodSpec::pca(), MethodSpec::isomap(10), MethodSpec::diffusion()};
  SeedSpec seed{};
  OrderCorrelation correlation = OrderCorrelation::Spearman;
  unsigned workers = 0;

  void validate() const {
    if (n < 3) throw InvalidParameter("line experiment: need n >= 3");
    if (replicates == 0) throw InvalidParameter("line experiment: replicates must be >= 1");
    if (methods.empty()) throw InvalidParameter("line experiment: no methods");
    if (dims.empty()) throw InvalidParameter("line experiment: no dimensions");
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i] == 0 || (i > 0 && dims[i] <= dims[i - 1])) {
        throw InvalidParameter("line experiment: dims must be positive and strictly increasing");
      }
    }
    for (const auto& m : methods) {
      if (m.kind == DimredMethod::Isomap && (m.k == 0 || m.k >= n)) {
        throw InvalidParameter("line experiment: isomap k must satisfy 1 <= k < n");
      }
    }
  }
};

struct BenchCell {
  std::string method;
  std::size_t d = 0;
  double mean_abs_corr = 0.0;  // mean over successful replicates
  double std_error = 0.0;
  std::size_t failures = 0;
  std::size_t successes = 0;
  bool valid = true;  // false when more than half of the replicates failed
};

struct BenchResult {
  std::vector<BenchCell> cells;  // ordered by (method, d)

  [[nodiscard]] const BenchCell& cell(const std::string& method, std::size_t d) const {
    for (const auto& c : cells) {
      if (c.method == method && c.d == d) return c;
    }
    throw InvalidParameter("bench result: no cell for " + method + " at d=" + std::to_string(d));
  }
};

/// Noisy line-segment recovery: for every (method, d) the ground truth is
/// built once, each replicate adds fresh seeded noise, embeds to one
/// dimension and scores the recovered ordering.
inline BenchResult line_experiment(const LineExperimentConfig& cfg) {
  cfg.validate();
  const std::size_t n_methods = cfg.methods.size();
  std::vector<double> order(cfg.n);
  std::iota(order.begin(), order.end(), 0.0);

  BenchResult result;
  std::vector<std::vector<BenchCell>> by_method(n_methods);
  for (std::size_t d : cfg.dims) {
    const DataMatrix truth = make_line_points(cfg.n, cfg.alpha, d);
    std::vector<double> scores(n_methods * cfg.replicates, std::numeric_limits<double>::quiet_NaN());
    parallel_for(cfg.replicates, cfg.workers, [&](std::size_t r) {
      const DataMatrix noisy = add_noise(truth, cfg.noise, cfg.seed, r);
      for (std::size_t m = 0; m < n_methods; ++m) {
        try {
          const auto emb = cfg.methods[m].embed(noisy);
          scores[m * cfg.replicates + r] = cfg.correlation == OrderCorrelation::Spearman
                                               ? spearman_abs(order, emb)
                                               : pearson_abs(order, emb);
        } catch (const DomainError&) {
          // counted as a failure below
        }
      }
    });
    for (std::size_t m = 0; m < n_methods; ++m) {
      std::vector<double> ok;
      for (std::size_t r = 0; r < cfg.replicates; ++r) {
        const double v = scores[m * cfg.replicates + r];
        if (!std::isnan(v)) ok.push_back(v);
      }
      BenchCell cell;
      cell.method = cfg.methods[m].label();
      cell.d = d;
      cell.successes = ok.size();
      cell.failures = cfg.replicates - ok.size();
      cell.valid = 2 * cell.failures <= cfg.replicates && !ok.empty();
      if (!ok.empty()) cell.mean_abs_corr = mean(ok);
      if (ok.size() >= 2) cell.std_error = standard_error(ok);
      by_method[m].push_back(cell);
    }
  }
  for (auto& cells : by_method) {
    for (auto& c : cells) result.cells.push_back(std::move(c));
  }
  return result;
}

}  // namespace noisynn
