#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "noisynn/error.hpp"
#include "noisynn/noise_model.hpp"
#include "noisynn/rng.hpp"
#include "noisynn/summation.hpp"

namespace noisynn {

/// Row-major n x d point set; rows are points.
class DataMatrix {
 public:
  DataMatrix() = default;

  DataMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static DataMatrix from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw InvalidParameter("matrix: no rows");
    DataMatrix m(rows.size(), rows.front().size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != m.cols_) throw InvalidParameter("matrix: ragged rows");
      std::copy(rows[i].begin(), rows[i].end(), m.row(i).begin());
    }
    m.validate();
    return m;
  }

  void validate() const {
    if (!std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); })) {
      throw InvalidParameter("matrix: entries must be finite");
    }
  }

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  [[nodiscard]] std::span<double> row(std::size_t i) noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }

  double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

  [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const DataMatrix&, const DataMatrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  CompensatedSum acc;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double diff = a[k] - b[k];
    acc.add(diff * diff);
  }
  return acc.value();
}

// Symmetric n x n matrix of squared Euclidean row distances (row-major).
inline std::vector<double> pairwise_squared_distances(const DataMatrix& m) {
  const std::size_t n = m.rows();
  std::vector<double> d2(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const double v = squared_distance(m.row(i), m.row(j));
      d2[i * n + j] = v;
      d2[j * n + i] = v;
    }
  }
  return d2;
}

/// Appends zero columns up to `cols` total (irrelevant, noise-only dimensions).
inline DataMatrix pad_columns(const DataMatrix& m, std::size_t cols) {
  if (cols < m.cols()) throw InvalidParameter("pad_columns: target narrower than matrix");
  DataMatrix out(m.rows(), cols, 0.0);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::copy(m.row(i).begin(), m.row(i).end(), out.row(i).begin());
  }
  return out;
}

// First `cols` columns.
inline DataMatrix leading_columns(const DataMatrix& m, std::size_t cols) {
  if (cols == 0 || cols > m.cols()) throw InvalidParameter("leading_columns: bad column count");
  DataMatrix out(m.rows(), cols);
  for (std::size_t i = 0; i < m.rows(); ++i) {
    std::copy_n(m.row(i).begin(), cols, out.row(i).begin());
  }
  return out;
}

/// X + N with row i drawn from seed.stream(replicate, i).
inline DataMatrix add_noise(const DataMatrix& m, const NoiseSpec& noise, const SeedSpec& seed,
                            std::size_t replicate) {
  DataMatrix out = m;
  if (noise.is_zero()) return out;
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Stream s = seed.stream(replicate, i);
    for (double& v : out.row(i)) v += noise.draw(s);
  }
  return out;
}

}  // namespace noisynn
