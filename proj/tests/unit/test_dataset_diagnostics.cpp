#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <vector>

#include "noisynn/dataset_diagnostics.hpp"
#include "noisynn/dimred.hpp"
#include "oracles.hpp"

using namespace noisynn;

namespace {

DataMatrix random_matrix(std::mt19937_64& rng, std::size_t n, std::size_t d, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  DataMatrix m(n, d);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < d; ++j) m(i, j) = u(rng);
  }
  return m;
}

}  // namespace

TEST(Diameter, Examples) {
  EXPECT_DOUBLE_EQ(dataset_diameter(DataMatrix::from_rows({{0.0, 0.0}, {1.0, 0.0}})), 1.0);
  EXPECT_NEAR(dataset_diameter(make_line_points(25, GrowthRate::infinite(), 4)), 2.0, 1e-12);
  EXPECT_THROW(dataset_diameter(DataMatrix::from_rows({{1.0}})), InvalidParameter);
}

TEST(Diameter, BruteForceAndRigidMotion) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(rng, 10, 5, 3.0);
    double best = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
      for (std::size_t j = 0; j < 10; ++j) {
        std::vector<double> a(m.row(i).begin(), m.row(i).end()), b(m.row(j).begin(), m.row(j).end());
        best = std::max(best, static_cast<double>(std::sqrt(oracle::sq_dist(a, b))));
      }
    }
    const double diam = dataset_diameter(m);
    EXPECT_NEAR(diam, best, 1e-12 * best);

    const auto rot = oracle::random_rotation(5, rng);
    std::uniform_real_distribution<double> shift(-10, 10);
    std::vector<double> t(5);
    for (auto& v : t) v = shift(rng);
    DataMatrix moved(10, 5);
    for (std::size_t i = 0; i < 10; ++i) {
      const auto r = oracle::apply(rot, std::vector<double>(m.row(i).begin(), m.row(i).end()));
      for (std::size_t j = 0; j < 5; ++j) moved(i, j) = r[j] + t[j];
    }
    EXPECT_NEAR(dataset_diameter(moved), diam, 1e-9 * diam);
  }
}

TEST(Inversion, CollinearExample) {
  const auto m = pad_columns(DataMatrix::from_rows({{0.0}, {1.0}, {3.0}}), 10'000);
  const auto rep = inversion_probabilities(m, make_uniform(1.25));
  ASSERT_EQ(rep.points.size(), 3u);
  EXPECT_EQ(rep.points[0].closest, 1u);
  EXPECT_EQ(rep.points[0].furthest, 2u);
  EXPECT_NEAR(rep.points[0].probability, 0.48024191, 1e-7);
  EXPECT_LT(rep.points[0].probability, 0.5);
  for (const auto& p : rep.points) EXPECT_LE(p.probability, rep.max_probability);
  EXPECT_EQ(rep.points[rep.argmax].probability, rep.max_probability);
}

TEST(Inversion, BoundedDiameterApproachesOneHalf) {
  std::mt19937_64 rng(2);
  const auto noise = make_uniform(1.25);
  for (int trial = 0; trial < 100; ++trial) {
    // Rows inside a ball of radius 1/2, so the diameter is at most 1.
    auto base = random_matrix(rng, 6, 3, 0.25);
    ASSERT_LE(dataset_diameter(base), 1.0);
    double prev = 0.0;
    for (std::size_t d : {100u, 1000u, 10'000u}) {
      const auto rep = inversion_probabilities(pad_columns(base, d), noise);
      EXPECT_GE(rep.max_probability, prev);
      EXPECT_LE(rep.max_probability, 0.5);
      prev = rep.max_probability;
      if (d == 10'000) {
        for (const auto& p : rep.points) {
          EXPECT_GE(p.probability, 0.497);
          EXPECT_LE(p.probability, 0.5);
        }
        EXPECT_LE(0.5 - rep.max_probability, 0.005);
      }
    }
  }
}

TEST(Inversion, TiesAreDeterministic) {
  // Point 0 is equidistant from 1 and 2, and from 3 and 4.
  const auto m = DataMatrix::from_rows({{0.0, 0.0}, {1.0, 0.0}, {-1.0, 0.0}, {0.0, 3.0}, {0.0, -3.0}});
  const auto a = inversion_probabilities(m, make_gaussian(1.0));
  const auto b = inversion_probabilities(m, make_gaussian(1.0));
  EXPECT_EQ(a.points[0].closest, 1u);
  EXPECT_EQ(a.points[0].furthest, 3u);
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].closest, b.points[i].closest);
    EXPECT_EQ(a.points[i].furthest, b.points[i].furthest);
    EXPECT_EQ(a.points[i].probability, b.points[i].probability);
  }
  EXPECT_THROW(inversion_probabilities(DataMatrix::from_rows({{0.0}, {1.0}}), make_gaussian(1.0)),
               InvalidParameter);
}

TEST(GrowthExponent, ExactPowerLaw) {
  GrowthSeries s{{10, 100, 1000}, {std::pow(10, 0.6), std::pow(100, 0.6), std::pow(1000, 0.6)}, 1.0};
  for (auto fit : {ExponentFit::LogLog, ExponentFit::Increments}) {
    const auto v = estimate_growth_exponent(s, {0.45, 0.55}, fit);
    EXPECT_NEAR(v.exponent, 0.6, 1e-12);
    EXPECT_EQ(v.label, PhaseLabel::Truthful);
  }
  // Non-geometric grid exercises the increment-factor correction.
  GrowthSeries t{{10, 50, 400, 2000}, {}, 1.0};
  for (double d : t.dims) t.gap.push_back(3.0 * std::pow(d, 0.3));
  EXPECT_NEAR(estimate_growth_exponent(t).exponent, 0.3, 1e-10);
}

TEST(GrowthExponent, HyperharmonicNorms) {
  const std::vector<std::size_t> grid{100, 1000, 10'000};
  auto series = [&](GrowthRate rate) {
    GrowthSeries s;
    for (auto d : grid) {
      s.dims.push_back(static_cast<double>(d));
      s.gap.push_back(growth_norm_sq(rate, d));
    }
    s.delta_inf_sup = 1.0;
    return s;
  };
  for (double alpha : {3.0, 4.0, 5.0, 6.0}) {
    const auto v = estimate_growth_exponent(series(GrowthRate::of(alpha)));
    EXPECT_NEAR(v.exponent, 1.0 - 2.0 / alpha, 0.03) << alpha;
  }
  EXPECT_NEAR(estimate_growth_exponent(series(GrowthRate::infinite())).exponent, 1.0, 1e-12);
  EXPECT_EQ(estimate_growth_exponent(series(GrowthRate::of(6.0))).label, PhaseLabel::Truthful);
  EXPECT_EQ(estimate_growth_exponent(series(GrowthRate::of(3.0))).label, PhaseLabel::Random);
  EXPECT_EQ(estimate_growth_exponent(series(GrowthRate::of(4.0))).label, PhaseLabel::Critical);
}

TEST(GrowthExponent, LabelMatchesBand) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> beta(0.0, 1.2), c(0.1, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const double b = beta(rng), k = c(rng);
    GrowthSeries s{{100, 1000, 10'000}, {k * std::pow(100, b), k * std::pow(1000, b), k * std::pow(10'000, b)}, 1};
    const auto v = estimate_growth_exponent(s, {0.45, 0.55}, ExponentFit::LogLog);
    EXPECT_NEAR(v.exponent, b, 1e-9);
    EXPECT_EQ(v.label, classify_exponent(v.exponent, {0.45, 0.55}));
    if (v.exponent < 0.45) EXPECT_EQ(v.label, PhaseLabel::Random);
    if (v.exponent > 0.55) EXPECT_EQ(v.label, PhaseLabel::Truthful);
  }
}

TEST(GrowthExponent, Errors) {
  EXPECT_THROW(estimate_growth_exponent(GrowthSeries{{1, 2, 3}, {1, 0, 2}, 1}), DomainError);
  EXPECT_THROW(estimate_growth_exponent(GrowthSeries{{1, 2, 3}, {1, -1, 2}, 1}), DomainError);
  EXPECT_THROW(estimate_growth_exponent(GrowthSeries{{1, 2}, {1, 2}, 1}), InvalidParameter);
  EXPECT_THROW(estimate_growth_exponent(GrowthSeries{{1, 3, 2}, {1, 2, 3}, 1}), InvalidParameter);
  EXPECT_THROW(estimate_growth_exponent(GrowthSeries{{1, 2, 3}, {1, 2}, 1}), InvalidParameter);
}

TEST(Knn, TieBreakAndComplete) {
  const auto line = DataMatrix::from_rows({{0.0}, {1.0}, {2.0}});
  const auto g = knn_graph(line, 1);
  EXPECT_EQ(g.neighbors[1], std::vector<std::size_t>{0});
  EXPECT_EQ(g.neighbors[0], std::vector<std::size_t>{1});
  std::mt19937_64 rng(4);
  const auto m = random_matrix(rng, 7, 3);
  const auto full = knn_graph(m, 6);
  for (std::size_t i = 0; i < 7; ++i) {
    for (std::size_t j = 0; j < 7; ++j) EXPECT_EQ(full.has_edge(i, j), i != j);
  }
  EXPECT_THROW(knn_graph(m, 7), InvalidParameter);
  EXPECT_THROW(knn_graph(m, 0), InvalidParameter);
}

TEST(Knn, MatchesFullSortOracle) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(rng, 20, 8);
    const auto g = knn_graph(m, 5);
    for (std::size_t i = 0; i < 20; ++i) {
      std::vector<std::pair<double, std::size_t>> all;
      for (std::size_t j = 0; j < 20; ++j) {
        if (j == i) continue;
        all.emplace_back(oracle::sq_dist(std::vector<double>(m.row(i).begin(), m.row(i).end()),
                                         std::vector<double>(m.row(j).begin(), m.row(j).end())),
                         j);
      }
      std::sort(all.begin(), all.end());
      for (std::size_t r = 0; r < 5; ++r) EXPECT_EQ(g.neighbors[i][r], all[r].second);
    }
  }
}

TEST(Knn, PermutationEquivariant) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(rng, 12, 4);
    std::vector<std::size_t> perm(12);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    DataMatrix p(12, 4);
    for (std::size_t i = 0; i < 12; ++i) {
      for (std::size_t j = 0; j < 4; ++j) p(perm[i], j) = m(i, j);
    }
    const auto g = knn_graph(m, 3);
    const auto h = knn_graph(p, 3);
    for (std::size_t i = 0; i < 12; ++i) {
      for (std::size_t r = 0; r < 3; ++r) EXPECT_EQ(h.neighbors[perm[i]][r], perm[g.neighbors[i][r]]);
    }
  }
}

TEST(KnnAgreement, IdentityAndPerturbation) {
  std::mt19937_64 rng(7);
  const auto m = random_matrix(rng, 30, 6);
  EXPECT_DOUBLE_EQ(knn_agreement(m, m, 5), 1.0);
  const auto noisy = add_noise(m, make_gaussian(1e-6), SeedSpec{9}, 0);
  EXPECT_GE(knn_agreement(m, noisy, 1), 0.99);
  EXPECT_THROW(knn_agreement(m, random_matrix(rng, 30, 5), 5), InvalidParameter);
}

TEST(KnnAgreement, PureNoiseMatchesRandomBaseline) {
  const auto ground = make_line_points(25, GrowthRate::infinite(), 10'000);
  const DataMatrix zeros(25, 10'000);
  double total = 0.0;
  for (std::size_t r = 0; r < 100; ++r) {
    total += knn_agreement(ground, add_noise(zeros, make_uniform(1.25), SeedSpec{11}, r), 5);
  }
  EXPECT_NEAR(total / 100.0, 5.0 / 24.0, 0.05);
}
