#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "noisynn/signal_geometry.hpp"
#include "noisynn/simulation.hpp"
#include "noisynn/stats.hpp"

using namespace noisynn;

namespace {

SimConfig config(std::size_t reps, std::vector<std::size_t> dims, std::uint64_t seed = 20221) {
  SimConfig cfg;
  cfg.replicates = reps;
  cfg.dims = std::move(dims);
  cfg.seed = SeedSpec{seed};
  cfg.workers = 1;
  return cfg;
}

TripleSignal zeros(std::size_t d) {
  return TripleSignal{std::vector<double>(d, 0.0), std::vector<double>(d, 0.0), std::vector<double>(d, 0.0)};
}

}  // namespace

TEST(SimulatePreservation, ExchangeableTripleGivesOneHalf) {
  const auto res = simulate_preservation(zeros(100), make_uniform(0.75), config(5000, {100}));
  const auto& r = res.records.front();
  EXPECT_NEAR(r.p_hat, 0.5, 3.0 * r.ci_half_width);
  EXPECT_LT(r.ci_half_width, 0.0145);
}

TEST(SimulatePreservation, HyperharmonicExtremes) {
  const auto noise = make_uniform(1.25);
  const auto six = simulate_preservation(growth_triple(GrowthRate::of(6.0), 10'000), noise,
                                         config(5000, {10'000}));
  EXPECT_GE(six.records.front().p_hat, 0.99);
  EXPECT_NEAR(*six.records.front().predicted, 0.9999781689668126, 1e-9);

  const auto two = simulate_preservation(growth_triple(GrowthRate::of(2.0), 10'000), noise,
                                         config(5000, {10'000}));
  const auto& r = two.records.front();
  EXPECT_LE(std::abs(r.p_hat - 0.5), 0.05);
  EXPECT_NEAR(*r.predicted, 0.5241627623417267, 1e-9);
  EXPECT_LE(std::abs(r.p_hat - *r.predicted), 3.0 * r.ci_half_width + 0.02);
}

TEST(SimulatePreservation, DeterministicAndWorkerIndependent) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 3; ++trial) {
    TripleSignal t = zeros(300);
    for (std::size_t k = 0; k < 300; ++k) {
      t.x[k] = u(rng);
      t.y[k] = u(rng);
      t.z[k] = u(rng);
    }
    auto cfg = config(400, {30, 300}, 77 + trial);
    const auto serial = simulate_preservation(t, make_gaussian(0.5), cfg);
    cfg.workers = 4;
    const auto parallel = simulate_preservation(t, make_gaussian(0.5), cfg);
    cfg.workers = 3;
    const auto again = simulate_preservation(t, make_gaussian(0.5), cfg);
    for (std::size_t i = 0; i < serial.records.size(); ++i) {
      EXPECT_EQ(serial.records[i].p_hat, parallel.records[i].p_hat);
      EXPECT_EQ(serial.records[i].y_samples, parallel.records[i].y_samples);
      EXPECT_EQ(serial.records[i].y_samples, again.records[i].y_samples);
      EXPECT_EQ(serial.records[i].ks, again.records[i].ks);
    }
  }
}

TEST(SimulatePreservation, ExchangeabilityUnderSwap) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1, 1);
  TripleSignal t = zeros(2000);
  for (std::size_t k = 0; k < 2000; ++k) {
    t.x[k] = u(rng);
    t.y[k] = u(rng);
    t.z[k] = u(rng);
  }
  const auto noise = make_uniform(1.0);
  const auto cfg = config(3000, {2000});
  const auto a = simulate_preservation(t, noise, cfg).records.front();
  std::swap(t.y, t.z);
  const auto b = simulate_preservation(t, noise, cfg).records.front();
  EXPECT_NEAR(a.p_hat + b.p_hat, 1.0, 2.0 * (a.ci_half_width + b.ci_half_width));
}

TEST(SimulatePreservation, AgreesWithPrediction) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto noise = make_uniform(1.25);
  for (int trial = 0; trial < 8; ++trial) {
    TripleSignal t = zeros(2000);
    for (std::size_t k = 0; k < 2000; ++k) {
      t.x[k] = u(rng);
      t.y[k] = u(rng);
      t.z[k] = u(rng);
    }
    const auto r = simulate_preservation(t, noise, config(2000, {2000}, 500 + trial)).records.front();
    EXPECT_LE(std::abs(r.p_hat - *r.predicted), 3.0 * r.ci_half_width + 0.02);
  }
}

TEST(SimulatePreservation, RejectsBadConfig) {
  auto cfg = config(0, {10});
  EXPECT_THROW(simulate_preservation(zeros(10), make_uniform(1), cfg), InvalidParameter);
  cfg = config(10, {10, 5});
  EXPECT_THROW(simulate_preservation(zeros(10), make_uniform(1), cfg), InvalidParameter);
  cfg = config(10, {20});
  EXPECT_THROW(simulate_preservation(zeros(10), make_uniform(1), cfg), InvalidParameter);
}

TEST(StandardizedSamples, MomentsMatchClosedForm) {
  const auto noise = make_uniform(0.75);
  const std::size_t reps = 5000;
  for (auto kind : {BuiltinTriple::BoundedBounded, BuiltinTriple::UnboundedBounded,
                    BuiltinTriple::UnboundedUnbounded}) {
    const auto ys = standardized_samples(builtin_triple(kind, 10'000), noise, config(reps, {1000, 10'000}));
    for (const auto& y : ys) {
      ASSERT_EQ(y.size(), reps);
      EXPECT_LT(std::abs(mean(y)), 4.0 / std::sqrt(static_cast<double>(reps)));
      EXPECT_NEAR(variance(y), 1.0, 0.1);
    }
  }
}

TEST(StandardizedSamples, BruteForceMomentsOfSquaredDifference) {
  // Mean and variance of z(d) from raw replicates against the closed forms.
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1.5, 1.5);
  TripleSignal t = zeros(500);
  for (std::size_t k = 0; k < 500; ++k) {
    t.y[k] = u(rng);
    t.z[k] = u(rng);
  }
  const auto noise = make_gaussian(0.9);
  const SeedSpec seed{31};
  const int reps = 20'000;
  std::vector<double> z(reps);
  for (int r = 0; r < reps; ++r) {
    Stream sx = seed.stream(r, 0), sy = seed.stream(r, 1), sz = seed.stream(r, 2);
    double a2 = 0.0, b2 = 0.0;
    for (std::size_t k = 0; k < 500; ++k) {
      const double nx = noise.draw(sx), ny = noise.draw(sy), nz = noise.draw(sz);
      a2 += std::pow(nx - ny + t.x[k] - t.y[k], 2);
      b2 += std::pow(nx - nz + t.x[k] - t.z[k], 2);
    }
    z[r] = a2 - b2;
  }
  const auto s = triple_stats(t);
  const double sd = std::sqrt(squared_difference_variance(s, noise));
  EXPECT_NEAR(mean(z), -s.gap(), 4.0 * sd / std::sqrt(static_cast<double>(reps)));
  EXPECT_NEAR(variance(z) / (sd * sd), 1.0, 0.05);
}

TEST(StandardizedSamples, SymmetricForExchangeableTriple) {
  const auto ys = standardized_samples(zeros(10'000), make_uniform(0.75), config(5000, {10'000}));
  EXPECT_LE(std::abs(skewness(ys.front())), 0.1);
}

TEST(StandardizedSamples, NormalityAtHighDimension) {
  const auto noise = make_uniform(0.75);
  for (auto kind : {BuiltinTriple::BoundedBounded, BuiltinTriple::UnboundedBounded,
                    BuiltinTriple::UnboundedUnbounded}) {
    const auto r = simulate_preservation(builtin_triple(kind, 10'000), noise, config(5000, {10'000}));
    EXPECT_LE(*r.records.front().ks, 0.03);
    EXPECT_GE(*r.records.front().qq, 0.998);
  }
}

TEST(StandardizedSamples, ZeroNoiseRejected) {
  EXPECT_THROW(standardized_samples(zeros(5), NoiseSpec::zero(), config(10, {5})), DomainError);
}

TEST(RelativeContrast, NoiselessLine) {
  const std::vector<std::vector<double>> pts{{0.0}, {1.0}, {2.0}};
  const auto rc = relative_contrast_samples(pts, NoiseSpec::zero(), config(5, {}));
  ASSERT_EQ(rc.size(), 1u);
  ASSERT_EQ(rc.front().size(), 5u);
  for (double v : rc.front()) EXPECT_DOUBLE_EQ(v, 1.0);
  const std::vector<std::vector<double>> dup{{0.0}, {0.0}, {2.0}};
  EXPECT_THROW(relative_contrast_samples(dup, NoiseSpec::zero(), config(5, {})), DomainError);
}

TEST(RelativeContrast, ConcentratesForFiniteAlphaOnly) {
  const auto noise = make_uniform(1.25);
  const auto cfg = config(2000, {100, 1000, 10'000});
  auto as_points = [](const TripleSignal& t) { return std::vector<std::vector<double>>{t.x, t.y, t.z}; };
  const auto three = relative_contrast_samples(as_points(growth_triple(GrowthRate::of(3.0), 10'000)), noise, cfg);
  EXPECT_LT(mean(three[2]), mean(three[0]));
  const auto inf = relative_contrast_samples(as_points(growth_triple(GrowthRate::infinite(), 10'000)), noise, cfg);
  EXPECT_GE(mean(inf[2]), 0.05);
}

TEST(NoiseDistance, MatchesSecondMoment) {
  const auto noise = make_uniform(1.25);
  const double m = empirical_noise_distance(noise, 10'000, config(5000, {}));
  const double target = std::sqrt(expected_noise_sq_distance(noise, 10'000));
  EXPECT_NEAR(target, 102.06207261596575, 1e-9);
  EXPECT_NEAR(m, target, 0.01 * target);
  EXPECT_EQ(m, empirical_noise_distance(noise, 10'000, config(5000, {})));
}

TEST(NoiseDistance, FoldedNormalAtDimensionOne) {
  // |n1 - n2| with n ~ N(0,1) is half-normal with scale sqrt(2): mean 2 / sqrt(pi)
  const double m = empirical_noise_distance(make_gaussian(1.0), 1, config(200'000, {}));
  EXPECT_NEAR(m, 1.1283791670955126, 0.01);
}
