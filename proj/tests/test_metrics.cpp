#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dmm/distributions.hpp"
#include "dmm/error.hpp"
#include "dmm/metrics.hpp"
#include "oracles.hpp"

namespace dmm {
namespace {

TEST(Wasserstein1, Examples) {
  EXPECT_DOUBLE_EQ(wasserstein1(DiscreteDistribution::point_mass(0.0), DiscreteDistribution::point_mass(1.0)), 1.0);
  EXPECT_DOUBLE_EQ(wasserstein1(DiscreteDistribution({-1.0, 1.0}, {0.5, 0.5}),
                                DiscreteDistribution({-2.0, 2.0}, {0.5, 0.5})),
                   1.0);
  const DiscreteDistribution p({-1.0, 1.0 / 3.0}, {0.25, 0.75});
  const DiscreteDistribution q({-1.0 / 3.0, 1.0}, {0.75, 0.25});
  // CDF gaps 1/4, 1/2, 1/4 over three intervals of length 2/3.
  EXPECT_NEAR(wasserstein1(p, q), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(testing::w1_quantile_coupling(p, q), 2.0 / 3.0, 1e-15);
}

TEST(Wasserstein1, MetricAxiomsAndCouplingOracle) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 1000; ++t) {
    const auto p = testing::random_distribution(rng, 1 + t % 5, -2.0, 2.0, 0.0, 0.0);
    const auto q = testing::random_distribution(rng, 1 + (t / 5) % 5, -2.0, 2.0, 0.0, 0.0);
    const auto r = testing::random_distribution(rng, 1 + (t / 25) % 5, -2.0, 2.0, 0.0, 0.0);
    const double pq = wasserstein1(p, q);
    EXPECT_EQ(pq, wasserstein1(q, p));
    EXPECT_EQ(wasserstein1(p, p), 0.0);
    EXPECT_GT(pq, 0.0);
    EXPECT_LE(pq, wasserstein1(p, r) + wasserstein1(r, q) + 1e-12);
    EXPECT_NEAR(pq, testing::w1_quantile_coupling(p, q), 1e-12);
  }
}

TEST(Wasserstein1, ProkhorovBound) {
  // nu(x) - nu'([x - delta, x + delta]) <= W1 / delta at every atom x of nu.
  std::mt19937_64 rng(2);
  for (int t = 0; t < 1000; ++t) {
    const auto p = testing::random_distribution(rng, 1 + t % 4, -1.0, 1.0, 0.0, 0.0);
    const auto q = testing::random_distribution(rng, 1 + (t / 4) % 4, -1.0, 1.0, 0.0, 0.0);
    const double w = wasserstein1(p, q);
    for (double delta : {0.1, 0.5}) {
      for (std::size_t i = 0; i < p.size(); ++i) {
        double near = 0.0;
        for (std::size_t j = 0; j < q.size(); ++j) {
          if (std::abs(q.atoms()[j] - p.atoms()[i]) <= delta) near += q.weights()[j];
        }
        EXPECT_LE(p.weights()[i] - near, w / delta + 1e-12);
      }
    }
  }
}

TEST(Wasserstein1, HausdorffLowerBoundsForFullSupport) {
  // Every atom of either law has weight >= eps2 => Hausdorff <= W1 / eps2.
  std::mt19937_64 rng(3);
  for (int t = 0; t < 500; ++t) {
    const auto p = testing::random_distribution(rng, 3, -1.0, 1.0, 0.0, 0.1);
    const auto q = testing::random_distribution(rng, 2, -1.0, 1.0, 0.0, 0.1);
    double eps2 = 1.0;
    for (double w : p.weights()) eps2 = std::min(eps2, w);
    for (double w : q.weights()) eps2 = std::min(eps2, w);
    EXPECT_LE(hausdorff(p.atoms(), q.atoms()), wasserstein1(p, q) / eps2 + 1e-12);
  }
}

TEST(Hausdorff, Examples) {
  const std::vector<double> s{0.0, 10.0};
  EXPECT_EQ(hausdorff(s, s), 0.0);
  EXPECT_EQ(hausdorff(std::vector<double>{0.0}, std::vector<double>{1.0, 2.0}), 2.0);
  EXPECT_NEAR(hausdorff(s, std::vector<double>{0.3, 9.6}), 0.4, 1e-12);
  EXPECT_THROW(hausdorff(std::vector<double>{}, s), PreconditionError);
}

TEST(MatchedParameterError, Examples) {
  const DiscreteDistribution nu({0.0, 1.0}, {0.5, 0.5});
  const auto same = matched_parameter_error(nu, nu);
  EXPECT_EQ(same.mean_error, 0.0);
  EXPECT_EQ(same.weight_error, 0.0);
  EXPECT_EQ(same.permutation, (std::vector<std::size_t>{0, 1}));

  const DiscreteDistribution est({1.01, 0.02}, {0.5, 0.5});
  EXPECT_NEAR(matched_parameter_error(nu, est).mean_error, 0.02, 1e-12);
  EXPECT_THROW(matched_parameter_error(nu, DiscreteDistribution::point_mass(0.0)), PreconditionError);
}

TEST(MatchedParameterError, BoundedByW1OverMinWeightAndGap) {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> jitter(0.0, 0.01);
  int held = 0;
  for (int t = 0; t < 1000; ++t) {
    const int k = 1 + t % 4;
    const auto nu = testing::random_distribution(rng, k, -1.0, 1.0, 0.2, 0.1);
    std::vector<double> a(nu.atoms().begin(), nu.atoms().end());
    std::vector<double> w(nu.weights().begin(), nu.weights().end());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] += jitter(rng);
      w[i] = std::max(1e-3, w[i] + jitter(rng));
      s += w[i];
    }
    for (double& x : w) x /= s;
    const auto r = matched_parameter_error(nu, DiscreteDistribution(a, w));
    if (!r.hypothesis_held) continue;
    ++held;
    EXPECT_LE(r.mean_error, r.w1 / r.min_weight * (1.0 + 1e-12));
    EXPECT_LE(r.weight_error, 2.0 * r.w1 / r.min_separation * (1.0 + 1e-12));
  }
  EXPECT_GT(held, 500);
}

TEST(MomentMatchedPair, Examples) {
  const auto [nu, nup] = moment_matched_pair(std::vector<double>{-1.0, -1.0 / 3.0, 1.0 / 3.0, 1.0});
  ASSERT_EQ(nu.size(), 2u);
  ASSERT_EQ(nup.size(), 2u);
  EXPECT_NEAR(nu.atoms()[0], -1.0, 1e-15);
  EXPECT_NEAR(nu.atoms()[1], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(nu.weights()[0], 0.25, 1e-12);
  EXPECT_NEAR(nup.atoms()[0], -1.0 / 3.0, 1e-15);
  EXPECT_NEAR(nup.weights()[0], 0.75, 1e-12);
  const auto m = testing::moments_direct(nu, 3);
  const auto mp = testing::moments_direct(nup, 3);
  EXPECT_NEAR(m[0], 0.0, 1e-12);
  EXPECT_NEAR(mp[0], 0.0, 1e-12);
  EXPECT_NEAR(m[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(mp[1], 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(m[2], -2.0 / 9.0, 1e-12);
  EXPECT_NEAR(mp[2], 2.0 / 9.0, 1e-12);

  const auto [d0, d1] = moment_matched_pair(std::vector<double>{0.0, 1.0});
  EXPECT_EQ(d0, DiscreteDistribution::point_mass(0.0));
  EXPECT_EQ(d1, DiscreteDistribution::point_mass(1.0));
}

TEST(MomentMatchedPair, RandomPointsAgreeOnLowMoments) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (int t = 0; t < 1000; ++t) {
    const int k = 1 + t % 4;
    std::vector<double> pts;
    while (static_cast<int>(pts.size()) < 2 * k) {
      const double x = u(rng);
      bool ok = true;
      for (double p : pts) ok = ok && std::abs(p - x) > 0.1;
      if (ok) pts.push_back(x);
    }
    std::sort(pts.begin(), pts.end());
    const auto [nu, nup] = moment_matched_pair(pts);
    const auto d = moment_distance(testing::moments_direct(nu, 2 * k - 2), testing::moments_direct(nup, 2 * k - 2));
    EXPECT_LE(d.linf, 1e-10);
    EXPECT_GT(wasserstein1(nu, nup), 0.0);
  }
}

TEST(MomentMatchedPair, RejectsDegeneratePoints) {
  EXPECT_THROW(moment_matched_pair(std::vector<double>{0.0, 1e-14, 0.5, 1.0}), Error);
  EXPECT_THROW(moment_matched_pair(std::vector<double>{0.0, 1.0, 2.0}), PreconditionError);
}

TEST(TotalVariation, Examples) {
  const GaussianMixture f(DiscreteDistribution::point_mass(0.0), 1.0);
  const GaussianMixture g(DiscreteDistribution::point_mass(1.0), 1.0);
  EXPECT_NEAR(total_variation(f, f), 0.0, 1e-6);
  EXPECT_NEAR(total_variation(f, g), 2.0 * testing::normal_cdf(0.5) - 1.0, 1e-6);
}

TEST(TotalVariation, SymmetricAndBounded) {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 50; ++t) {
    const GaussianMixture f(testing::random_distribution(rng, 2, -2.0, 2.0, 0.0, 0.0), 0.5);
    const GaussianMixture g(testing::random_distribution(rng, 3, -2.0, 2.0, 0.0, 0.0), 0.8);
    const double a = total_variation(f, g);
    EXPECT_NEAR(a, total_variation(g, f), 2e-6);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0 + 1e-6);
  }
}

TEST(MomentDistance, Examples) {
  const std::vector<double> a{0.0, 1.0, 0.0};
  const auto same = moment_distance(a, a);
  EXPECT_EQ(same.linf, 0.0);
  EXPECT_EQ(same.l2, 0.0);
  const auto d = moment_distance(a, std::vector<double>{0.0, 1.0, 0.1});
  EXPECT_NEAR(d.linf, 0.1, 1e-15);
  EXPECT_NEAR(d.l2, 0.1, 1e-15);
  EXPECT_THROW(moment_distance(a, std::vector<double>{0.0}), PreconditionError);
}

TEST(MomentComparison, W1EnvelopeFromMomentDistance) {
  // W1 <= C k delta^{1/(2k-1)} with C = 50 on random k-atomic pairs.
  std::mt19937_64 rng(7);
  for (int t = 0; t < 1000; ++t) {
    const int k = 1 + t % 4;
    const auto p = testing::random_distribution(rng, k, -1.0, 1.0, 0.0, 0.0);
    const auto q = testing::random_distribution(rng, k, -1.0, 1.0, 0.0, 0.0);
    const double delta =
        moment_distance(testing::moments_direct(p, 2 * k - 1), testing::moments_direct(q, 2 * k - 1)).linf;
    EXPECT_LE(wasserstein1(p, q), 50.0 * k * std::pow(delta, 1.0 / (2 * k - 1)));
  }
}

}  // namespace
}  // namespace dmm
