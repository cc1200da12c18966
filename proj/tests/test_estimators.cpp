#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dmm/distributions.hpp"
#include "dmm/error.hpp"
#include "dmm/estimators.hpp"
#include "dmm/hermite.hpp"
#include "dmm/metrics.hpp"
#include "dmm/moment_space.hpp"
#include "oracles.hpp"

namespace dmm {
namespace {

EstimatorConfig known(int k, double sigma2, std::optional<Interval> iv = std::nullopt) {
  EstimatorConfig c;
  c.k = k;
  c.sigma2 = sigma2;
  c.interval = iv;
  return c;
}

EstimatorConfig unknown(int k) {
  EstimatorConfig c;
  c.k = k;
  return c;
}

TEST(DmmKnownVariance, NoiselessRecovery) {
  const DiscreteDistribution nu({-0.5, 0.7}, {0.4, 0.6});
  const auto xs = sample(GaussianMixture(nu, 0.0), 1000000, 1);
  const auto rep = dmm_known_variance(xs, known(2, 0.0, Interval(-1.0, 1.0)));
  EXPECT_LE(wasserstein1(rep.model.mixing(), nu), 0.01);
  EXPECT_EQ(rep.model.sigma2(), 0.0);
}

TEST(DmmKnownVariance, WellSeparatedMixture) {
  const DiscreteDistribution nu({-2.0, 2.0}, {0.5, 0.5});
  const auto xs = sample(GaussianMixture(nu, 1.0), 20000, 2);
  const auto rep = dmm_known_variance(xs, known(2, 1.0));
  EXPECT_EQ(rep.model.mixing().size(), 2u);
  EXPECT_LE(wasserstein1(rep.model.mixing(), nu), 0.1);
  for (double a : rep.model.mixing().atoms()) {
    EXPECT_TRUE(a >= -2.0 - 1.0 || a <= 2.0 + 1.0);
  }
}

TEST(DmmKnownVariance, AlwaysReturnsAModel) {
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> kd(1, 5);
  for (int t = 0; t < 300; ++t) {
    const int k = kd(rng);
    const std::size_t n = 1 + t % 40;
    const auto xs = sample(GaussianMixture(testing::random_distribution(rng, 2, -1.0, 1.0, 0.0, 0.0), 1.0), n,
                           100 + t);
    const auto rep = dmm_known_variance(xs, known(k, 1.0));
    EXPECT_LE(rep.model.mixing().size(), static_cast<std::size_t>(k));
    EXPECT_GE(rep.projection_distance, 0.0);
  }
}

TEST(DmmKnownVariance, AtomsStayInsideInterval) {
  std::mt19937_64 rng(4);
  for (int t = 0; t < 100; ++t) {
    const auto xs = sample(GaussianMixture(DiscreteDistribution::point_mass(0.0), 1.0), 100, 200 + t);
    const Interval iv(-0.5, 0.8);
    const auto rep = dmm_known_variance(xs, known(3, 1.0, iv));
    for (double a : rep.model.mixing().atoms()) EXPECT_TRUE(iv.contains(a));
  }
}

TEST(DmmKnownVariance, NaiveInversionFailsWhereDmmSucceeds) {
  int failures = 0;
  for (int t = 0; t < 200; ++t) {
    const auto xs = sample(GaussianMixture(DiscreteDistribution::point_mass(0.0), 1.0), 100, 300 + t);
    try {
      naive_method_of_moments(xs, 2, 1.0);
    } catch (const DiagnosticError&) {
      ++failures;
    }
    EXPECT_NO_THROW(dmm_known_variance(xs, known(2, 1.0)));
  }
  EXPECT_GT(failures, 50);
  EXPECT_LT(failures, 150);
}

TEST(DmmKnownVariance, NaiveInversionMatchesDmmWhenUnconstrained) {
  const DiscreteDistribution nu({-2.0, 2.0}, {0.3, 0.7});
  const auto xs = sample(GaussianMixture(nu, 1.0), 50000, 5);
  const auto naive = naive_method_of_moments(xs, 2, 1.0);
  EXPECT_LE(wasserstein1(naive, nu), 0.1);
}

TEST(DmmKnownVariance, ShiftEquivariance) {
  const auto xs = sample(GaussianMixture(DiscreteDistribution({-1.0, 0.5}, {0.3, 0.7}), 1.0), 500, 6);
  const Interval iv(-3.0, 3.0);
  const double c = 4.25;
  std::vector<double> shifted(xs);
  for (double& x : shifted) x += c;
  const auto a = dmm_known_variance(xs, known(2, 1.0, iv));
  const auto b = dmm_known_variance(shifted, known(2, 1.0, Interval(iv.lo + c, iv.hi + c)));
  ASSERT_EQ(a.model.mixing().size(), b.model.mixing().size());
  for (std::size_t i = 0; i < a.model.mixing().size(); ++i) {
    EXPECT_NEAR(b.model.mixing().atoms()[i], a.model.mixing().atoms()[i] + c, 1e-9);
    EXPECT_NEAR(b.model.mixing().weights()[i], a.model.mixing().weights()[i], 1e-9);
  }
}

TEST(DmmKnownVariance, MedianOfBatchesMode) {
  const DiscreteDistribution nu({-1.0, 1.0}, {0.5, 0.5});
  const auto xs = sample(GaussianMixture(nu, 1.0), 20000, 7);
  auto cfg = known(2, 1.0, Interval(-2.0, 2.0));
  cfg.high_prob_delta = 0.05;
  const auto rep = dmm_known_variance(xs, cfg);
  EXPECT_LE(wasserstein1(rep.model.mixing(), nu), 0.3);
  bool noted = false;
  for (const auto& d : rep.diagnostics) noted = noted || d.find("median of 5 batches") != std::string::npos;
  EXPECT_TRUE(noted);
}

TEST(DmmKnownVariance, Preconditions) {
  const std::vector<double> xs{1.0, 2.0};
  EXPECT_THROW(dmm_known_variance(xs, unknown(2)), PreconditionError);
  EXPECT_THROW(dmm_known_variance({}, known(2, 1.0)), InsufficientSamplesError);
  EXPECT_THROW(dmm_known_variance(std::vector<double>{NAN}, known(1, 1.0)), PreconditionError);
}

TEST(DmmKnownVariance, ReportJson) {
  const auto xs = sample(GaussianMixture(DiscreteDistribution::point_mass(0.0), 1.0), 100, 8);
  const auto json = to_json(dmm_known_variance(xs, known(1, 1.0)));
  for (const char* key : {"\"model\"", "\"projection_distance\"", "\"detected_order\"", "\"wallclock_ms\"",
                          "\"diagnostics\"", "\"sigma_root_bracket\""}) {
    EXPECT_NE(json.find(key), std::string::npos) << key;
  }
}

TEST(AdvisoryBound, LargeKWarns) {
  EXPECT_FALSE(k_exceeds_advisory_bound(2, 10000));
  EXPECT_TRUE(k_exceeds_advisory_bound(12, 1000));
}

TEST(SmallestPositiveRoot, Examples) {
  const auto a = smallest_positive_root([](double s) { return 1.0 - s * s; }, 2.0, 1e-12);
  EXPECT_NEAR(a.root, 1.0, 1e-10);
  const auto b = smallest_positive_root([](double s) { return (s * s - 0.25) * (s * s - 1.0); }, 2.0, 1e-12);
  EXPECT_NEAR(b.root, 0.5, 1e-10);
  EXPECT_LE(b.bracket.first, b.root);
  EXPECT_GE(b.bracket.second, b.root);
  EXPECT_THROW(smallest_positive_root([](double s) { return s - 1.0; }, 2.0, 1e-12), DiagnosticError);
  EXPECT_THROW(smallest_positive_root([](double s) { return 1.0 + s; }, 2.0, 1e-12), DiagnosticError);
}

TEST(SmallestPositiveRoot, FindsRootNearZero) {
  const auto r = smallest_positive_root([](double s) { return 1e-4 - s; }, 1.0, 1e-14);
  EXPECT_NEAR(r.root, 1e-4, 1e-12);
}

TEST(Lindsay, SingleComponentIsSampleMeanAndVariance) {
  const auto xs = sample(GaussianMixture(DiscreteDistribution::point_mass(0.3), 2.0), 1000, 9);
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= xs.size();
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= xs.size();
  const auto rep = lindsay_unknown_variance(xs, unknown(1));
  ASSERT_EQ(rep.model.mixing().size(), 1u);
  EXPECT_NEAR(rep.model.mixing().atoms()[0], mean, 1e-9);
  EXPECT_NEAR(rep.model.sigma2(), var, 1e-8 * var);
  ASSERT_TRUE(rep.sigma_root_bracket);
}

TEST(Lindsay, CounterexampleIsDiagnosed) {
  const double s7 = std::sqrt(7.0);
  const std::vector<double> xs{-s7, s7, 0, 0, 0, 0, 0};
  EXPECT_THROW(lindsay_unknown_variance(xs, unknown(2)), DiagnosticError);
}

TEST(Lindsay, StandardNormalVarianceRoot) {
  const auto xs = sample(GaussianMixture(DiscreteDistribution::point_mass(0.0), 1.0), 1000000, 10);
  const auto rep = lindsay_unknown_variance(xs, unknown(2));
  EXPECT_NEAR(std::sqrt(rep.model.sigma2()), 1.0, 0.05);
}

TEST(Lindsay, TwoComponentPilot) {
  const DiscreteDistribution nu({-0.5, 0.5}, {0.5, 0.5});
  const auto xs = sample(GaussianMixture(nu, 0.25), 100000, 11);
  const auto rep = lindsay_unknown_variance(xs, unknown(2));
  EXPECT_LE(std::abs(rep.model.sigma2() - 0.25), 0.1);
  EXPECT_LE(wasserstein1(rep.model.mixing(), nu), 0.2);
}

TEST(Lindsay, ScaleAndShiftEquivariance) {
  const auto xs = sample(GaussianMixture(DiscreteDistribution({-1.0, 1.0}, {0.4, 0.6}), 0.5), 2000, 12);
  const double lambda = 3.5;
  const double c = -2.0;
  std::vector<double> ys(xs);
  for (double& y : ys) y = lambda * y + c;
  const auto a = lindsay_unknown_variance(xs, unknown(2));
  const auto b = lindsay_unknown_variance(ys, unknown(2));
  EXPECT_NEAR(b.model.sigma2(), lambda * lambda * a.model.sigma2(), 1e-8 * b.model.sigma2());
  ASSERT_EQ(a.model.mixing().size(), b.model.mixing().size());
  for (std::size_t i = 0; i < a.model.mixing().size(); ++i) {
    EXPECT_NEAR(b.model.mixing().atoms()[i], lambda * a.model.mixing().atoms()[i] + c, 1e-8);
  }
}

TEST(Lindsay, ConstantDataIsPointMass) {
  const std::vector<double> xs(10, 2.5);
  const auto rep = lindsay_unknown_variance(xs, unknown(2));
  EXPECT_EQ(rep.model.mixing(), DiscreteDistribution::point_mass(2.5));
  EXPECT_EQ(rep.model.sigma2(), 0.0);
}

TEST(Lindsay, OverfittedOrderSolvesMomentEquations) {
  // Fitting k = 3 to one Gaussian often puts a tiny-weight atom far outside
  // the data hull; the default interval must stretch to hold it.
  for (std::uint64_t seed = 0; seed < 120; ++seed) {
    const auto xs = sample(GaussianMixture(DiscreteDistribution::point_mass(0.0), 1.0), 2000, seed);
    EXPECT_NO_THROW(lindsay_unknown_variance(xs, unknown(3))) << "seed " << seed;
  }
}

TEST(Lindsay, Preconditions) {
  EXPECT_THROW(lindsay_unknown_variance(std::vector<double>{1.0, 2.0}, unknown(2)), InsufficientSamplesError);
}

TEST(Lindsay, ScreeningLowersOrder) {
  const GaussianMixture model(
      DiscreteDistribution({-0.236, -0.168, -0.987, 0.299, 0.150}, {0.123, 0.552, 0.010, 0.080, 0.235}), 1.0);
  const auto xs = sample(model, 5000, 13);
  auto cfg = unknown(5);
  cfg.screening_tau = kExperimentScreeningTau;
  const auto rep = lindsay_unknown_variance(xs, cfg);
  EXPECT_LT(rep.model.mixing().size(), 5u);
}

TEST(DensityEstimate, Examples) {
  EstimationReport rep;
  rep.model = GaussianMixture(DiscreteDistribution::point_mass(0.0), 1.0);
  EXPECT_NEAR(density_estimate(rep, 0.0), 0.398942, 1e-6);

  rep.model = GaussianMixture(DiscreteDistribution({-0.7, 1.2}, {0.35, 0.65}), 0.6);
  const double lo = -0.7 - 10.0;
  const double hi = 1.2 + 10.0;
  const int panels = 20000;
  const double h = (hi - lo) / panels;
  double total = density_estimate(rep, lo) + density_estimate(rep, hi);
  for (int i = 1; i < panels; ++i) total += (i % 2 ? 4.0 : 2.0) * density_estimate(rep, lo + i * h);
  EXPECT_NEAR(total * h / 3.0, 1.0, 1e-6);

  rep.model = GaussianMixture(DiscreteDistribution::point_mass(0.0), 0.0);
  EXPECT_THROW(density_estimate(rep, 0.0), Error);
}

TEST(Unbounded, MergeIntervalsExample) {
  const auto iv = merge_intervals(std::vector<double>{10.0, 0.0, 1.5}, 1.0);
  ASSERT_EQ(iv.size(), 2u);
  EXPECT_DOUBLE_EQ(iv[0].center - iv[0].half_length, -1.0);
  EXPECT_DOUBLE_EQ(iv[0].center + iv[0].half_length, 2.5);
  EXPECT_DOUBLE_EQ(iv[1].center - iv[1].half_length, 9.0);
  EXPECT_DOUBLE_EQ(iv[1].center + iv[1].half_length, 11.0);
}

TEST(Unbounded, MergedIntervalsAreDisjointAndCoverSeeds) {
  std::mt19937_64 rng(14);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> seeds(1 + t % 30);
    for (double& s : seeds) s = u(rng);
    const double L = 0.5 + 0.1 * (t % 10);
    const auto iv = merge_intervals(seeds, L);
    for (std::size_t i = 1; i < iv.size(); ++i) {
      EXPECT_GT(iv[i].center - iv[i].half_length, iv[i - 1].center + iv[i - 1].half_length);
    }
    for (double s : seeds) {
      bool covered = false;
      for (const auto& c : iv) {
        covered = covered || (s - L >= c.center - c.half_length - 1e-12 && s + L <= c.center + c.half_length + 1e-12);
      }
      EXPECT_TRUE(covered);
    }
  }
}

TEST(Unbounded, SingleClusterReducesToBaseEstimator) {
  const auto xs = sample(GaussianMixture(DiscreteDistribution({-0.5, 0.5}, {0.5, 0.5}), 1.0), 4000, 15);
  UnboundedConfig uc;
  uc.L = 100.0;
  uc.tau = 0.0;
  uc.n_prime = 100;
  const auto r = estimate_unbounded(xs, known(2, 1.0), uc);
  ASSERT_EQ(r.intervals.size(), 1u);
  ASSERT_TRUE(r.reports[0]);
  const double c = r.intervals[0].center;
  const double h = r.intervals[0].half_length;
  const std::vector<double> rest(xs.begin() + 100, xs.end());
  const auto base = dmm_known_variance(rest, known(2, 1.0, Interval(c - h, c + h)));
  ASSERT_EQ(r.means.size(), base.model.mixing().size());
  for (std::size_t i = 0; i < r.means.size(); ++i) EXPECT_NEAR(r.means[i], base.model.mixing().atoms()[i], 1e-8);
}

TEST(Unbounded, EmptyIntervalSkippedWithNote) {
  auto xs = sample(GaussianMixture(DiscreteDistribution::point_mass(0.0), 1.0), 400, 16);
  xs[0] = 1000.0;
  UnboundedConfig uc;
  uc.L = 5.0;
  uc.tau = 0.1;
  uc.n_prime = 50;
  const auto r = estimate_unbounded(xs, known(1, 1.0), uc);
  ASSERT_EQ(r.intervals.size(), 2u);
  EXPECT_FALSE(r.reports[1]);
  ASSERT_FALSE(r.notes.empty());
  EXPECT_NE(r.notes[0].find("no samples"), std::string::npos);
  ASSERT_EQ(r.means.size(), 1u);
  EXPECT_NEAR(r.means[0], 0.0, 0.2);
}

TEST(Unbounded, ThreeFarClusters) {
  const DiscreteDistribution nu({-10.0, 0.0, 10.0}, {1.0 / 3, 1.0 / 3, 1.0 / 3});
  const std::size_t n = 30000;
  const auto xs = sample(GaussianMixture(nu, 1.0), n, 17);
  const auto uc = default_unbounded_config(n, 3, 1.0 / 3.0, 0.05);
  EXPECT_NEAR(uc.L, std::sqrt(6.0 * std::log(double(n))), 1e-12);
  EXPECT_NEAR(uc.tau, 1.0 / 18.0, 1e-15);
  const auto r = estimate_unbounded(xs, known(3, 1.0), uc);
  EXPECT_LE(hausdorff(r.means, nu.atoms()), 0.3);
}

TEST(Unbounded, Preconditions) {
  const std::vector<double> xs(10, 0.0);
  UnboundedConfig uc;
  uc.n_prime = 6;
  EXPECT_THROW(estimate_unbounded(xs, known(1, 1.0), uc), InsufficientSamplesError);
}

TEST(DDim, OneDimensionReducesToDmm) {
  const auto xs = sample(GaussianMixture(DiscreteDistribution({-0.6, 0.4}, {0.45, 0.55}), 0.5), 50000, 18);
  Eigen::MatrixXd samples(xs.size(), 1);
  for (std::size_t i = 0; i < xs.size(); ++i) samples(i, 0) = xs[i];
  DDimConfig dc;
  dc.tau = 0.1;
  dc.rho = 1.0;
  dc.seed = 3;
  const auto r = estimate_d_dimensional(samples, Eigen::MatrixXd::Constant(1, 1, 0.5), known(2, 0.5), dc);

  const double sign = r.basis(0, 0);
  std::vector<double> projected(xs);
  for (double& x : projected) x *= sign;
  const auto base = dmm_known_variance(projected, known(2, 0.5, Interval(-1.0, 1.0)));
  EXPECT_EQ(r.weights, std::vector<double>(base.model.mixing().weights().begin(), base.model.mixing().weights().end()));

  const auto direct = dmm_known_variance(xs, known(2, 0.5, Interval(-1.0, 1.0)));
  std::vector<double> got;
  for (const auto& m : r.means) got.push_back(m(0));
  std::sort(got.begin(), got.end());
  ASSERT_EQ(got.size(), direct.model.mixing().size());
  for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], direct.model.mixing().atoms()[i], 1e-6);
}

TEST(DDim, DefaultConfig) {
  const auto dc = default_ddim_config(2.0, 0.1, 0.5, 2, 4, 1);
  EXPECT_NEAR(dc.tau, (0.5 * 0.1 / (4.0 * 2.0)) / 4.0, 1e-15);
  EXPECT_EQ(dc.rho, 2.0);
}

TEST(DDim, RejectsBadCovariance) {
  Eigen::MatrixXd samples = Eigen::MatrixXd::Zero(10, 2);
  Eigen::MatrixXd cov(2, 2);
  cov << 1, 2, 2, 1;
  EXPECT_THROW(estimate_d_dimensional(samples, cov, known(1, 1.0), {}), PreconditionError);
  EXPECT_THROW(estimate_d_dimensional(samples, Eigen::MatrixXd::Identity(3, 3), known(1, 1.0), {}),
               PreconditionError);
}

}  // namespace
}  // namespace dmm
