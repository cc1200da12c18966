#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace dmm {

/// Probabilists' Hermite polynomial He_r(x) by the three-term recurrence
/// He_{r+1} = x He_r - r He_{r-1}. E[He_r(X)] = mu^r for X ~ N(mu, 1).
double hermite(int r, double x);

/// gamma_r(x, sigma) = sigma^r He_r(x / sigma), the unbiased one-sample
/// estimate of mu^r under N(mu, sigma^2). Equals x^r at sigma = 0.
double gamma_r(int r, double x, double sigma);

/// Fills out[r-1] = gamma_r(x, sigma) for r = 1..out.size().
void gamma_all(double x, double sigma, std::span<double> out);

/// Deconvolved moment estimates with plug-in variances.
struct MomentEstimate {
  std::vector<double> values;              ///< m~_1 .. m~_L
  std::vector<double> per_order_variance;  ///< Var-hat[m~_r] = sample var of gamma_r / n
  std::size_t n = 0;
};

/// m~_r = mean of gamma_r(X_i, sigma), r = 1..L.
MomentEstimate estimate_mixing_moments(std::span<const double> samples, int L, double sigma);

/// Per-order median over T contiguous disjoint batches of the batch estimates.
/// Throws InsufficientSamplesError if samples.size() < T. The variances reported
/// are the full-sample plug-in variances.
MomentEstimate median_of_batches(std::span<const double> samples, int L, double sigma, int T);

/// ceil(log(2k / delta)), at least 1.
int default_batch_count(int k, double delta);

/// Largest k~ in [1, k_max] such that every order j <= 2k~ has plug-in
/// variance <= tau. Requires estimates up to order 2 k_max.
int screen_order(const MomentEstimate& estimate, int k_max, double tau);

/// Threshold used in the five-component unknown-variance experiment. Only
/// meaningful at that data scale.
inline constexpr double kExperimentScreeningTau = 0.5;

}  // namespace dmm
