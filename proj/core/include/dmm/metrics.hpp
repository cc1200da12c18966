#pragma once

#include <span>
#include <utility>
#include <vector>

#include "dmm/distributions.hpp"

namespace dmm {

/// W1 between discrete distributions as the L1 distance of the CDFs,
/// summed exactly over the merged atom grid.
double wasserstein1(const DiscreteDistribution& p, const DiscreteDistribution& q);

/// Hausdorff distance between non-empty finite point sets.
double hausdorff(std::span<const double> s, std::span<const double> t);

struct MatchedParameterError {
  double mean_error = 0.0;    ///< max_i |mu_i - mu-hat_pi(i)|
  double weight_error = 0.0;  ///< max_i |w_i - w-hat_pi(i)|
  std::vector<std::size_t> permutation;  ///< truth index i -> estimate index
  double w1 = 0.0;
  double min_separation = 0.0;  ///< eps_1: smallest gap within either support
  double min_weight = 0.0;      ///< eps_2: smallest weight of either
  /// Whether W1 < eps_1 eps_2 / 4, under which the mean error is below
  /// W1 / eps_2 and the weight error below 2 W1 / eps_1.
  bool hypothesis_held = false;
};

/// Sorted-order matching of two distributions with the same atom count.
MatchedParameterError matched_parameter_error(const DiscreteDistribution& truth,
                                              const DiscreteDistribution& estimate);

/// Two distributions on alternating points of 2k sorted distinct points with
/// identical first 2k-2 moments, from the null space of the
/// (2k-1) x 2k Vandermonde matrix (full-pivot LU). Rejects point sets whose
/// square 2k x 2k Vandermonde matrix has condition number above 1e12.
std::pair<DiscreteDistribution, DiscreteDistribution> moment_matched_pair(
    std::span<const double> points);

/// 0.5 * integral |f - g| by adaptive Simpson quadrature on
/// [min atom - 10 sigma, max atom + 10 sigma] with absolute error <= tol.
double total_variation(const GaussianMixture& f, const GaussianMixture& g, double tol = 1e-6);

struct MomentDistance {
  double linf = 0.0;
  double l2 = 0.0;
};

MomentDistance moment_distance(std::span<const double> m, std::span<const double> mp);

}  // namespace dmm
