#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dmm/distributions.hpp"
#include "dmm/estimators.hpp"

namespace dmm {

struct EMConfig {
  int k = 1;
  int max_iterations = 5000;
  double loglik_tolerance = 1e-3;  ///< absolute log-likelihood increase
  int restarts = 5;
  std::uint64_t seed = 0;
};

struct EMResult {
  EstimationReport report;
  std::vector<std::vector<double>> loglik_traces;  ///< one per completed restart
  int best_restart = 0;
  int underflow_restarts = 0;
};

/// Best-of-restarts EM for a k-component location mixture with a common
/// variance. Means start uniform over the sample range and weights from a
/// flat Dirichlet. If sigma2 is absent it is re-estimated in every M-step.
EMResult em_fit(std::span<const double> samples, const EMConfig& config,
                std::optional<double> sigma2 = std::nullopt);

/// sum_i log density(model, x_i), log-sum-exp stabilized.
double loglik(std::span<const double> samples, const GaussianMixture& model);

}  // namespace dmm
