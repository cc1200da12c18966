#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "dmm/distributions.hpp"
#include "dmm/moment_space.hpp"
#include "dmm/quadrature.hpp"

namespace dmm {

struct Tolerances {
  double projection = 1e-8;
  double rank = 1e-10;
  /// Root bracket width for the variance search, relative to the sample
  /// standard deviation.
  double root = 1e-10;
};

struct EstimatorConfig {
  int k = 1;
  /// Support interval for the means. Defaults to
  /// [min X - 3 sigma, max X + 3 sigma] with sigma known or estimated.
  std::optional<Interval> interval;
  /// Known common variance. Absent for Lindsay's estimator.
  std::optional<double> sigma2;
  /// Median-of-batches count. Ignored when high_prob_delta is set.
  int batches = 1;
  /// Requests T = ceil(log(2k / delta)) batches.
  std::optional<double> high_prob_delta;
  /// Lindsay only: lower k to the largest order whose first 2k raw moments
  /// pass the plug-in variance screen with this threshold.
  std::optional<double> screening_tau;
  Tolerances tol;
};

struct EstimationReport {
  GaussianMixture model{DiscreteDistribution::point_mass(0.0), 0.0};
  double projection_distance = 0.0;
  int detected_order = 0;
  std::optional<std::pair<double, double>> sigma_root_bracket;
  std::chrono::duration<double> wallclock{};
  std::vector<std::string> diagnostics;
};

/// Report as a JSON object: {"model": {...}, "projection_distance", ...,
/// "wallclock_ms", "diagnostics": [...]}.
std::string to_json(const EstimationReport& report);

/// Number of moments k may sensibly use at sample size n: a warning is added
/// to the diagnostics when k exceeds 2 log n / log log n.
bool k_exceeds_advisory_bound(int k, std::size_t n);

/// Denoised method of moments with known variance: Hermite moment estimates
/// (optionally median-of-batches), projection onto the moment space, then
/// Gauss quadrature. Never fails on finite data.
EstimationReport dmm_known_variance(std::span<const double> samples, const EstimatorConfig& config);

/// Plain method of moments without the projection step. Throws
/// DiagnosticError when the Hermite moment estimates are not the moments of
/// any k-atomic distribution (e.g. m~_2 < m~_1^2 for k = 2).
DiscreteDistribution naive_method_of_moments(std::span<const double> samples, int k, double sigma2);

struct RootSearchResult {
  double root = 0.0;
  std::pair<double, double> bracket;
};

/// Smallest positive root of f on (0, upper]: sign scan over a combined
/// geometric and linear grid (>= 200 points), then bisection until the
/// bracket is narrower than root_tol. f(0+) is expected positive. Throws
/// DiagnosticError when f(0+) <= 0 or no sign change is found.
RootSearchResult smallest_positive_root(const std::function<double(double)>& f, double upper,
                                        double root_tol);

/// Lindsay's estimator for an unknown common variance: sigma-hat is the
/// smallest positive root of the Hankel determinant of the deconvolved
/// moments, and the mixing distribution is the Gauss quadrature of the
/// moments at sigma-hat. Requires n >= 2k - 1.
EstimationReport lindsay_unknown_variance(std::span<const double> samples,
                                          const EstimatorConfig& config);

/// Density of the fitted mixture (requires a positive fitted variance).
double density_estimate(const EstimationReport& report, double x);

// ---------------------------------------------------------------------------
// Unbounded means

struct ClusterInterval {
  double center = 0.0;
  double half_length = 0.0;
  std::vector<std::size_t> members;  ///< indices into the full sample
};

/// Merges [x_i - L, x_i + L] over the seeds into disjoint intervals, sorted.
std::vector<ClusterInterval> merge_intervals(std::span<const double> seeds, double L);

struct UnboundedConfig {
  double L = 1.0;
  double tau = 0.0;
  std::size_t n_prime = 1;
};

/// L = sqrt(6 log n), tau = eps / (2k), n' = min(n/2, ceil(20 log(k/delta) / eps)).
UnboundedConfig default_unbounded_config(std::size_t n, int k, double eps, double delta);

struct UnboundedResult {
  std::vector<double> means;  ///< sorted union of kept atoms
  std::vector<ClusterInterval> intervals;
  std::vector<std::optional<EstimationReport>> reports;  ///< per interval; empty if skipped
  std::vector<std::string> notes;
};

/// Divide-and-conquer estimation of the support set: the first n' samples
/// define the intervals, the rest are assigned to them, and each interval
/// is fitted (known or unknown variance per config.sigma2) on recentered
/// samples. Atoms with weight >= tau are kept. Requires n >= 2 n'.
UnboundedResult estimate_unbounded(std::span<const double> samples, const EstimatorConfig& config,
                                   const UnboundedConfig& unbounded);

// ---------------------------------------------------------------------------
// d dimensions

struct DDimConfig {
  double tau = 0.1;  ///< perturbation size of the secondary directions
  double rho = 1.0;  ///< projected means assumed in [-rho, rho]
  std::uint64_t seed = 0;
};

/// tau = eps~ / (2M), rho = M with eps~ = delta * eps / (k^2 sqrt(d)).
DDimConfig default_ddim_config(double M, double eps, double delta, int k, int d,
                               std::uint64_t seed);

struct DDimResult {
  std::vector<double> weights;
  std::vector<Eigen::VectorXd> means;
  Eigen::MatrixXd basis;  ///< columns b_1..b_d; r = b_1
};

/// Random-projection wrapper: 1-d DMM along r = b_1 and along r + tau b_i
/// for each basis vector, coordinates recovered from the differences of the
/// sorted projected means. `samples` is n x d. Throws DiagnosticError when
/// a direction returns a different number of components.
DDimResult estimate_d_dimensional(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& covariance,
                                  const EstimatorConfig& config, const DDimConfig& ddim);

}  // namespace dmm
