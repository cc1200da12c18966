#include "dmm/em.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "dmm/error.hpp"

namespace dmm {

double loglik(std::span<const double> samples, const GaussianMixture& model) {
  double total = 0.0;
  for (double x : samples) total += log_density(model, x);
  return total;
}

namespace {

using Clock = std::chrono::steady_clock;

struct Params {
  std::vector<double> weights;
  std::vector<double> means;
  double sigma2 = 1.0;
};

enum class RunStatus { kConverged, kIterationCap, kDegenerate };

struct Run {
  Params params;
  std::vector<double> trace;
  RunStatus status = RunStatus::kConverged;
  int iterations = 0;
};

Run run_em(std::span<const double> xs, Params p, bool learn_sigma, const EMConfig& cfg,
           double sample_var) {
  const std::size_t n = xs.size();
  const std::size_t k = p.means.size();
  std::vector<double> resp(n * k);
  std::vector<double> logw(k);
  Run run;
  double prev = -std::numeric_limits<double>::infinity();

  for (int it = 0; it < cfg.max_iterations; ++it) {
    // E-step with log-sum-exp; also yields the log-likelihood of p.
    const double inv2s = 0.5 / p.sigma2;
    const double lognorm = -0.5 * std::log(2.0 * std::numbers::pi * p.sigma2);
    for (std::size_t j = 0; j < k; ++j) logw[j] = std::log(p.weights[j]);
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double* r = &resp[i * k];
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const double d = xs[i] - p.means[j];
        r[j] = logw[j] - d * d * inv2s;
        hi = std::max(hi, r[j]);
      }
      double acc = 0.0;
      for (std::size_t j = 0; j < k; ++j) {
        r[j] = std::exp(r[j] - hi);
        acc += r[j];
      }
      for (std::size_t j = 0; j < k; ++j) r[j] /= acc;
      ll += hi + std::log(acc) + lognorm;
    }
    run.trace.push_back(ll);
    run.iterations = it + 1;
    if (ll - prev < cfg.loglik_tolerance) break;
    prev = ll;

    // M-step.
    Params next = p;
    for (std::size_t j = 0; j < k; ++j) {
      double nj = 0.0;
      double sx = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nj += resp[i * k + j];
        sx += resp[i * k + j] * xs[i];
      }
      if (!(nj > 1e-10 * static_cast<double>(n))) {
        run.status = RunStatus::kDegenerate;
        run.params = p;
        return run;
      }
      next.weights[j] = nj / static_cast<double>(n);
      next.means[j] = sx / nj;
    }
    if (learn_sigma) {
      double ss = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < k; ++j) {
          const double d = xs[i] - next.means[j];
          ss += resp[i * k + j] * d * d;
        }
      }
      next.sigma2 = ss / static_cast<double>(n);
      if (!(next.sigma2 > 1e-12 * std::max(sample_var, 1e-300))) {
        run.status = RunStatus::kDegenerate;
        run.params = p;
        return run;
      }
    }
    p = std::move(next);
    if (it + 1 == cfg.max_iterations) run.status = RunStatus::kIterationCap;
  }
  run.params = std::move(p);
  return run;
}

}  // namespace

EMResult em_fit(std::span<const double> samples, const EMConfig& config, std::optional<double> sigma2) {
  const auto start = Clock::now();
  if (config.k < 1 || config.max_iterations < 1 || config.restarts < 1 ||
      !(config.loglik_tolerance > 0.0)) {
    throw PreconditionError("em_fit needs positive k, iteration cap, restarts and tolerance");
  }
  if (samples.size() < static_cast<std::size_t>(config.k)) {
    throw InsufficientSamplesError("em_fit needs n >= k");
  }
  if (sigma2 && !(*sigma2 > 0.0)) throw PreconditionError("em_fit needs sigma2 > 0 when given");

  const auto [lo_it, hi_it] = std::minmax_element(samples.begin(), samples.end());
  const double lo = *lo_it;
  const double hi = *hi_it;
  double mean = 0.0;
  for (double x : samples) mean += x;
  mean /= static_cast<double>(samples.size());
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<double>(samples.size());

  std::mt19937_64 rng(config.seed);
  std::uniform_real_distribution<double> unif(lo, hi > lo ? hi : lo + 1.0);
  std::exponential_distribution<double> expo(1.0);
  const auto k = static_cast<std::size_t>(config.k);

  EMResult result;
  double best_ll = -std::numeric_limits<double>::infinity();
  std::optional<Params> best;
  int total_iterations = 0;
  const int max_attempts = config.restarts * 10;
  int completed = 0;
  for (int attempt = 0; completed < config.restarts && attempt < max_attempts; ++attempt) {
    Params p;
    p.means.resize(k);
    p.weights.resize(k);
    double wsum = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      p.means[j] = unif(rng);
      p.weights[j] = expo(rng);  // normalized exponentials = flat Dirichlet
      wsum += p.weights[j];
    }
    for (double& w : p.weights) w /= wsum;
    p.sigma2 = sigma2 ? *sigma2 : (var > 0.0 ? var : 1.0);

    Run run = run_em(samples, std::move(p), !sigma2, config, var);
    total_iterations += run.iterations;
    if (run.status == RunStatus::kDegenerate) {
      ++result.underflow_restarts;
      continue;
    }
    const GaussianMixture fitted(DiscreteDistribution(run.params.means, run.params.weights),
                                 run.params.sigma2);
    const double ll = loglik(samples, fitted);
    if (ll > best_ll) {
      best_ll = ll;
      best = run.params;
      result.best_restart = completed;
    }
    result.loglik_traces.push_back(std::move(run.trace));
    ++completed;
  }
  if (!best) {
    throw DiagnosticError("em_fit: every restart collapsed (responsibility underflow)");
  }

  const DiscreteDistribution mixing(best->means, best->weights);
  const int order = static_cast<int>(mixing.size());
  result.report = EstimationReport{GaussianMixture(mixing, best->sigma2), 0.0, order, std::nullopt, {}, {}};
  result.report.diagnostics.push_back("log-likelihood: " + std::to_string(best_ll));
  result.report.diagnostics.push_back("total iterations: " + std::to_string(total_iterations));
  result.report.diagnostics.push_back("degenerate restarts: " + std::to_string(result.underflow_restarts));
  result.report.wallclock = Clock::now() - start;
  return result;
}

}  // namespace dmm
