#include <algorithm>
#include <cmath>

#include "dmm/error.hpp"
#include "dmm/estimators.hpp"

namespace dmm {

std::vector<ClusterInterval> merge_intervals(std::span<const double> seeds, double L) {
  if (seeds.empty()) throw PreconditionError("merge_intervals needs at least one seed");
  if (!(L > 0.0)) throw PreconditionError("merge_intervals needs L > 0");
  std::vector<double> xs(seeds.begin(), seeds.end());
  std::sort(xs.begin(), xs.end());

  std::vector<ClusterInterval> out;
  double lo = xs.front() - L;
  double hi = xs.front() + L;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] - L <= hi) {
      hi = std::max(hi, xs[i] + L);
    } else {
      out.push_back({0.5 * (lo + hi), 0.5 * (hi - lo), {}});
      lo = xs[i] - L;
      hi = xs[i] + L;
    }
  }
  out.push_back({0.5 * (lo + hi), 0.5 * (hi - lo), {}});
  return out;
}

UnboundedConfig default_unbounded_config(std::size_t n, int k, double eps, double delta) {
  if (n < 2 || k < 1 || !(eps > 0.0) || !(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("default_unbounded_config needs n >= 2, k >= 1, eps > 0, delta in (0,1)");
  }
  UnboundedConfig c;
  c.L = std::sqrt(6.0 * std::log(static_cast<double>(n)));
  c.tau = eps / (2.0 * k);
  const double wanted = std::ceil(20.0 * std::log(std::max(1.0, k / delta)) / eps);
  c.n_prime = std::max<std::size_t>(1, std::min<std::size_t>(n / 2, static_cast<std::size_t>(wanted)));
  return c;
}

UnboundedResult estimate_unbounded(std::span<const double> samples, const EstimatorConfig& config,
                                   const UnboundedConfig& unbounded) {
  const std::size_t n = samples.size();
  if (unbounded.n_prime < 1 || n < 2 * unbounded.n_prime) {
    throw InsufficientSamplesError("estimate_unbounded needs n >= 2 n' with n' >= 1");
  }
  UnboundedResult result;
  result.intervals = merge_intervals(samples.first(unbounded.n_prime), unbounded.L);

  for (std::size_t i = unbounded.n_prime; i < n; ++i) {
    const double x = samples[i];
    // Intervals are sorted and disjoint: find the last one starting at or before x.
    auto it = std::upper_bound(result.intervals.begin(), result.intervals.end(), x,
                               [](double v, const ClusterInterval& c) { return v < c.center - c.half_length; });
    if (it == result.intervals.begin()) continue;
    --it;
    if (x <= it->center + it->half_length) it->members.push_back(i);
  }

  result.reports.resize(result.intervals.size());
  for (std::size_t j = 0; j < result.intervals.size(); ++j) {
    const ClusterInterval& ci = result.intervals[j];
    if (ci.members.empty()) {
      result.notes.push_back("interval " + std::to_string(j) + " has no samples; skipped");
      continue;
    }
    std::vector<double> recentered;
    recentered.reserve(ci.members.size());
    for (std::size_t idx : ci.members) recentered.push_back(samples[idx] - ci.center);

    EstimatorConfig sub = config;
    sub.interval = Interval(-ci.half_length, ci.half_length);
    try {
      EstimationReport rep = config.sigma2 ? dmm_known_variance(recentered, sub)
                                           : lindsay_unknown_variance(recentered, sub);
      const auto atoms = rep.model.mixing().atoms();
      const auto weights = rep.model.mixing().weights();
      for (std::size_t a = 0; a < atoms.size(); ++a) {
        if (weights[a] >= unbounded.tau) result.means.push_back(atoms[a] + ci.center);
      }
      result.reports[j] = std::move(rep);
    } catch (const PreconditionError& e) {
      result.notes.push_back("interval " + std::to_string(j) + " skipped: " + e.what());
    } catch (const DiagnosticError& e) {
      result.notes.push_back("interval " + std::to_string(j) + " skipped: " + e.what());
    }
  }
  std::sort(result.means.begin(), result.means.end());
  return result;
}

}  // namespace dmm
