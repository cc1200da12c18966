#include "dmm/hermite.hpp"

#include <algorithm>
#include <cmath>

#include "dmm/error.hpp"

namespace dmm {

double hermite(int r, double x) {
  if (r < 0) throw PreconditionError("hermite order must be >= 0");
  if (r == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < r; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

// sigma^r He_r(x/sigma) satisfies G_{r+1} = x G_r - r sigma^2 G_{r-1}, which
// stays well defined at sigma = 0.
double gamma_r(int r, double x, double sigma) {
  if (r < 0) throw PreconditionError("gamma_r order must be >= 0");
  if (r == 0) return 1.0;
  const double s2 = sigma * sigma;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < r; ++j) {
    const double next = x * cur - j * s2 * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

void gamma_all(double x, double sigma, std::span<double> out) {
  if (out.empty()) return;
  const double s2 = sigma * sigma;
  double prev = 1.0;
  double cur = x;
  out[0] = cur;
  for (std::size_t j = 1; j < out.size(); ++j) {
    const double next = x * cur - static_cast<double>(j) * s2 * prev;
    prev = cur;
    cur = next;
    out[j] = cur;
  }
}

MomentEstimate estimate_mixing_moments(std::span<const double> samples, int L, double sigma) {
  if (L < 1) throw PreconditionError("estimate_mixing_moments needs L >= 1");
  if (samples.empty()) throw InsufficientSamplesError("estimate_mixing_moments needs a sample");
  if (sigma < 0.0) throw PreconditionError("sigma must be non-negative");

  const auto order = static_cast<std::size_t>(L);
  std::vector<double> g(order);
  std::vector<double> mean(order, 0.0);
  std::vector<double> m2(order, 0.0);
  double count = 0.0;
  for (double x : samples) {
    gamma_all(x, sigma, g);
    count += 1.0;
    for (std::size_t r = 0; r < order; ++r) {
      const double d = g[r] - mean[r];
      mean[r] += d / count;
      m2[r] += d * (g[r] - mean[r]);
    }
  }

  MomentEstimate est;
  est.n = samples.size();
  est.values = std::move(mean);
  est.per_order_variance.resize(order);
  for (std::size_t r = 0; r < order; ++r) est.per_order_variance[r] = (m2[r] / count) / count;
  return est;
}

namespace {

double median_of(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

}  // namespace

MomentEstimate median_of_batches(std::span<const double> samples, int L, double sigma, int T) {
  if (T < 1) throw PreconditionError("median_of_batches needs T >= 1");
  if (samples.size() < static_cast<std::size_t>(T)) {
    throw InsufficientSamplesError("median_of_batches needs at least T samples");
  }
  MomentEstimate full = estimate_mixing_moments(samples, L, sigma);
  if (T == 1) return full;

  const std::size_t n = samples.size();
  const auto batches = static_cast<std::size_t>(T);
  std::vector<std::vector<double>> per_order(static_cast<std::size_t>(L));
  std::size_t begin = 0;
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t end = (n * (b + 1)) / batches;
    const auto est = estimate_mixing_moments(samples.subspan(begin, end - begin), L, sigma);
    for (std::size_t r = 0; r < per_order.size(); ++r) per_order[r].push_back(est.values[r]);
    begin = end;
  }
  for (std::size_t r = 0; r < per_order.size(); ++r) full.values[r] = median_of(std::move(per_order[r]));
  return full;
}

int default_batch_count(int k, double delta) {
  if (k < 1 || !(delta > 0.0 && delta < 1.0)) {
    throw PreconditionError("default_batch_count needs k >= 1 and delta in (0, 1)");
  }
  return std::max(1, static_cast<int>(std::ceil(std::log(2.0 * k / delta))));
}

int screen_order(const MomentEstimate& estimate, int k_max, double tau) {
  if (k_max < 1) throw PreconditionError("screen_order needs k_max >= 1");
  if (estimate.per_order_variance.size() < static_cast<std::size_t>(2 * k_max)) {
    throw PreconditionError("screen_order needs variances up to order 2 k_max");
  }
  int accepted_orders = 0;
  while (accepted_orders < 2 * k_max &&
         estimate.per_order_variance[static_cast<std::size_t>(accepted_orders)] <= tau) {
    ++accepted_orders;
  }
  return std::max(1, accepted_orders / 2);
}

}  // namespace dmm
