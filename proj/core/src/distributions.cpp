#include "dmm/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "dmm/error.hpp"

namespace dmm {

Interval::Interval(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    std::ostringstream os;
    os << "interval requires finite lo < hi, got [" << lo << ", " << hi << "]";
    throw PreconditionError(os.str());
  }
}

DiscreteDistribution::DiscreteDistribution(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size()) {
    throw PreconditionError("discrete distribution needs equally many atoms and weights (>= 1)");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    if (!std::isfinite(atoms[i]) || !std::isfinite(weights[i])) {
      throw PreconditionError("discrete distribution has a non-finite atom or weight");
    }
    if (weights[i] < 0.0) throw PreconditionError("discrete distribution has a negative weight");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "weights must sum to 1, got " << total;
    throw PreconditionError(os.str());
  }

  std::vector<std::size_t> order(atoms.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return atoms[a] < atoms[b]; });

  for (std::size_t idx : order) {
    const double x = atoms[idx];
    const double w = weights[idx];
    if (w == 0.0) continue;
    if (!atoms_.empty() && x - atoms_.back() < kAtomMergeTolerance) {
      const double merged = weights_.back() + w;
      atoms_.back() = (atoms_.back() * weights_.back() + x * w) / merged;
      weights_.back() = merged;
    } else {
      atoms_.push_back(x);
      weights_.push_back(w);
    }
  }
  if (atoms_.empty()) throw PreconditionError("discrete distribution has no positive weight");

  const double kept = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  for (double& w : weights_) w /= kept;
}

DiscreteDistribution DiscreteDistribution::point_mass(double x) { return {{x}, {1.0}}; }

double DiscreteDistribution::mean() const {
  double m = 0.0;
  for (std::size_t i = 0; i < atoms_.size(); ++i) m += weights_[i] * atoms_[i];
  return m;
}

DiscreteDistribution DiscreteDistribution::transformed(double scale, double shift) const {
  if (scale == 0.0) throw PreconditionError("affine transform needs a non-zero scale");
  std::vector<double> xs(atoms_.size());
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = scale * atoms_[i] + shift;
  return {std::move(xs), weights_};
}

GaussianMixture::GaussianMixture(DiscreteDistribution mixing, double sigma2)
    : mixing_(std::move(mixing)), sigma2_(sigma2) {
  if (!std::isfinite(sigma2) || sigma2 < 0.0) {
    throw PreconditionError("mixture variance must be finite and non-negative");
  }
}

double GaussianMixture::sigma() const { return std::sqrt(sigma2_); }

MomentVector::MomentVector(std::vector<double> values, Interval interval)
    : values_(std::move(values)), interval_(interval) {
  if (values_.empty()) throw PreconditionError("moment vector needs at least one moment");
  for (double v : values_) {
    if (!std::isfinite(v)) throw PreconditionError("moment vector has a non-finite entry");
  }
}

std::vector<double> MomentVector::with_m0() const {
  std::vector<double> out;
  out.reserve(values_.size() + 1);
  out.push_back(1.0);
  out.insert(out.end(), values_.begin(), values_.end());
  return out;
}

std::vector<double> sample(const GaussianMixture& model, std::size_t n, std::mt19937_64& rng) {
  const auto w = model.mixing().weights();
  const auto mu = model.mixing().atoms();
  std::vector<double> cdf(w.size());
  std::partial_sum(w.begin(), w.end(), cdf.begin());
  cdf.back() = 1.0;

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = model.sigma();

  std::vector<double> out(n);
  for (auto& x : out) {
    const double u = unif(rng);
    auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    if (it == cdf.end()) --it;
    x = mu[static_cast<std::size_t>(it - cdf.begin())];
    if (sigma > 0.0) x += sigma * normal(rng);
  }
  return out;
}

std::vector<double> sample(const GaussianMixture& model, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return sample(model, n, rng);
}

MomentVector exact_moments(const DiscreteDistribution& dist, int order,
                           std::optional<Interval> interval) {
  if (order < 1) throw PreconditionError("exact_moments needs order >= 1");
  std::vector<double> m(static_cast<std::size_t>(order), 0.0);
  const auto xs = dist.atoms();
  const auto ws = dist.weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double p = 1.0;
    for (int r = 0; r < order; ++r) {
      p *= xs[i];
      m[static_cast<std::size_t>(r)] += ws[i] * p;
    }
  }
  if (!interval) {
    interval = dist.size() == 1 ? Interval(dist.min_atom() - 1.0, dist.max_atom() + 1.0)
                                : Interval(dist.min_atom(), dist.max_atom());
  }
  return {std::move(m), *interval};
}

std::vector<double> mixture_moments(const GaussianMixture& model, int order) {
  if (order < 1) throw PreconditionError("mixture_moments needs order >= 1");
  // E[Z^j] for Z ~ N(0,1): 0 for odd j, (j-1)!! for even j.
  std::vector<double> z(static_cast<std::size_t>(order) + 1, 0.0);
  z[0] = 1.0;
  for (int j = 2; j <= order; j += 2) z[static_cast<std::size_t>(j)] = (j - 1) * z[static_cast<std::size_t>(j - 2)];

  const double s = model.sigma();
  std::vector<double> out(static_cast<std::size_t>(order), 0.0);
  const auto xs = model.mixing().atoms();
  const auto ws = model.mixing().weights();
  for (int r = 1; r <= order; ++r) {
    double total = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      double term = 0.0;
      double binom = 1.0;
      for (int j = 0; j <= r; ++j) {
        if (j % 2 == 0) {
          term += binom * std::pow(xs[i], r - j) * std::pow(s, j) * z[static_cast<std::size_t>(j)];
        }
        binom = binom * (r - j) / (j + 1);
      }
      total += ws[i] * term;
    }
    out[static_cast<std::size_t>(r - 1)] = total;
  }
  return out;
}

double density(const GaussianMixture& model, double x) {
  if (model.sigma2() <= 0.0) throw DegenerateDensityError("density undefined for sigma2 = 0");
  const double s = model.sigma();
  const double norm = 1.0 / (s * std::sqrt(2.0 * std::numbers::pi));
  double f = 0.0;
  const auto xs = model.mixing().atoms();
  const auto ws = model.mixing().weights();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = (x - xs[i]) / s;
    f += ws[i] * std::exp(-0.5 * z * z);
  }
  return f * norm;
}

double log_density(const GaussianMixture& model, double x) {
  if (model.sigma2() <= 0.0) throw DegenerateDensityError("density undefined for sigma2 = 0");
  const double s = model.sigma();
  const auto xs = model.mixing().atoms();
  const auto ws = model.mixing().weights();
  double hi = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = (x - xs[i]) / s;
    hi = std::max(hi, std::log(ws[i]) - 0.5 * z * z);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = (x - xs[i]) / s;
    acc += std::exp(std::log(ws[i]) - 0.5 * z * z - hi);
  }
  return hi + std::log(acc) - std::log(s) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace dmm
