#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dmm {

/// Closed interval [lo, hi] with lo < hi.
struct Interval {
  double lo = -1.0;
  double hi = 1.0;

  Interval() = default;
  Interval(double lo_, double hi_);

  double center() const { return 0.5 * (lo + hi); }
  double half_length() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Atoms closer than this are merged during canonicalization.
inline constexpr double kAtomMergeTolerance = 1e-10;

/// A finitely supported probability distribution sum_i w_i delta_{x_i}.
///
/// Always stored in canonical form: atoms strictly increasing, no zero
/// weights, atoms within kAtomMergeTolerance merged (weights summed, location
/// weight-averaged), weights summing to one. The constructor rejects negative
/// weights, non-finite values, and weight vectors whose sum is not 1 up to
/// 1e-6 (the remainder is renormalized away).
class DiscreteDistribution {
 public:
  DiscreteDistribution(std::vector<double> atoms, std::vector<double> weights);

  static DiscreteDistribution point_mass(double x);

  std::span<const double> atoms() const { return atoms_; }
  std::span<const double> weights() const { return weights_; }
  std::size_t size() const { return atoms_.size(); }

  double mean() const;
  double min_atom() const { return atoms_.front(); }
  double max_atom() const { return atoms_.back(); }

  /// Affine image x -> scale * x + shift (scale must be non-zero).
  DiscreteDistribution transformed(double scale, double shift) const;

  friend bool operator==(const DiscreteDistribution&, const DiscreteDistribution&) = default;

 private:
  std::vector<double> atoms_;
  std::vector<double> weights_;
};

/// The location mixture mixing * N(0, sigma2).
class GaussianMixture {
 public:
  GaussianMixture(DiscreteDistribution mixing, double sigma2);

  const DiscreteDistribution& mixing() const { return mixing_; }
  double sigma2() const { return sigma2_; }
  double sigma() const;

  friend bool operator==(const GaussianMixture&, const GaussianMixture&) = default;

 private:
  DiscreteDistribution mixing_;
  double sigma2_;
};

/// Raw moments (m_1, ..., m_L) with the support interval they are judged on.
/// m_0 = 1 is implicit.
class MomentVector {
 public:
  MomentVector(std::vector<double> values, Interval interval);

  std::span<const double> values() const { return values_; }
  const Interval& interval() const { return interval_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t r) const { return values_[r - 1]; }  // 1-based order

  /// (1, m_1, ..., m_L)
  std::vector<double> with_m0() const;

 private:
  std::vector<double> values_;
  Interval interval_;
};

/// Draw n i.i.d. samples. The component index is drawn by inverse CDF on
/// the cumulative weights, then N(0, sigma2) noise is added.
std::vector<double> sample(const GaussianMixture& model, std::size_t n, std::mt19937_64& rng);
std::vector<double> sample(const GaussianMixture& model, std::size_t n, std::uint64_t seed);

/// m_r = sum_i w_i x_i^r for r = 1..order. Without an explicit interval the
/// atom hull is used (padded by 1 on each side for a point mass).
MomentVector exact_moments(const DiscreteDistribution& dist, int order,
                           std::optional<Interval> interval = std::nullopt);

/// Raw moments of the mixture itself, E[X^r] for X ~ model, r = 1..order.
std::vector<double> mixture_moments(const GaussianMixture& model, int order);

/// Mixture density. Throws DegenerateDensityError when sigma2 == 0.
double density(const GaussianMixture& model, double x);
double log_density(const GaussianMixture& model, double x);

/// Canonical JSON: {"weights":[...], "means":[...], "sigma2": s}
std::string to_json(const GaussianMixture& model);
/// Throws ParseError (with line/column) for malformed JSON and
/// PreconditionError for well-formed JSON that is not a valid model.
GaussianMixture model_from_json(std::string_view text);

}  // namespace dmm
