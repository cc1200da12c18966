#include "dmm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include <Eigen/Dense>

#include "dmm/error.hpp"

namespace dmm {

double wasserstein1(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  const auto xp = p.atoms();
  const auto wp = p.weights();
  const auto xq = q.atoms();
  const auto wq = q.weights();
  std::size_t i = 0;
  std::size_t j = 0;
  double cdf_p = 0.0;
  double cdf_q = 0.0;
  double total = 0.0;
  double t = std::min(xp[0], xq[0]);
  while (i < xp.size() || j < xq.size()) {
    const double next_p = i < xp.size() ? xp[i] : std::numeric_limits<double>::infinity();
    const double next_q = j < xq.size() ? xq[j] : std::numeric_limits<double>::infinity();
    const double next = std::min(next_p, next_q);
    total += std::abs(cdf_p - cdf_q) * (next - t);
    t = next;
    if (next_p == next) cdf_p += wp[i++];
    if (next_q == next) cdf_q += wq[j++];
  }
  return total;
}

double hausdorff(std::span<const double> s, std::span<const double> t) {
  if (s.empty() || t.empty()) throw PreconditionError("hausdorff needs non-empty sets");
  auto directed = [](std::span<const double> a, std::span<const double> b) {
    double worst = 0.0;
    for (double x : a) {
      double best = std::numeric_limits<double>::infinity();
      for (double y : b) best = std::min(best, std::abs(x - y));
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(directed(s, t), directed(t, s));
}

namespace {

double min_gap(std::span<const double> xs) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < xs.size(); ++i) gap = std::min(gap, xs[i] - xs[i - 1]);
  return gap;
}

}  // namespace

MatchedParameterError matched_parameter_error(const DiscreteDistribution& truth,
                                              const DiscreteDistribution& estimate) {
  if (truth.size() != estimate.size()) {
    throw PreconditionError("matched_parameter_error needs equal atom counts");
  }
  // Canonical atoms are sorted, so sorted-order matching is the identity.
  MatchedParameterError out;
  out.permutation.resize(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i) {
    out.permutation[i] = i;
    out.mean_error = std::max(out.mean_error, std::abs(truth.atoms()[i] - estimate.atoms()[i]));
    out.weight_error = std::max(out.weight_error, std::abs(truth.weights()[i] - estimate.weights()[i]));
  }
  out.w1 = wasserstein1(truth, estimate);
  out.min_separation = std::min(min_gap(truth.atoms()), min_gap(estimate.atoms()));
  out.min_weight = std::min(*std::min_element(truth.weights().begin(), truth.weights().end()),
                            *std::min_element(estimate.weights().begin(), estimate.weights().end()));
  out.hypothesis_held = out.w1 < out.min_separation * out.min_weight / 4.0;
  return out;
}

std::pair<DiscreteDistribution, DiscreteDistribution> moment_matched_pair(
    std::span<const double> points) {
  if (points.size() < 2 || points.size() % 2 != 0) {
    throw PreconditionError("moment_matched_pair needs 2k points");
  }
  for (std::size_t i = 1; i < points.size(); ++i) {
    if (!(points[i] > points[i - 1])) {
      throw PreconditionError("moment_matched_pair needs strictly increasing points");
    }
  }
  const auto cols = static_cast<Eigen::Index>(points.size());
  const Eigen::Index rows = cols - 1;
  // The square Vandermonde matrix measures how close the points are; its
  // top rows are the system whose null space gives the weights.
  Eigen::MatrixXd square(cols, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    double p = 1.0;
    for (Eigen::Index i = 0; i < cols; ++i) {
      square(i, j) = p;
      p *= points[static_cast<std::size_t>(j)];
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(square);
  const auto& sv = svd.singularValues();
  const double cond = sv(cols - 1) > 0.0 ? sv(0) / sv(cols - 1) : std::numeric_limits<double>::infinity();
  if (!(cond <= 1e12)) {
    throw PreconditionError("moment_matched_pair: Vandermonde matrix is numerically degenerate "
                            "(points too close)");
  }

  const Eigen::MatrixXd V = square.topRows(rows);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(V);
  const Eigen::MatrixXd kernel = lu.kernel();
  Eigen::VectorXd w = kernel.col(0);
  w *= 2.0 / w.lpNorm<1>();
  if (w(0) < 0.0) w = -w;

  std::vector<double> xs_pos, ws_pos, xs_neg, ws_neg;
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double x = points[static_cast<std::size_t>(j)];
    if (w(j) > 0.0) {
      xs_pos.push_back(x);
      ws_pos.push_back(w(j));
    } else {
      xs_neg.push_back(x);
      ws_neg.push_back(-w(j));
    }
  }
  auto normalize = [](std::vector<double>& ws) {
    double s = 0.0;
    for (double v : ws) s += v;
    for (double& v : ws) v /= s;
  };
  normalize(ws_pos);
  normalize(ws_neg);
  return {DiscreteDistribution(std::move(xs_pos), std::move(ws_pos)),
          DiscreteDistribution(std::move(xs_neg), std::move(ws_neg))};
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double fa,
                        double fm, double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
  return adaptive_simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         adaptive_simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double total_variation(const GaussianMixture& f, const GaussianMixture& g, double tol) {
  if (f.sigma2() <= 0.0 || g.sigma2() <= 0.0) {
    throw DegenerateDensityError("total_variation needs positive variances");
  }
  const double sigma = std::max(f.sigma(), g.sigma());
  const double lo = std::min(f.mixing().min_atom(), g.mixing().min_atom()) - 10.0 * sigma;
  const double hi = std::max(f.mixing().max_atom(), g.mixing().max_atom()) + 10.0 * sigma;
  const auto diff = [&](double x) { return std::abs(density(f, x) - density(g, x)); };

  constexpr int kPanels = 64;
  const double h = (hi - lo) / kPanels;
  double integral = 0.0;
  for (int p = 0; p < kPanels; ++p) {
    const double a = lo + p * h;
    const double b = a + h;
    const double fa = diff(a);
    const double fb = diff(b);
    const double fm = diff(0.5 * (a + b));
    const double whole = h / 6.0 * (fa + 4.0 * fm + fb);
    integral += adaptive_simpson(diff, a, b, fa, fm, fb, whole, tol / kPanels, 40);
  }
  return std::clamp(0.5 * integral, 0.0, 1.0);
}

MomentDistance moment_distance(std::span<const double> m, std::span<const double> mp) {
  if (m.size() != mp.size()) throw PreconditionError("moment_distance needs equal lengths");
  MomentDistance d;
  double sq = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    const double e = std::abs(m[i] - mp[i]);
    d.linf = std::max(d.linf, e);
    sq += e * e;
  }
  d.l2 = std::sqrt(sq);
  return d;
}

}  // namespace dmm
