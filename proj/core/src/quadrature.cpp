#include "dmm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "dmm/error.hpp"
#include "dmm/moment_space.hpp"
#include "dmm/vandermonde.hpp"

namespace dmm {

namespace {

using Real = long double;
using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;

struct Rule {
  std::vector<Real> nodes;
  std::vector<Real> weights;
};

// Upper Cholesky factor rows 0..k-1 of the (k+1) x (k+1) Hankel matrix of
// m_0..m_{2k}; only m_0..m_{2k-1} are touched. Returns the number of
// leading pivots that are numerically positive.
int partial_cholesky(const std::vector<Real>& m, int k, double pivot_tol, RealMatrix& R) {
  R = RealMatrix::Zero(k, k + 1);
  for (int i = 0; i < k; ++i) {
    const Real hii = m[static_cast<std::size_t>(2 * i)];
    Real diag = hii;
    for (int l = 0; l < i; ++l) diag -= R(l, i) * R(l, i);
    if (hii <= 0.0L || diag <= static_cast<Real>(pivot_tol) * hii) return i;
    R(i, i) = std::sqrt(diag);
    for (int j = i + 1; j <= k; ++j) {
      Real v = m[static_cast<std::size_t>(i + j)];
      for (int l = 0; l < i; ++l) v -= R(l, i) * R(l, j);
      R(i, j) = v / R(i, i);
    }
  }
  return k;
}

// Golub–Welsch: Jacobi matrix from the Cholesky factor, nodes are its
// eigenvalues.
std::vector<Real> jacobi_nodes(const RealMatrix& R, int k) {
  RealMatrix J = RealMatrix::Zero(k, k);
  for (int j = 0; j < k; ++j) {
    const Real prev = j == 0 ? 0.0L : R(j - 1, j) / R(j - 1, j - 1);
    J(j, j) = R(j, j + 1) / R(j, j) - prev;
    if (j + 1 < k) {
      const Real beta = R(j + 1, j + 1) / R(j, j);
      J(j, j + 1) = beta;
      J(j + 1, j) = beta;
    }
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(J, Eigen::EigenvaluesOnly);
  std::vector<Real> nodes(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) nodes[static_cast<std::size_t>(j)] = es.eigenvalues()(j);
  std::sort(nodes.begin(), nodes.end());
  return nodes;
}

std::optional<Rule> try_rule(const std::vector<Real>& m, int k, const Interval& iv,
                             const QuadratureOptions& opts, int& usable_order) {
  RealMatrix R;
  usable_order = partial_cholesky(m, k, opts.pivot_tol, R);
  if (usable_order < k) return std::nullopt;

  Rule rule;
  rule.nodes = jacobi_nodes(R, k);
  for (std::size_t j = 1; j < rule.nodes.size(); ++j) {
    if (rule.nodes[j] == rule.nodes[j - 1]) return std::nullopt;
  }
  const Real slack = static_cast<Real>(opts.support_slack) * (1.0L + static_cast<Real>(iv.hi - iv.lo));
  if (rule.nodes.front() < iv.lo - slack || rule.nodes.back() > iv.hi + slack) return std::nullopt;

  const std::vector<Real> rhs(m.begin(), m.begin() + k);
  rule.weights = bjorck_pereyra_solve<Real>(rule.nodes, rhs);
  for (Real& w : rule.weights) {
    if (!std::isfinite(static_cast<double>(w))) return std::nullopt;
    if (w < -static_cast<Real>(opts.negative_weight_tol)) return std::nullopt;
    if (w < 0.0L) w = 0.0L;
  }
  return rule;
}

}  // namespace

DiscreteDistribution gauss_quadrature(const MomentVector& moments, const QuadratureOptions& opts) {
  if (moments.size() % 2 == 0) {
    throw PreconditionError("gauss_quadrature needs an odd number (2k-1) of moments");
  }
  const Validity validity = is_valid(moments);
  if (!validity.valid) {
    std::ostringstream os;
    os << "gauss_quadrature input is not a valid moment vector on [" << moments.interval().lo << ", "
       << moments.interval().hi << "] (violation " << validity.violation << ")";
    throw PreconditionError(os.str());
  }
  const Interval& iv = moments.interval();
  const int k = static_cast<int>(moments.size() + 1) / 2;

  std::vector<Real> m;
  m.push_back(1.0L);
  for (double v : moments.values()) m.push_back(v);

  int order = k;
  while (order >= 1) {
    int usable = 0;
    auto rule = try_rule(m, order, iv, opts, usable);
    if (rule) {
      std::vector<double> xs;
      std::vector<double> ws;
      Real total = 0.0L;
      for (Real w : rule->weights) total += w;
      if (!(total > 0.0L)) break;
      for (std::size_t j = 0; j < rule->nodes.size(); ++j) {
        xs.push_back(std::clamp(static_cast<double>(rule->nodes[j]), iv.lo, iv.hi));
        ws.push_back(static_cast<double>(rule->weights[j] / total));
      }
      return {std::move(xs), std::move(ws)};
    }
    // A failed pivot at index i means the moments determine at most i atoms.
    order = usable < order ? usable : order - 1;
  }
  throw DiagnosticError(
      "gauss_quadrature could not build a rule at any order; the moment vector is numerically "
      "degenerate");
}

DiscreteDistribution quadrature_of_gaussian(int k, double variance) {
  if (k < 1) throw PreconditionError("quadrature_of_gaussian needs k >= 1");
  if (!(variance > 0.0)) throw PreconditionError("quadrature_of_gaussian needs variance > 0");
  RealMatrix J = RealMatrix::Zero(k, k);
  for (int j = 1; j < k; ++j) {
    J(j - 1, j) = std::sqrt(static_cast<Real>(j));
    J(j, j - 1) = J(j - 1, j);
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(J);
  const Real eps = std::sqrt(static_cast<Real>(variance));
  std::vector<double> xs(static_cast<std::size_t>(k));
  std::vector<double> ws(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    const Real v0 = es.eigenvectors()(0, j);
    xs[static_cast<std::size_t>(j)] = static_cast<double>(eps * es.eigenvalues()(j));
    ws[static_cast<std::size_t>(j)] = static_cast<double>(v0 * v0);
  }
  return {std::move(xs), std::move(ws)};
}

}  // namespace dmm
