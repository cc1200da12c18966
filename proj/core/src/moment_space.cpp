#include "dmm/moment_space.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "dmm/error.hpp"

namespace dmm {

HankelMatrix hankel(std::span<const double> moments, int i, int j) {
  const int last = static_cast<int>(moments.size()) - 1;
  if (i < 0 || j < i || j > last || (i + j) % 2 != 0) {
    std::ostringstream os;
    os << "hankel(i=" << i << ", j=" << j << ") invalid for moments up to order " << last;
    throw IndexError(os.str());
  }
  const int n = (j - i) / 2 + 1;
  HankelMatrix h(n, n);
  for (int p = 0; p < n; ++p) {
    for (int q = 0; q < n; ++q) h(p, q) = moments[static_cast<std::size_t>(i + p + q)];
  }
  return h;
}

std::vector<Eigen::MatrixXd> certifying_matrices(std::span<const double> m, const Interval& iv) {
  const int L = static_cast<int>(m.size()) - 1;
  if (L < 1) throw PreconditionError("certifying_matrices needs at least one moment");
  const double a = iv.lo;
  const double b = iv.hi;
  std::vector<Eigen::MatrixXd> out;
  if (L % 2 == 1) {
    const Eigen::MatrixXd base = hankel(m, 0, L - 1);
    const Eigen::MatrixXd shifted = hankel(m, 1, L);
    out.push_back(b * base - shifted);
    out.push_back(shifted - a * base);
  } else {
    out.push_back(hankel(m, 0, L));
    const Eigen::MatrixXd inner = (a + b) * hankel(m, 1, L - 1) - a * b * hankel(m, 0, L - 2) -
                                  hankel(m, 2, L);
    out.push_back(inner);
  }
  return out;
}

namespace {

double min_eigenvalue(const Eigen::MatrixXd& a) {
  if (a.rows() == 1) return a(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

}  // namespace

Validity is_valid(const MomentVector& moments, double rel_tol) {
  const auto m = moments.with_m0();
  Validity v;
  v.valid = true;
  v.min_eigenvalue = std::numeric_limits<double>::infinity();
  for (const auto& a : certifying_matrices(m, moments.interval())) {
    const double lam = min_eigenvalue(a);
    v.min_eigenvalue = std::min(v.min_eigenvalue, lam);
    if (lam < -rel_tol * (1.0 + std::abs(a.trace()))) v.valid = false;
  }
  v.violation = std::max(0.0, -v.min_eigenvalue);
  return v;
}

namespace {

// The certifying matrices are affine in m: A_i(x) = C_i + sum_l x_l E_{i,l}.
struct AffineLmi {
  Eigen::MatrixXd constant;
  std::vector<Eigen::MatrixXd> slopes;
};

std::vector<AffineLmi> build_lmis(int L, const Interval& iv) {
  std::vector<double> m(static_cast<std::size_t>(L) + 1, 0.0);
  m[0] = 1.0;
  const auto base = certifying_matrices(m, iv);
  std::vector<AffineLmi> lmis(base.size());
  for (std::size_t i = 0; i < base.size(); ++i) lmis[i].constant = base[i];
  for (int l = 1; l <= L; ++l) {
    m[static_cast<std::size_t>(l)] = 1.0;
    const auto with_unit = certifying_matrices(m, iv);
    for (std::size_t i = 0; i < base.size(); ++i) lmis[i].slopes.push_back(with_unit[i] - base[i]);
    m[static_cast<std::size_t>(l)] = 0.0;
  }
  return lmis;
}

Eigen::MatrixXd evaluate(const AffineLmi& lmi, const Eigen::VectorXd& x) {
  Eigen::MatrixXd a = lmi.constant;
  for (Eigen::Index l = 0; l < x.size(); ++l) a += x(l) * lmi.slopes[static_cast<std::size_t>(l)];
  return a;
}

bool strictly_feasible(const std::vector<AffineLmi>& lmis, const Eigen::VectorXd& x) {
  for (const auto& lmi : lmis) {
    Eigen::LLT<Eigen::MatrixXd> llt(evaluate(lmi, x));
    if (llt.info() != Eigen::Success) return false;
    // LLT succeeds on some numerically singular matrices; require a
    // strictly positive diagonal.
    if ((llt.matrixL().toDenseMatrix().diagonal().array() <= 0.0).any()) return false;
  }
  return true;
}

// Moments of the uniform distribution on [a, b], an interior point of every
// moment space of the interval.
Eigen::VectorXd uniform_moments(int L, const Interval& iv) {
  Eigen::VectorXd x(L);
  for (int r = 1; r <= L; ++r) {
    x(r - 1) = (std::pow(iv.hi, r + 1) - std::pow(iv.lo, r + 1)) / ((r + 1) * (iv.hi - iv.lo));
  }
  return x;
}

struct NewtonSystem {
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};

// Gradient and Hessian of t/2 ||x - target||^2 - sum_i log det A_i(x).
NewtonSystem newton_system(const std::vector<AffineLmi>& lmis, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& target, double t) {
  const Eigen::Index L = x.size();
  NewtonSystem sys{t * (x - target), t * Eigen::MatrixXd::Identity(L, L)};
  for (const auto& lmi : lmis) {
    Eigen::LLT<Eigen::MatrixXd> llt(evaluate(lmi, x));
    std::vector<Eigen::MatrixXd> scaled(static_cast<std::size_t>(L));
    for (Eigen::Index l = 0; l < L; ++l) {
      // B_l = L^{-1} E_l L^{-T}
      Eigen::MatrixXd half = llt.matrixL().solve(lmi.slopes[static_cast<std::size_t>(l)]);
      scaled[static_cast<std::size_t>(l)] = llt.matrixL().solve(half.transpose()).transpose();
      sys.gradient(l) -= scaled[static_cast<std::size_t>(l)].trace();
    }
    for (Eigen::Index l = 0; l < L; ++l) {
      for (Eigen::Index p = l; p < L; ++p) {
        const double h = scaled[static_cast<std::size_t>(l)].cwiseProduct(scaled[static_cast<std::size_t>(p)]).sum();
        sys.hessian(l, p) += h;
        if (p != l) sys.hessian(p, l) += h;
      }
    }
  }
  return sys;
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

ProjectionResult project(const MomentVector& noisy, const ProjectionOptions& opts) {
  if (!(opts.tol > 0.0)) throw PreconditionError("project needs tol > 0");
  if (const Validity v = is_valid(noisy); v.valid) {
    return {noisy, 0.0, 0, std::min(0.0, v.min_eigenvalue)};
  }

  const int L = static_cast<int>(noisy.size());
  const Interval& iv = noisy.interval();
  const auto lmis = build_lmis(L, iv);
  double barrier_order = 0.0;
  for (const auto& lmi : lmis) barrier_order += static_cast<double>(lmi.constant.rows());

  const Eigen::VectorXd target = Eigen::Map<const Eigen::VectorXd>(noisy.values().data(), L);
  Eigen::VectorXd x = uniform_moments(L, iv);
  double t = barrier_order / std::max((x - target).squaredNorm(), 1e-12);

  long iterations = 0;
  bool stalled = false;
  for (;;) {
    // Centering by damped Newton.
    for (int inner = 0; inner < 200; ++inner) {
      if (++iterations > opts.max_iterations) {
        throw ConvergenceError("moment projection hit its iteration cap", to_std(x));
      }
      const NewtonSystem sys = newton_system(lmis, x, target, t);
      const Eigen::VectorXd step = sys.hessian.ldlt().solve(-sys.gradient);
      const double decrement2 = -sys.gradient.dot(step);
      if (!std::isfinite(decrement2)) {
        stalled = true;
        break;
      }
      if (decrement2 < 1e-20) break;
      const double lambda = std::sqrt(decrement2);
      double s = lambda < 0.25 ? 1.0 : 1.0 / (1.0 + lambda);
      while (!strictly_feasible(lmis, x + s * step) && s > 1e-14) s *= 0.5;
      if (s <= 1e-14) {
        stalled = true;
        break;
      }
      const Eigen::VectorXd next = x + s * step;
      if ((next - x).norm() <= 1e-15 * (1.0 + x.norm())) {
        x = next;
        break;
      }
      x = next;
      if (decrement2 < 1e-14) break;
    }
    const double gap = barrier_order / t;
    const double dist = (x - target).norm();
    if (stalled || gap <= std::max(0.5 * opts.tol * dist, 0.5 * opts.tol * opts.tol)) break;
    t *= 10.0;
  }

  MomentVector projected(to_std(x), iv);
  const Validity v = is_valid(projected);
  return {std::move(projected), (x - target).norm(), iterations, std::min(0.0, v.min_eigenvalue)};
}

int detect_order(std::span<const double> moments, double rank_tol) {
  if (moments.size() % 2 == 0 || moments.size() < 3) {
    throw PreconditionError("detect_order needs (m_0, ..., m_{2 r_max}) with r_max >= 1");
  }
  const int r_max = static_cast<int>(moments.size() - 1) / 2;
  const int n = r_max + 1;
  // Cholesky pivots of the Hankel matrix: pivot_r = det(M_r) / det(M_{r-1}).
  using Real = long double;
  std::vector<std::vector<Real>> R(static_cast<std::size_t>(n), std::vector<Real>(static_cast<std::size_t>(n), 0.0L));
  auto H = [&](int i, int j) { return static_cast<Real>(moments[static_cast<std::size_t>(i + j)]); };
  for (int i = 0; i < n; ++i) {
    Real diag = H(i, i);
    for (int l = 0; l < i; ++l) diag -= R[l][i] * R[l][i];
    const Real scale = H(i, i);
    if (i > 0 && (scale <= 0.0L || diag <= static_cast<Real>(rank_tol) * scale)) return i;
    R[i][i] = std::sqrt(diag);
    for (int j = i + 1; j < n; ++j) {
      Real v = H(i, j);
      for (int l = 0; l < i; ++l) v -= R[l][i] * R[l][j];
      R[i][j] = v / R[i][i];
    }
  }
  return r_max + 1;
}

}  // namespace dmm
