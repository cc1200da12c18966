#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "dmm/distributions.hpp"

namespace dmm {

using HankelMatrix = Eigen::MatrixXd;

/// Hankel matrix M_{i,j} with entries m_i, ..., m_j, i.e. entry (p, q) is
/// m_{i+p+q}. `moments` is (m_0 = 1, m_1, ..., m_L). Requires i + j even
/// and 0 <= i <= j <= L; throws IndexError otherwise.
HankelMatrix hankel(std::span<const double> moments, int i, int j);

/// The matrices whose positive semidefiniteness characterizes the moment
/// space of the interval:
///   odd L:  b M_{0,L-1} - M_{1,L},  M_{1,L} - a M_{0,L-1}
///   even L: M_{0,L},  (a+b) M_{1,L-1} - ab M_{0,L-2} - M_{2,L}
/// The second even-order matrix is omitted for L = 0.
std::vector<Eigen::MatrixXd> certifying_matrices(std::span<const double> m, const Interval& iv);

struct Validity {
  bool valid = false;
  /// Smallest eigenvalue over the certifying matrices (negative => violated).
  double min_eigenvalue = 0.0;
  /// max(0, -min eigenvalue), zero for valid vectors.
  double violation = 0.0;
};

inline constexpr double kPsdRelativeTolerance = 1e-10;

/// Membership test for the moment space M_L([a, b]). Each certifying matrix
/// A must satisfy lambda_min(A) >= -rel_tol * (1 + trace(A)).
Validity is_valid(const MomentVector& moments, double rel_tol = kPsdRelativeTolerance);

struct ProjectionOptions {
  double tol = 1e-8;
  long max_iterations = 100000;
};

struct ProjectionResult {
  MomentVector projected;
  double distance = 0.0;
  long iterations = 0;
  /// Most negative eigenvalue across the certifying matrices (>= -1e-8).
  double feasibility_violation = 0.0;
};

/// Euclidean projection of a moment vector onto the moment space of its
/// interval, computed with a log-barrier interior-point method on the
/// linear matrix inequalities above. Valid inputs are returned unchanged
/// with distance 0. Throws ConvergenceError (carrying the best iterate)
/// when the iteration cap is hit.
ProjectionResult project(const MomentVector& noisy, const ProjectionOptions& opts = {});

/// Number of support points implied by (m_0 = 1, m_1, ..., m_{2 r_max}).
/// Returns the smallest r whose normalized determinant
/// det(M_r) / (det(M_{r-1}) * M_r[r, r]) is <= rank_tol, or r_max + 1 if
/// every one is positive. A vanishing diagonal entry counts as a zero
/// determinant. Requires an odd number of entries (even number of moments).
int detect_order(std::span<const double> moments, double rank_tol = 1e-10);

}  // namespace dmm
