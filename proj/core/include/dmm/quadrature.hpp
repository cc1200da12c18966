#pragma once

#include "dmm/distributions.hpp"

namespace dmm {

struct QuadratureOptions {
  /// Relative Cholesky pivot below which the Hankel matrix is treated as
  /// singular and the order is reduced.
  double pivot_tol = 1e-14;
  /// Weights below -negative_weight_tol trigger order reduction; weights in
  /// [-negative_weight_tol, 0] are clipped to zero.
  double negative_weight_tol = 1e-8;
  /// Atoms further than this outside the interval are a numerical failure.
  double support_slack = 1e-6;
};

/// The unique k-atomic distribution matching a valid moment vector
/// (m_1, ..., m_{2k-1}) on its interval, via the Jacobi matrix of the
/// orthogonal polynomials (Golub–Welsch) and a Björck–Pereyra weight solve.
///
/// Near the boundary of the moment space the number of atoms is reduced
/// until the Hankel matrix is numerically positive definite, so the result
/// can have fewer than k atoms. Atoms are clipped to the interval.
///
/// Throws PreconditionError if the input fails is_valid or has even length,
/// and DiagnosticError if no order yields a usable rule.
DiscreteDistribution gauss_quadrature(const MomentVector& moments,
                                      const QuadratureOptions& opts = {});

/// k-point Gauss–Hermite rule for N(0, variance): atoms are scaled roots of
/// He_k and the first 2k-1 moments agree with the Gaussian's.
DiscreteDistribution quadrature_of_gaussian(int k, double variance);

}  // namespace dmm
