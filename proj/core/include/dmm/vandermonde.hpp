#pragma once

#include <span>
#include <vector>

namespace dmm {

/// Solves sum_j w_j x_j^i = rhs_i for i = 0..k-1 (the transposed Vandermonde
/// system that maps weights to moments) with the Björck–Pereyra algorithm.
/// Nodes must be distinct; O(k^2) operations.
template <typename Real>
std::vector<Real> bjorck_pereyra_solve(std::span<const Real> nodes, std::span<const Real> rhs);

extern template std::vector<double> bjorck_pereyra_solve<double>(std::span<const double>,
                                                                 std::span<const double>);
extern template std::vector<long double> bjorck_pereyra_solve<long double>(
    std::span<const long double>, std::span<const long double>);

}  // namespace dmm
