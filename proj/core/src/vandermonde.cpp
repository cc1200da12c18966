#include "dmm/vandermonde.hpp"

#include "dmm/error.hpp"

namespace dmm {

// Golub & Van Loan, "primal" Vandermonde system V z = b with V(i, j) = x_j^i.
template <typename Real>
std::vector<Real> bjorck_pereyra_solve(std::span<const Real> nodes, std::span<const Real> rhs) {
  if (nodes.size() != rhs.size() || nodes.empty()) {
    throw PreconditionError("bjorck_pereyra_solve needs equally many nodes and right-hand sides");
  }
  const std::size_t n = nodes.size() - 1;
  std::vector<Real> z(rhs.begin(), rhs.end());
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = n; i > k; --i) z[i] -= nodes[k] * z[i - 1];
  }
  for (std::size_t kk = n; kk-- > 0;) {
    for (std::size_t i = kk + 1; i <= n; ++i) {
      const Real diff = nodes[i] - nodes[i - kk - 1];
      if (diff == Real(0)) throw PreconditionError("bjorck_pereyra_solve needs distinct nodes");
      z[i] /= diff;
    }
    for (std::size_t i = kk; i < n; ++i) z[i] -= z[i + 1];
  }
  return z;
}

template std::vector<double> bjorck_pereyra_solve<double>(std::span<const double>,
                                                          std::span<const double>);
template std::vector<long double> bjorck_pereyra_solve<long double>(std::span<const long double>,
                                                                    std::span<const long double>);

}  // namespace dmm
