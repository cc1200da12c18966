#include <cmath>
#include <random>

#include "dmm/error.hpp"
#include "dmm/estimators.hpp"

namespace dmm {

DDimConfig default_ddim_config(double M, double eps, double delta, int k, int d, std::uint64_t seed) {
  if (!(M > 0.0) || !(eps > 0.0) || !(delta > 0.0) || k < 1 || d < 1) {
    throw PreconditionError("default_ddim_config needs positive M, eps, delta, k, d");
  }
  const double eps_tilde = delta * eps / (static_cast<double>(k) * k * std::sqrt(static_cast<double>(d)));
  return {eps_tilde / (2.0 * M), M, seed};
}

namespace {

struct DirectionFit {
  std::vector<double> means;
  std::vector<double> weights;
};

DirectionFit fit_direction(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& covariance,
                           const Eigen::VectorXd& direction, const EstimatorConfig& base,
                           double half_width) {
  const Eigen::VectorXd projected = samples * direction;
  EstimatorConfig config = base;
  config.sigma2 = direction.dot(covariance * direction);
  config.interval = Interval(-half_width, half_width);
  const EstimationReport rep = dmm_known_variance(
      std::span<const double>(projected.data(), static_cast<std::size_t>(projected.size())), config);
  const auto atoms = rep.model.mixing().atoms();
  const auto weights = rep.model.mixing().weights();
  return {{atoms.begin(), atoms.end()}, {weights.begin(), weights.end()}};
}

}  // namespace

DDimResult estimate_d_dimensional(const Eigen::MatrixXd& samples, const Eigen::MatrixXd& covariance,
                                  const EstimatorConfig& config, const DDimConfig& ddim) {
  const Eigen::Index d = samples.cols();
  if (samples.rows() < 1 || d < 1) throw PreconditionError("estimate_d_dimensional needs n, d >= 1");
  if (covariance.rows() != d || covariance.cols() != d) {
    throw PreconditionError("covariance must be d x d");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success || !covariance.isApprox(covariance.transpose())) {
    throw PreconditionError("covariance must be symmetric positive definite");
  }
  if (!(ddim.tau > 0.0) || !(ddim.rho > 0.0)) throw PreconditionError("tau and rho must be positive");

  // Random orthonormal basis from the QR factorization of a Gaussian matrix.
  std::mt19937_64 rng(ddim.seed);
  std::normal_distribution<double> normal;
  Eigen::MatrixXd g(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) g(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  const Eigen::MatrixXd basis = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  const Eigen::VectorXd r = basis.col(0);

  const DirectionFit primary = fit_direction(samples, covariance, r, config, ddim.rho);
  const std::size_t k = primary.means.size();

  DDimResult out;
  out.basis = basis;
  out.weights = primary.weights;
  out.means.assign(k, Eigen::VectorXd::Zero(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    const Eigen::VectorXd perturbed = r + ddim.tau * basis.col(i);
    const DirectionFit secondary =
        fit_direction(samples, covariance, perturbed, config, ddim.rho + ddim.tau);
    if (secondary.means.size() != k) {
      throw DiagnosticError("estimate_d_dimensional: direction " + std::to_string(i) + " found " +
                            std::to_string(secondary.means.size()) + " components, expected " +
                            std::to_string(k));
    }
    for (std::size_t j = 0; j < k; ++j) {
      out.means[j] += basis.col(i) * ((secondary.means[j] - primary.means[j]) / ddim.tau);
    }
  }
  return out;
}

}  // namespace dmm
