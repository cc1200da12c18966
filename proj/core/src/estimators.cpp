#include "dmm/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "json.hpp"

#include "dmm/error.hpp"
#include "dmm/hermite.hpp"

namespace dmm {

namespace {

using Clock = std::chrono::steady_clock;

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

std::pair<double, double> sample_range(std::span<const double> xs) {
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  return {*lo, *hi};
}

void check_finite(std::span<const double> xs) {
  for (double x : xs) {
    if (!std::isfinite(x)) throw PreconditionError("samples must be finite");
  }
}

Interval padded_interval(double lo, double hi) {
  if (hi > lo) return {lo, hi};
  return {lo - 1.0, hi + 1.0};
}

}  // namespace

bool k_exceeds_advisory_bound(int k, std::size_t n) {
  if (n < 16) return k > 1;
  const double ln = std::log(static_cast<double>(n));
  return k > 2.0 * ln / std::log(ln);
}

std::string to_json(const EstimationReport& report) {
  nlohmann::json j;
  j["model"] = nlohmann::json::parse(to_json(report.model));
  j["projection_distance"] = report.projection_distance;
  j["detected_order"] = report.detected_order;
  if (report.sigma_root_bracket) {
    j["sigma_root_bracket"] = {report.sigma_root_bracket->first, report.sigma_root_bracket->second};
  } else {
    j["sigma_root_bracket"] = nullptr;
  }
  j["wallclock_ms"] = report.wallclock.count() * 1e3;
  j["diagnostics"] = report.diagnostics;
  return j.dump();
}

EstimationReport dmm_known_variance(std::span<const double> samples, const EstimatorConfig& config) {
  const auto start = Clock::now();
  if (!config.sigma2 || !(*config.sigma2 >= 0.0)) {
    throw PreconditionError("dmm_known_variance needs a known, non-negative sigma2");
  }
  if (config.k < 1) throw PreconditionError("dmm_known_variance needs k >= 1");
  if (samples.empty()) throw InsufficientSamplesError("dmm_known_variance needs a sample");
  check_finite(samples);

  const double sigma = std::sqrt(*config.sigma2);
  std::vector<std::string> notes;
  Interval iv;
  if (config.interval) {
    iv = *config.interval;
  } else {
    const auto [lo, hi] = sample_range(samples);
    iv = padded_interval(lo - 3.0 * sigma, hi + 3.0 * sigma);
    notes.push_back("interval defaulted to [" + fmt(iv.lo) + ", " + fmt(iv.hi) + "]");
  }
  if (k_exceeds_advisory_bound(config.k, samples.size())) {
    notes.push_back("warning: k = " + std::to_string(config.k) +
                    " exceeds O(log n / log log n) for n = " + std::to_string(samples.size()));
  }

  // Work on the interval mapped to [-1, 1].
  const double center = iv.center();
  const double half = iv.half_length();
  std::vector<double> scaled(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) scaled[i] = (samples[i] - center) / half;
  const double scaled_sigma = sigma / half;

  const int T = config.high_prob_delta ? default_batch_count(config.k, *config.high_prob_delta)
                                       : std::max(1, config.batches);
  const int L = 2 * config.k - 1;
  const MomentEstimate est = median_of_batches(scaled, L, scaled_sigma, T);
  if (T > 1) notes.push_back("median of " + std::to_string(T) + " batches");

  const MomentVector noisy(est.values, Interval(-1.0, 1.0));
  const ProjectionResult proj = project(noisy, {config.tol.projection, 100000});
  notes.push_back("projection iterations: " + std::to_string(proj.iterations));

  const DiscreteDistribution fitted = gauss_quadrature(proj.projected);

  EstimationReport report{GaussianMixture(fitted.transformed(half, center), *config.sigma2),
                          proj.distance,
                          static_cast<int>(fitted.size()),
                          std::nullopt,
                          {},
                          std::move(notes)};
  report.wallclock = Clock::now() - start;
  return report;
}

DiscreteDistribution naive_method_of_moments(std::span<const double> samples, int k, double sigma2) {
  if (k < 1) throw PreconditionError("naive_method_of_moments needs k >= 1");
  if (samples.empty()) throw InsufficientSamplesError("naive_method_of_moments needs a sample");
  if (!(sigma2 >= 0.0)) throw PreconditionError("naive_method_of_moments needs sigma2 >= 0");
  const MomentEstimate est = estimate_mixing_moments(samples, 2 * k - 1, std::sqrt(sigma2));

  // The moment equations are solvable by a k-atomic distribution on the
  // line only if the k x k Hankel matrix of (1, m_1, ..., m_{2k-2}) is PD.
  std::vector<double> m{1.0};
  m.insert(m.end(), est.values.begin(), est.values.end());
  if (k > 1) {
    Eigen::LLT<Eigen::MatrixXd> llt(hankel(m, 0, 2 * k - 2));
    if (llt.info() != Eigen::Success) {
      throw DiagnosticError(
          "moment equations have no solution: the estimated moments violate the Hankel "
          "positivity (Cauchy-Schwarz) constraints");
    }
  }
  const auto [lo, hi] = sample_range(samples);
  const double width = std::max(1.0, hi - lo);
  // A very wide interval leaves only the Hankel constraint active.
  const MomentVector mv(est.values, Interval(lo - 1e3 * width, hi + 1e3 * width));
  try {
    return gauss_quadrature(mv);
  } catch (const PreconditionError& e) {
    throw DiagnosticError(std::string("moment equations have no solution: ") + e.what());
  }
}

RootSearchResult smallest_positive_root(const std::function<double(double)>& f, double upper,
                                        double root_tol) {
  if (!(upper > 0.0)) throw PreconditionError("smallest_positive_root needs upper > 0");
  if (!(root_tol > 0.0)) throw PreconditionError("smallest_positive_root needs root_tol > 0");
  const double f0 = f(0.0);
  if (!(f0 > 0.0)) {
    throw DiagnosticError("smallest_positive_root: function is not positive at 0+; no root to bracket");
  }

  std::vector<double> grid;
  constexpr int kGeometric = 100;
  constexpr int kLinear = 200;
  for (int i = 0; i < kGeometric; ++i) {
    grid.push_back(upper * std::pow(10.0, -6.0 + 6.0 * i / kGeometric));
  }
  for (int i = 1; i <= kLinear; ++i) grid.push_back(upper * i / kLinear);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  double lo = 0.0;
  for (double g : grid) {
    const double fg = f(g);
    if (fg == 0.0) return {g, {g, g}};
    if (fg < 0.0) {
      double hi = g;
      while (hi - lo > root_tol) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double fm = f(mid);
        if (fm == 0.0) return {mid, {mid, mid}};
        if (fm > 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      return {0.5 * (lo + hi), {lo, hi}};
    }
    lo = g;
  }
  throw DiagnosticError(
      "smallest_positive_root: no sign change on the scan grid over (0, " + fmt(upper) +
      "]; try a finer grid");
}

namespace {

using Real = long double;

// Coefficients c[r][i] of m_r(sigma) = sum_i c[r][i] gamma_{r-2i} sigma^{2i}:
// c = r! (-1/2)^i / (i! (r-2i)!).
std::vector<std::vector<Real>> deconvolution_coefficients(int max_order) {
  std::vector<std::vector<Real>> c(static_cast<std::size_t>(max_order) + 1);
  for (int r = 0; r <= max_order; ++r) {
    Real term = 1.0L;  // i = 0
    for (int i = 0; 2 * i <= r; ++i) {
      c[static_cast<std::size_t>(r)].push_back(term);
      // term_{i+1} / term_i = -(r-2i)(r-2i-1) / (2 (i+1))
      term *= -static_cast<Real>((r - 2 * i) * (r - 2 * i - 1)) / (2.0L * (i + 1));
    }
  }
  return c;
}

std::vector<Real> deconvolved_moments(const std::vector<Real>& raw,
                                      const std::vector<std::vector<Real>>& coef, Real sigma) {
  const Real s2 = sigma * sigma;
  std::vector<Real> m(raw.size());
  for (std::size_t r = 0; r < raw.size(); ++r) {
    Real acc = 0.0L;
    Real p = 1.0L;
    for (std::size_t i = 0; i < coef[r].size(); ++i) {
      acc += coef[r][i] * raw[r - 2 * i] * p;
      p *= s2;
    }
    m[r] = acc;
  }
  return m;
}

// Determinant of the (k+1) x (k+1) Hankel matrix of m_0..m_2k.
Real hankel_determinant(const std::vector<Real>& m, int k) {
  using RealMatrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
  RealMatrix h(k + 1, k + 1);
  for (int i = 0; i <= k; ++i) {
    for (int j = 0; j <= k; ++j) h(i, j) = m[static_cast<std::size_t>(i + j)];
  }
  const Real det = h.partialPivLu().determinant();
  // Past the first root the matrix is indefinite even where an even number of
  // eigenvalues have crossed zero and the determinant is positive again. Report
  // those points as negative so the scan cannot skip a root of even multiplicity.
  if (Eigen::LLT<RealMatrix>(h).info() != Eigen::Success) return -std::abs(det);
  return det;
}

}  // namespace

EstimationReport lindsay_unknown_variance(std::span<const double> samples,
                                          const EstimatorConfig& config) {
  const auto start = Clock::now();
  int k = config.k;
  if (k < 1) throw PreconditionError("lindsay_unknown_variance needs k >= 1");
  const std::size_t n = samples.size();
  if (n < static_cast<std::size_t>(std::max(2 * k - 1, 1))) {
    throw InsufficientSamplesError("lindsay_unknown_variance needs n >= 2k - 1");
  }
  check_finite(samples);
  std::vector<std::string> notes;

  if (config.screening_tau) {
    const MomentEstimate raw = estimate_mixing_moments(samples, 2 * k, 0.0);
    const int screened = screen_order(raw, k, *config.screening_tau);
    if (screened < k) {
      notes.push_back("moment screening reduced k from " + std::to_string(k) + " to " +
                      std::to_string(screened));
      k = screened;
    }
  }
  if (k_exceeds_advisory_bound(k, n)) {
    notes.push_back("warning: k = " + std::to_string(k) + " exceeds O(log n / log log n) for n = " +
                    std::to_string(n));
  }

  // Standardize: z = (x - mean) / s.
  Real mean = 0.0L;
  for (double x : samples) mean += x;
  mean /= static_cast<Real>(n);
  Real var = 0.0L;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= static_cast<Real>(n);
  const double xbar = static_cast<double>(mean);
  const double s = std::sqrt(static_cast<double>(var));

  if (!(s > 0.0)) {
    notes.push_back("all samples identical; returning a point mass with zero variance");
    EstimationReport report{GaussianMixture(DiscreteDistribution::point_mass(xbar), 0.0), 0.0, 1,
                            std::pair<double, double>{0.0, 0.0}, {}, std::move(notes)};
    report.wallclock = Clock::now() - start;
    return report;
  }

  std::vector<Real> raw(static_cast<std::size_t>(2 * k) + 1, 0.0L);
  raw[0] = 1.0L;
  for (double x : samples) {
    const Real z = (static_cast<Real>(x) - mean) / static_cast<Real>(s);
    Real p = 1.0L;
    for (int r = 1; r <= 2 * k; ++r) {
      p *= z;
      raw[static_cast<std::size_t>(r)] += p;
    }
  }
  for (int r = 1; r <= 2 * k; ++r) raw[static_cast<std::size_t>(r)] /= static_cast<Real>(n);
  const auto coef = deconvolution_coefficients(2 * k);

  const auto dhat = [&](double sigma) {
    return static_cast<double>(hankel_determinant(deconvolved_moments(raw, coef, sigma), k));
  };
  // The standardized sample variance is 1, so the root lies in (0, 1]. For
  // k = 1 it sits exactly at 1, where rounding may leave d-hat marginally
  // positive; the scan therefore runs slightly past it.
  const RootSearchResult root = smallest_positive_root(dhat, 1.0 + 1e-8, config.tol.root);
  const double sigma_hat = root.root;

  const std::vector<Real> m_hat = deconvolved_moments(raw, coef, sigma_hat);
  std::vector<double> full(static_cast<std::size_t>(2 * k));
  for (int r = 1; r <= 2 * k; ++r) full[static_cast<std::size_t>(r - 1)] = static_cast<double>(m_hat[static_cast<std::size_t>(r)]);

  Interval iv;
  if (config.interval) {
    iv = Interval((config.interval->lo - xbar) / s, (config.interval->hi - xbar) / s);
  } else {
    const auto [lo, hi] = sample_range(samples);
    iv = padded_interval((lo - xbar) / s - 3.0 * sigma_hat, (hi - xbar) / s + 3.0 * sigma_hat);
    // The atoms solving the moment equations can fall outside the data hull
    // (typically one far atom of tiny weight when k exceeds the true order).
    // Widen the default interval until it contains them so the projection
    // below does not move the moments.
    const std::vector<double> odd_part(full.begin(), full.end() - 1);
    int widened = 0;
    for (; widened < 12 && !is_valid(MomentVector(odd_part, iv)).valid; ++widened) {
      iv = Interval(iv.center() - 2.0 * iv.half_length(), iv.center() + 2.0 * iv.half_length());
    }
    if (widened > 0) {
      notes.push_back("default interval widened to [" + fmt(iv.lo * s + xbar) + ", " + fmt(iv.hi * s + xbar) +
                      "] to contain the fitted atoms");
    }
  }

  const Validity full_validity = is_valid(MomentVector(full, iv));
  if (!full_validity.valid) {
    notes.push_back("moments at sigma-hat fail the moment-space test (violation " +
                    fmt(full_validity.violation) + ")");
  }

  const MomentVector odd(std::vector<double>(full.begin(), full.end() - 1), iv);
  const ProjectionResult proj = project(odd, {config.tol.projection, 100000});
  const DiscreteDistribution fitted = gauss_quadrature(proj.projected);

  // The fitted mixture must also reproduce the 2k-th moment; otherwise the
  // moment equations have no solution (e.g. data whose moments are not those
  // of any k-component mixture).
  const MomentVector reproduced = exact_moments(fitted, 2 * k, iv);
  for (int r = 1; r <= 2 * k; ++r) {
    const double target = full[static_cast<std::size_t>(r - 1)];
    const double err = std::abs(reproduced[static_cast<std::size_t>(r)] - target);
    if (err > 1e-6 * (1.0 + std::abs(target))) {
      throw DiagnosticError("lindsay: moment equations have no solution at sigma-hat = " +
                            fmt(sigma_hat * s) + " (order-" + std::to_string(r) +
                            " moment mismatch " + fmt(err) + ")");
    }
  }

  EstimationReport report{GaussianMixture(fitted.transformed(s, xbar), sigma_hat * sigma_hat * s * s),
                          proj.distance,
                          static_cast<int>(fitted.size()),
                          std::pair<double, double>{root.bracket.first * s, root.bracket.second * s},
                          {},
                          std::move(notes)};
  report.wallclock = Clock::now() - start;
  return report;
}

double density_estimate(const EstimationReport& report, double x) { return density(report.model, x); }

}  // namespace dmm
