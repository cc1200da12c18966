#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dmm/distributions.hpp"

namespace dmm::cli {

/// Labels for reporting only; the estimators never read them.
struct Separation {
  int k0 = 0;
  double gamma = 0.0;
  double omega = 0.0;
};

struct Scenario {
  std::string id;
  GaussianMixture model{DiscreteDistribution::point_mass(0.0), 1.0};
  std::vector<std::size_t> n;
  int trials = 1;
  std::vector<std::string> estimators;
  std::optional<int> k;  ///< defaults to the number of model atoms
  std::optional<Interval> interval;
  std::optional<Separation> separation;
  int batches = 1;
  std::uint64_t seed = 0;
};

struct BenchmarkRow {
  std::string scenario;
  std::string estimator;
  std::size_t n = 0;
  int trial = 0;
  std::optional<double> w1;
  std::optional<double> mean_err;
  std::optional<double> sigma2_err;
  double wall_ms = 0.0;
  std::string error;
};

inline constexpr std::string_view kCsvHeader =
    "scenario,estimator,n,trial,w1,mean_err,sigma2_err,wall_ms,error";

/// Throws ParseError (JSON syntax) or PreconditionError (schema).
Scenario scenario_from_json(std::string_view text);

/// Deterministic 64-bit mix of the parts (splitmix64 chaining).
std::uint64_t hash_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a, std::uint64_t b);

/// Runs every (estimator, n, trial) cell on up to `jobs` threads. Rows come
/// back sorted by (estimator, n, trial). Estimator failures are recorded
/// in the row's error field.
std::vector<BenchmarkRow> run_benchmark(const Scenario& scenario, int jobs);

void write_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows);

/// One sample per line, %.17g.
void write_samples(std::ostream& out, const std::vector<double>& samples);

/// Whitespace-separated decimals, one observation per line; every line
/// must have the same number of columns. Throws ParseError with the line.
std::vector<std::vector<double>> read_sample_rows(std::istream& in);

/// Entry point shared by the executable and the tests. Returns the exit
/// code: 0 success, 1 estimator or input error, 2 unreadable file or bad
/// usage.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dmm::cli
