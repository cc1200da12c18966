#include <fstream>
#include <iterator>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "dmm/cli/cli.hpp"
#include "dmm/em.hpp"
#include "dmm/error.hpp"
#include "dmm/estimators.hpp"

namespace dmm::cli {

namespace {

constexpr int kExitError = 1;
constexpr int kExitUsage = 2;

/// Thrown for unreadable input files; maps to exit code 2.
struct FileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FileError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Options {
  std::string model_path;
  std::string samples_path;
  std::string scenario_path;
  std::string out_path;
  std::string estimator = "dmm";
  std::size_t n = 0;
  int k = 1;
  std::optional<double> sigma2;
  std::vector<double> interval;
  int batches = 1;
  std::optional<double> tau;
  std::optional<double> L;
  std::uint64_t seed = 0;
  int jobs = 1;
};

/// Writes to --out when given, else to `out`.
template <typename F>
void emit(const std::string& path, std::ostream& out, F&& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw FileError("cannot write " + path);
  write(file);
}

nlohmann::json error_json(std::string_view type, const std::string& message) {
  return {{"error", {{"type", type}, {"message", message}}}};
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const GaussianMixture model = model_from_json(read_file(o.model_path));
  const std::vector<double> xs = sample(model, o.n, o.seed);
  emit(o.out_path, out, [&](std::ostream& s) { write_samples(s, xs); });
  return 0;
}

nlohmann::json run_estimate(const Options& o, const std::vector<std::vector<double>>& rows) {
  EstimatorConfig config;
  config.k = o.k;
  config.sigma2 = o.sigma2;
  config.batches = o.batches;
  if (o.interval.size() == 2) config.interval = Interval(o.interval[0], o.interval[1]);

  const std::size_t d = rows.empty() ? 1 : rows.front().size();
  if (o.estimator != "ddim" && d != 1) {
    throw PreconditionError("estimator " + o.estimator + " expects one value per line");
  }
  std::vector<double> xs;
  if (d == 1) {
    for (const auto& r : rows) xs.push_back(r[0]);
  }

  if (o.estimator == "dmm") {
    return nlohmann::json::parse(to_json(dmm_known_variance(xs, config)));
  }
  if (o.estimator == "lindsay") {
    if (o.sigma2) throw PreconditionError("lindsay estimates the variance; drop --sigma2");
    return nlohmann::json::parse(to_json(lindsay_unknown_variance(xs, config)));
  }
  if (o.estimator == "em") {
    EMConfig em;
    em.k = o.k;
    em.seed = o.seed;
    const EMResult r = em_fit(xs, em, o.sigma2);
    auto j = nlohmann::json::parse(to_json(r.report));
    j["best_restart"] = r.best_restart;
    return j;
  }
  if (o.estimator == "unbounded") {
    UnboundedConfig uc = default_unbounded_config(xs.size(), o.k, 1.0 / 3.0, 0.05);
    if (o.L) uc.L = *o.L;
    if (o.tau) uc.tau = *o.tau;
    const UnboundedResult r = estimate_unbounded(xs, config, uc);
    nlohmann::json j;
    j["means"] = r.means;
    j["intervals"] = nlohmann::json::array();
    for (std::size_t i = 0; i < r.intervals.size(); ++i) {
      const auto& ci = r.intervals[i];
      nlohmann::json item = {{"lo", ci.center - ci.half_length},
                             {"hi", ci.center + ci.half_length},
                             {"samples", ci.members.size()}};
      item["report"] = r.reports[i] ? nlohmann::json::parse(to_json(*r.reports[i])) : nlohmann::json();
      j["intervals"].push_back(std::move(item));
    }
    j["notes"] = r.notes;
    return j;
  }
  if (o.estimator == "ddim") {
    if (!o.sigma2) throw PreconditionError("ddim needs --sigma2 (covariance sigma2 * I)");
    Eigen::MatrixXd samples(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      for (std::size_t c = 0; c < d; ++c) {
        samples(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(c)) = rows[i][c];
      }
    }
    const auto dim = static_cast<Eigen::Index>(d);
    DDimConfig dc;
    dc.seed = o.seed;
    if (o.tau) dc.tau = *o.tau;
    if (config.interval) {
      dc.rho = std::max(std::abs(config.interval->lo), std::abs(config.interval->hi));
      config.interval.reset();
    } else {
      dc.rho = samples.rowwise().norm().maxCoeff();
    }
    const DDimResult r =
        estimate_d_dimensional(samples, *o.sigma2 * Eigen::MatrixXd::Identity(dim, dim), config, dc);
    nlohmann::json j;
    j["weights"] = r.weights;
    j["means"] = nlohmann::json::array();
    for (const auto& m : r.means) j["means"].push_back(std::vector<double>(m.data(), m.data() + m.size()));
    return j;
  }
  throw PreconditionError("unknown estimator " + o.estimator);
}

int cmd_estimate(const Options& o, std::ostream& out) {
  std::vector<std::vector<double>> rows;
  {
    std::ifstream in(o.samples_path);
    if (!in) throw FileError("cannot open " + o.samples_path);
    rows = read_sample_rows(in);
  }
  nlohmann::json report;
  try {
    report = run_estimate(o, rows);
  } catch (const DiagnosticError& e) {
    out << error_json("diagnostic", e.what()).dump(2) << '\n';
    return kExitError;
  } catch (const PreconditionError& e) {
    out << error_json("precondition", e.what()).dump(2) << '\n';
    return kExitError;
  } catch (const Error& e) {
    out << error_json("error", e.what()).dump(2) << '\n';
    return kExitError;
  }
  emit(o.out_path, out, [&](std::ostream& s) { s << report.dump(2) << '\n'; });
  return 0;
}

int cmd_benchmark(const Options& o, std::ostream& out) {
  const Scenario sc = scenario_from_json(read_file(o.scenario_path));
  const auto rows = run_benchmark(sc, o.jobs);
  emit(o.out_path, out, [&](std::ostream& s) { write_csv(s, rows); });
  return 0;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian location mixtures by the denoised method of moments", "dmm"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Draw samples from a model JSON file");
  sim->add_option("model", o.model_path, "Model JSON {\"weights\", \"means\", \"sigma2\"}")->required();
  sim->add_option("--n", o.n, "Number of samples")->required();
  sim->add_option("--seed", o.seed, "RNG seed");
  sim->add_option("--out", o.out_path, "Output file (default stdout)");

  auto* est = app.add_subcommand("estimate", "Fit a mixture to a sample file");
  est->add_option("samples", o.samples_path, "Sample file, one observation per line")->required();
  est->add_option("--estimator", o.estimator, "Estimator")
      ->check(CLI::IsMember({"dmm", "lindsay", "em", "unbounded", "ddim"}));
  est->add_option("--k", o.k, "Number of components")->check(CLI::PositiveNumber);
  est->add_option("--sigma2", o.sigma2, "Known common variance");
  est->add_option("--interval", o.interval, "Support interval a b for the means")->expected(2);
  est->add_option("--batches", o.batches, "Median-of-batches count")->check(CLI::PositiveNumber);
  est->add_option("--tau", o.tau, "Weight threshold (unbounded) or perturbation size (ddim)");
  est->add_option("--L", o.L, "Cluster radius (unbounded)");
  est->add_option("--seed", o.seed, "Seed for randomized estimators");
  est->add_option("--out", o.out_path, "Output file (default stdout)");

  auto* bench = app.add_subcommand("benchmark", "Run a benchmark scenario and write CSV");
  bench->add_option("scenario", o.scenario_path, "Scenario JSON file")->required();
  bench->add_option("--jobs", o.jobs, "Parallel grid cells")->check(CLI::PositiveNumber);
  bench->add_option("--out", o.out_path, "Output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*sim) return cmd_simulate(o, out);
    if (*est) return cmd_estimate(o, out);
    return cmd_benchmark(o, out);
  } catch (const FileError& e) {
    err << "dmm: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "dmm: " << e.what() << '\n';
    return kExitError;
  } catch (const Error& e) {
    err << "dmm: " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace dmm::cli
