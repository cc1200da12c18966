#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <thread>

#include "json.hpp"

#include "dmm/cli/cli.hpp"
#include "dmm/em.hpp"
#include "dmm/error.hpp"
#include "dmm/estimators.hpp"
#include "dmm/metrics.hpp"

namespace dmm::cli {

namespace {

constexpr std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names{"dmm", "lindsay", "em", "unbounded", "ddim"};
  return names;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

struct Fit {
  std::optional<DiscreteDistribution> mixing;
  std::vector<double> support;
  std::optional<double> sigma2;
};

Fit run_estimator(const Scenario& sc, const std::string& name, const std::vector<double>& xs,
                  std::uint64_t estimator_seed) {
  const int k = sc.k.value_or(static_cast<int>(sc.model.mixing().size()));
  EstimatorConfig config;
  config.k = k;
  config.interval = sc.interval;
  config.batches = sc.batches;

  Fit fit;
  auto from_report = [&fit](const EstimationReport& rep) {
    fit.mixing = rep.model.mixing();
    const auto atoms = rep.model.mixing().atoms();
    fit.support.assign(atoms.begin(), atoms.end());
  };

  if (name == "dmm") {
    config.sigma2 = sc.model.sigma2();
    from_report(dmm_known_variance(xs, config));
  } else if (name == "lindsay") {
    const EstimationReport rep = lindsay_unknown_variance(xs, config);
    from_report(rep);
    fit.sigma2 = rep.model.sigma2();
  } else if (name == "em") {
    EMConfig em;
    em.k = k;
    em.seed = estimator_seed;
    from_report(em_fit(xs, em, sc.model.sigma2()).report);
  } else if (name == "unbounded") {
    config.sigma2 = sc.model.sigma2();
    const UnboundedConfig uc = default_unbounded_config(xs.size(), k, 1.0 / 3.0, 0.05);
    fit.support = estimate_unbounded(xs, config, uc).means;
  } else if (name == "ddim") {
    config.sigma2 = sc.model.sigma2();
    const Eigen::MatrixXd samples =
        Eigen::Map<const Eigen::MatrixXd>(xs.data(), static_cast<Eigen::Index>(xs.size()), 1);
    const Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(1, 1, sc.model.sigma2());
    DDimConfig dc;
    dc.seed = estimator_seed;
    if (sc.interval) {
      dc.rho = std::max(std::abs(sc.interval->lo), std::abs(sc.interval->hi));
    } else {
      dc.rho = 0.0;
      for (double x : xs) dc.rho = std::max(dc.rho, std::abs(x));
    }
    config.interval.reset();
    const DDimResult r = estimate_d_dimensional(samples, cov, config, dc);
    std::vector<double> atoms;
    for (const auto& m : r.means) atoms.push_back(m(0));
    fit.mixing = DiscreteDistribution(atoms, r.weights);
    const auto a = fit.mixing->atoms();
    fit.support.assign(a.begin(), a.end());
  }
  return fit;
}

BenchmarkRow run_cell(const Scenario& sc, const std::string& name, std::size_t n, int trial) {
  BenchmarkRow row;
  row.scenario = sc.id;
  row.estimator = name;
  row.n = n;
  row.trial = trial;

  const std::vector<double> xs = sample(sc.model, n, hash_seed(sc.seed, "data", n, trial));
  const auto start = std::chrono::steady_clock::now();
  try {
    const Fit fit = run_estimator(sc, name, xs, hash_seed(sc.seed, name, n, trial));
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    const DiscreteDistribution& truth = sc.model.mixing();
    if (fit.mixing) {
      row.w1 = wasserstein1(truth, *fit.mixing);
      if (fit.mixing->size() == truth.size()) {
        row.mean_err = matched_parameter_error(truth, *fit.mixing).mean_error;
      }
    }
    if (!row.mean_err && !fit.support.empty()) {
      row.mean_err = hausdorff(truth.atoms(), fit.support);
    }
    if (fit.sigma2) row.sigma2_err = std::abs(*fit.sigma2 - sc.model.sigma2());
  } catch (const Error& e) {
    row.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    row.error = e.what();
  }
  return row;
}

std::string format_number(std::optional<double> v) {
  if (!v) return {};
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.15g", *v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += (c == '\n' || c == '\r') ? ' ' : c;
  }
  q += '"';
  return q;
}

}  // namespace

std::uint64_t hash_seed(std::uint64_t seed, std::string_view tag, std::uint64_t a, std::uint64_t b) {
  std::uint64_t h = splitmix(seed);
  for (unsigned char c : tag) h = splitmix(h ^ c);
  h = splitmix(h ^ a);
  return splitmix(h ^ b);
}

Scenario scenario_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed scenario JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     line, col);
  }
  try {
    if (!j.is_object()) throw PreconditionError("scenario JSON must be an object");
    Scenario sc;
    sc.id = j.value("id", std::string("scenario"));
    if (!j.contains("model")) throw PreconditionError("scenario needs a \"model\"");
    sc.model = model_from_json(j.at("model").dump());
    sc.n = j.at("n").get<std::vector<std::size_t>>();
    if (sc.n.empty()) throw PreconditionError("scenario n grid must be non-empty");
    sc.trials = j.value("trials", 1);
    if (sc.trials < 1) throw PreconditionError("scenario trials must be >= 1");
    sc.estimators = j.value("estimators", std::vector<std::string>{"dmm"});
    if (sc.estimators.empty()) throw PreconditionError("scenario needs at least one estimator");
    for (const auto& e : sc.estimators) {
      if (std::find(known_estimators().begin(), known_estimators().end(), e) == known_estimators().end()) {
        throw PreconditionError("unknown estimator \"" + e + "\"");
      }
    }
    if (j.contains("k")) sc.k = j.at("k").get<int>();
    if (j.contains("interval")) {
      const auto iv = j.at("interval").get<std::vector<double>>();
      if (iv.size() != 2) throw PreconditionError("scenario interval must be [a, b]");
      sc.interval = Interval(iv[0], iv[1]);
    }
    if (j.contains("separation")) {
      const auto& s = j.at("separation");
      sc.separation = Separation{s.value("k0", 0), s.value("gamma", 0.0), s.value("omega", 0.0)};
    }
    sc.batches = j.value("batches", 1);
    sc.seed = j.value("seed", std::uint64_t{0});
    return sc;
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError(std::string("invalid scenario: ") + e.what());
  }
}

std::vector<BenchmarkRow> run_benchmark(const Scenario& scenario, int jobs) {
  struct Cell {
    std::string estimator;
    std::size_t n;
    int trial;
  };
  std::vector<Cell> cells;
  for (const auto& e : scenario.estimators) {
    for (std::size_t n : scenario.n) {
      for (int t = 0; t < scenario.trials; ++t) cells.push_back({e, n, t});
    }
  }
  std::vector<BenchmarkRow> rows(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      rows[i] = run_cell(scenario, cells[i].estimator, cells[i].n, cells[i].trial);
    }
  };
  const int threads = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(cells.size(), 1)));
  {
    std::vector<std::jthread> pool;
    for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  std::sort(rows.begin(), rows.end(), [](const BenchmarkRow& a, const BenchmarkRow& b) {
    return std::tie(a.estimator, a.n, a.trial) < std::tie(b.estimator, b.n, b.trial);
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchmarkRow>& rows) {
  out << kCsvHeader << '\n';
  for (const auto& r : rows) {
    out << csv_field(r.scenario) << ',' << r.estimator << ',' << r.n << ',' << r.trial << ','
        << format_number(r.w1) << ',' << format_number(r.mean_err) << ','
        << format_number(r.sigma2_err) << ',' << format_number(r.wall_ms) << ','
        << csv_field(r.error) << '\n';
  }
}

}  // namespace dmm::cli
