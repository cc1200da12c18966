#include <cmath>
#include <string>

#include "json.hpp"

#include "dmm/distributions.hpp"
#include "dmm/error.hpp"

namespace dmm {

namespace {

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

std::vector<double> number_array(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw PreconditionError(std::string("model JSON needs an array \"") + key + "\"");
  }
  std::vector<double> out;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) throw PreconditionError(std::string("non-numeric entry in \"") + key + "\"");
    out.push_back(v.get<double>());
  }
  return out;
}

}  // namespace

std::string to_json(const GaussianMixture& model) {
  nlohmann::json j;
  j["weights"] = std::vector<double>(model.mixing().weights().begin(), model.mixing().weights().end());
  j["means"] = std::vector<double>(model.mixing().atoms().begin(), model.mixing().atoms().end());
  j["sigma2"] = model.sigma2();
  return j.dump();
}

GaussianMixture model_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // e.byte is 1-based and points just past the offending character.
    const auto [line, col] = line_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed model JSON at line " + std::to_string(line) + ", column " +
                         std::to_string(col) + ": " + e.what(),
                     line, col);
  }
  if (!j.is_object()) throw PreconditionError("model JSON must be an object");
  auto weights = number_array(j, "weights");
  auto means = number_array(j, "means");
  if (!j.contains("sigma2") || !j.at("sigma2").is_number()) {
    throw PreconditionError("model JSON needs a numeric \"sigma2\"");
  }
  return {DiscreteDistribution(std::move(means), std::move(weights)), j.at("sigma2").get<double>()};
}

}  // namespace dmm
