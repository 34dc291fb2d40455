#pragma once

#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "errors.hpp"
#include "estimator.hpp"
#include "params.hpp"

namespace jtail {

/// One experiment: an ensemble, a grid of threshold factors and a method.
struct ExperimentConfig {
  double beta = 1.0;
  int n = 1;
  double p1 = 1.0;
  double p2 = 1.0;
  std::vector<double> x_values;
  long num_samples = 10000;
  std::uint64_t seed = 1;
  Method method = Method::kImportanceSampling;
  int workers = 1;
  std::string output_path;  // empty: standard output
  double regime_threshold = 0.1;
  double oracle_abs_tol = 1e-10;

  [[nodiscard]] ModelParams params() const { return {beta, n, p1, p2, std::nullopt}; }
};

inline Method parse_method(const std::string& s) {
  if (s == "is") return Method::kImportanceSampling;
  if (s == "mc") return Method::kDirectMC;
  if (s == "approx") return Method::kApproximation;
  if (s == "oracle") return Method::kOracle;
  throw ConfigError("key 'method': unknown method '" + s + "' (expected is, mc, approx, oracle)");
}

namespace detail {

using nlohmann::json;

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys = {
      "beta",    "n",           "p1",          "p2",
      "x_values", "num_samples", "seed",       "method",
      "workers", "output_path", "regime_threshold", "oracle_abs_tol"};
  return keys;
}

inline double get_real(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number()) throw ConfigError(std::string("key '") + key + "': expected a number");
  return v.get<double>();
}

inline long long get_int(const json& doc, const char* key) {
  const auto& v = doc.at(key);
  if (!v.is_number_integer())
    throw ConfigError(std::string("key '") + key + "': expected an integer");
  return v.get<long long>();
}

}  // namespace detail

/// Validates a parsed config document. Unknown keys are rejected.
inline ExperimentConfig config_from_json(const nlohmann::json& doc) {
  using detail::get_int;
  using detail::get_real;
  if (!doc.is_object()) throw ConfigError("config document must be a key-value object");
  for (const auto& [key, value] : doc.items()) {
    if (!detail::config_keys().contains(key)) throw ConfigError("unknown config key '" + key + "'");
  }
  for (const char* key : {"beta", "n", "p1", "p2", "x_values"}) {
    if (!doc.contains(key)) throw ConfigError(std::string("missing required key '") + key + "'");
  }
  ExperimentConfig cfg;
  cfg.beta = get_real(doc, "beta");
  const long long n = get_int(doc, "n");
  if (n < 1 || n > 1'000'000) throw ConfigError("key 'n': must be a positive integer");
  cfg.n = static_cast<int>(n);
  cfg.p1 = get_real(doc, "p1");
  cfg.p2 = get_real(doc, "p2");

  const auto& xs = doc.at("x_values");
  if (xs.is_number()) {
    cfg.x_values = {xs.get<double>()};
  } else if (xs.is_array()) {
    for (const auto& v : xs) {
      if (!v.is_number()) throw ConfigError("key 'x_values': entries must be numbers");
      cfg.x_values.push_back(v.get<double>());
    }
  } else {
    throw ConfigError("key 'x_values': expected a list of numbers");
  }
  if (doc.contains("num_samples")) cfg.num_samples = static_cast<long>(get_int(doc, "num_samples"));
  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("key 'seed': expected a non-negative integer");
    cfg.seed = v.get<std::uint64_t>();
  }
  if (doc.contains("method")) {
    if (!doc.at("method").is_string()) throw ConfigError("key 'method': expected a string");
    cfg.method = parse_method(doc.at("method").get<std::string>());
  }
  if (doc.contains("workers")) {
    const long long w = get_int(doc, "workers");
    if (w < 1 || w > 1024) throw ConfigError("key 'workers': must be in [1, 1024]");
    cfg.workers = static_cast<int>(w);
  }
  if (doc.contains("output_path")) {
    if (!doc.at("output_path").is_string()) throw ConfigError("key 'output_path': expected a string");
    cfg.output_path = doc.at("output_path").get<std::string>();
  }
  if (doc.contains("regime_threshold")) cfg.regime_threshold = get_real(doc, "regime_threshold");
  if (doc.contains("oracle_abs_tol")) cfg.oracle_abs_tol = get_real(doc, "oracle_abs_tol");

  // invariants
  try {
    validate_ensemble(cfg.params());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("invalid ensemble: ") + e.what());
  }
  if (cfg.x_values.empty()) throw ConfigError("key 'x_values': must not be empty");
  for (std::size_t i = 0; i < cfg.x_values.size(); ++i) {
    const double x = cfg.x_values[i];
    if (!(std::isfinite(x) && x > 1))
      throw ConfigError("key 'x_values': threshold must exceed 1, got " + std::to_string(x));
    if (!(cfg.p1 * x / (cfg.p1 + cfg.p2) < 1))
      throw ConfigError("key 'x_values': p1*x/(p1+p2) must be below 1 for x=" + std::to_string(x));
    if (i > 0 && !(x > cfg.x_values[i - 1]))
      throw ConfigError("key 'x_values': values must be strictly ascending");
  }
  const long min_samples = cfg.method == Method::kImportanceSampling ? 2 : 1;
  if (cfg.num_samples < min_samples)
    throw ConfigError("key 'num_samples': must be >= " + std::to_string(min_samples));
  if (cfg.method == Method::kOracle && cfg.n != 1 && cfg.n != 2)
    throw ConfigError("method 'oracle' is exact only for n in {1, 2}; got n=" +
                      std::to_string(cfg.n) + " (use is or mc)");
  if (!(cfg.regime_threshold > 0 && cfg.regime_threshold < 1))
    throw ConfigError("key 'regime_threshold': must lie in (0,1)");
  if (!(cfg.oracle_abs_tol > 0)) throw ConfigError("key 'oracle_abs_tol': must be positive");
  return cfg;
}

/// Parses a JSON config document.
inline ExperimentConfig parse_config(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  try {
    return config_from_json(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config type error: ") + e.what());
  }
}

}  // namespace jtail
