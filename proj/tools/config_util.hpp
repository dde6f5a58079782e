// Config file handling for the CLI: a JSON document of named hyperparameters,
// with --set key=value overrides (dotted keys for nested sections) and
// exhaustive missing-key reporting.
#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ncdd/embedding.hpp"
#include "ncdd/error.hpp"
#include "ncdd/features.hpp"
#include "ncdd/training.hpp"

namespace cli {

using nlohmann::json;

class Config {
 public:
  static Config load(const std::string& path, const std::vector<std::string>& overrides) {
    Config config;
    if (!path.empty()) {
      std::ifstream in(path);
      if (!in) ncdd::fail(ncdd::ErrorCode::kParse, "cannot open config file '" + path + "'");
      try {
        in >> config.doc_;
      } catch (const json::exception& e) {
        ncdd::fail(ncdd::ErrorCode::kParse, path + ": " + e.what());
      }
      if (!config.doc_.is_object())
        ncdd::fail(ncdd::ErrorCode::kParse, path + ": config must be a JSON object");
    } else {
      config.doc_ = json::object();
    }
    for (const std::string& kv : overrides) config.apply_override(kv);
    return config;
  }

  const json& document() const { return doc_; }

  /// Record a key as required; report them all at once via check_required().
  template <typename T>
  T get(const std::string& key) {
    const json* node = find(key);
    if (!node) {
      missing_.push_back(key);
      return T{};
    }
    try {
      return node->get<T>();
    } catch (const json::exception&) {
      ncdd::fail(ncdd::ErrorCode::kConfigError, "config key '" + key + "' has the wrong type");
    }
  }

  template <typename T>
  T get_or(const std::string& key, T fallback) {
    const json* node = find(key);
    if (!node) return fallback;
    try {
      return node->get<T>();
    } catch (const json::exception&) {
      ncdd::fail(ncdd::ErrorCode::kConfigError, "config key '" + key + "' has the wrong type");
    }
  }

  void check_required() const {
    if (missing_.empty()) return;
    std::string list;
    for (const std::string& key : missing_) {
      if (!list.empty()) list += ", ";
      list += key;
    }
    ncdd::fail(ncdd::ErrorCode::kUsage, "missing config keys: " + list);
  }

 private:
  void apply_override(const std::string& kv) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos)
      ncdd::fail(ncdd::ErrorCode::kUsage, "--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string raw = kv.substr(eq + 1);
    json value;
    try {
      value = json::parse(raw);
    } catch (const json::exception&) {
      value = raw;  // unquoted strings (e.g. --set domain=time)
    }
    json* node = &doc_;
    std::size_t start = 0;
    for (;;) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (part.empty()) ncdd::fail(ncdd::ErrorCode::kUsage, "bad --set key '" + key + "'");
      if (dot == std::string::npos) {
        (*node)[part] = value;
        return;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }

  const json* find(const std::string& key) const {
    const json* node = &doc_;
    std::size_t start = 0;
    for (;;) {
      const std::size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (!node->is_object() || !node->contains(part)) return nullptr;
      node = &(*node)[part];
      if (dot == std::string::npos) return node;
      start = dot + 1;
    }
  }

  json doc_;
  mutable std::vector<std::string> missing_;
};

inline ncdd::Domain parse_domain(const std::string& s) {
  if (s == "time") return ncdd::Domain::kTime;
  if (s == "frequency") return ncdd::Domain::kFrequency;
  ncdd::fail(ncdd::ErrorCode::kConfigError, "domain must be 'time' or 'frequency', got '" + s + "'");
}

inline ncdd::AggregatorKind parse_aggregator(const std::string& s) {
  if (s == "mean") return ncdd::AggregatorKind::kMean;
  if (s == "max") return ncdd::AggregatorKind::kMax;
  ncdd::fail(ncdd::ErrorCode::kConfigError, "aggregator must be 'mean' or 'max', got '" + s + "'");
}

inline ncdd::Activation parse_activation(const std::string& s) {
  if (s == "relu") return ncdd::Activation::kRelu;
  if (s == "softmax") return ncdd::Activation::kSoftmax;
  ncdd::fail(ncdd::ErrorCode::kConfigError, "activation must be 'relu' or 'softmax', got '" + s + "'");
}

inline ncdd::ParamMode parse_mode(const std::string& s) {
  if (s == "full") return ncdd::ParamMode::kFull;
  if (s == "diagonal_repeated") return ncdd::ParamMode::kDiagonalRepeated;
  if (s == "scalar") return ncdd::ParamMode::kScalar;
  ncdd::fail(ncdd::ErrorCode::kConfigError,
             "parameter mode must be 'full', 'diagonal_repeated' or 'scalar', got '" + s + "'");
}

}  // namespace cli
