#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>

#include "socketstore/core/json.hpp"

namespace socketstore::core {

// One value of a module parameterization. Integral JSON numbers map to
// int64_t, fractional ones to double.
using ParamValue = std::variant<bool, std::int64_t, double, std::string>;

class ParameterSet {
 public:
  ParameterSet() = default;

  void set(const std::string& key, ParamValue v) { values_[key] = std::move(v); }

  bool contains(const std::string& key) const { return values_.count(key) > 0; }
  std::optional<ParamValue> get(const std::string& key) const;

  // Typed lookups with defaults; numeric kinds coerce between int and double.
  double get_number(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  std::string get_string(const std::string& key, std::string fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  bool empty() const { return values_.empty(); }
  std::size_t size() const { return values_.size(); }
  const std::map<std::string, ParamValue>& values() const { return values_; }

  Json to_json() const;
  static Result<ParameterSet> from_json(const Json& j);

  friend bool operator==(const ParameterSet& a, const ParameterSet& b) {
    return a.values_ == b.values_;
  }

 private:
  std::map<std::string, ParamValue> values_;
};

}  // namespace socketstore::core
