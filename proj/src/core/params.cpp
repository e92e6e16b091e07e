#include "socketstore/core/params.hpp"

namespace socketstore::core {

std::optional<ParamValue> ParameterSet::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double ParameterSet::get_number(const std::string& key, double fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  return fallback;
}

std::int64_t ParameterSet::get_int(const std::string& key, std::int64_t fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return *i;
  if (const auto* d = std::get_if<double>(&it->second)) return static_cast<std::int64_t>(*d);
  return fallback;
}

std::string ParameterSet::get_string(const std::string& key, std::string fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* s = std::get_if<std::string>(&it->second)) return *s;
  return fallback;
}

bool ParameterSet::get_bool(const std::string& key, bool fallback) const {
  auto it = values_.find(key);
  if (it == values_.end()) return fallback;
  if (const auto* b = std::get_if<bool>(&it->second)) return *b;
  return fallback;
}

Json ParameterSet::to_json() const {
  Json out = Json::object();
  for (const auto& [key, value] : values_) {
    std::visit([&](const auto& v) { out[key] = v; }, value);
  }
  return out;
}

Result<ParameterSet> ParameterSet::from_json(const Json& j) {
  if (!j.is_object()) {
    return Error{Errc::protocol_error, "parameter set must be an object"};
  }
  ParameterSet out;
  for (const auto& [key, value] : j.items()) {
    if (value.is_boolean()) {
      out.set(key, value.get<bool>());
    } else if (value.is_number_integer()) {
      out.set(key, value.get<std::int64_t>());
    } else if (value.is_number()) {
      out.set(key, value.get<double>());
    } else if (value.is_string()) {
      out.set(key, value.get<std::string>());
    } else {
      return Error{Errc::protocol_error, "unsupported parameter type for '" + key + "'"};
    }
  }
  return out;
}

}  // namespace socketstore::core
