#include "socketstore/core/types.hpp"

#include <algorithm>
#include <cmath>

#include "socketstore/core/digest.hpp"

namespace socketstore::core {

namespace {

Result<std::string> require_string(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_string()) {
    return Error{Errc::protocol_error, std::string("missing string field '") + field + "'"};
  }
  return j[field].get<std::string>();
}

Result<std::int64_t> require_int(const Json& j, const char* field) {
  if (!j.contains(field) || !j[field].is_number_integer()) {
    return Error{Errc::protocol_error, std::string("missing integer field '") + field + "'"};
  }
  return j[field].get<std::int64_t>();
}

}  // namespace

std::string_view metric_name(Metric m) {
  switch (m) {
    case Metric::end_to_end_latency_ms: return "end_to_end_latency_ms";
    case Metric::loss_rate: return "loss_rate";
    case Metric::throughput_mbps: return "throughput_mbps";
  }
  return "end_to_end_latency_ms";
}

std::optional<Metric> metric_from_name(std::string_view name) {
  if (name == "end_to_end_latency_ms") return Metric::end_to_end_latency_ms;
  if (name == "loss_rate") return Metric::loss_rate;
  if (name == "throughput_mbps") return Metric::throughput_mbps;
  return std::nullopt;
}

std::string_view direction_name(Direction d) {
  return d == Direction::at_most ? "at_most" : "at_least";
}

std::optional<Direction> direction_from_name(std::string_view name) {
  if (name == "at_most") return Direction::at_most;
  if (name == "at_least") return Direction::at_least;
  return std::nullopt;
}

std::string_view lifecycle_name(Lifecycle s) {
  switch (s) {
    case Lifecycle::submitted: return "submitted";
    case Lifecycle::under_review: return "under_review";
    case Lifecycle::revision_requested: return "revision_requested";
    case Lifecycle::published: return "published";
    case Lifecycle::deprecated: return "deprecated";
    case Lifecycle::disposed: return "disposed";
  }
  return "submitted";
}

std::optional<Lifecycle> lifecycle_from_name(std::string_view name) {
  if (name == "submitted") return Lifecycle::submitted;
  if (name == "under_review") return Lifecycle::under_review;
  if (name == "revision_requested") return Lifecycle::revision_requested;
  if (name == "published") return Lifecycle::published;
  if (name == "deprecated") return Lifecycle::deprecated;
  if (name == "disposed") return Lifecycle::disposed;
  return std::nullopt;
}

Json PerformanceObjective::to_json() const {
  return Json{{"metric", metric_name(metric)},
              {"bound", bound},
              {"direction", direction_name(direction)}};
}

Result<PerformanceObjective> PerformanceObjective::from_json(const Json& j) {
  auto metric_s = require_string(j, "metric");
  if (!metric_s) return metric_s.error();
  auto metric = metric_from_name(metric_s.value());
  if (!metric) return Error{Errc::protocol_error, "unknown metric '" + metric_s.value() + "'"};
  auto dir_s = require_string(j, "direction");
  if (!dir_s) return dir_s.error();
  auto dir = direction_from_name(dir_s.value());
  if (!dir) return Error{Errc::protocol_error, "unknown direction '" + dir_s.value() + "'"};
  if (!j.contains("bound") || !j["bound"].is_number()) {
    return Error{Errc::protocol_error, "missing numeric field 'bound'"};
  }
  PerformanceObjective out;
  out.metric = *metric;
  out.direction = *dir;
  out.bound = j["bound"].get<double>();
  return out;
}

Json Rating::to_json() const {
  return Json{{"rater", rater}, {"stars", stars}, {"comment", comment}, {"at", at_ms}};
}

Result<Rating> Rating::from_json(const Json& j) {
  Rating out;
  auto rater = require_string(j, "rater");
  if (!rater) return rater.error();
  out.rater = rater.value();
  auto stars = require_int(j, "stars");
  if (!stars) return stars.error();
  out.stars = static_cast<int>(stars.value());
  if (j.contains("comment") && j["comment"].is_string()) out.comment = j["comment"];
  if (j.contains("at") && j["at"].is_number_integer()) out.at_ms = j["at"];
  return out;
}

std::string TransferableObject::checksum_input() const {
  Json j{{"module_key", module_key},
         {"version", version},
         {"behavior_id", behavior_id},
         {"params", params.to_json()}};
  return canonical_dump(j);
}

bool TransferableObject::checksum_valid() const {
  return digest_equal(checksum, sha256_hex(checksum_input()));
}

TransferableObject TransferableObject::make(std::string module_key, std::int64_t version,
                                            std::string behavior_id, ParameterSet params) {
  TransferableObject to;
  to.module_key = std::move(module_key);
  to.version = version;
  to.behavior_id = std::move(behavior_id);
  to.params = std::move(params);
  to.checksum = sha256_hex(to.checksum_input());
  return to;
}

Json TransferableObject::to_json() const {
  return Json{{"module_key", module_key},
              {"version", version},
              {"behavior_id", behavior_id},
              {"params", params.to_json()},
              {"checksum", checksum}};
}

Result<TransferableObject> TransferableObject::from_json(const Json& j) {
  TransferableObject out;
  auto key = require_string(j, "module_key");
  if (!key) return key.error();
  out.module_key = key.value();
  auto version = require_int(j, "version");
  if (!version) return version.error();
  out.version = version.value();
  auto behavior = require_string(j, "behavior_id");
  if (!behavior) return behavior.error();
  out.behavior_id = behavior.value();
  if (j.contains("params")) {
    auto params = ParameterSet::from_json(j["params"]);
    if (!params) return params.error();
    out.params = std::move(params).value();
  }
  if (j.contains("checksum") && j["checksum"].is_string()) out.checksum = j["checksum"];
  return out;
}

Json SsoBehaviorRef::to_json() const { return Json{{"behavior_id", behavior_id}}; }

Result<SsoBehaviorRef> SsoBehaviorRef::from_json(const Json& j) {
  auto id = require_string(j, "behavior_id");
  if (!id) return id.error();
  return SsoBehaviorRef{id.value()};
}

double ModuleDescriptor::mean_stars() const {
  if (ratings.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& r : ratings) sum += r.stars;
  return sum / static_cast<double>(ratings.size());
}

Json ModuleDescriptor::to_json() const {
  Json j{{"module_key", module_key},
         {"name", name},
         {"version", version},
         {"contributor", contributor},
         {"objective", objective.to_json()},
         {"lifecycle", lifecycle_name(lifecycle)},
         {"purchase_count", purchase_count}};
  if (device_behavior) j["device_behavior"] = device_behavior->to_json();
  if (network_behavior) j["network_behavior"] = network_behavior->to_json();
  Json params = Json::object();
  for (const auto& [id, pset] : parameterizations) params[id] = pset.to_json();
  j["parameterizations"] = std::move(params);
  Json ratings_j = Json::array();
  for (const auto& r : ratings) ratings_j.push_back(r.to_json());
  j["ratings"] = std::move(ratings_j);
  j["composed_of"] = composed_of;
  return j;
}

Result<ModuleDescriptor> ModuleDescriptor::from_json(const Json& j) {
  ModuleDescriptor out;
  auto key = require_string(j, "module_key");
  if (!key) return key.error();
  out.module_key = key.value();
  if (j.contains("name") && j["name"].is_string()) out.name = j["name"];
  auto version = require_int(j, "version");
  if (!version) return version.error();
  out.version = version.value();
  auto contributor = require_string(j, "contributor");
  if (!contributor) return contributor.error();
  out.contributor = contributor.value();
  if (!j.contains("objective")) return Error{Errc::protocol_error, "missing field 'objective'"};
  auto objective = PerformanceObjective::from_json(j["objective"]);
  if (!objective) return objective.error();
  out.objective = objective.value();
  if (j.contains("device_behavior") && !j["device_behavior"].is_null()) {
    auto to = TransferableObject::from_json(j["device_behavior"]);
    if (!to) return to.error();
    out.device_behavior = std::move(to).value();
  }
  if (j.contains("network_behavior") && !j["network_behavior"].is_null()) {
    auto ref = SsoBehaviorRef::from_json(j["network_behavior"]);
    if (!ref) return ref.error();
    out.network_behavior = std::move(ref).value();
  }
  if (j.contains("parameterizations")) {
    if (!j["parameterizations"].is_object()) {
      return Error{Errc::protocol_error, "parameterizations must be an object"};
    }
    for (const auto& [id, pj] : j["parameterizations"].items()) {
      auto pset = ParameterSet::from_json(pj);
      if (!pset) return pset.error();
      out.parameterizations[id] = std::move(pset).value();
    }
  }
  if (j.contains("lifecycle") && j["lifecycle"].is_string()) {
    auto state = lifecycle_from_name(j["lifecycle"].get<std::string>());
    if (!state) return Error{Errc::protocol_error, "unknown lifecycle state"};
    out.lifecycle = *state;
  }
  if (j.contains("ratings")) {
    for (const auto& rj : j["ratings"]) {
      auto r = Rating::from_json(rj);
      if (!r) return r.error();
      out.ratings.push_back(std::move(r).value());
    }
  }
  if (j.contains("purchase_count") && j["purchase_count"].is_number_integer()) {
    out.purchase_count = j["purchase_count"];
  }
  if (j.contains("composed_of")) {
    for (const auto& part : j["composed_of"]) {
      if (!part.is_string()) return Error{Errc::protocol_error, "composed_of entries must be strings"};
      out.composed_of.push_back(part.get<std::string>());
    }
  }
  return out;
}

Json Entitlement::to_json() const {
  Json j{{"app_id", app_id},
         {"module_key", module_key},
         {"token", token},
         {"issued_at", issued_at_ms}};
  if (device_fingerprint) j["device_fingerprint"] = *device_fingerprint;
  return j;
}

Result<Entitlement> Entitlement::from_json(const Json& j) {
  Entitlement out;
  auto app = require_string(j, "app_id");
  if (!app) return app.error();
  out.app_id = app.value();
  auto key = require_string(j, "module_key");
  if (!key) return key.error();
  out.module_key = key.value();
  auto token = require_string(j, "token");
  if (!token) return token.error();
  out.token = token.value();
  auto issued = require_int(j, "issued_at");
  if (!issued) return issued.error();
  out.issued_at_ms = issued.value();
  if (j.contains("device_fingerprint") && j["device_fingerprint"].is_string()) {
    out.device_fingerprint = j["device_fingerprint"].get<std::string>();
  }
  return out;
}

namespace {

std::string entitlement_tag_input(const std::string& app_id, const std::string& module_key,
                                  const std::optional<std::string>& fingerprint,
                                  std::int64_t issued_at_ms) {
  Json j{{"app_id", app_id}, {"module_key", module_key}, {"issued_at", issued_at_ms}};
  if (fingerprint) j["device_fingerprint"] = *fingerprint;
  return canonical_dump(j);
}

}  // namespace

Result<Entitlement> issue_entitlement(const std::string& app_id, const std::string& module_key,
                                      const std::optional<std::string>& device_fingerprint,
                                      const std::string& secret, std::int64_t issued_at_ms) {
  if (app_id.empty()) return Error{Errc::invalid_argument, "empty app_id"};
  if (module_key.empty()) return Error{Errc::invalid_argument, "empty module_key"};
  if (secret.empty()) return Error{Errc::invalid_argument, "empty secret"};
  Entitlement ent;
  ent.app_id = app_id;
  ent.module_key = module_key;
  ent.device_fingerprint = device_fingerprint;
  ent.issued_at_ms = issued_at_ms;
  ent.token = hmac_sha256_hex(
      secret, entitlement_tag_input(app_id, module_key, device_fingerprint, issued_at_ms));
  return ent;
}

bool verify_entitlement(const Entitlement& ent, const std::string& secret) {
  if (secret.empty()) return false;
  const std::string expected = hmac_sha256_hex(
      secret,
      entitlement_tag_input(ent.app_id, ent.module_key, ent.device_fingerprint, ent.issued_at_ms));
  return digest_equal(expected, ent.token);
}

bool ValidationResult::has(std::string_view name) const {
  return std::any_of(violations.begin(), violations.end(),
                     [&](const std::string& v) { return v == name; });
}

ValidationResult validate_descriptor(const ModuleDescriptor& desc) {
  ValidationResult out;
  if (desc.module_key.empty()) out.violations.push_back("module_key non-empty");
  if (desc.version < 1) out.violations.push_back("version >= 1");
  if (!desc.device_behavior && !desc.network_behavior) {
    out.violations.push_back("no behavior component");
  }
  if (!std::isfinite(desc.objective.bound) || desc.objective.bound < 0.0) {
    out.violations.push_back("objective bound finite and non-negative");
  }
  for (const auto& r : desc.ratings) {
    if (!r.valid()) {
      out.violations.push_back("rating stars in [1,5]");
      break;
    }
  }
  if (desc.purchase_count < 0) out.violations.push_back("purchase_count non-negative");
  if (desc.device_behavior && !desc.device_behavior->checksum.empty() &&
      !desc.device_behavior->checksum_valid()) {
    out.violations.push_back("device behavior checksum");
  }
  for (const auto& [module_id, pset] : desc.parameterizations) {
    if (module_id.empty()) {
      out.violations.push_back("module_id non-empty");
      break;
    }
  }
  return out;
}

}  // namespace socketstore::core
