#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "socketstore/core/json.hpp"
#include "socketstore/core/params.hpp"
#include "socketstore/core/result.hpp"

namespace socketstore::core {

enum class Metric { end_to_end_latency_ms, loss_rate, throughput_mbps };
enum class Direction { at_most, at_least };

std::string_view metric_name(Metric m);
std::optional<Metric> metric_from_name(std::string_view name);
std::string_view direction_name(Direction d);
std::optional<Direction> direction_from_name(std::string_view name);

// The objective a module promises to optimize, e.g. end-to-end latency of at
// most 50 ms.
struct PerformanceObjective {
  Metric metric = Metric::end_to_end_latency_ms;
  double bound = 0.0;
  Direction direction = Direction::at_most;

  bool satisfied_by(double value) const {
    return direction == Direction::at_most ? value <= bound : value >= bound;
  }

  Json to_json() const;
  static Result<PerformanceObjective> from_json(const Json& j);

  friend bool operator==(const PerformanceObjective&, const PerformanceObjective&) = default;
};

struct Rating {
  std::string rater;
  int stars = 0;  // valid range [1,5]
  std::string comment;
  std::int64_t at_ms = 0;

  bool valid() const { return stars >= 1 && stars <= 5; }

  Json to_json() const;
  static Result<Rating> from_json(const Json& j);

  friend bool operator==(const Rating&, const Rating&) = default;
};

// Device-side behavior specification obtained by value and cached locally.
// Not mobile code: behavior_id selects one of the built-in device behaviors
// registered in the device SDK, params configure it.
struct TransferableObject {
  std::string module_key;
  std::int64_t version = 0;
  std::string behavior_id;
  ParameterSet params;
  std::string checksum;  // sha256 hex of the canonical serialization sans checksum

  // Canonical content digest input (everything but the checksum itself).
  std::string checksum_input() const;
  bool checksum_valid() const;

  static TransferableObject make(std::string module_key, std::int64_t version,
                                 std::string behavior_id, ParameterSet params);

  Json to_json() const;
  static Result<TransferableObject> from_json(const Json& j);

  friend bool operator==(const TransferableObject&, const TransferableObject&) = default;
};

// Reference to a built-in store-side behavior implementation.
struct SsoBehaviorRef {
  std::string behavior_id;

  Json to_json() const;
  static Result<SsoBehaviorRef> from_json(const Json& j);

  friend bool operator==(const SsoBehaviorRef&, const SsoBehaviorRef&) = default;
};

enum class Lifecycle { submitted, under_review, revision_requested, published, deprecated, disposed };

std::string_view lifecycle_name(Lifecycle s);
std::optional<Lifecycle> lifecycle_from_name(std::string_view name);

struct ModuleDescriptor {
  std::string module_key;
  std::string name;
  std::int64_t version = 1;
  std::string contributor;
  PerformanceObjective objective;
  std::optional<TransferableObject> device_behavior;   // absent => default device behavior
  std::optional<SsoBehaviorRef> network_behavior;      // absent => no network-side optimization
  std::map<std::string, ParameterSet> parameterizations;  // module_id -> constants
  Lifecycle lifecycle = Lifecycle::submitted;
  std::vector<Rating> ratings;
  std::int64_t purchase_count = 0;
  std::vector<std::string> composed_of;

  double mean_stars() const;  // 0 when unrated

  Json to_json() const;
  static Result<ModuleDescriptor> from_json(const Json& j);

  friend bool operator==(const ModuleDescriptor&, const ModuleDescriptor&) = default;
};

// App-scoped proof of purchase, optionally bound to a device fingerprint
// (the PUF stand-in). The token is an HMAC tag over the other fields under
// the registry secret.
struct Entitlement {
  std::string app_id;
  std::string module_key;
  std::optional<std::string> device_fingerprint;
  std::string token;
  std::int64_t issued_at_ms = 0;

  Json to_json() const;
  static Result<Entitlement> from_json(const Json& j);

  friend bool operator==(const Entitlement&, const Entitlement&) = default;
};

Result<Entitlement> issue_entitlement(const std::string& app_id, const std::string& module_key,
                                      const std::optional<std::string>& device_fingerprint,
                                      const std::string& secret, std::int64_t issued_at_ms);

bool verify_entitlement(const Entitlement& ent, const std::string& secret);

// Result of descriptor validation: empty violation list means ok. Violations
// are named after the invariant they break; they are data, not failures.
struct ValidationResult {
  std::vector<std::string> violations;

  bool ok() const { return violations.empty(); }
  bool has(std::string_view name) const;
};

ValidationResult validate_descriptor(const ModuleDescriptor& desc);

}  // namespace socketstore::core
