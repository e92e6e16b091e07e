#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "socketstore/core/trace.hpp"
#include "socketstore/core/types.hpp"

namespace socketstore::registry {

struct RegistryConfig {
  std::string secret = "socketstore-dev-secret";
  // Rank weights for mean stars / objective attainment / popularity.
  double weight_stars = 0.5;
  double weight_attainment = 0.3;
  double weight_popularity = 0.2;
  // Disposal gate: proven inefficient and unmaintained.
  double disposal_max_attainment = 0.5;
  std::int64_t disposal_min_samples = 20;
  std::int64_t maintenance_grace_ms = 90LL * 24 * 3600 * 1000;  // 90 simulated days

  static RegistryConfig from_json(const core::Json& j);
  core::Json to_json() const;
};

struct ObjectiveStats {
  std::int64_t samples = 0;
  std::int64_t attained = 0;
  std::int64_t last_maintainer_update_ms = 0;

  double attainment_ratio() const {
    return samples == 0 ? 0.0 : static_cast<double>(attained) / static_cast<double>(samples);
  }

  core::Json to_json() const;
  static ObjectiveStats from_json(const core::Json& j);
};

// One module_key can carry a served version (published or deprecated) and a
// pending revision (under_review or revision_requested) at the same time;
// the served version keeps being distributed while the revision is reviewed.
struct ModuleRecord {
  std::optional<core::ModuleDescriptor> active;
  std::optional<core::ModuleDescriptor> pending;
  bool disposed = false;

  core::Lifecycle lifecycle() const;

  core::Json to_json() const;
  static core::Result<ModuleRecord> from_json(const core::Json& j);
};

enum class ReviewVerdict { accept, request_revision };

struct RankEntry {
  std::string module_key;
  double score = 0.0;
};

struct BrowseEntry {
  std::string module_key;
  std::string name;
  std::int64_t version = 0;
  core::Lifecycle lifecycle = core::Lifecycle::submitted;
  double mean_stars = 0.0;
  std::int64_t purchase_count = 0;
};

struct ToReply {
  enum class Status { up_to_date, new_to, default_device };
  Status status = Status::up_to_date;
  std::optional<core::TransferableObject> to;
  std::int64_t version = 0;
  std::vector<std::string> module_ids;  // valid parameterization ids
  bool has_network_behavior = false;

  core::Json to_json() const;
  static core::Result<ToReply> from_json(const core::Json& j);
};

// Snapshot handed to the store proxy when it instantiates SSOs.
struct ModuleInfo {
  std::string module_key;
  std::int64_t version = 0;
  core::Lifecycle lifecycle = core::Lifecycle::submitted;
  core::PerformanceObjective objective;
  std::optional<std::string> network_behavior_id;
  std::map<std::string, core::ParameterSet> parameterizations;
  std::vector<std::string> composed_of;

  core::Json to_json() const;
  static core::Result<ModuleInfo> from_json(const core::Json& j);
};

struct ComposeSpec {
  std::string module_key;
  std::string name;
  std::string contributor;
  core::PerformanceObjective objective;
  std::map<std::string, core::ParameterSet> parameterizations;  // defaults to {"default": {}}
};

// Allowed lifecycle edges, exposed for exhaustive enumeration in tests.
std::vector<core::Lifecycle> lifecycle_targets(core::Lifecycle from);

// The Socket Store registry: publication workflow, rating and ranking,
// purchase, TO distribution with update checks, deprecation/disposal, and
// module composition. Mutations are serialized behind one lock and can be
// mirrored to an append-only operation log replayed at startup.
class Registry {
 public:
  explicit Registry(RegistryConfig config = {});

  // Replays the operation log at path (if it exists), then appends to it.
  static core::Result<std::unique_ptr<Registry>> open(RegistryConfig config,
                                                      const std::string& log_path);

  core::Result<void> publish(core::ModuleDescriptor desc, const std::string& submitter,
                             std::int64_t now_ms);
  core::Result<void> review(const std::string& module_key, ReviewVerdict verdict,
                            std::int64_t now_ms);
  core::Result<void> rate(const std::string& module_key, core::Rating rating);
  std::vector<RankEntry> rank(const std::optional<std::string>& query = std::nullopt) const;
  std::vector<BrowseEntry> browse() const;
  core::Result<core::Entitlement> purchase(const std::string& app_id, const std::string& module_key,
                                           const std::optional<std::string>& device_fingerprint,
                                           std::int64_t now_ms);
  core::Result<ToReply> fetch_to(const core::Entitlement& ent, const std::string& module_key,
                                 std::optional<std::int64_t> cached_version) const;
  core::Result<void> transition(const std::string& module_key, core::Lifecycle target,
                                std::int64_t now_ms);
  core::Result<std::string> compose(const std::vector<std::string>& parts, const ComposeSpec& spec,
                                    const std::string& submitter, std::int64_t now_ms);
  core::Result<void> record_sample(const std::string& module_key, core::Metric metric,
                                   double value, std::int64_t now_ms);

  bool verify(const core::Entitlement& ent) const;
  core::Result<ModuleInfo> module_info(const std::string& module_key) const;
  core::Result<std::string> resolve_module_id(const std::string& module_id) const;
  std::optional<core::Lifecycle> lifecycle_of(const std::string& module_key) const;
  std::optional<ObjectiveStats> stats_of(const std::string& module_key) const;
  std::optional<core::ModuleDescriptor> served_descriptor(const std::string& module_key) const;
  std::optional<core::ModuleDescriptor> pending_descriptor(const std::string& module_key) const;
  const RegistryConfig& config() const { return config_; }
  const std::vector<core::Entitlement>& entitlements() const { return entitlements_; }

  // Full-state snapshot; round-trips bit-exactly through canonical JSON.
  core::Json snapshot() const;
  static core::Result<std::unique_ptr<Registry>> from_snapshot(RegistryConfig config,
                                                               const core::Json& snapshot);

  void set_trace(core::TraceLog* trace) { trace_ = trace; }

 private:
  double score_of(const core::ModuleDescriptor& active, const ObjectiveStats& stats) const;
  core::Result<void> publish_locked(core::ModuleDescriptor desc, const std::string& submitter,
                                    std::int64_t now_ms);
  core::Result<void> apply_log_entry(const core::Json& entry);
  void append_log(const core::Json& entry);

  RegistryConfig config_;
  mutable std::recursive_mutex mu_;
  std::map<std::string, ModuleRecord> modules_;
  std::map<std::string, ObjectiveStats> stats_;
  std::vector<core::Entitlement> entitlements_;
  std::optional<std::ofstream> log_;
  bool replaying_ = false;
  core::TraceLog* trace_ = nullptr;
};

}  // namespace socketstore::registry
