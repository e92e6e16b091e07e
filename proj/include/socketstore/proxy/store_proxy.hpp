#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "socketstore/core/clock.hpp"
#include "socketstore/core/trace.hpp"
#include "socketstore/proxy/behavior.hpp"
#include "socketstore/rpc/ports.hpp"
#include "socketstore/sim/endpoints.hpp"

namespace socketstore::proxy {

// Adaptive pool-or-destroy policy. Popularity is the count of opens for one
// (module_key, module_id) within the trailing window.
struct PoolPolicy {
  std::int64_t window_ms = 60'000;
  std::int64_t reuse_threshold = 3;
  std::int64_t inactivity_timeout_ms = 30'000;

  static PoolPolicy from_json(const core::Json& j);
  core::Json to_json() const;
};

struct ProxyConfig {
  std::string node;  // placement of this proxy in the topology
  PoolPolicy pool;
};

enum class SsoStatus { active, pooled, destroyed };
std::string_view sso_status_name(SsoStatus s);

enum class CloseReason { explicit_close, timeout };

// Pushes from an SSO back to its device session.
struct DeviceSink {
  std::function<void(std::string_view payload)> on_data;
  std::function<void(const core::Json&)> on_violation;
};

struct SsoInstance {
  std::string sso_id;
  std::string module_key;
  std::string module_id;
  core::ParameterSet constants;  // immutable after construction
  core::PerformanceObjective objective;
  core::Json variables = core::Json::object();
  std::vector<netsim::Path> pool;
  std::vector<std::uint64_t> subscriptions;
  std::int64_t last_active_ms = 0;
  SsoStatus status = SsoStatus::active;

  std::string src_node;
  std::string dst_node;
  std::string dst_ip;
  int dst_port = 0;
  std::vector<std::string> composed_of;

  std::unique_ptr<NetworkBehavior> behavior;
  DeviceSink device;
  std::optional<sim::Sink> peer_link;

  // Monitoring state.
  std::optional<double> ewma;
  std::int64_t sample_count = 0;
  std::int64_t attained_count = 0;
  std::vector<double> raw_samples;
  std::int64_t handler_errors = 0;

  // Events seen while pooled, replayed on reactivation.
  std::vector<netsim::NetworkEvent> deferred_events;

  // Composition links.
  std::vector<std::string> nested;
  std::optional<std::string> parent;
  std::optional<std::string> forward_to_nested;
};

struct OpenOutcome {
  std::string sso_id;
  bool reused = false;
};

struct CloseOutcome {
  SsoStatus disposition = SsoStatus::destroyed;  // pooled or destroyed
};

struct SweepEntry {
  std::string sso_id;
  SsoStatus disposition = SsoStatus::destroyed;
};

struct SampleOutcome {
  std::int64_t samples = 0;
  std::int64_t attained = 0;
  double ewma = 0.0;
  bool attained_now = false;
  bool violation = false;
};

// Hosts SSO instances: instantiation on device request, popularity-adaptive
// pool-or-destroy reclamation, timeout sweeping, event dispatch to affected
// instances, and performance-sample collection.
class StoreProxy {
 public:
  StoreProxy(ProxyConfig config, rpc::RegistryPort& registry, rpc::NetworkPort& network,
             const BehaviorRegistry& behaviors, sim::EndpointTable& endpoints,
             core::ClockRef clock, core::TraceLog* trace = nullptr);
  ~StoreProxy();

  StoreProxy(const StoreProxy&) = delete;
  StoreProxy& operator=(const StoreProxy&) = delete;

  core::Result<OpenOutcome> open_session(const core::Entitlement& ent,
                                         const std::string& module_key,
                                         const std::string& module_id, const std::string& dst_ip,
                                         int dst_port, DeviceSink device);
  core::Result<CloseOutcome> close_session(const std::string& sso_id, CloseReason reason);
  std::vector<SweepEntry> sweep_timeouts(std::int64_t now_ms);

  // Runs handlers for active SSOs whose PathPool contains the event's link;
  // returns their ids in execution order. Pooled instances defer the event.
  std::vector<std::string> deliver_event(const netsim::NetworkEvent& event);

  core::Result<core::Json> handle_data(const std::string& sso_id, const DataRequest& request);
  core::Result<SampleOutcome> record_sample(const std::string& sso_id, double value);

  core::Result<core::Json> delegate(const std::string& sso_id, const std::string& part_key,
                                    const DataRequest& request);

  // Introspection for tests and traces.
  const SsoInstance* find_instance(const std::string& sso_id) const;
  std::vector<std::string> instances_with_status(SsoStatus status) const;
  std::int64_t construction_count(const std::string& module_key, const std::string& module_id) const;
  std::int64_t total_constructions() const;
  std::size_t session_count() const;  // active, device-facing
  const ProxyConfig& config() const { return config_; }
  BlobStore& blob_store() { return blobs_; }

 private:
  friend class ProxyContext;

  struct PoolKey {
    std::string module_key;
    std::string module_id;
    auto operator<=>(const PoolKey&) const = default;
  };

  core::Result<OpenOutcome> open_locked(const core::Entitlement* ent,
                                        const std::string& module_key, const std::string& module_id,
                                        const std::string& dst_ip, int dst_port, DeviceSink device,
                                        const std::optional<std::string>& parent,
                                        const std::optional<std::string>& forward_to_nested);
  core::Result<CloseOutcome> close_locked(const std::string& sso_id, CloseReason reason);
  void destroy_locked(SsoInstance& sso);
  void run_handler(SsoInstance& sso, const netsim::NetworkEvent& event);
  bool dispatch_one(SsoInstance& sso, const netsim::NetworkEvent& event);
  void dispatch_subscribed(const std::string& sso_id, const netsim::NetworkEvent& event);
  core::Result<core::Json> handle_data_locked(SsoInstance& sso, const DataRequest& request);
  core::Result<SampleOutcome> record_sample_locked(SsoInstance& sso, double value);
  SsoInstance* find_mutable(const std::string& sso_id);
  void deliver_up(SsoInstance& sso, std::string_view payload);
  void violation_up(SsoInstance& sso, core::Json detail);
  void trace(std::string_view kind, core::Json detail);
  std::int64_t opens_in_window(const PoolKey& key, std::int64_t now_ms) const;

  ProxyConfig config_;
  rpc::RegistryPort& registry_;
  rpc::NetworkPort& network_;
  const BehaviorRegistry& behaviors_;
  sim::EndpointTable& endpoints_;
  core::ClockRef clock_;
  core::TraceLog* trace_ = nullptr;

  mutable std::recursive_mutex mu_;
  std::map<std::string, std::unique_ptr<SsoInstance>> instances_;
  std::map<PoolKey, std::vector<std::string>> pooled_;  // reusable instances per parameterization
  std::map<PoolKey, std::deque<std::int64_t>> open_times_;
  std::map<PoolKey, std::int64_t> constructions_;
  BlobStore blobs_;
  std::uint64_t next_sso_ = 1;
  std::uint64_t event_subscription_ = 0;
};

}  // namespace socketstore::proxy
