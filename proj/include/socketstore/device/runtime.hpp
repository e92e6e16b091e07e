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
#include "socketstore/core/types.hpp"
#include "socketstore/registry/registry.hpp"
#include "socketstore/rpc/ports.hpp"
#include "socketstore/rpc/proxy_port.hpp"
#include "socketstore/sim/endpoints.hpp"

namespace socketstore::device {

enum class ConnectionKind { module_socket, legacy_socket };
std::string_view connection_kind_name(ConnectionKind k);

enum class DeviceEventType { incoming_data, objective_violation };

using EventHandler = std::function<void(const core::Json&)>;

// Built-in device-side behaviors selectable by a TO's behavior_id.
struct DeviceBehaviorHooks {
  // Runs during connection establishment; an error reverts to LegacySocket.
  std::function<core::Result<void>(const core::ParameterSet&)> on_connect;
  // Outbound payload hook; identity when absent.
  std::function<core::Result<std::string>(const core::ParameterSet&, std::string_view)> on_send;
};

class DeviceBehaviorRegistry {
 public:
  void add(const std::string& behavior_id, DeviceBehaviorHooks hooks) {
    hooks_[behavior_id] = std::move(hooks);
  }
  const DeviceBehaviorHooks* find(const std::string& behavior_id) const {
    auto it = hooks_.find(behavior_id);
    return it == hooks_.end() ? nullptr : &it->second;
  }
  bool contains(const std::string& behavior_id) const { return hooks_.count(behavior_id) > 0; }

 private:
  std::map<std::string, DeviceBehaviorHooks> hooks_;
};

// Registers default_device (pass-through) and dtn_device (pass-through with
// undo/redo utilities handled store-side).
void register_device_behaviors(DeviceBehaviorRegistry& registry);

// One reachable Socket Store (registry plus proxy front).
struct StoreEndpoint {
  std::string name;
  rpc::RegistryPort* registry = nullptr;
  rpc::ProxyPort* proxy = nullptr;
};

struct DeviceFabric {
  std::vector<StoreEndpoint> stores;
  sim::EndpointTable* endpoints = nullptr;
  core::ClockRef clock;
  const DeviceBehaviorRegistry* behaviors = nullptr;
  core::TraceLog* trace = nullptr;
};

struct DeviceConfig {
  std::string app_id;
  std::string device_ip;
  std::string node;  // topology placement of this device
  std::string cache_dir;
  std::map<std::string, core::Entitlement> entitlements;  // module_key -> entitlement
};

class DsoRuntime;

class Connection {
 public:
  ConnectionKind kind() const { return kind_; }
  bool is_open() const;
  const std::string& session_id() const { return sso_id_; }

  core::Result<void> send(std::string_view payload);
  // Returns the next delivered payload or Timeout when none is queued (the
  // scenario clock cannot advance while a caller blocks, so recv polls).
  core::Result<std::string> recv();
  core::Result<void> close();

  core::Result<std::uint64_t> on_event(DeviceEventType type, EventHandler handler);

  // Module utility channel (UndoSend/RedoSend and friends).
  core::Result<core::Json> request(const proxy::DataRequest& op);

  std::size_t violation_count() const;

 private:
  friend class DsoRuntime;
  friend class Listener;

  void push_data(std::string_view payload);
  void push_violation(const core::Json& detail);

  mutable std::mutex mu_;
  ConnectionKind kind_ = ConnectionKind::legacy_socket;
  bool open_ = true;
  std::string sso_id_;
  rpc::ProxyPort* proxy_ = nullptr;
  std::optional<sim::Sink> peer_link;
  std::deque<std::string> incoming_;
  std::map<std::uint64_t, std::pair<DeviceEventType, EventHandler>> handlers_;
  std::uint64_t next_handler_ = 1;
  std::size_t violations_ = 0;
  const DeviceBehaviorHooks* behavior_ = nullptr;
  core::ParameterSet behavior_params_;
  DsoRuntime* runtime_ = nullptr;
};

class Listener {
 public:
  ConnectionKind kind() const { return kind_; }
  int port() const { return port_; }

  // Next accepted connection, or Timeout when none is pending.
  core::Result<std::shared_ptr<Connection>> accept();
  void close();

 private:
  friend class DsoRuntime;
  mutable std::mutex mu_;
  ConnectionKind kind_ = ConnectionKind::legacy_socket;
  int port_ = 0;
  std::string ip_;
  bool open_ = true;
  std::string sso_id_;
  rpc::ProxyPort* proxy_ = nullptr;
  std::deque<std::shared_ptr<Connection>> pending_;
  DsoRuntime* runtime_ = nullptr;
};

// Cached knowledge about one entitled module, persisted under
// <cache_dir>/<module_key>.to.json + .ver.
struct CacheEntry {
  registry::ToReply record;
  std::int64_t version = 0;
};

// The device-side runtime of a Socket-Store app: TO update checks at
// initialization, module-parameterized connect with LegacySocket fallback,
// Berkeley-style data calls, event callbacks, and teardown signaling.
class DsoRuntime {
 public:
  static std::unique_ptr<DsoRuntime> init(DeviceConfig config, DeviceFabric fabric);

  core::Result<std::shared_ptr<Connection>> connect(const std::string& protocol,
                                                    const std::string& ip, int port,
                                                    const std::optional<std::string>& module_id);
  core::Result<std::shared_ptr<Listener>> bind_listen(int port,
                                                      const std::optional<std::string>& module_id);
  void shutdown();

  bool degraded() const { return degraded_; }
  std::int64_t to_transfers() const { return to_transfers_; }
  std::size_t open_sessions() const;
  const DeviceConfig& config() const { return config_; }
  std::optional<CacheEntry> cache_entry(const std::string& module_key) const;

  // Reports a device-measured sample for the session's objective metric.
  core::Result<void> report_sample(Connection& conn, double value);

 private:
  friend class Connection;
  friend class Listener;

  void refresh_cache(const std::string& module_key, const core::Entitlement& ent);
  core::Result<CacheEntry> load_cache(const std::string& module_key) const;
  void store_cache(const std::string& module_key, const registry::ToReply& record);
  void drop_cache(const std::string& module_key);
  core::Result<std::string> resolve_module(const std::string& module_id) const;
  StoreEndpoint* pick_store_registry();
  StoreEndpoint* pick_store_proxy();
  std::shared_ptr<Connection> legacy_connect(const std::string& ip, int port);
  core::Result<std::shared_ptr<Connection>> module_connect(const std::string& module_key,
                                                           const std::string& module_id,
                                                           const std::string& ip, int port);
  void trace(std::string_view kind, core::Json detail);

  DeviceConfig config_;
  DeviceFabric fabric_;
  bool degraded_ = false;
  std::int64_t to_transfers_ = 0;
  std::map<std::string, std::string> module_id_index_;  // module_id -> module_key
  std::vector<std::weak_ptr<Connection>> connections_;
  std::vector<std::weak_ptr<Listener>> listeners_;
  mutable std::mutex mu_;
};

}  // namespace socketstore::device
