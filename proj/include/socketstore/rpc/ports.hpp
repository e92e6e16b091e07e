#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "socketstore/core/result.hpp"
#include "socketstore/core/types.hpp"
#include "socketstore/netsim/network_control.hpp"
#include "socketstore/registry/registry.hpp"

namespace socketstore::rpc {

// Client surface of the registry as seen by devices and the store proxy.
// In-process and TCP implementations share it, so scenario runs and wire
// deployments exercise the same call sites.
class RegistryPort {
 public:
  virtual ~RegistryPort() = default;
  virtual core::Result<bool> verify(const core::Entitlement& ent) = 0;
  virtual core::Result<registry::ModuleInfo> module_info(const std::string& module_key) = 0;
  virtual core::Result<registry::ToReply> fetch_to(const core::Entitlement& ent,
                                                   const std::string& module_key,
                                                   std::optional<std::int64_t> cached_version) = 0;
  virtual core::Result<void> record_sample(const std::string& module_key, core::Metric metric,
                                           double value, std::int64_t now_ms) = 0;
};

// Client surface of the Network Control as seen by the store proxy.
class NetworkPort {
 public:
  virtual ~NetworkPort() = default;
  virtual core::Result<netsim::Path> allocate_path(const std::string& src, const std::string& dst,
                                                   const netsim::PathConstraints& constraints,
                                                   const std::string& owner) = 0;
  virtual core::Result<void> release_path(const std::string& path_id) = 0;
  virtual core::Result<netsim::PathPlan> find_path(const std::string& src, const std::string& dst,
                                                   const netsim::PathConstraints& constraints) = 0;
  virtual core::Result<netsim::PathMetrics> path_metrics(const netsim::Path& path) = 0;
  virtual core::Result<std::uint64_t> subscribe(const std::set<netsim::EventType>& types,
                                                std::optional<std::set<std::string>> link_filter,
                                                netsim::EventSink sink) = 0;
  virtual core::Result<void> unsubscribe(std::uint64_t subscription_id) = 0;
  virtual bool link_up(const std::string& link_id) = 0;
};

// In-process adapters. set_down simulates an unreachable service for fault
// injection; every call then fails like a dead endpoint.
class InProcRegistryPort : public RegistryPort {
 public:
  explicit InProcRegistryPort(registry::Registry& reg) : registry_(reg) {}

  void set_down(bool down) { down_ = down; }

  core::Result<bool> verify(const core::Entitlement& ent) override {
    if (down_) return unreachable();
    return registry_.verify(ent);
  }
  core::Result<registry::ModuleInfo> module_info(const std::string& module_key) override {
    if (down_) return unreachable();
    return registry_.module_info(module_key);
  }
  core::Result<registry::ToReply> fetch_to(const core::Entitlement& ent,
                                           const std::string& module_key,
                                           std::optional<std::int64_t> cached_version) override {
    if (down_) return unreachable();
    return registry_.fetch_to(ent, module_key, cached_version);
  }
  core::Result<void> record_sample(const std::string& module_key, core::Metric metric, double value,
                                   std::int64_t now_ms) override {
    if (down_) return unreachable();
    return registry_.record_sample(module_key, metric, value, now_ms);
  }

 private:
  static core::Error unreachable() {
    return core::Error{core::Errc::connect_failed, "registry endpoint unreachable"};
  }
  registry::Registry& registry_;
  bool down_ = false;
};

class InProcNetworkPort : public NetworkPort {
 public:
  explicit InProcNetworkPort(netsim::NetworkControl& control) : control_(control) {}

  core::Result<netsim::Path> allocate_path(const std::string& src, const std::string& dst,
                                           const netsim::PathConstraints& constraints,
                                           const std::string& owner) override {
    return control_.allocate_path(src, dst, constraints, owner);
  }
  core::Result<void> release_path(const std::string& path_id) override {
    return control_.release_path(path_id);
  }
  core::Result<netsim::PathPlan> find_path(const std::string& src, const std::string& dst,
                                           const netsim::PathConstraints& constraints) override {
    return control_.find_path(src, dst, constraints);
  }
  core::Result<netsim::PathMetrics> path_metrics(const netsim::Path& path) override {
    return control_.path_metrics(path);
  }
  core::Result<std::uint64_t> subscribe(const std::set<netsim::EventType>& types,
                                        std::optional<std::set<std::string>> link_filter,
                                        netsim::EventSink sink) override {
    return control_.subscribe(types, std::move(link_filter), std::move(sink));
  }
  core::Result<void> unsubscribe(std::uint64_t subscription_id) override {
    control_.unsubscribe(subscription_id);
    return core::ok_result();
  }
  bool link_up(const std::string& link_id) override { return control_.link_up(link_id); }

 private:
  netsim::NetworkControl& control_;
};

}  // namespace socketstore::rpc
