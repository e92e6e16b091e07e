#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "socketstore/core/json.hpp"
#include "socketstore/core/result.hpp"
#include "socketstore/core/types.hpp"
#include "socketstore/netsim/network_control.hpp"
#include "socketstore/proxy/blob_store.hpp"

namespace socketstore::proxy {

// A device-originated request on an open session. op "send" carries payload;
// module utilities (undo/redo, streaming) use their own op names.
struct DataRequest {
  std::string op;
  std::string payload;
  core::Json extra = core::Json::object();

  static DataRequest send(std::string p) {
    DataRequest r;
    r.op = "send";
    r.payload = std::move(p);
    return r;
  }

  core::Json to_json() const;
  static core::Result<DataRequest> from_json(const core::Json& j);
};

// Everything a store-side behavior may do, scoped to one SSO instance. Calls
// are executed immediately and recorded in the instance's action trace, so a
// hook stays a deterministic function of (variables, pool, event, network
// state).
class SsoContext {
 public:
  virtual ~SsoContext() = default;

  virtual const std::string& sso_id() const = 0;
  virtual const std::string& module_key() const = 0;
  virtual const core::ParameterSet& constants() const = 0;
  virtual const core::PerformanceObjective& objective() const = 0;
  virtual const std::string& src_node() const = 0;
  virtual const std::string& dst_node() const = 0;
  virtual const std::vector<std::string>& composed_of() const = 0;
  virtual core::Json& variables() = 0;
  virtual std::int64_t now_ms() const = 0;

  // Behavior-level trace mark (shows up as behavior.<what> in the event log).
  virtual void note(std::string_view what, core::Json detail) = 0;

  // Resource actions against the Network Control.
  virtual core::Result<netsim::Path> allocate_path(const netsim::PathConstraints& constraints) = 0;
  virtual core::Result<void> release_path(const std::string& path_id) = 0;
  virtual const std::vector<netsim::Path>& path_pool() const = 0;

  // Read-only network queries.
  virtual core::Result<netsim::PathPlan> probe_path(const netsim::PathConstraints& constraints) const = 0;
  virtual core::Result<netsim::PathMetrics> metrics_of(const netsim::Path& path) const = 0;
  virtual bool link_up(const std::string& link_id) const = 0;
  bool path_is_up(const netsim::Path& path) const {
    for (const auto& l : path.links) {
      if (!link_up(l)) return false;
    }
    return true;
  }

  // Data plane: forward toward the destination, deliver back to the device.
  virtual core::Result<void> forward(std::string_view payload) = 0;
  virtual void deliver_to_device(std::string_view payload) = 0;
  virtual void notify_violation(core::Json detail) = 0;

  // Monitoring sample of the module's objective metric.
  virtual void sample(double value) = 0;

  virtual BlobStore& blobs() = 0;

  // Composition: open a nested session for a constituent module and route
  // requests to it. When forward_to_nested is set, payloads the nested
  // behavior forwards are piped into that stage instead of the network.
  virtual core::Result<std::string> delegate_open(
      const std::string& part_key, const std::optional<std::string>& forward_to_nested) = 0;
  virtual core::Result<core::Json> delegate_data(const std::string& nested_sso_id,
                                                 const DataRequest& request) = 0;
};

// Store-side network logic of a module. Implementations are stateless: all
// instance state lives in the context (variables, path pool, blob store), so
// pooled instances can be revived and hooks replayed deterministically.
class NetworkBehavior {
 public:
  virtual ~NetworkBehavior() = default;

  virtual std::string_view id() const = 0;

  // Event types this behavior reacts to; the proxy subscribes accordingly.
  virtual std::set<netsim::EventType> interests() const { return netsim::all_event_types; }

  virtual core::Result<void> on_construct(SsoContext& ctx) = 0;
  virtual void on_path_event(SsoContext& ctx, const netsim::NetworkEvent& event) = 0;
  virtual core::Result<core::Json> on_data(SsoContext& ctx, const DataRequest& request) = 0;
  virtual void on_destruct(SsoContext& ctx) = 0;
};

using BehaviorFactory = std::function<std::unique_ptr<NetworkBehavior>()>;

class BehaviorRegistry {
 public:
  void add(const std::string& behavior_id, BehaviorFactory factory) {
    factories_[behavior_id] = std::move(factory);
  }

  core::Result<std::unique_ptr<NetworkBehavior>> make(const std::string& behavior_id) const {
    auto it = factories_.find(behavior_id);
    if (it == factories_.end()) {
      return core::Error{core::Errc::not_found, "unknown behavior '" + behavior_id + "'"};
    }
    return it->second();
  }

  bool contains(const std::string& behavior_id) const { return factories_.count(behavior_id) > 0; }

  std::vector<std::string> ids() const {
    std::vector<std::string> out;
    for (const auto& [id, f] : factories_) out.push_back(id);
    return out;
  }

 private:
  std::map<std::string, BehaviorFactory> factories_;
};

}  // namespace socketstore::proxy
