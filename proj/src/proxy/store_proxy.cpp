#include "socketstore/proxy/store_proxy.hpp"

#include <algorithm>
#include <cstdio>

namespace socketstore::proxy {

using core::Errc;
using core::Error;
using core::Json;

PoolPolicy PoolPolicy::from_json(const Json& j) {
  PoolPolicy p;
  if (!j.is_object()) return p;
  if (j.contains("window_ms")) p.window_ms = j["window_ms"].get<std::int64_t>();
  if (j.contains("reuse_threshold")) p.reuse_threshold = j["reuse_threshold"].get<std::int64_t>();
  if (j.contains("inactivity_timeout_ms")) {
    p.inactivity_timeout_ms = j["inactivity_timeout_ms"].get<std::int64_t>();
  }
  return p;
}

Json PoolPolicy::to_json() const {
  return Json{{"window_ms", window_ms},
              {"reuse_threshold", reuse_threshold},
              {"inactivity_timeout_ms", inactivity_timeout_ms}};
}

std::string_view sso_status_name(SsoStatus s) {
  switch (s) {
    case SsoStatus::active: return "active";
    case SsoStatus::pooled: return "pooled";
    case SsoStatus::destroyed: return "destroyed";
  }
  return "destroyed";
}

// Context handed to behavior hooks; every call is scoped to one instance and
// executes under the proxy lock, which serializes all operations touching
// that instance.
class ProxyContext final : public SsoContext {
 public:
  ProxyContext(StoreProxy& proxy, SsoInstance& sso) : proxy_(proxy), sso_(sso) {}

  const std::string& sso_id() const override { return sso_.sso_id; }
  const std::string& module_key() const override { return sso_.module_key; }
  const core::ParameterSet& constants() const override { return sso_.constants; }
  const core::PerformanceObjective& objective() const override { return sso_.objective; }
  const std::string& src_node() const override { return sso_.src_node; }
  const std::string& dst_node() const override { return sso_.dst_node; }
  const std::vector<std::string>& composed_of() const override { return sso_.composed_of; }
  core::Json& variables() override { return sso_.variables; }
  std::int64_t now_ms() const override { return proxy_.clock_->now_ms(); }

  void note(std::string_view what, core::Json detail) override {
    detail["sso"] = sso_.sso_id;
    proxy_.trace(std::string("behavior.") + std::string(what), std::move(detail));
  }

  core::Result<netsim::Path> allocate_path(const netsim::PathConstraints& constraints) override {
    auto path = proxy_.network_.allocate_path(sso_.src_node, sso_.dst_node, constraints, sso_.sso_id);
    if (!path) {
      proxy_.trace("netsim.allocate_failed",
                   Json{{"sso", sso_.sso_id}, {"error", path.error().to_string()}});
      return path;
    }
    sso_.pool.push_back(path.value());
    proxy_.trace("netsim.allocate", Json{{"sso", sso_.sso_id},
                                         {"path_id", path.value().path_id},
                                         {"nodes", path.value().nodes}});
    return path;
  }

  core::Result<void> release_path(const std::string& path_id) override {
    auto released = proxy_.network_.release_path(path_id);
    std::erase_if(sso_.pool, [&](const netsim::Path& p) { return p.path_id == path_id; });
    proxy_.trace("netsim.release", Json{{"sso", sso_.sso_id}, {"path_id", path_id}});
    return released;
  }

  const std::vector<netsim::Path>& path_pool() const override { return sso_.pool; }

  core::Result<netsim::PathPlan> probe_path(const netsim::PathConstraints& constraints) const override {
    return proxy_.network_.find_path(sso_.src_node, sso_.dst_node, constraints);
  }

  core::Result<netsim::PathMetrics> metrics_of(const netsim::Path& path) const override {
    return proxy_.network_.path_metrics(path);
  }

  bool link_up(const std::string& link_id) const override { return proxy_.network_.link_up(link_id); }

  core::Result<void> forward(std::string_view payload) override {
    if (sso_.forward_to_nested) {
      // Composition pipeline: this stage's output feeds the next stage.
      auto* next = proxy_.find_mutable(*sso_.forward_to_nested);
      if (next == nullptr || next->status != SsoStatus::active) {
        return Error{Errc::invalid_session, "pipeline stage gone"};
      }
      proxy_.trace("proxy.delegate", Json{{"from", sso_.sso_id},
                                          {"to", next->sso_id},
                                          {"module_key", next->module_key},
                                          {"op", "send"}});
      auto piped = proxy_.handle_data_locked(*next, DataRequest::send(std::string(payload)));
      if (!piped) return piped.error();
      return core::ok_result();
    }
    if (!sso_.peer_link) {
      SsoInstance* sso = &sso_;
      StoreProxy* proxy = &proxy_;
      auto link = proxy_.endpoints_.connect(
          sso_.dst_ip, sso_.dst_port,
          [proxy, sso](std::string_view reply) { proxy->deliver_up(*sso, reply); });
      if (!link) return link.error();
      sso_.peer_link = std::move(link).value();
    }
    proxy_.trace("proxy.forward", Json{{"sso", sso_.sso_id}, {"bytes", payload.size()}});
    (*sso_.peer_link)(payload);
    return core::ok_result();
  }

  void deliver_to_device(std::string_view payload) override { proxy_.deliver_up(sso_, payload); }

  void notify_violation(core::Json detail) override { proxy_.violation_up(sso_, std::move(detail)); }

  void sample(double value) override { (void)proxy_.record_sample_locked(sso_, value); }

  BlobStore& blobs() override { return proxy_.blobs_; }

  core::Result<std::string> delegate_open(
      const std::string& part_key, const std::optional<std::string>& forward_to_nested) override {
    auto opened = proxy_.open_locked(nullptr, part_key, "", sso_.dst_ip, sso_.dst_port,
                                     DeviceSink{}, sso_.sso_id, forward_to_nested);
    if (!opened) return opened.error();
    sso_.nested.push_back(opened.value().sso_id);
    proxy_.trace("proxy.delegate_open", Json{{"parent", sso_.sso_id},
                                             {"part", part_key},
                                             {"nested", opened.value().sso_id}});
    return opened.value().sso_id;
  }

  core::Result<core::Json> delegate_data(const std::string& nested_sso_id,
                                         const DataRequest& request) override {
    if (std::find(sso_.nested.begin(), sso_.nested.end(), nested_sso_id) == sso_.nested.end()) {
      return Error{Errc::delegation_refused, "not a nested session of " + sso_.sso_id};
    }
    auto* nested = proxy_.find_mutable(nested_sso_id);
    if (nested == nullptr || nested->status != SsoStatus::active) {
      return Error{Errc::invalid_session, nested_sso_id};
    }
    proxy_.trace("proxy.delegate", Json{{"from", sso_.sso_id},
                                        {"to", nested_sso_id},
                                        {"module_key", nested->module_key},
                                        {"op", request.op}});
    return proxy_.handle_data_locked(*nested, request);
  }

 private:
  StoreProxy& proxy_;
  SsoInstance& sso_;
};

StoreProxy::StoreProxy(ProxyConfig config, rpc::RegistryPort& registry, rpc::NetworkPort& network,
                       const BehaviorRegistry& behaviors, sim::EndpointTable& endpoints,
                       core::ClockRef clock, core::TraceLog* trace)
    : config_(std::move(config)),
      registry_(registry),
      network_(network),
      behaviors_(behaviors),
      endpoints_(endpoints),
      clock_(std::move(clock)),
      trace_(trace) {}

StoreProxy::~StoreProxy() {
  std::lock_guard lock(mu_);
  for (auto& [id, sso] : instances_) {
    if (sso->status != SsoStatus::destroyed) destroy_locked(*sso);
  }
}

void StoreProxy::trace(std::string_view kind, Json detail) {
  if (trace_ != nullptr) trace_->record(kind, std::move(detail));
}

std::int64_t StoreProxy::opens_in_window(const PoolKey& key, std::int64_t now_ms) const {
  auto it = open_times_.find(key);
  if (it == open_times_.end()) return 0;
  std::int64_t count = 0;
  for (auto t : it->second) {
    if (t > now_ms - config_.pool.window_ms) ++count;
  }
  return count;
}

SsoInstance* StoreProxy::find_mutable(const std::string& sso_id) {
  auto it = instances_.find(sso_id);
  return it == instances_.end() ? nullptr : it->second.get();
}

// Pushes climb to the top-level instance owning the device session.
void StoreProxy::deliver_up(SsoInstance& sso, std::string_view payload) {
  SsoInstance* top = &sso;
  while (top->parent) {
    auto* next = find_mutable(*top->parent);
    if (next == nullptr) return;
    top = next;
  }
  if (top->status != SsoStatus::active || !top->device.on_data) return;
  trace("proxy.deliver", Json{{"sso", top->sso_id}, {"bytes", payload.size()}});
  top->device.on_data(payload);
}

void StoreProxy::violation_up(SsoInstance& sso, Json detail) {
  SsoInstance* top = &sso;
  while (top->parent) {
    auto* next = find_mutable(*top->parent);
    if (next == nullptr) return;
    top = next;
  }
  trace("proxy.violation", Json{{"sso", top->sso_id}, {"detail", detail}});
  if (top->status == SsoStatus::active && top->device.on_violation) top->device.on_violation(detail);
}

core::Result<OpenOutcome> StoreProxy::open_session(const core::Entitlement& ent,
                                                   const std::string& module_key,
                                                   const std::string& module_id,
                                                   const std::string& dst_ip, int dst_port,
                                                   DeviceSink device) {
  std::lock_guard lock(mu_);
  return open_locked(&ent, module_key, module_id, dst_ip, dst_port, std::move(device), std::nullopt,
                     std::nullopt);
}

core::Result<OpenOutcome> StoreProxy::open_locked(
    const core::Entitlement* ent, const std::string& module_key, const std::string& module_id,
    const std::string& dst_ip, int dst_port, DeviceSink device,
    const std::optional<std::string>& parent, const std::optional<std::string>& forward_to_nested) {
  const std::int64_t now = clock_->now_ms();
  if (ent != nullptr) {
    auto verified = registry_.verify(*ent);
    if (!verified) return verified.error();
    if (!verified.value() || ent->module_key != module_key) {
      return Error{Errc::unauthorized, "entitlement does not verify for '" + module_key + "'"};
    }
  }
  auto info = registry_.module_info(module_key);
  if (!info) return info.error();
  const bool nested = parent.has_value();
  if (!nested && info.value().lifecycle != core::Lifecycle::published) {
    return Error{Errc::not_found, "module '" + module_key + "' is not published"};
  }
  if (nested && info.value().lifecycle != core::Lifecycle::published &&
      info.value().lifecycle != core::Lifecycle::deprecated) {
    return Error{Errc::not_found, "part '" + module_key + "' is not served"};
  }
  if (!info.value().network_behavior_id) {
    return Error{Errc::invalid_argument, "module '" + module_key + "' has no network behavior"};
  }

  // Nested sessions bind to the part's first parameterization.
  std::string effective_module_id = module_id;
  if (nested && effective_module_id.empty()) {
    if (info.value().parameterizations.empty()) {
      return Error{Errc::unknown_parameterization, "part has no parameterizations"};
    }
    effective_module_id = info.value().parameterizations.begin()->first;
  }
  auto param_it = info.value().parameterizations.find(effective_module_id);
  if (param_it == info.value().parameterizations.end()) {
    return Error{Errc::unknown_parameterization, effective_module_id};
  }

  auto dst_node = endpoints_.node_of(dst_ip);
  if (!dst_node) {
    return Error{Errc::allocation_failed, "destination '" + dst_ip + "' is not a known host"};
  }

  const PoolKey key{module_key, effective_module_id};
  if (!nested) {
    open_times_[key].push_back(now);
    auto& times = open_times_[key];
    while (!times.empty() && times.front() <= now - config_.pool.window_ms) times.pop_front();

    // Reuse a pooled instance bound to the same destination.
    auto pooled_it = pooled_.find(key);
    if (pooled_it != pooled_.end()) {
      auto& ids = pooled_it->second;
      for (auto id_it = ids.begin(); id_it != ids.end(); ++id_it) {
        SsoInstance* candidate = find_mutable(*id_it);
        if (candidate == nullptr || candidate->status != SsoStatus::pooled) continue;
        if (candidate->dst_node != dst_node.value() || candidate->dst_ip != dst_ip ||
            candidate->dst_port != dst_port) {
          continue;
        }
        SsoInstance& sso = *candidate;
        ids.erase(id_it);
        sso.status = SsoStatus::active;
        sso.last_active_ms = now;
        sso.device = std::move(device);
        trace("proxy.reuse", Json{{"sso", sso.sso_id},
                                  {"module_key", module_key},
                                  {"module_id", effective_module_id}});
        // Events that arrived while pooled are replayed before new traffic.
        auto deferred = std::move(sso.deferred_events);
        sso.deferred_events.clear();
        for (const auto& ev : deferred) {
          trace("proxy.replay_event", Json{{"sso", sso.sso_id}, {"seq", ev.seq}});
          run_handler(sso, ev);
        }
        return OpenOutcome{sso.sso_id, true};
      }
    }
  }

  // Construct a new instance.
  auto behavior = behaviors_.make(*info.value().network_behavior_id);
  if (!behavior) {
    return Error{Errc::allocation_failed,
                 "behavior '" + *info.value().network_behavior_id + "' is not registered"};
  }
  char id_buf[32];
  std::snprintf(id_buf, sizeof(id_buf), "sso-%06llu",
                static_cast<unsigned long long>(next_sso_++));
  auto instance = std::make_unique<SsoInstance>();
  SsoInstance& sso = *instance;
  sso.sso_id = id_buf;
  sso.module_key = module_key;
  sso.module_id = effective_module_id;
  sso.constants = param_it->second;
  sso.objective = info.value().objective;
  sso.src_node = config_.node;
  sso.dst_node = dst_node.value();
  sso.dst_ip = dst_ip;
  sso.dst_port = dst_port;
  sso.last_active_ms = now;
  sso.behavior = std::move(behavior).value();
  sso.device = std::move(device);
  sso.parent = parent;
  sso.forward_to_nested = forward_to_nested;
  sso.composed_of = info.value().composed_of;
  instances_.emplace(sso.sso_id, std::move(instance));
  constructions_[key] += 1;
  trace("proxy.construct", Json{{"sso", sso.sso_id},
                                {"module_key", module_key},
                                {"module_id", effective_module_id},
                                {"nested", nested}});

  ProxyContext ctx(*this, sso);
  auto constructed = sso.behavior->on_construct(ctx);
  if (!constructed) {
    // Roll back partial resource allocation; the device falls back.
    destroy_locked(sso);
    trace("proxy.construct_failed",
          Json{{"sso", sso.sso_id}, {"error", constructed.error().to_string()}});
    return Error{Errc::allocation_failed, constructed.error().to_string()};
  }

  const std::string sso_id = sso.sso_id;
  auto subscribed = network_.subscribe(
      sso.behavior->interests(), std::nullopt,
      [this, sso_id](const netsim::NetworkEvent& ev) { dispatch_subscribed(sso_id, ev); });
  if (subscribed) sso.subscriptions.push_back(subscribed.value());
  return OpenOutcome{sso.sso_id, false};
}

core::Result<CloseOutcome> StoreProxy::close_session(const std::string& sso_id, CloseReason reason) {
  std::lock_guard lock(mu_);
  return close_locked(sso_id, reason);
}

core::Result<CloseOutcome> StoreProxy::close_locked(const std::string& sso_id, CloseReason reason) {
  SsoInstance* sso = find_mutable(sso_id);
  if (sso == nullptr || sso->status != SsoStatus::active || sso->parent) {
    return Error{Errc::invalid_session, sso_id};
  }
  const std::int64_t now = clock_->now_ms();
  const PoolKey key{sso->module_key, sso->module_id};
  const std::int64_t opens = opens_in_window(key, now);
  if (opens >= config_.pool.reuse_threshold) {
    sso->status = SsoStatus::pooled;
    sso->last_active_ms = now;
    sso->device = DeviceSink{};
    pooled_[key].push_back(sso->sso_id);
    trace("proxy.pooled", Json{{"sso", sso->sso_id},
                               {"reason", reason == CloseReason::timeout ? "timeout" : "explicit"},
                               {"window_opens", opens}});
    return CloseOutcome{SsoStatus::pooled};
  }
  trace("proxy.destroying", Json{{"sso", sso->sso_id},
                                 {"reason", reason == CloseReason::timeout ? "timeout" : "explicit"},
                                 {"window_opens", opens}});
  destroy_locked(*sso);
  return CloseOutcome{SsoStatus::destroyed};
}

void StoreProxy::destroy_locked(SsoInstance& sso) {
  if (sso.status == SsoStatus::destroyed) return;
  ProxyContext ctx(*this, sso);
  try {
    if (sso.behavior) sso.behavior->on_destruct(ctx);
  } catch (const std::exception& e) {
    trace("proxy.handler_error", Json{{"sso", sso.sso_id}, {"hook", "on_destruct"}, {"what", e.what()}});
  }
  for (const auto& path : sso.pool) {
    (void)network_.release_path(path.path_id);
    trace("netsim.release", Json{{"sso", sso.sso_id}, {"path_id", path.path_id}});
  }
  sso.pool.clear();
  for (auto sub : sso.subscriptions) (void)network_.unsubscribe(sub);
  sso.subscriptions.clear();
  for (const auto& nested_id : sso.nested) {
    SsoInstance* nested = find_mutable(nested_id);
    if (nested != nullptr) destroy_locked(*nested);
  }
  sso.nested.clear();
  auto pooled_it = pooled_.find(PoolKey{sso.module_key, sso.module_id});
  if (pooled_it != pooled_.end()) {
    std::erase(pooled_it->second, sso.sso_id);
  }
  blobs_.drop_session(sso.sso_id);
  sso.peer_link.reset();
  sso.device = DeviceSink{};
  sso.deferred_events.clear();
  sso.status = SsoStatus::destroyed;
  trace("proxy.destroyed", Json{{"sso", sso.sso_id}});
}

std::vector<SweepEntry> StoreProxy::sweep_timeouts(std::int64_t now_ms) {
  std::lock_guard lock(mu_);
  std::vector<SweepEntry> out;
  // instances_ iterates in id order (ids are zero-padded), so sweeps are
  // reproducible.
  std::vector<SsoInstance*> snapshot;
  for (auto& [id, sso] : instances_) snapshot.push_back(sso.get());
  for (SsoInstance* sso : snapshot) {
    if (sso->parent) continue;  // nested instances follow their parent
    if (sso->status == SsoStatus::active &&
        now_ms - sso->last_active_ms > config_.pool.inactivity_timeout_ms) {
      auto closed = close_locked(sso->sso_id, CloseReason::timeout);
      if (closed) out.push_back(SweepEntry{sso->sso_id, closed.value().disposition});
    } else if (sso->status == SsoStatus::pooled &&
               now_ms - sso->last_active_ms > 2 * config_.pool.inactivity_timeout_ms) {
      destroy_locked(*sso);
      out.push_back(SweepEntry{sso->sso_id, SsoStatus::destroyed});
    }
  }
  if (!out.empty()) trace("proxy.sweep", Json{{"now", now_ms}, {"closed", out.size()}});
  return out;
}

void StoreProxy::run_handler(SsoInstance& sso, const netsim::NetworkEvent& event) {
  ProxyContext ctx(*this, sso);
  try {
    sso.behavior->on_path_event(ctx, event);
    trace("proxy.handler_run",
          Json{{"sso", sso.sso_id}, {"seq", event.seq}, {"link", event.link_id}});
  } catch (const std::exception& e) {
    sso.handler_errors += 1;
    trace("proxy.handler_error",
          Json{{"sso", sso.sso_id}, {"seq", event.seq}, {"what", e.what()}});
  }
}

bool StoreProxy::dispatch_one(SsoInstance& sso, const netsim::NetworkEvent& event) {
  bool affected = false;
  for (const auto& path : sso.pool) {
    if (path.uses_link(event.link_id)) {
      affected = true;
      break;
    }
  }
  if (!affected) return false;
  if (sso.status == SsoStatus::pooled) {
    sso.deferred_events.push_back(event);
    trace("proxy.event_deferred", Json{{"sso", sso.sso_id}, {"seq", event.seq}});
    return false;
  }
  if (sso.status != SsoStatus::active) return false;
  run_handler(sso, event);
  return true;
}

void StoreProxy::dispatch_subscribed(const std::string& sso_id, const netsim::NetworkEvent& event) {
  std::lock_guard lock(mu_);
  SsoInstance* sso = find_mutable(sso_id);
  if (sso == nullptr) return;
  (void)dispatch_one(*sso, event);
}

std::vector<std::string> StoreProxy::deliver_event(const netsim::NetworkEvent& event) {
  std::lock_guard lock(mu_);
  std::vector<std::string> ran;
  std::vector<SsoInstance*> snapshot;
  for (auto& [id, sso] : instances_) snapshot.push_back(sso.get());
  for (SsoInstance* sso : snapshot) {
    if (dispatch_one(*sso, event)) ran.push_back(sso->sso_id);
  }
  return ran;
}

core::Result<Json> StoreProxy::handle_data(const std::string& sso_id, const DataRequest& request) {
  std::lock_guard lock(mu_);
  SsoInstance* sso = find_mutable(sso_id);
  if (sso == nullptr || sso->status != SsoStatus::active) {
    return Error{Errc::invalid_session, sso_id};
  }
  return handle_data_locked(*sso, request);
}

core::Result<Json> StoreProxy::handle_data_locked(SsoInstance& sso, const DataRequest& request) {
  if (sso.status != SsoStatus::active) return Error{Errc::invalid_session, sso.sso_id};
  sso.last_active_ms = clock_->now_ms();
  ProxyContext ctx(*this, sso);
  try {
    return sso.behavior->on_data(ctx, request);
  } catch (const std::exception& e) {
    sso.handler_errors += 1;
    trace("proxy.handler_error", Json{{"sso", sso.sso_id}, {"hook", "on_data"}, {"what", e.what()}});
    return Error{Errc::io_error, std::string("behavior failure: ") + e.what()};
  }
}

core::Result<SampleOutcome> StoreProxy::record_sample(const std::string& sso_id, double value) {
  std::lock_guard lock(mu_);
  SsoInstance* sso = find_mutable(sso_id);
  if (sso == nullptr || sso->status != SsoStatus::active) {
    return Error{Errc::invalid_session, sso_id};
  }
  return record_sample_locked(*sso, value);
}

core::Result<SampleOutcome> StoreProxy::record_sample_locked(SsoInstance& sso, double value) {
  sso.sample_count += 1;
  const bool attained_now = sso.objective.satisfied_by(value);
  if (attained_now) sso.attained_count += 1;
  sso.raw_samples.push_back(value);
  constexpr double alpha = 0.2;
  sso.ewma = sso.ewma ? alpha * value + (1.0 - alpha) * *sso.ewma : value;
  sso.last_active_ms = clock_->now_ms();
  SampleOutcome outcome;
  outcome.samples = sso.sample_count;
  outcome.attained = sso.attained_count;
  outcome.ewma = *sso.ewma;
  outcome.attained_now = attained_now;
  outcome.violation = !sso.objective.satisfied_by(*sso.ewma);
  trace("proxy.sample", Json{{"sso", sso.sso_id},
                             {"value", value},
                             {"ewma", *sso.ewma},
                             {"attained", attained_now}});
  if (outcome.violation) {
    violation_up(sso, Json{{"metric", core::metric_name(sso.objective.metric)},
                           {"ewma", *sso.ewma},
                           {"bound", sso.objective.bound},
                           {"sso", sso.sso_id}});
  }
  // Forwarded to the registry's objective stats; a dead registry loses the
  // forward but not the local record.
  (void)registry_.record_sample(sso.module_key, sso.objective.metric, value, sso.last_active_ms);
  return outcome;
}

core::Result<Json> StoreProxy::delegate(const std::string& sso_id, const std::string& part_key,
                                        const DataRequest& request) {
  std::lock_guard lock(mu_);
  SsoInstance* sso = find_mutable(sso_id);
  if (sso == nullptr || sso->status != SsoStatus::active) {
    return Error{Errc::invalid_session, sso_id};
  }
  auto info = registry_.module_info(sso->module_key);
  if (!info) return info.error();
  const auto& parts = info.value().composed_of;
  if (std::find(parts.begin(), parts.end(), part_key) == parts.end()) {
    return Error{Errc::delegation_refused,
                 "'" + part_key + "' is not a constituent of '" + sso->module_key + "'"};
  }
  // Reuse the nested session for this part if one exists.
  std::string nested_id;
  for (const auto& id : sso->nested) {
    SsoInstance* nested = find_mutable(id);
    if (nested != nullptr && nested->module_key == part_key &&
        nested->status == SsoStatus::active) {
      nested_id = id;
      break;
    }
  }
  ProxyContext ctx(*this, *sso);
  if (nested_id.empty()) {
    auto opened = ctx.delegate_open(part_key, std::nullopt);
    if (!opened) return opened.error();
    nested_id = opened.value();
  }
  return ctx.delegate_data(nested_id, request);
}

const SsoInstance* StoreProxy::find_instance(const std::string& sso_id) const {
  std::lock_guard lock(mu_);
  auto it = instances_.find(sso_id);
  return it == instances_.end() ? nullptr : it->second.get();
}

std::vector<std::string> StoreProxy::instances_with_status(SsoStatus status) const {
  std::lock_guard lock(mu_);
  std::vector<std::string> out;
  for (const auto& [id, sso] : instances_) {
    if (sso->status == status) out.push_back(id);
  }
  return out;
}

std::int64_t StoreProxy::construction_count(const std::string& module_key,
                                            const std::string& module_id) const {
  std::lock_guard lock(mu_);
  auto it = constructions_.find(PoolKey{module_key, module_id});
  return it == constructions_.end() ? 0 : it->second;
}

std::int64_t StoreProxy::total_constructions() const {
  std::lock_guard lock(mu_);
  std::int64_t total = 0;
  for (const auto& [key, n] : constructions_) total += n;
  return total;
}

std::size_t StoreProxy::session_count() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& [id, sso] : instances_) {
    if (sso->status == SsoStatus::active && !sso->parent) ++n;
  }
  return n;
}

}  // namespace socketstore::proxy
