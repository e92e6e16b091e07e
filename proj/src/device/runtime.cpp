#include "socketstore/device/runtime.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "socketstore/wire/codec.hpp"

namespace socketstore::device {

namespace fs = std::filesystem;
using core::Errc;
using core::Error;
using core::Json;

std::string_view connection_kind_name(ConnectionKind k) {
  return k == ConnectionKind::module_socket ? "ModuleSocket" : "LegacySocket";
}

void register_device_behaviors(DeviceBehaviorRegistry& registry) {
  registry.add("default_device", DeviceBehaviorHooks{});
  registry.add("dtn_device", DeviceBehaviorHooks{});
}

namespace {

bool transport_error(const Error& err) {
  return err.code == Errc::connect_failed || err.code == Errc::io_error ||
         err.code == Errc::timeout;
}

}  // namespace

// ---- Connection ----

bool Connection::is_open() const {
  std::lock_guard lock(mu_);
  return open_;
}

core::Result<void> Connection::send(std::string_view payload) {
  std::unique_lock lock(mu_);
  if (!open_) return Error{Errc::connection_closed, "send on closed connection"};
  if (payload.size() > wire::max_frame_payload) {
    return Error{Errc::frame_too_large, "payload exceeds frame bound"};
  }
  std::string outbound(payload);
  if (behavior_ != nullptr && behavior_->on_send) {
    auto transformed = behavior_->on_send(behavior_params_, payload);
    if (!transformed) return transformed.error();
    outbound = std::move(transformed).value();
  }
  if (!sso_id_.empty() && proxy_ != nullptr) {
    auto* proxy = proxy_;
    const std::string sso = sso_id_;
    lock.unlock();  // proxy may push replies synchronously
    auto reply = proxy->session_data(sso, proxy::DataRequest::send(std::move(outbound)));
    if (!reply) return reply.error();
    return core::ok_result();
  }
  if (peer_link) {
    auto link = *peer_link;
    lock.unlock();
    link(outbound);
    return core::ok_result();
  }
  return Error{Errc::connection_closed, "no transport attached"};
}

core::Result<std::string> Connection::recv() {
  std::lock_guard lock(mu_);
  if (!open_ && incoming_.empty()) {
    return Error{Errc::connection_closed, "recv on closed connection"};
  }
  if (incoming_.empty()) return Error{Errc::timeout, "no data queued"};
  std::string payload = std::move(incoming_.front());
  incoming_.pop_front();
  return payload;
}

core::Result<void> Connection::close() {
  std::unique_lock lock(mu_);
  if (!open_) return Error{Errc::connection_closed, "already closed"};
  open_ = false;
  const std::string sso = sso_id_;
  auto* proxy = proxy_;
  peer_link.reset();
  lock.unlock();
  if (!sso.empty() && proxy != nullptr) {
    // Explicit destruction signal; reclamation outcome is the proxy's call.
    (void)proxy->close_session(sso);
  }
  return core::ok_result();
}

core::Result<std::uint64_t> Connection::on_event(DeviceEventType type, EventHandler handler) {
  std::lock_guard lock(mu_);
  if (type == DeviceEventType::objective_violation && kind_ == ConnectionKind::legacy_socket) {
    return Error{Errc::unsupported, "legacy connections carry no performance objective"};
  }
  const auto id = next_handler_++;
  handlers_[id] = {type, std::move(handler)};
  return id;
}

core::Result<core::Json> Connection::request(const proxy::DataRequest& op) {
  std::unique_lock lock(mu_);
  if (!open_) return Error{Errc::connection_closed, "request on closed connection"};
  if (sso_id_.empty() || proxy_ == nullptr) {
    return Error{Errc::unsupported, "no module session behind this connection"};
  }
  auto* proxy = proxy_;
  const std::string sso = sso_id_;
  lock.unlock();
  return proxy->session_data(sso, op);
}

std::size_t Connection::violation_count() const {
  std::lock_guard lock(mu_);
  return violations_;
}

void Connection::push_data(std::string_view payload) {
  std::vector<EventHandler> to_run;
  {
    std::lock_guard lock(mu_);
    if (!open_) return;
    for (const auto& [id, entry] : handlers_) {
      if (entry.first == DeviceEventType::incoming_data) to_run.push_back(entry.second);
    }
    if (to_run.empty()) {
      incoming_.push_back(std::string(payload));
      return;
    }
  }
  const Json event{{"payload", std::string(payload)}};
  for (const auto& handler : to_run) handler(event);
}

void Connection::push_violation(const core::Json& detail) {
  std::vector<EventHandler> to_run;
  {
    std::lock_guard lock(mu_);
    violations_ += 1;
    for (const auto& [id, entry] : handlers_) {
      if (entry.first == DeviceEventType::objective_violation) to_run.push_back(entry.second);
    }
  }
  for (const auto& handler : to_run) handler(detail);
}

// ---- Listener ----

core::Result<std::shared_ptr<Connection>> Listener::accept() {
  std::lock_guard lock(mu_);
  if (!open_) return Error{Errc::connection_closed, "listener closed"};
  if (pending_.empty()) return Error{Errc::timeout, "no pending connection"};
  auto conn = pending_.front();
  pending_.pop_front();
  return conn;
}

void Listener::close() {
  std::unique_lock lock(mu_);
  if (!open_) return;
  open_ = false;
  const std::string sso = sso_id_;
  auto* proxy = proxy_;
  auto* runtime = runtime_;
  const std::string ip = ip_;
  const int port = port_;
  lock.unlock();
  if (runtime != nullptr && runtime->fabric_.endpoints != nullptr) {
    runtime->fabric_.endpoints->unbind(ip, port);
  }
  if (!sso.empty() && proxy != nullptr) (void)proxy->close_session(sso);
}

// ---- DsoRuntime ----

void DsoRuntime::trace(std::string_view kind, Json detail) {
  if (fabric_.trace != nullptr) fabric_.trace->record(kind, std::move(detail));
}

std::unique_ptr<DsoRuntime> DsoRuntime::init(DeviceConfig config, DeviceFabric fabric) {
  auto runtime = std::unique_ptr<DsoRuntime>(new DsoRuntime());
  runtime->config_ = std::move(config);
  runtime->fabric_ = std::move(fabric);
  auto& self = *runtime;

  if (!self.config_.cache_dir.empty()) {
    std::error_code ec;
    fs::create_directories(self.config_.cache_dir, ec);
  }
  if (self.fabric_.endpoints != nullptr && !self.config_.device_ip.empty()) {
    (void)self.fabric_.endpoints->register_host(self.config_.device_ip, self.config_.node);
  }

  // TO update check for every entitled module, in stable module order.
  bool any_reachable = self.fabric_.stores.empty();
  for (const auto& [module_key, ent] : self.config_.entitlements) {
    self.refresh_cache(module_key, ent);
  }
  for (const auto& store : self.fabric_.stores) {
    if (store.registry == nullptr) continue;
    auto probe = store.registry->module_info("__reachability_probe__");
    if (probe.ok() || !transport_error(probe.error())) {
      any_reachable = true;
      break;
    }
  }
  self.degraded_ = !any_reachable;

  // Surviving cache entries feed the module_id index even in degraded mode.
  for (const auto& [module_key, ent] : self.config_.entitlements) {
    auto entry = self.cache_entry(module_key);
    if (!entry) continue;
    for (const auto& module_id : entry->record.module_ids) {
      self.module_id_index_[module_id] = module_key;
    }
  }
  self.trace("device.init", Json{{"app", self.config_.app_id},
                                 {"degraded", self.degraded_},
                                 {"to_transfers", self.to_transfers_}});
  return runtime;
}

core::Result<CacheEntry> DsoRuntime::load_cache(const std::string& module_key) const {
  const fs::path record_path = fs::path(config_.cache_dir) / (module_key + ".to.json");
  const fs::path version_path = fs::path(config_.cache_dir) / (module_key + ".ver");
  std::ifstream record_in(record_path);
  std::ifstream version_in(version_path);
  if (!record_in || !version_in) return Error{Errc::not_found, module_key};
  std::ostringstream record_buf;
  record_buf << record_in.rdbuf();
  auto parsed = core::parse_json(record_buf.str());
  if (!parsed) return Error{Errc::io_error, "corrupt cache record"};
  auto record = registry::ToReply::from_json(parsed.value());
  if (!record) return Error{Errc::io_error, "corrupt cache record"};
  CacheEntry entry;
  entry.record = std::move(record).value();
  version_in >> entry.version;
  if (version_in.fail()) return Error{Errc::io_error, "corrupt cache version"};
  // Cached TOs must verify their checksum on load.
  if (entry.record.to && !entry.record.to->checksum_valid()) {
    return Error{Errc::io_error, "cache checksum mismatch"};
  }
  return entry;
}

void DsoRuntime::store_cache(const std::string& module_key, const registry::ToReply& record) {
  if (config_.cache_dir.empty()) return;
  const fs::path record_path = fs::path(config_.cache_dir) / (module_key + ".to.json");
  const fs::path version_path = fs::path(config_.cache_dir) / (module_key + ".ver");
  std::ofstream(record_path) << core::canonical_dump(record.to_json());
  std::ofstream(version_path) << record.version;
}

void DsoRuntime::drop_cache(const std::string& module_key) {
  std::error_code ec;
  fs::remove(fs::path(config_.cache_dir) / (module_key + ".to.json"), ec);
  fs::remove(fs::path(config_.cache_dir) / (module_key + ".ver"), ec);
}

std::optional<CacheEntry> DsoRuntime::cache_entry(const std::string& module_key) const {
  auto loaded = load_cache(module_key);
  if (!loaded) return std::nullopt;
  return loaded.value();
}

void DsoRuntime::refresh_cache(const std::string& module_key, const core::Entitlement& ent) {
  std::optional<std::int64_t> cached_version;
  auto cached = load_cache(module_key);
  if (cached.ok()) {
    cached_version = cached.value().version;
  } else if (cached.error().code == Errc::io_error) {
    // Corrupt entry: discard and refetch from scratch.
    drop_cache(module_key);
    trace("device.cache_discarded", Json{{"module_key", module_key}});
  }

  for (auto& store : fabric_.stores) {
    if (store.registry == nullptr) continue;
    auto reply = store.registry->fetch_to(ent, module_key, cached_version);
    if (!reply) {
      if (transport_error(reply.error())) continue;  // try the next endpoint
      trace("device.fetch_rejected",
            Json{{"module_key", module_key}, {"error", reply.error().to_string()}});
      return;
    }
    auto& record = reply.value();
    switch (record.status) {
      case registry::ToReply::Status::up_to_date:
        trace("device.to_up_to_date", Json{{"module_key", module_key}});
        return;
      case registry::ToReply::Status::new_to:
        if (!record.to || !record.to->checksum_valid()) {
          trace("device.to_rejected", Json{{"module_key", module_key}, {"why", "checksum"}});
          return;
        }
        store_cache(module_key, record);
        to_transfers_ += 1;
        trace("device.to_downloaded",
              Json{{"module_key", module_key}, {"version", record.version}});
        return;
      case registry::ToReply::Status::default_device:
        store_cache(module_key, record);
        trace("device.to_default", Json{{"module_key", module_key}});
        return;
    }
  }
}

core::Result<std::string> DsoRuntime::resolve_module(const std::string& module_id) const {
  auto it = module_id_index_.find(module_id);
  if (it == module_id_index_.end()) {
    return Error{Errc::unknown_parameterization, module_id};
  }
  return it->second;
}

StoreEndpoint* DsoRuntime::pick_store_registry() {
  for (auto& store : fabric_.stores) {
    if (store.registry != nullptr) return &store;
  }
  return nullptr;
}

StoreEndpoint* DsoRuntime::pick_store_proxy() {
  for (auto& store : fabric_.stores) {
    if (store.proxy != nullptr) return &store;
  }
  return nullptr;
}

std::shared_ptr<Connection> DsoRuntime::legacy_connect(const std::string& ip, int port) {
  if (fabric_.endpoints == nullptr) return nullptr;
  auto conn = std::make_shared<Connection>();
  conn->kind_ = ConnectionKind::legacy_socket;
  conn->runtime_ = this;
  std::weak_ptr<Connection> weak = conn;
  auto link = fabric_.endpoints->connect(
      ip, port, [weak](std::string_view payload) {
        if (auto c = weak.lock()) c->push_data(payload);
      });
  if (!link) return nullptr;
  conn->peer_link = std::move(link).value();
  std::lock_guard lock(mu_);
  connections_.push_back(conn);
  return conn;
}

core::Result<std::shared_ptr<Connection>> DsoRuntime::module_connect(const std::string& module_key,
                                                                     const std::string& module_id,
                                                                     const std::string& ip,
                                                                     int port) {
  auto ent_it = config_.entitlements.find(module_key);
  if (ent_it == config_.entitlements.end()) {
    return Error{Errc::unauthorized, "no entitlement for '" + module_key + "'"};
  }
  auto entry = load_cache(module_key);
  if (!entry) return Error{Errc::not_found, "no usable TO cache for '" + module_key + "'"};
  const auto& record = entry.value().record;

  // Execution of the cached TO: instantiate the built-in behavior it names.
  const DeviceBehaviorHooks* hooks = nullptr;
  core::ParameterSet params;
  std::string behavior_id = "default_device";
  if (record.status == registry::ToReply::Status::new_to) {
    if (!record.to || !record.to->checksum_valid()) {
      drop_cache(module_key);
      return Error{Errc::io_error, "cached TO failed its checksum"};
    }
    behavior_id = record.to->behavior_id;
    params = record.to->params;
  }
  if (fabric_.behaviors == nullptr) {
    return Error{Errc::not_found, "no device behavior registry"};
  }
  hooks = fabric_.behaviors->find(behavior_id);
  if (hooks == nullptr) {
    return Error{Errc::not_found, "unknown device behavior '" + behavior_id + "'"};
  }
  if (hooks->on_connect) {
    auto ran = hooks->on_connect(params);
    if (!ran) return ran.error();
  }

  auto conn = std::make_shared<Connection>();
  conn->kind_ = ConnectionKind::module_socket;
  conn->runtime_ = this;
  conn->behavior_ = hooks;
  conn->behavior_params_ = params;
  std::weak_ptr<Connection> weak = conn;

  if (record.has_network_behavior) {
    StoreEndpoint* store = pick_store_proxy();
    if (store == nullptr) return Error{Errc::connect_failed, "no store proxy endpoint"};
    proxy::DeviceSink sink;
    sink.on_data = [weak](std::string_view payload) {
      if (auto c = weak.lock()) c->push_data(payload);
    };
    sink.on_violation = [weak](const Json& detail) {
      if (auto c = weak.lock()) c->push_violation(detail);
    };
    auto opened = store->proxy->open_session(ent_it->second, module_key, module_id, ip, port,
                                             std::move(sink));
    if (!opened) return opened.error();
    conn->proxy_ = store->proxy;
    conn->sso_id_ = opened.value().sso_id;
  } else {
    // Device-only module: direct transport, device-side processing active.
    if (fabric_.endpoints == nullptr) return Error{Errc::connect_failed, "no endpoint table"};
    auto link = fabric_.endpoints->connect(ip, port, [weak](std::string_view payload) {
      if (auto c = weak.lock()) c->push_data(payload);
    });
    if (!link) return link.error();
    conn->peer_link = std::move(link).value();
  }
  std::lock_guard lock(mu_);
  connections_.push_back(conn);
  return conn;
}

core::Result<std::shared_ptr<Connection>> DsoRuntime::connect(
    const std::string& protocol, const std::string& ip, int port,
    const std::optional<std::string>& module_id) {
  (void)protocol;  // carried for interface fidelity; the simulation is protocol-agnostic
  if (module_id) {
    auto resolved = resolve_module(*module_id);
    if (resolved.ok()) {
      auto attempt = module_connect(resolved.value(), *module_id, ip, port);
      if (attempt.ok()) {
        trace("device.connect", Json{{"kind", "ModuleSocket"},
                                     {"module_id", *module_id},
                                     {"session", attempt.value()->session_id()}});
        return attempt;
      }
      trace("device.fallback", Json{{"module_id", *module_id},
                                    {"error", attempt.error().to_string()}});
    } else {
      trace("device.fallback", Json{{"module_id", *module_id},
                                    {"error", resolved.error().to_string()}});
    }
  }
  auto legacy = legacy_connect(ip, port);
  if (legacy == nullptr) {
    return Error{Errc::connect_failed, "destination unreachable: " + ip};
  }
  if (!module_id) {
    trace("device.connect", Json{{"kind", "LegacySocket"}});
  } else {
    trace("device.connect", Json{{"kind", "LegacySocket"}, {"after_module_id", *module_id}});
  }
  return legacy;
}

core::Result<std::shared_ptr<Listener>> DsoRuntime::bind_listen(
    int port, const std::optional<std::string>& module_id) {
  if (fabric_.endpoints == nullptr) return Error{Errc::bind_failed, "no endpoint table"};
  auto listener = std::make_shared<Listener>();
  listener->ip_ = config_.device_ip;
  listener->port_ = port;
  listener->runtime_ = this;
  listener->kind_ = ConnectionKind::legacy_socket;

  if (module_id) {
    // Same establishment logic and fallback rule as connect.
    auto resolved = resolve_module(*module_id);
    if (resolved.ok()) {
      auto ent_it = config_.entitlements.find(resolved.value());
      auto entry = load_cache(resolved.value());
      if (ent_it != config_.entitlements.end() && entry.ok() &&
          entry.value().record.has_network_behavior) {
        StoreEndpoint* store = pick_store_proxy();
        if (store != nullptr) {
          auto opened = store->proxy->open_session(ent_it->second, resolved.value(), *module_id,
                                                   config_.device_ip, port, proxy::DeviceSink{});
          if (opened) {
            listener->kind_ = ConnectionKind::module_socket;
            listener->proxy_ = store->proxy;
            listener->sso_id_ = opened.value().sso_id;
          }
        }
      } else if (ent_it != config_.entitlements.end() && entry.ok()) {
        listener->kind_ = ConnectionKind::module_socket;  // device-only module
      }
    }
  }

  std::weak_ptr<Listener> weak_listener = listener;
  DsoRuntime* self = this;
  auto bound = fabric_.endpoints->bind(
      config_.device_ip, port,
      [weak_listener, self](sim::Sink reply) -> core::Result<sim::Sink> {
        auto listener = weak_listener.lock();
        if (!listener) return Error{Errc::connect_failed, "listener gone"};
        auto conn = std::make_shared<Connection>();
        {
          std::lock_guard conn_lock(conn->mu_);
          conn->kind_ = listener->kind();
          conn->runtime_ = self;
          conn->peer_link = std::move(reply);
        }
        {
          std::lock_guard lock(listener->mu_);
          listener->pending_.push_back(conn);
        }
        {
          std::lock_guard lock(self->mu_);
          self->connections_.push_back(conn);
        }
        std::weak_ptr<Connection> weak_conn = conn;
        return sim::Sink([weak_conn](std::string_view payload) {
          if (auto c = weak_conn.lock()) c->push_data(payload);
        });
      });
  if (!bound) {
    if (!listener->sso_id_.empty() && listener->proxy_ != nullptr) {
      (void)listener->proxy_->close_session(listener->sso_id_);
    }
    return bound.error();
  }
  std::lock_guard lock(mu_);
  listeners_.push_back(listener);
  trace("device.bind", Json{{"port", port},
                            {"kind", std::string(connection_kind_name(listener->kind_))}});
  return listener;
}

void DsoRuntime::shutdown() {
  std::vector<std::shared_ptr<Connection>> conns;
  std::vector<std::shared_ptr<Listener>> listeners;
  {
    std::lock_guard lock(mu_);
    for (auto& weak : connections_) {
      if (auto c = weak.lock()) conns.push_back(c);
    }
    for (auto& weak : listeners_) {
      if (auto l = weak.lock()) listeners.push_back(l);
    }
  }
  std::size_t closed = 0;
  for (auto& conn : conns) {
    if (conn->is_open()) {
      (void)conn->close();  // best-effort CloseSession signals
      ++closed;
    }
  }
  for (auto& listener : listeners) listener->close();
  trace("device.shutdown", Json{{"app", config_.app_id}, {"closed", closed}});
}

std::size_t DsoRuntime::open_sessions() const {
  std::lock_guard lock(mu_);
  std::size_t n = 0;
  for (const auto& weak : connections_) {
    if (auto c = weak.lock()) {
      if (c->is_open() && !c->session_id().empty()) ++n;
    }
  }
  return n;
}

core::Result<void> DsoRuntime::report_sample(Connection& conn, double value) {
  if (conn.kind() != ConnectionKind::module_socket || conn.session_id().empty()) {
    return Error{Errc::unsupported, "samples require a module session"};
  }
  auto outcome = conn.proxy_->session_sample(conn.session_id(), value);
  if (!outcome) return outcome.error();
  return core::ok_result();
}

}  // namespace socketstore::device
