#include "socketstore/modules/behaviors.hpp"

#include <algorithm>
#include <limits>

namespace socketstore::modules {

using core::Errc;
using core::Error;
using core::Json;
using proxy::DataRequest;
using proxy::SsoContext;

netsim::PathConstraints constraints_of(const core::ParameterSet& constants) {
  netsim::PathConstraints c;
  if (constants.contains("min_bandwidth_mbps")) {
    c.min_bandwidth_mbps = constants.get_number("min_bandwidth_mbps", 0.0);
  }
  return c;
}

namespace {

double pool_latency(SsoContext& ctx) {
  if (ctx.path_pool().empty()) return std::numeric_limits<double>::infinity();
  auto metrics = ctx.metrics_of(ctx.path_pool().front());
  if (!metrics) return std::numeric_limits<double>::infinity();
  return metrics.value().latency_ms;
}

// Keeps a single path that is always latency-optimal among currently
// available routes; reallocates when an event leaves the held path broken or
// beaten, and raises ObjectiveViolation when even the best route misses the
// objective bound (or none exists).
class LatencyGuard final : public proxy::NetworkBehavior {
 public:
  std::string_view id() const override { return "latency_guard"; }

  core::Result<void> on_construct(SsoContext& ctx) override {
    auto path = ctx.allocate_path(constraints_of(ctx.constants()));
    if (!path) return path.error();
    return core::ok_result();
  }

  void on_path_event(SsoContext& ctx, const netsim::NetworkEvent& event) override {
    (void)event;
    reoptimize(ctx);
  }

  core::Result<Json> on_data(SsoContext& ctx, const DataRequest& request) override {
    if (request.op != "send") return Error{Errc::unsupported, "op '" + request.op + "'"};
    auto sent = ctx.forward(request.payload);
    if (!sent) return sent.error();
    const double latency = pool_latency(ctx);
    if (std::isfinite(latency)) ctx.sample(latency);
    return Json{{"status", "ack"}};
  }

  void on_destruct(SsoContext& ctx) override { (void)ctx; }

 private:
  void reoptimize(SsoContext& ctx) {
    const auto constraints = constraints_of(ctx.constants());
    const double bound = ctx.objective().bound;
    auto best = ctx.probe_path(constraints);
    if (!best) {
      // All routes gone; release what is held and surface the failure.
      while (!ctx.path_pool().empty()) {
        (void)ctx.release_path(ctx.path_pool().front().path_id);
      }
      ctx.notify_violation(Json{{"reason", "no_route"}});
      return;
    }
    bool broken = ctx.path_pool().empty();
    double current = std::numeric_limits<double>::infinity();
    if (!broken) {
      const auto& held = ctx.path_pool().front();
      broken = !ctx.path_is_up(held);
      if (!broken) current = pool_latency(ctx);
    }
    if (broken || best.value().latency_ms < current) {
      while (!ctx.path_pool().empty()) {
        (void)ctx.release_path(ctx.path_pool().front().path_id);
      }
      auto fresh = ctx.allocate_path(constraints);
      if (!fresh) {
        ctx.notify_violation(Json{{"reason", "no_route"}});
        return;
      }
      ctx.note("reallocated", Json{{"latency_ms", best.value().latency_ms},
                                   {"nodes", fresh.value().nodes}});
      current = best.value().latency_ms;
    }
    if (current > bound) {
      ctx.notify_violation(Json{{"reason", "bound_exceeded"},
                                {"latency_ms", current},
                                {"bound", bound}});
    }
  }
};

// Holds a primary and a link-disjoint backup path; forwarding follows the
// "active" one, switching to the survivor when a LinkDown hits it.
class MultipathFailover final : public proxy::NetworkBehavior {
 public:
  std::string_view id() const override { return "multipath_failover"; }

  core::Result<void> on_construct(SsoContext& ctx) override {
    const auto constraints = constraints_of(ctx.constants());
    auto primary = ctx.allocate_path(constraints);
    if (!primary) return primary.error();
    auto disjoint = constraints;
    for (const auto& link : primary.value().links) disjoint.exclude_links.insert(link);
    auto backup = ctx.allocate_path(disjoint);
    if (!backup) {
      (void)ctx.release_path(primary.value().path_id);
      return Error{Errc::allocation_failed, "no link-disjoint backup path"};
    }
    ctx.variables()["active"] = primary.value().path_id;
    return core::ok_result();
  }

  void on_path_event(SsoContext& ctx, const netsim::NetworkEvent& event) override {
    if (event.type != netsim::EventType::link_down) return;
    const auto* active = active_path(ctx);
    if (active == nullptr || !active->uses_link(event.link_id)) return;
    const auto* other = other_path(ctx);
    if (other != nullptr && ctx.path_is_up(*other)) {
      ctx.variables()["active"] = other->path_id;
      ctx.note("switch", Json{{"to", other->path_id}, {"nodes", other->nodes}});
    } else {
      ctx.notify_violation(Json{{"reason", "all_paths_down"}});
    }
  }

  core::Result<Json> on_data(SsoContext& ctx, const DataRequest& request) override {
    if (request.op != "send") return Error{Errc::unsupported, "op '" + request.op + "'"};
    const auto* active = active_path(ctx);
    if (active != nullptr && !ctx.path_is_up(*active)) {
      // Missed or pending event; switch late rather than lose traffic.
      const auto* other = other_path(ctx);
      if (other != nullptr && ctx.path_is_up(*other)) {
        ctx.variables()["active"] = other->path_id;
        ctx.note("switch", Json{{"to", other->path_id}, {"nodes", other->nodes}});
        active = other;
      }
    }
    auto sent = ctx.forward(request.payload);
    if (!sent) return sent.error();
    if (active != nullptr) {
      auto metrics = ctx.metrics_of(*active);
      if (metrics) ctx.sample(metrics.value().latency_ms);
    }
    return Json{{"status", "ack"}};
  }

  void on_destruct(SsoContext& ctx) override { (void)ctx; }

 private:
  const netsim::Path* active_path(SsoContext& ctx) const {
    const std::string id = ctx.variables().value("active", "");
    for (const auto& p : ctx.path_pool()) {
      if (p.path_id == id) return &p;
    }
    return nullptr;
  }
  const netsim::Path* other_path(SsoContext& ctx) const {
    const std::string id = ctx.variables().value("active", "");
    for (const auto& p : ctx.path_pool()) {
      if (p.path_id != id) return &p;
    }
    return nullptr;
  }
};

// Store-and-forward: payloads are parked in the blob store while the held
// path is down and flushed FIFO once it comes back. UndoSend removes the
// most recent unflushed payload, RedoSend reinstates the last undone one.
class DtnStore final : public proxy::NetworkBehavior {
 public:
  std::string_view id() const override { return "dtn_store"; }

  core::Result<void> on_construct(SsoContext& ctx) override {
    auto path = ctx.allocate_path(constraints_of(ctx.constants()));
    if (!path) return path.error();
    ctx.variables()["loss"] = 0;
    ctx.variables()["undone"] = nullptr;
    return core::ok_result();
  }

  void on_path_event(SsoContext& ctx, const netsim::NetworkEvent& event) override {
    if (event.type != netsim::EventType::link_up) return;
    if (!path_available(ctx)) return;
    auto pending = ctx.blobs().list(ctx.sso_id());
    if (pending.empty()) return;
    for (const auto& [seq, payload] : pending) {
      if (!ctx.forward(payload)) break;
      ctx.blobs().erase(ctx.sso_id(), seq);
    }
    ctx.note("flush", Json{{"count", pending.size()}});
  }

  core::Result<Json> on_data(SsoContext& ctx, const DataRequest& request) override {
    if (request.op == "send") {
      ctx.variables()["undone"] = nullptr;  // a new send clears redo history
      if (path_available(ctx)) {
        auto sent = ctx.forward(request.payload);
        if (!sent) {
          buffer(ctx, request.payload);
          return Json{{"status", "buffered"}};
        }
        const double latency = pool_latency(ctx);
        if (std::isfinite(latency)) ctx.sample(latency);
        return Json{{"status", "ack"}};
      }
      buffer(ctx, request.payload);
      return Json{{"status", "buffered"}};
    }
    if (request.op == "undo") {
      auto pending = ctx.blobs().list(ctx.sso_id());
      if (pending.empty()) return Error{Errc::nothing_to_undo, "buffer is empty"};
      const auto& [seq, payload] = pending.back();
      ctx.variables()["undone"] = payload;
      ctx.blobs().erase(ctx.sso_id(), seq);
      ctx.note("undo", Json{{"seq", seq}});
      return Json{{"status", "undone"}};
    }
    if (request.op == "redo") {
      if (ctx.variables()["undone"].is_null()) {
        return Error{Errc::nothing_to_undo, "nothing to redo"};
      }
      const std::string payload = ctx.variables()["undone"];
      ctx.variables()["undone"] = nullptr;
      buffer(ctx, payload);
      ctx.note("redo", Json::object());
      return Json{{"status", "redone"}};
    }
    return Error{Errc::unsupported, "op '" + request.op + "'"};
  }

  void on_destruct(SsoContext& ctx) override { ctx.blobs().drop_session(ctx.sso_id()); }

 private:
  bool path_available(SsoContext& ctx) const {
    if (ctx.path_pool().empty()) return false;
    return ctx.path_is_up(ctx.path_pool().front());
  }

  void buffer(SsoContext& ctx, const std::string& payload) {
    const std::int64_t capacity = ctx.constants().get_int("capacity", 16);
    auto& blobs = ctx.blobs();
    if (static_cast<std::int64_t>(blobs.count(ctx.sso_id())) >= capacity) {
      auto pending = blobs.list(ctx.sso_id());
      blobs.erase(ctx.sso_id(), pending.front().first);  // oldest-drop
      ctx.variables()["loss"] = ctx.variables().value("loss", 0) + 1;
      ctx.note("overflow_drop", Json{{"loss", ctx.variables()["loss"]}});
    }
    blobs.put(ctx.sso_id(), payload);
    ctx.note("buffered", Json{{"pending", blobs.count(ctx.sso_id())}});
  }
};

// Composition pipeline: nested sessions for each constituent, opened in
// reverse so each stage can forward into its successor; the final stage
// forwards to the network over its own resources.
class Composite final : public proxy::NetworkBehavior {
 public:
  std::string_view id() const override { return "composite"; }

  core::Result<void> on_construct(SsoContext& ctx) override {
    const auto& parts = ctx.composed_of();
    if (parts.empty()) return Error{Errc::composition_refused, "no constituent modules"};
    std::vector<std::string> pipeline(parts.size());
    std::optional<std::string> next;
    for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
      auto nested = ctx.delegate_open(*it, next);
      if (!nested) return nested.error();
      pipeline[parts.size() - 1 - std::distance(parts.rbegin(), it)] = nested.value();
      next = nested.value();
    }
    ctx.variables()["pipeline"] = pipeline;
    return core::ok_result();
  }

  void on_path_event(SsoContext& ctx, const netsim::NetworkEvent& event) override {
    // The composite holds no paths of its own; constituents react directly.
    (void)ctx;
    (void)event;
  }

  core::Result<Json> on_data(SsoContext& ctx, const DataRequest& request) override {
    const auto pipeline = ctx.variables().value("pipeline", std::vector<std::string>{});
    if (pipeline.empty()) return Error{Errc::invalid_session, "pipeline not constructed"};
    if (request.op == "send") {
      return ctx.delegate_data(pipeline.front(), request);
    }
    // Utility ops go to the first stage that implements them.
    for (const auto& stage : pipeline) {
      auto reply = ctx.delegate_data(stage, request);
      if (reply || reply.code() != Errc::unsupported) return reply;
    }
    return Error{Errc::unsupported, "op '" + request.op + "'"};
  }

  void on_destruct(SsoContext& ctx) override { (void)ctx; }
};

}  // namespace

void register_network_behaviors(proxy::BehaviorRegistry& registry) {
  registry.add("latency_guard", [] { return std::make_unique<LatencyGuard>(); });
  registry.add("multipath_failover", [] { return std::make_unique<MultipathFailover>(); });
  registry.add("dtn_store", [] { return std::make_unique<DtnStore>(); });
  registry.add("composite", [] { return std::make_unique<Composite>(); });
}

}  // namespace socketstore::modules
