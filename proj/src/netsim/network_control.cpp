#include "socketstore/netsim/network_control.hpp"

#include <algorithm>
#include <queue>

namespace socketstore::netsim {

std::string_view event_type_name(EventType t) {
  switch (t) {
    case EventType::link_latency_changed: return "LinkLatencyChanged";
    case EventType::link_bandwidth_changed: return "LinkBandwidthChanged";
    case EventType::link_down: return "LinkDown";
    case EventType::link_up: return "LinkUp";
  }
  return "LinkLatencyChanged";
}

std::optional<EventType> event_type_from_name(std::string_view name) {
  if (name == "LinkLatencyChanged") return EventType::link_latency_changed;
  if (name == "LinkBandwidthChanged") return EventType::link_bandwidth_changed;
  if (name == "LinkDown") return EventType::link_down;
  if (name == "LinkUp") return EventType::link_up;
  return std::nullopt;
}

core::Json NetworkEvent::to_json() const {
  return core::Json{{"event_type", event_type_name(type)},
                    {"link_id", link_id},
                    {"old", old_value},
                    {"new", new_value},
                    {"seq", seq}};
}

core::Result<NetworkEvent> NetworkEvent::from_json(const core::Json& j) {
  NetworkEvent ev;
  if (!j.contains("event_type") || !j["event_type"].is_string()) {
    return core::Error{core::Errc::protocol_error, "event missing event_type"};
  }
  auto type = event_type_from_name(j["event_type"].get<std::string>());
  if (!type) return core::Error{core::Errc::protocol_error, "unknown event_type"};
  ev.type = *type;
  if (!j.contains("link_id") || !j["link_id"].is_string()) {
    return core::Error{core::Errc::protocol_error, "event missing link_id"};
  }
  ev.link_id = j["link_id"].get<std::string>();
  if (j.contains("old") && j["old"].is_number()) ev.old_value = j["old"];
  if (j.contains("new") && j["new"].is_number()) ev.new_value = j["new"];
  if (j.contains("seq") && j["seq"].is_number_unsigned()) ev.seq = j["seq"];
  else if (j.contains("seq") && j["seq"].is_number_integer()) ev.seq = j["seq"].get<std::int64_t>();
  return ev;
}

bool Path::uses_link(const std::string& link_id) const {
  return std::find(links.begin(), links.end(), link_id) != links.end();
}

core::Json Path::to_json() const {
  return core::Json{{"path_id", path_id}, {"nodes", nodes}, {"links", links}, {"owner", owner}};
}

core::Result<Path> Path::from_json(const core::Json& j) {
  Path p;
  if (!j.contains("path_id") || !j["path_id"].is_string()) {
    return core::Error{core::Errc::protocol_error, "path missing path_id"};
  }
  p.path_id = j["path_id"].get<std::string>();
  if (j.contains("nodes")) p.nodes = j["nodes"].get<std::vector<std::string>>();
  if (j.contains("links")) p.links = j["links"].get<std::vector<std::string>>();
  if (j.contains("owner") && j["owner"].is_string()) p.owner = j["owner"];
  return p;
}

core::Json PathConstraints::to_json() const {
  core::Json j = core::Json::object();
  if (min_bandwidth_mbps) j["min_bandwidth_mbps"] = *min_bandwidth_mbps;
  if (!exclude_links.empty()) j["exclude_links"] = exclude_links;
  return j;
}

PathConstraints PathConstraints::from_json(const core::Json& j) {
  PathConstraints c;
  if (j.is_object()) {
    if (j.contains("min_bandwidth_mbps") && j["min_bandwidth_mbps"].is_number()) {
      c.min_bandwidth_mbps = j["min_bandwidth_mbps"].get<double>();
    }
    if (j.contains("exclude_links") && j["exclude_links"].is_array()) {
      for (const auto& l : j["exclude_links"]) {
        if (l.is_string()) c.exclude_links.insert(l.get<std::string>());
      }
    }
  }
  return c;
}

NetworkControl::NetworkControl(Topology topology) : topology_(std::move(topology)) {}

namespace {

// Dijkstra entry carrying the whole node sequence so that equal-latency
// candidates settle on the lexicographically smallest one. With strictly
// positive latencies every finalized path is simple, and appending a common
// suffix preserves the sequence ordering, so the greedy choice is globally
// optimal for the (latency, sequence) order.
struct QueueEntry {
  double dist;
  std::vector<std::string> nodes;
  std::vector<std::string> links;

  bool operator>(const QueueEntry& other) const {
    if (dist != other.dist) return dist > other.dist;
    return nodes > other.nodes;
  }
};

}  // namespace

core::Result<PathPlan> NetworkControl::find_path_locked(const std::string& src,
                                                        const std::string& dst,
                                                        const PathConstraints& constraints) const {
  using core::Errc;
  using core::Error;
  if (!topology_.has_node(src)) return Error{Errc::not_found, "unknown node '" + src + "'"};
  if (!topology_.has_node(dst)) return Error{Errc::not_found, "unknown node '" + dst + "'"};
  if (src == dst) {
    return PathPlan{.nodes = {src}, .links = {}, .latency_ms = 0.0};
  }

  // Usable adjacency under the current link states and constraints.
  std::map<std::string, std::vector<const Link*>> adjacency;
  for (const auto& [id, link] : topology_.links) {
    if (!link.up) continue;
    if (constraints.min_bandwidth_mbps && link.bandwidth_mbps < *constraints.min_bandwidth_mbps) {
      continue;
    }
    if (constraints.exclude_links.count(id) > 0) continue;
    adjacency[link.a].push_back(&link);
    adjacency[link.b].push_back(&link);
  }

  std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<>> frontier;
  std::set<std::string> settled;
  frontier.push(QueueEntry{0.0, {src}, {}});
  while (!frontier.empty()) {
    QueueEntry entry = frontier.top();
    frontier.pop();
    const std::string& here = entry.nodes.back();
    if (settled.count(here) > 0) continue;
    settled.insert(here);
    if (here == dst) {
      return PathPlan{.nodes = std::move(entry.nodes),
                      .links = std::move(entry.links),
                      .latency_ms = entry.dist};
    }
    auto adj = adjacency.find(here);
    if (adj == adjacency.end()) continue;
    for (const Link* link : adj->second) {
      const std::string& next = link->a == here ? link->b : link->a;
      if (settled.count(next) > 0) continue;
      QueueEntry extended{entry.dist + link->latency_ms, entry.nodes, entry.links};
      extended.nodes.push_back(next);
      extended.links.push_back(link->id);
      frontier.push(std::move(extended));
    }
  }
  return Error{Errc::no_route, "no path from '" + src + "' to '" + dst + "'"};
}

core::Result<PathPlan> NetworkControl::find_path(const std::string& src, const std::string& dst,
                                                 const PathConstraints& constraints) const {
  std::lock_guard lock(mu_);
  return find_path_locked(src, dst, constraints);
}

core::Result<Path> NetworkControl::allocate_path(const std::string& src, const std::string& dst,
                                                 const PathConstraints& constraints,
                                                 const std::string& owner) {
  std::lock_guard lock(mu_);
  auto plan = find_path_locked(src, dst, constraints);
  if (!plan) return plan.error();
  Path path;
  path.path_id = "path-" + std::to_string(next_path_++);
  path.nodes = std::move(plan.value().nodes);
  path.links = std::move(plan.value().links);
  path.owner = owner;
  allocations_.emplace(path.path_id, path);
  return path;
}

core::Result<void> NetworkControl::release_path(const std::string& path_id) {
  std::lock_guard lock(mu_);
  auto it = allocations_.find(path_id);
  if (it == allocations_.end()) {
    if (released_ids_.count(path_id) > 0) {
      return core::Error{core::Errc::already_released, path_id};
    }
    return core::Error{core::Errc::not_found, "unknown path '" + path_id + "'"};
  }
  allocations_.erase(it);
  released_ids_.insert(path_id);
  return core::ok_result();
}

core::Result<std::optional<NetworkEvent>> NetworkControl::set_link_state(
    const std::string& link_id, const LinkChange& change) {
  std::lock_guard lock(mu_);
  auto it = topology_.links.find(link_id);
  if (it == topology_.links.end()) {
    return core::Error{core::Errc::not_found, "unknown link '" + link_id + "'"};
  }
  const int set_fields = (change.latency_ms ? 1 : 0) + (change.bandwidth_mbps ? 1 : 0) +
                         (change.up ? 1 : 0);
  if (set_fields != 1) {
    return core::Error{core::Errc::invalid_argument, "exactly one link field per change"};
  }
  Link& link = it->second;
  NetworkEvent ev;
  ev.link_id = link_id;
  if (change.latency_ms) {
    if (*change.latency_ms <= 0.0) {
      return core::Error{core::Errc::invalid_argument, "latency_ms must be positive"};
    }
    if (link.latency_ms == *change.latency_ms) return std::optional<NetworkEvent>{};
    ev.type = EventType::link_latency_changed;
    ev.old_value = link.latency_ms;
    ev.new_value = *change.latency_ms;
    link.latency_ms = *change.latency_ms;
  } else if (change.bandwidth_mbps) {
    if (*change.bandwidth_mbps <= 0.0) {
      return core::Error{core::Errc::invalid_argument, "bandwidth_mbps must be positive"};
    }
    if (link.bandwidth_mbps == *change.bandwidth_mbps) return std::optional<NetworkEvent>{};
    ev.type = EventType::link_bandwidth_changed;
    ev.old_value = link.bandwidth_mbps;
    ev.new_value = *change.bandwidth_mbps;
    link.bandwidth_mbps = *change.bandwidth_mbps;
  } else {
    if (link.up == *change.up) return std::optional<NetworkEvent>{};
    ev.type = *change.up ? EventType::link_up : EventType::link_down;
    ev.old_value = link.up ? 1.0 : 0.0;
    ev.new_value = *change.up ? 1.0 : 0.0;
    link.up = *change.up;
  }
  ev.seq = next_seq_++;
  publish_locked(ev);
  return std::optional<NetworkEvent>{ev};
}

void NetworkControl::publish_locked(NetworkEvent event) {
  // Deliver in subscription order; sinks may re-enter through the recursive
  // lock (e.g. a handler reallocating a path).
  for (const auto& sub : subscriptions_) {
    if (sub.types.count(event.type) == 0) continue;
    if (sub.links && sub.links->count(event.link_id) == 0) continue;
    if (sub.sink) sub.sink(event);
  }
}

std::uint64_t NetworkControl::subscribe(const std::set<EventType>& event_types,
                                        std::optional<std::set<std::string>> link_filter,
                                        EventSink sink) {
  std::lock_guard lock(mu_);
  const std::uint64_t id = next_subscription_++;
  subscriptions_.push_back(Subscription{id, event_types, std::move(link_filter), std::move(sink)});
  return id;
}

void NetworkControl::unsubscribe(std::uint64_t subscription_id) {
  std::lock_guard lock(mu_);
  std::erase_if(subscriptions_, [&](const Subscription& s) { return s.id == subscription_id; });
}

core::Result<PathMetrics> NetworkControl::path_metrics(const Path& path) const {
  std::lock_guard lock(mu_);
  PathMetrics metrics;
  if (path.links.empty()) return metrics;  // (0, unbounded)
  metrics.latency_ms = 0.0;
  for (const auto& link_id : path.links) {
    const Link* link = topology_.find_link(link_id);
    if (link == nullptr) {
      return core::Error{core::Errc::stale_path, "link '" + link_id + "' no longer exists"};
    }
    metrics.latency_ms += link->latency_ms;
    metrics.bottleneck_bandwidth_mbps =
        std::min(metrics.bottleneck_bandwidth_mbps, link->bandwidth_mbps);
  }
  return metrics;
}

core::Result<void> NetworkControl::remove_link(const std::string& link_id) {
  std::lock_guard lock(mu_);
  if (topology_.links.erase(link_id) == 0) {
    return core::Error{core::Errc::not_found, "unknown link '" + link_id + "'"};
  }
  return core::ok_result();
}

bool NetworkControl::link_up(const std::string& link_id) const {
  std::lock_guard lock(mu_);
  const Link* link = topology_.find_link(link_id);
  return link != nullptr && link->up;
}

std::size_t NetworkControl::allocation_count() const {
  std::lock_guard lock(mu_);
  return allocations_.size();
}

std::vector<Path> NetworkControl::allocations() const {
  std::lock_guard lock(mu_);
  std::vector<Path> out;
  out.reserve(allocations_.size());
  for (const auto& [id, path] : allocations_) out.push_back(path);
  return out;
}

std::optional<Path> NetworkControl::find_allocation(const std::string& path_id) const {
  std::lock_guard lock(mu_);
  auto it = allocations_.find(path_id);
  if (it == allocations_.end()) return std::nullopt;
  return it->second;
}

Topology NetworkControl::topology_snapshot() const {
  std::lock_guard lock(mu_);
  return topology_;
}

std::uint64_t NetworkControl::last_seq() const {
  std::lock_guard lock(mu_);
  return next_seq_ - 1;
}

}  // namespace socketstore::netsim
