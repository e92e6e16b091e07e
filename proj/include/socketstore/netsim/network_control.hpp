#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "socketstore/core/result.hpp"
#include "socketstore/netsim/topology.hpp"

namespace socketstore::netsim {

enum class EventType { link_latency_changed, link_bandwidth_changed, link_down, link_up };

std::string_view event_type_name(EventType t);
std::optional<EventType> event_type_from_name(std::string_view name);

inline const std::set<EventType> all_event_types{
    EventType::link_latency_changed, EventType::link_bandwidth_changed,
    EventType::link_down, EventType::link_up};

// Link-state-change notification. seq strictly increases in publication order.
struct NetworkEvent {
  EventType type = EventType::link_latency_changed;
  std::string link_id;
  double old_value = 0.0;
  double new_value = 0.0;
  std::uint64_t seq = 0;

  core::Json to_json() const;
  static core::Result<NetworkEvent> from_json(const core::Json& j);

  friend bool operator==(const NetworkEvent&, const NetworkEvent&) = default;
};

// An allocated route. Empty paths (src == dst) have one node and no links.
struct Path {
  std::string path_id;
  std::vector<std::string> nodes;
  std::vector<std::string> links;
  std::string owner;

  bool empty() const { return links.empty(); }
  bool uses_link(const std::string& link_id) const;

  core::Json to_json() const;
  static core::Result<Path> from_json(const core::Json& j);
};

struct PathConstraints {
  std::optional<double> min_bandwidth_mbps;
  std::set<std::string> exclude_links;

  core::Json to_json() const;
  static PathConstraints from_json(const core::Json& j);
};

struct PathMetrics {
  double latency_ms = 0.0;
  double bottleneck_bandwidth_mbps = std::numeric_limits<double>::infinity();
};

// Route found by a read-only query; not registered in the allocation table.
struct PathPlan {
  std::vector<std::string> nodes;
  std::vector<std::string> links;
  double latency_ms = 0.0;
};

// Exactly one of the fields may be set per set_link_state call.
struct LinkChange {
  std::optional<double> latency_ms;
  std::optional<double> bandwidth_mbps;
  std::optional<bool> up;

  static LinkChange latency(double v) {
    LinkChange c;
    c.latency_ms = v;
    return c;
  }
  static LinkChange bandwidth(double v) {
    LinkChange c;
    c.bandwidth_mbps = v;
    return c;
  }
  static LinkChange link_up(bool v) {
    LinkChange c;
    c.up = v;
    return c;
  }
};

using EventSink = std::function<void(const NetworkEvent&)>;

// Simulated Network Control: hosts the topology, allocates and releases
// paths, publishes link-state events to subscribers, and answers metric
// queries. Commands are serialized through one lock, giving the total order
// that makes event seq well-defined; subscriber callbacks run inside that
// order and may re-enter (the lock is recursive).
class NetworkControl {
 public:
  explicit NetworkControl(Topology topology);

  // Minimum total-latency simple path over up links, ties broken by the
  // lexicographically smallest node sequence. Registers the path.
  core::Result<Path> allocate_path(const std::string& src, const std::string& dst,
                                   const PathConstraints& constraints, const std::string& owner);
  core::Result<void> release_path(const std::string& path_id);

  // Same routing core as allocate_path, without registration.
  core::Result<PathPlan> find_path(const std::string& src, const std::string& dst,
                                   const PathConstraints& constraints) const;

  // Applies the single changed field; publishes one event, or none when the
  // value is unchanged.
  core::Result<std::optional<NetworkEvent>> set_link_state(const std::string& link_id,
                                                           const LinkChange& change);

  std::uint64_t subscribe(const std::set<EventType>& event_types,
                          std::optional<std::set<std::string>> link_filter, EventSink sink);
  void unsubscribe(std::uint64_t subscription_id);

  core::Result<PathMetrics> path_metrics(const Path& path) const;

  // Drops the link entirely; paths over it become stale.
  core::Result<void> remove_link(const std::string& link_id);

  bool link_up(const std::string& link_id) const;
  std::size_t allocation_count() const;
  std::vector<Path> allocations() const;
  std::optional<Path> find_allocation(const std::string& path_id) const;
  Topology topology_snapshot() const;
  std::uint64_t last_seq() const;

 private:
  struct Subscription {
    std::uint64_t id;
    std::set<EventType> types;
    std::optional<std::set<std::string>> links;
    EventSink sink;
  };

  core::Result<PathPlan> find_path_locked(const std::string& src, const std::string& dst,
                                          const PathConstraints& constraints) const;
  void publish_locked(NetworkEvent event);

  mutable std::recursive_mutex mu_;
  Topology topology_;
  std::map<std::string, Path> allocations_;
  std::set<std::string> released_ids_;
  std::vector<Subscription> subscriptions_;
  std::uint64_t next_path_ = 1;
  std::uint64_t next_subscription_ = 1;
  std::uint64_t next_seq_ = 1;
};

}  // namespace socketstore::netsim
