#pragma once

#include <map>
#include <set>
#include <string>

#include "socketstore/core/json.hpp"
#include "socketstore/core/result.hpp"

namespace socketstore::netsim {

// Bidirectional link with symmetric metrics.
struct Link {
  std::string id;
  std::string a;
  std::string b;
  double latency_ms = 0.0;
  double bandwidth_mbps = 0.0;
  bool up = true;

  friend bool operator==(const Link&, const Link&) = default;
};

struct Topology {
  std::set<std::string> nodes;
  std::map<std::string, Link> links;

  bool has_node(const std::string& id) const { return nodes.count(id) > 0; }
  const Link* find_link(const std::string& id) const;

  core::Json to_json() const;
};

// Parses {"nodes": [...], "links": [{"id","a","b","latency_ms","bandwidth_mbps"}]}.
// Violations (dangling endpoint, duplicate id, non-positive metric) name the
// offending element.
core::Result<Topology> load_topology(const core::Json& doc);
core::Result<Topology> load_topology_file(const std::string& path);

}  // namespace socketstore::netsim
