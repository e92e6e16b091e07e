#include "socketstore/netsim/topology.hpp"

#include <fstream>
#include <sstream>

namespace socketstore::netsim {

const Link* Topology::find_link(const std::string& id) const {
  auto it = links.find(id);
  return it == links.end() ? nullptr : &it->second;
}

core::Json Topology::to_json() const {
  core::Json nodes_j = core::Json::array();
  for (const auto& n : nodes) nodes_j.push_back(n);
  core::Json links_j = core::Json::array();
  for (const auto& [id, link] : links) {
    links_j.push_back(core::Json{{"id", link.id},
                                 {"a", link.a},
                                 {"b", link.b},
                                 {"latency_ms", link.latency_ms},
                                 {"bandwidth_mbps", link.bandwidth_mbps},
                                 {"up", link.up}});
  }
  return core::Json{{"nodes", nodes_j}, {"links", links_j}};
}

core::Result<Topology> load_topology(const core::Json& doc) {
  using core::Errc;
  using core::Error;
  if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array() ||
      !doc.contains("links") || !doc["links"].is_array()) {
    return Error{Errc::topology_error, "document must carry 'nodes' and 'links' arrays"};
  }
  Topology topo;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_string()) return Error{Errc::topology_error, "node ids must be strings"};
    const auto id = n.get<std::string>();
    if (!topo.nodes.insert(id).second) {
      return Error{Errc::topology_error, "duplicate node '" + id + "'"};
    }
  }
  for (const auto& lj : doc["links"]) {
    Link link;
    if (!lj.contains("id") || !lj["id"].is_string()) {
      return Error{Errc::topology_error, "link without id"};
    }
    link.id = lj["id"].get<std::string>();
    for (const char* field : {"a", "b"}) {
      if (!lj.contains(field) || !lj[field].is_string()) {
        return Error{Errc::topology_error, "link '" + link.id + "' missing endpoint"};
      }
    }
    link.a = lj["a"].get<std::string>();
    link.b = lj["b"].get<std::string>();
    if (link.a == link.b) {
      return Error{Errc::topology_error, "link '" + link.id + "' endpoints must differ"};
    }
    for (const auto& endpoint : {link.a, link.b}) {
      if (!topo.has_node(endpoint)) {
        return Error{Errc::topology_error, "'" + endpoint + "'"};
      }
    }
    if (!lj.contains("latency_ms") || !lj["latency_ms"].is_number()) {
      return Error{Errc::topology_error, "link '" + link.id + "' missing latency_ms"};
    }
    link.latency_ms = lj["latency_ms"].get<double>();
    if (link.latency_ms <= 0.0) {
      return Error{Errc::topology_error, "link '" + link.id + "' latency_ms must be positive"};
    }
    if (!lj.contains("bandwidth_mbps") || !lj["bandwidth_mbps"].is_number()) {
      return Error{Errc::topology_error, "link '" + link.id + "' missing bandwidth_mbps"};
    }
    link.bandwidth_mbps = lj["bandwidth_mbps"].get<double>();
    if (link.bandwidth_mbps <= 0.0) {
      return Error{Errc::topology_error, "link '" + link.id + "' bandwidth_mbps must be positive"};
    }
    if (lj.contains("up") && lj["up"].is_boolean()) link.up = lj["up"];
    if (topo.links.count(link.id) > 0) {
      return Error{Errc::topology_error, "duplicate link '" + link.id + "'"};
    }
    topo.links.emplace(link.id, std::move(link));
  }
  return topo;
}

core::Result<Topology> load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return core::Error{core::Errc::io_error, "cannot open topology file '" + path + "'"};
  std::ostringstream buf;
  buf << in.rdbuf();
  auto doc = core::parse_json(buf.str());
  if (!doc) return core::Error{core::Errc::topology_error, "topology file is not valid JSON"};
  return load_topology(doc.value());
}

}  // namespace socketstore::netsim
