// Independent reference implementations used to pin expected values in the
// test suites. These stay deliberately naive (exhaustive enumeration) and
// must not share code with the library paths they check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "socketstore/netsim/topology.hpp"

namespace oracle {

struct SimplePath {
  std::vector<std::string> nodes;
  std::vector<std::string> links;
  double latency_ms = 0.0;
};

// All simple paths src -> dst over up links, via straight DFS.
inline void enumerate_paths(const socketstore::netsim::Topology& topo, const std::string& here,
                            const std::string& dst, std::optional<double> min_bandwidth,
                            std::set<std::string>& visited, SimplePath& current,
                            std::vector<SimplePath>& out) {
  if (here == dst) {
    out.push_back(current);
    return;
  }
  for (const auto& [id, link] : topo.links) {
    if (!link.up) continue;
    if (min_bandwidth && link.bandwidth_mbps < *min_bandwidth) continue;
    std::string next;
    if (link.a == here) {
      next = link.b;
    } else if (link.b == here) {
      next = link.a;
    } else {
      continue;
    }
    if (visited.count(next) > 0) continue;
    visited.insert(next);
    current.nodes.push_back(next);
    current.links.push_back(id);
    current.latency_ms += link.latency_ms;
    enumerate_paths(topo, next, dst, min_bandwidth, visited, current, out);
    current.latency_ms -= link.latency_ms;
    current.links.pop_back();
    current.nodes.pop_back();
    visited.erase(next);
  }
}

inline std::vector<SimplePath> all_simple_paths(const socketstore::netsim::Topology& topo,
                                                const std::string& src, const std::string& dst,
                                                std::optional<double> min_bandwidth = {}) {
  std::vector<SimplePath> out;
  if (src == dst) {
    out.push_back(SimplePath{{src}, {}, 0.0});
    return out;
  }
  std::set<std::string> visited{src};
  SimplePath current;
  current.nodes.push_back(src);
  enumerate_paths(topo, src, dst, min_bandwidth, visited, current, out);
  return out;
}

// Minimum-latency simple path with ties broken by smallest node sequence.
inline std::optional<SimplePath> best_simple_path(const socketstore::netsim::Topology& topo,
                                                  const std::string& src, const std::string& dst,
                                                  std::optional<double> min_bandwidth = {}) {
  auto paths = all_simple_paths(topo, src, dst, min_bandwidth);
  if (paths.empty()) return std::nullopt;
  auto best = std::min_element(paths.begin(), paths.end(),
                               [](const SimplePath& a, const SimplePath& b) {
                                 if (a.latency_ms != b.latency_ms) return a.latency_ms < b.latency_ms;
                                 return a.nodes < b.nodes;
                               });
  return *best;
}

// True when two link-disjoint simple paths src -> dst exist (checked by
// pairwise enumeration).
inline bool disjoint_pair_exists(const socketstore::netsim::Topology& topo, const std::string& src,
                                 const std::string& dst) {
  auto paths = all_simple_paths(topo, src, dst);
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = 0; j < paths.size(); ++j) {
      if (i == j) continue;
      std::set<std::string> links_i(paths[i].links.begin(), paths[i].links.end());
      bool disjoint = true;
      for (const auto& l : paths[j].links) {
        if (links_i.count(l) > 0) {
          disjoint = false;
          break;
        }
      }
      if (disjoint) return true;
    }
  }
  return false;
}

// Random connected topology of up to max_nodes nodes: a random spanning tree
// plus a sprinkle of extra links. Integer-millisecond latencies keep the
// optimality comparisons exact.
inline socketstore::netsim::Topology random_connected_topology(std::mt19937& rng,
                                                               int max_nodes = 10) {
  using socketstore::netsim::Link;
  using socketstore::netsim::Topology;
  std::uniform_int_distribution<int> node_count_dist(2, max_nodes);
  const int n = node_count_dist(rng);
  Topology topo;
  std::vector<std::string> nodes;
  for (int i = 0; i < n; ++i) {
    std::string id(1, static_cast<char>('A' + i));
    topo.nodes.insert(id);
    nodes.push_back(id);
  }
  int link_seq = 1;
  std::uniform_int_distribution<int> latency_dist(1, 50);
  std::uniform_int_distribution<int> bandwidth_dist(10, 1000);
  auto add_link = [&](const std::string& a, const std::string& b) {
    Link link;
    link.id = "L" + std::to_string(link_seq++);
    link.a = a;
    link.b = b;
    link.latency_ms = static_cast<double>(latency_dist(rng));
    link.bandwidth_mbps = static_cast<double>(bandwidth_dist(rng));
    topo.links.emplace(link.id, link);
  };
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> prior(0, i - 1);
    add_link(nodes[i], nodes[prior(rng)]);
  }
  std::uniform_int_distribution<int> extra_dist(0, n);
  const int extras = extra_dist(rng);
  std::uniform_int_distribution<int> pick(0, n - 1);
  for (int e = 0; e < extras; ++e) {
    const auto& a = nodes[pick(rng)];
    const auto& b = nodes[pick(rng)];
    if (a == b) continue;
    add_link(a, b);
  }
  return topo;
}

inline std::string random_node(std::mt19937& rng, const socketstore::netsim::Topology& topo) {
  std::vector<std::string> nodes(topo.nodes.begin(), topo.nodes.end());
  std::uniform_int_distribution<std::size_t> pick(0, nodes.size() - 1);
  return nodes[pick(rng)];
}

}  // namespace oracle
