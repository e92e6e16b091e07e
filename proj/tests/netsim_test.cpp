#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "socketstore/netsim/network_control.hpp"

using namespace socketstore;

namespace {

core::Json triangle_doc() {
  return core::Json{
      {"nodes", {"A", "B", "C"}},
      {"links",
       {core::Json{{"id", "AB"}, {"a", "A"}, {"b", "B"}, {"latency_ms", 10}, {"bandwidth_mbps", 100}},
        core::Json{{"id", "BC"}, {"a", "B"}, {"b", "C"}, {"latency_ms", 5}, {"bandwidth_mbps", 50}},
        core::Json{{"id", "AC"}, {"a", "A"}, {"b", "C"}, {"latency_ms", 20}, {"bandwidth_mbps", 100}}}}};
}

netsim::Topology triangle() { return netsim::load_topology(triangle_doc()).value(); }

}  // namespace

TEST_CASE("triangle document parses to 3 nodes and 3 links") {
  auto topo = netsim::load_topology(triangle_doc());
  REQUIRE(topo.ok());
  CHECK(topo.value().nodes.size() == 3);
  CHECK(topo.value().links.size() == 3);
}

TEST_CASE("link referencing an unknown node names the offender") {
  auto doc = triangle_doc();
  doc["links"][0]["b"] = "Z";
  auto topo = netsim::load_topology(doc);
  REQUIRE_FALSE(topo.ok());
  CHECK(topo.code() == core::Errc::topology_error);
  CHECK(topo.error().detail.find("Z") != std::string::npos);
}

TEST_CASE("zero latency is rejected") {
  auto doc = triangle_doc();
  doc["links"][1]["latency_ms"] = 0;
  CHECK(netsim::load_topology(doc).code() == core::Errc::topology_error);
}

TEST_CASE("duplicate link id is rejected") {
  auto doc = triangle_doc();
  doc["links"][2]["id"] = "AB";
  CHECK(netsim::load_topology(doc).code() == core::Errc::topology_error);
}

TEST_CASE("allocate A->C picks the two-hop 15 ms path") {
  // Expected value pinned by the exhaustive oracle.
  auto best = oracle::best_simple_path(triangle(), "A", "C");
  REQUIRE(best.has_value());
  CHECK(best->latency_ms == 15.0);

  netsim::NetworkControl control(triangle());
  auto path = control.allocate_path("A", "C", {}, "sso-1");
  REQUIRE(path.ok());
  CHECK(path.value().nodes == std::vector<std::string>{"A", "B", "C"});
  auto metrics = control.path_metrics(path.value());
  REQUIRE(metrics.ok());
  CHECK(metrics.value().latency_ms == best->latency_ms);
}

TEST_CASE("allocate A->A returns an empty path with latency 0") {
  netsim::NetworkControl control(triangle());
  auto path = control.allocate_path("A", "A", {}, "sso-1");
  REQUIRE(path.ok());
  CHECK(path.value().empty());
  auto metrics = control.path_metrics(path.value());
  REQUIRE(metrics.ok());
  CHECK(metrics.value().latency_ms == 0.0);
  CHECK(metrics.value().bottleneck_bandwidth_mbps == std::numeric_limits<double>::infinity());
}

TEST_CASE("min_bandwidth above every link yields NoRoute") {
  netsim::NetworkControl control(triangle());
  netsim::PathConstraints c;
  c.min_bandwidth_mbps = 1000.0;
  CHECK(control.allocate_path("A", "C", c, "sso-1").code() == core::Errc::no_route);
}

TEST_CASE("min_bandwidth filters low links") {
  netsim::NetworkControl control(triangle());
  netsim::PathConstraints c;
  c.min_bandwidth_mbps = 100.0;  // BC at 50 drops out
  auto path = control.allocate_path("A", "C", c, "sso-1");
  REQUIRE(path.ok());
  CHECK(path.value().nodes == std::vector<std::string>{"A", "C"});
}

TEST_CASE("release returns the table to its prior size; double release errors") {
  netsim::NetworkControl control(triangle());
  CHECK(control.allocation_count() == 0);
  auto path = control.allocate_path("A", "C", {}, "sso-1");
  REQUIRE(path.ok());
  CHECK(control.allocation_count() == 1);
  CHECK(control.release_path(path.value().path_id).ok());
  CHECK(control.allocation_count() == 0);
  CHECK(control.release_path(path.value().path_id).code() == core::Errc::already_released);
  CHECK(control.release_path("path-999").code() == core::Errc::not_found);
}

TEST_CASE("set_link_state publishes one latency event with old and new values") {
  netsim::NetworkControl control(triangle());
  std::vector<netsim::NetworkEvent> seen;
  control.subscribe(netsim::all_event_types, std::nullopt,
                    [&](const netsim::NetworkEvent& ev) { seen.push_back(ev); });
  auto ev = control.set_link_state("AB", netsim::LinkChange::latency(25.0));
  REQUIRE(ev.ok());
  REQUIRE(ev.value().has_value());
  CHECK(ev.value()->type == netsim::EventType::link_latency_changed);
  CHECK(ev.value()->old_value == 10.0);
  CHECK(ev.value()->new_value == 25.0);
  REQUIRE(seen.size() == 1);
  CHECK(seen[0] == *ev.value());
}

TEST_CASE("setting a link to its current value publishes nothing") {
  netsim::NetworkControl control(triangle());
  std::vector<netsim::NetworkEvent> seen;
  control.subscribe(netsim::all_event_types, std::nullopt,
                    [&](const netsim::NetworkEvent& ev) { seen.push_back(ev); });
  auto ev = control.set_link_state("AB", netsim::LinkChange::latency(10.0));
  REQUIRE(ev.ok());
  CHECK_FALSE(ev.value().has_value());
  CHECK(seen.empty());
  CHECK(control.last_seq() == 0);
}

TEST_CASE("unknown link is NotFound") {
  netsim::NetworkControl control(triangle());
  CHECK(control.set_link_state("ZZ", netsim::LinkChange::latency(1.0)).code() ==
        core::Errc::not_found);
}

TEST_CASE("subscription filter excludes other links") {
  netsim::NetworkControl control(triangle());
  std::vector<netsim::NetworkEvent> seen;
  control.subscribe({netsim::EventType::link_latency_changed}, std::set<std::string>{"AB"},
                    [&](const netsim::NetworkEvent& ev) { seen.push_back(ev); });
  CHECK(control.set_link_state("BC", netsim::LinkChange::latency(9.0)).ok());
  CHECK(seen.empty());
  CHECK(control.set_link_state("AB", netsim::LinkChange::latency(11.0)).ok());
  CHECK(seen.size() == 1);
}

TEST_CASE("two changes arrive in seq order; two subscribers both receive") {
  netsim::NetworkControl control(triangle());
  std::vector<netsim::NetworkEvent> first, second;
  control.subscribe(netsim::all_event_types, std::nullopt,
                    [&](const netsim::NetworkEvent& ev) { first.push_back(ev); });
  control.subscribe(netsim::all_event_types, std::nullopt,
                    [&](const netsim::NetworkEvent& ev) { second.push_back(ev); });
  CHECK(control.set_link_state("AB", netsim::LinkChange::latency(12.0)).ok());
  CHECK(control.set_link_state("AB", netsim::LinkChange::latency(14.0)).ok());
  REQUIRE(first.size() == 2);
  CHECK(first[0].seq < first[1].seq);
  CHECK(second == first);
}

TEST_CASE("path metrics sum latency and take bottleneck bandwidth") {
  netsim::NetworkControl control(triangle());
  auto path = control.allocate_path("A", "C", {}, "sso-1");
  REQUIRE(path.ok());
  auto metrics = control.path_metrics(path.value());
  REQUIRE(metrics.ok());
  CHECK(metrics.value().latency_ms == 15.0);
  CHECK(metrics.value().bottleneck_bandwidth_mbps == 50.0);

  CHECK(control.set_link_state("AB", netsim::LinkChange::latency(30.0)).ok());
  metrics = control.path_metrics(path.value());
  REQUIRE(metrics.ok());
  CHECK(metrics.value().latency_ms == 35.0);
}

TEST_CASE("metrics over a removed link report StalePath") {
  netsim::NetworkControl control(triangle());
  auto path = control.allocate_path("A", "C", {}, "sso-1");
  REQUIRE(path.ok());
  CHECK(control.remove_link("AB").ok());
  CHECK(control.path_metrics(path.value()).code() == core::Errc::stale_path);
}

TEST_CASE("down links are routed around") {
  netsim::NetworkControl control(triangle());
  CHECK(control.set_link_state("BC", netsim::LinkChange::link_up(false)).ok());
  auto path = control.allocate_path("A", "C", {}, "sso-1");
  REQUIRE(path.ok());
  CHECK(path.value().nodes == std::vector<std::string>{"A", "C"});
}

TEST_CASE("allocate_path matches the exhaustive oracle on random graphs") {
  std::mt19937 rng(2024);
  for (int trial = 0; trial < 150; ++trial) {
    auto topo = oracle::random_connected_topology(rng);
    const auto src = oracle::random_node(rng, topo);
    const auto dst = oracle::random_node(rng, topo);
    auto expected = oracle::best_simple_path(topo, src, dst);
    netsim::NetworkControl control(topo);
    auto got = control.allocate_path(src, dst, {}, "oracle-check");
    REQUIRE(expected.has_value());  // graphs are connected
    REQUIRE(got.ok());
    double got_latency = 0.0;
    for (const auto& link_id : got.value().links) {
      got_latency += topo.links.at(link_id).latency_ms;
    }
    CHECK(got_latency == expected->latency_ms);
    CHECK(got.value().nodes == expected->nodes);
  }
}

TEST_CASE("each subscriber's received set equals the filter applied to the full log") {
  std::mt19937 rng(5);
  netsim::NetworkControl control(triangle());
  struct Sub {
    std::set<netsim::EventType> types;
    std::optional<std::set<std::string>> links;
    std::vector<netsim::NetworkEvent> received;
  };
  std::vector<std::unique_ptr<Sub>> subs;
  auto add_sub = [&](std::set<netsim::EventType> types, std::optional<std::set<std::string>> links) {
    auto sub = std::make_unique<Sub>();
    sub->types = std::move(types);
    sub->links = std::move(links);
    Sub* raw = sub.get();
    control.subscribe(raw->types, raw->links,
                      [raw](const netsim::NetworkEvent& ev) { raw->received.push_back(ev); });
    subs.push_back(std::move(sub));
  };
  add_sub(netsim::all_event_types, std::nullopt);
  add_sub({netsim::EventType::link_latency_changed}, std::nullopt);
  add_sub(netsim::all_event_types, std::set<std::string>{"AB", "BC"});
  add_sub({netsim::EventType::link_down, netsim::EventType::link_up}, std::set<std::string>{"AC"});

  std::vector<netsim::NetworkEvent> log;
  std::vector<std::string> link_ids{"AB", "BC", "AC"};
  std::uniform_int_distribution<int> link_pick(0, 2);
  std::uniform_int_distribution<int> kind_pick(0, 2);
  std::uniform_int_distribution<int> value_pick(1, 40);
  for (int i = 0; i < 300; ++i) {
    const auto& link = link_ids[link_pick(rng)];
    netsim::LinkChange change;
    switch (kind_pick(rng)) {
      case 0: change = netsim::LinkChange::latency(value_pick(rng)); break;
      case 1: change = netsim::LinkChange::bandwidth(value_pick(rng)); break;
      default: change = netsim::LinkChange::link_up(value_pick(rng) % 2 == 0); break;
    }
    auto ev = control.set_link_state(link, change);
    REQUIRE(ev.ok());
    if (ev.value().has_value()) log.push_back(*ev.value());
  }
  for (const auto& sub : subs) {
    std::vector<netsim::NetworkEvent> expected;
    for (const auto& ev : log) {
      if (sub->types.count(ev.type) == 0) continue;
      if (sub->links && sub->links->count(ev.link_id) == 0) continue;
      expected.push_back(ev);
    }
    CHECK(sub->received == expected);
    for (std::size_t i = 1; i < sub->received.size(); ++i) {
      CHECK(sub->received[i - 1].seq < sub->received[i].seq);
    }
  }
}

TEST_CASE("releasing every allocated path empties the table") {
  std::mt19937 rng(17);
  auto topo = oracle::random_connected_topology(rng);
  netsim::NetworkControl control(topo);
  std::vector<std::string> ids;
  for (int i = 0; i < 30; ++i) {
    auto path = control.allocate_path(oracle::random_node(rng, topo), oracle::random_node(rng, topo),
                                      {}, "sso");
    if (path.ok()) ids.push_back(path.value().path_id);
  }
  CHECK(control.allocation_count() == ids.size());
  for (const auto& id : ids) CHECK(control.release_path(id).ok());
  CHECK(control.allocation_count() == 0);
}
