#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "socketstore/modules/behaviors.hpp"
#include "socketstore/proxy/store_proxy.hpp"
#include "socketstore/registry/registry.hpp"
#include "socketstore/rpc/ports.hpp"
#include "socketstore/sim/endpoints.hpp"

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

class ThrowingBehavior final : public proxy::NetworkBehavior {
 public:
  std::string_view id() const override { return "throwing"; }
  core::Result<void> on_construct(proxy::SsoContext& ctx) override {
    auto path = ctx.allocate_path({});
    if (!path) return path.error();
    return core::ok_result();
  }
  void on_path_event(proxy::SsoContext&, const netsim::NetworkEvent&) override {
    throw std::runtime_error("handler exploded");
  }
  core::Result<core::Json> on_data(proxy::SsoContext&, const proxy::DataRequest&) override {
    return core::Json{{"status", "ack"}};
  }
  void on_destruct(proxy::SsoContext&) override {}
};

struct Fixture {
  std::shared_ptr<core::VirtualClock> clock = std::make_shared<core::VirtualClock>(0);
  registry::Registry registry;
  netsim::NetworkControl control;
  rpc::InProcRegistryPort registry_port{registry};
  rpc::InProcNetworkPort network_port{control};
  proxy::BehaviorRegistry behaviors;
  sim::EndpointTable endpoints;
  core::TraceLog trace;
  std::unique_ptr<proxy::StoreProxy> proxy;

  explicit Fixture(netsim::Topology topo, proxy::PoolPolicy policy = {})
      : control(std::move(topo)) {
    modules::register_network_behaviors(behaviors);
    behaviors.add("throwing", [] { return std::make_unique<ThrowingBehavior>(); });
    REQUIRE(endpoints.register_host("10.0.0.3", "C").ok());
    REQUIRE(sim::bind_echo_peer(endpoints, "10.0.0.3", 7).ok());
    proxy = std::make_unique<proxy::StoreProxy>(proxy::ProxyConfig{"A", policy}, registry_port,
                                                network_port, behaviors, endpoints, clock, &trace);
  }
  Fixture() : Fixture(netsim::load_topology(triangle_doc()).value()) {}

  void publish_module(const std::string& key, const std::string& behavior,
                      const std::string& module_id = "gold") {
    core::ModuleDescriptor d;
    d.module_key = key;
    d.name = key;
    d.version = 1;
    d.contributor = "alice";
    d.objective = {core::Metric::end_to_end_latency_ms, 50.0, core::Direction::at_most};
    d.network_behavior = core::SsoBehaviorRef{behavior};
    d.parameterizations[module_id] = {};
    REQUIRE(registry.publish(d, "alice", clock->now_ms()).ok());
    REQUIRE(registry.review(key, registry::ReviewVerdict::accept, clock->now_ms()).ok());
  }

  core::Entitlement buy(const std::string& key, const std::string& app = "app") {
    auto ent = registry.purchase(app, key, std::nullopt, clock->now_ms());
    REQUIRE(ent.ok());
    return ent.value();
  }

  core::Result<proxy::OpenOutcome> open(const core::Entitlement& ent, const std::string& key,
                                        const std::string& module_id = "gold") {
    return proxy->open_session(ent, key, module_id, "10.0.0.3", 7, proxy::DeviceSink{});
  }
};

}  // namespace

TEST_CASE("first open constructs a new SSO with one allocated path") {
  Fixture fx;
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  CHECK(fx.control.allocation_count() == 0);
  auto opened = fx.open(ent, "m1");
  REQUIRE(opened.ok());
  CHECK_FALSE(opened.value().reused);
  CHECK(fx.control.allocation_count() == 1);
  const auto* sso = fx.proxy->find_instance(opened.value().sso_id);
  REQUIRE(sso != nullptr);
  CHECK(sso->status == proxy::SsoStatus::active);
  CHECK(sso->pool.size() == 1);
  CHECK(sso->pool[0].nodes == std::vector<std::string>{"A", "B", "C"});
}

TEST_CASE("unknown module_id fails with UnknownParameterization") {
  Fixture fx;
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  CHECK(fx.open(ent, "m1", "nonexistent").code() == core::Errc::unknown_parameterization);
}

TEST_CASE("tampered entitlement is Unauthorized") {
  Fixture fx;
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  ent.app_id = "evil";
  CHECK(fx.open(ent, "m1").code() == core::Errc::unauthorized);
}

TEST_CASE("allocation failure falls out as AllocationFailed") {
  // A chain topology has no link-disjoint pair, so multipath construction fails.
  core::Json chain{{"nodes", {"A", "B", "C"}},
                   {"links",
                    {core::Json{{"id", "AB"}, {"a", "A"}, {"b", "B"}, {"latency_ms", 5}, {"bandwidth_mbps", 10}},
                     core::Json{{"id", "BC"}, {"a", "B"}, {"b", "C"}, {"latency_ms", 5}, {"bandwidth_mbps", 10}}}}};
  Fixture fx(netsim::load_topology(chain).value());
  fx.publish_module("m1", "multipath_failover");
  auto ent = fx.buy("m1");
  auto opened = fx.open(ent, "m1");
  CHECK(opened.code() == core::Errc::allocation_failed);
  // Partial allocations rolled back.
  CHECK(fx.control.allocation_count() == 0);
}

TEST_CASE("pool-or-destroy follows the popularity window") {
  proxy::PoolPolicy policy;
  policy.window_ms = 60'000;
  policy.reuse_threshold = 3;
  Fixture fx(netsim::load_topology(triangle_doc()).value(), policy);
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");

  std::vector<proxy::SsoStatus> outcomes;
  std::vector<std::string> ids;
  for (int i = 0; i < 5; ++i) {
    auto opened = fx.open(ent, "m1");
    REQUIRE(opened.ok());
    ids.push_back(opened.value().sso_id);
    fx.clock->advance(1000);
    auto closed = fx.proxy->close_session(opened.value().sso_id, proxy::CloseReason::explicit_close);
    REQUIRE(closed.ok());
    outcomes.push_back(closed.value().disposition);
    fx.clock->advance(1000);
  }
  // Window counts climb 1,2,3,4,5 against threshold 3.
  CHECK(outcomes == std::vector<proxy::SsoStatus>{proxy::SsoStatus::destroyed,
                                                  proxy::SsoStatus::destroyed,
                                                  proxy::SsoStatus::pooled,
                                                  proxy::SsoStatus::pooled,
                                                  proxy::SsoStatus::pooled});
  CHECK(fx.proxy->construction_count("m1", "gold") == 3);
  // Openings 4 and 5 reused the pooled instance.
  CHECK(ids[3] == ids[2]);
  CHECK(ids[4] == ids[2]);
}

TEST_CASE("reactivation reuses the instance without new allocation") {
  proxy::PoolPolicy policy;
  policy.reuse_threshold = 1;  // pool on first close
  Fixture fx(netsim::load_topology(triangle_doc()).value(), policy);
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  auto first = fx.open(ent, "m1");
  REQUIRE(first.ok());
  const auto allocations = fx.control.allocation_count();
  auto closed = fx.proxy->close_session(first.value().sso_id, proxy::CloseReason::explicit_close);
  REQUIRE(closed.ok());
  CHECK(closed.value().disposition == proxy::SsoStatus::pooled);
  CHECK(fx.control.allocation_count() == allocations);  // resources retained

  auto second = fx.open(ent, "m1");
  REQUIRE(second.ok());
  CHECK(second.value().reused);
  CHECK(second.value().sso_id == first.value().sso_id);
  CHECK(fx.control.allocation_count() == allocations);
  // Constants unchanged across the pool/reactivate cycle.
  const auto* sso = fx.proxy->find_instance(second.value().sso_id);
  REQUIRE(sso != nullptr);
  CHECK(sso->constants == core::ParameterSet{});
}

TEST_CASE("a pooled instance bound to another destination is not reused") {
  proxy::PoolPolicy policy;
  policy.reuse_threshold = 1;
  Fixture fx(netsim::load_topology(triangle_doc()).value(), policy);
  REQUIRE(fx.endpoints.register_host("10.0.0.2", "B").ok());
  REQUIRE(sim::bind_echo_peer(fx.endpoints, "10.0.0.2", 7).ok());
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  auto first = fx.open(ent, "m1");
  REQUIRE(first.ok());
  REQUIRE(fx.proxy->close_session(first.value().sso_id, proxy::CloseReason::explicit_close).ok());
  auto second = fx.proxy->open_session(ent, "m1", "gold", "10.0.0.2", 7, proxy::DeviceSink{});
  REQUIRE(second.ok());
  CHECK_FALSE(second.value().reused);
  CHECK(second.value().sso_id != first.value().sso_id);
}

TEST_CASE("single open in window destroys and frees resources; double close is invalid") {
  Fixture fx;
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  auto opened = fx.open(ent, "m1");
  REQUIRE(opened.ok());
  CHECK(fx.control.allocation_count() == 1);
  auto closed = fx.proxy->close_session(opened.value().sso_id, proxy::CloseReason::explicit_close);
  REQUIRE(closed.ok());
  CHECK(closed.value().disposition == proxy::SsoStatus::destroyed);
  CHECK(fx.control.allocation_count() == 0);
  CHECK(fx.proxy->close_session(opened.value().sso_id, proxy::CloseReason::explicit_close).code() ==
        core::Errc::invalid_session);
}

TEST_CASE("sweep closes idle sessions and destroys stale pooled instances") {
  proxy::PoolPolicy policy;  // 30 s timeout
  Fixture fx(netsim::load_topology(triangle_doc()).value(), policy);
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");

  SUBCASE("idle 31 s closed, idle 29 s untouched") {
    auto a = fx.open(ent, "m1");
    REQUIRE(a.ok());
    fx.clock->advance(2000);
    auto b = fx.open(ent, "m1");  // second construction (different idle age)
    REQUIRE(b.ok());
    fx.clock->set(31'000);
    auto swept = fx.proxy->sweep_timeouts(fx.clock->now_ms());
    REQUIRE(swept.size() == 1);
    CHECK(swept[0].sso_id == a.value().sso_id);
    const auto* b_sso = fx.proxy->find_instance(b.value().sso_id);
    CHECK(b_sso->status == proxy::SsoStatus::active);
  }

  SUBCASE("pooled instance idle past twice the timeout is destroyed") {
    proxy::PoolPolicy eager;
    eager.reuse_threshold = 1;
    Fixture fx2(netsim::load_topology(triangle_doc()).value(), eager);
    fx2.publish_module("m1", "latency_guard");
    auto ent2 = fx2.buy("m1");
    auto opened = fx2.open(ent2, "m1");
    REQUIRE(opened.ok());
    REQUIRE(fx2.proxy->close_session(opened.value().sso_id, proxy::CloseReason::explicit_close).ok());
    CHECK(fx2.control.allocation_count() == 1);  // pooled retains its path
    fx2.clock->set(59'000);
    CHECK(fx2.proxy->sweep_timeouts(fx2.clock->now_ms()).empty());
    fx2.clock->set(61'000);
    auto swept = fx2.proxy->sweep_timeouts(fx2.clock->now_ms());
    REQUIRE(swept.size() == 1);
    CHECK(swept[0].disposition == proxy::SsoStatus::destroyed);
    CHECK(fx2.control.allocation_count() == 0);
  }
}

TEST_CASE("events run handlers exactly for instances whose pool is affected") {
  Fixture fx;
  fx.publish_module("m1", "latency_guard", "to-c");
  fx.publish_module("m2", "latency_guard", "to-b");
  REQUIRE(fx.endpoints.register_host("10.0.0.2", "B").ok());
  REQUIRE(sim::bind_echo_peer(fx.endpoints, "10.0.0.2", 7).ok());
  auto e1 = fx.buy("m1");
  auto e2 = fx.buy("m2");
  // A holds A,B,C (links AB,BC); B holds A,B (link AB).
  auto a = fx.proxy->open_session(e1, "m1", "to-c", "10.0.0.3", 7, proxy::DeviceSink{});
  auto b = fx.proxy->open_session(e2, "m2", "to-b", "10.0.0.2", 7, proxy::DeviceSink{});
  REQUIRE(a.ok());
  REQUIRE(b.ok());
  auto ev = fx.control.set_link_state("BC", netsim::LinkChange::latency(12.0));
  REQUIRE(ev.ok());
  REQUIRE(ev.value().has_value());
  // Per-SSO subscriptions already ran handlers; check the trace.
  auto runs = fx.trace.entries_of("proxy.handler_run");
  REQUIRE(runs.size() == 1);
  CHECK(runs[0]["sso"] == a.value().sso_id);
}

TEST_CASE("deliver_event matches a brute-force affected-set oracle") {
  std::mt19937 rng(31);
  for (int trial = 0; trial < 10; ++trial) {
    auto topo = oracle::random_connected_topology(rng, 8);
    Fixture fx(topo);
    // Hosts at every node so sessions can target random destinations.
    std::vector<std::string> ips;
    int host = 10;
    for (const auto& node : topo.nodes) {
      std::string ip = "10.1.0." + std::to_string(host++);
      REQUIRE(fx.endpoints.register_host(ip, node).ok());
      REQUIRE(sim::bind_echo_peer(fx.endpoints, ip, 7).ok());
      ips.push_back(ip);
    }
    fx.publish_module("m1", "latency_guard");
    auto ent = fx.buy("m1");
    std::uniform_int_distribution<std::size_t> ip_pick(0, ips.size() - 1);
    std::vector<std::string> sessions;
    for (int s = 0; s < 6; ++s) {
      auto opened = fx.proxy->open_session(ent, "m1", "gold", ips[ip_pick(rng)], 7,
                                           proxy::DeviceSink{});
      if (opened.ok()) sessions.push_back(opened.value().sso_id);
    }
    std::vector<std::string> links;
    for (const auto& [id, link] : topo.links) links.push_back(id);
    std::uniform_int_distribution<std::size_t> link_pick(0, links.size() - 1);
    for (int m = 0; m < 40; ++m) {
      const auto& link = links[link_pick(rng)];
      netsim::NetworkEvent ev;
      ev.type = netsim::EventType::link_latency_changed;
      ev.link_id = link;
      ev.seq = 1000 + m;
      std::vector<std::string> expected;
      for (const auto& sso_id : sessions) {
        const auto* sso = fx.proxy->find_instance(sso_id);
        if (sso == nullptr || sso->status != proxy::SsoStatus::active) continue;
        for (const auto& path : sso->pool) {
          if (path.uses_link(link)) {
            expected.push_back(sso_id);
            break;
          }
        }
      }
      auto ran = fx.proxy->deliver_event(ev);
      CHECK(ran == expected);
    }
  }
}

TEST_CASE("handler exceptions are contained and counted") {
  Fixture fx;
  fx.publish_module("m1", "throwing");
  auto ent = fx.buy("m1");
  auto opened = fx.open(ent, "m1");
  REQUIRE(opened.ok());
  auto ev = fx.control.set_link_state("AB", netsim::LinkChange::latency(11.0));
  REQUIRE(ev.ok());
  const auto* sso = fx.proxy->find_instance(opened.value().sso_id);
  REQUIRE(sso != nullptr);
  CHECK(sso->status == proxy::SsoStatus::active);
  CHECK(sso->handler_errors == 1);
}

TEST_CASE("events on pooled instances are deferred and replayed on reactivation") {
  proxy::PoolPolicy policy;
  policy.reuse_threshold = 1;
  Fixture fx(netsim::load_topology(triangle_doc()).value(), policy);
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  auto opened = fx.open(ent, "m1");
  REQUIRE(opened.ok());
  REQUIRE(fx.proxy->close_session(opened.value().sso_id, proxy::CloseReason::explicit_close).ok());
  // Path A,B,C held while pooled; BC degradation must not run the handler yet.
  REQUIRE(fx.control.set_link_state("BC", netsim::LinkChange::latency(40.0)).ok());
  CHECK(fx.trace.count_of("proxy.handler_run") == 0);
  CHECK(fx.trace.count_of("proxy.event_deferred") == 1);
  auto again = fx.open(ent, "m1");
  REQUIRE(again.ok());
  CHECK(again.value().reused);
  CHECK(fx.trace.count_of("proxy.replay_event") == 1);
  CHECK(fx.trace.count_of("proxy.handler_run") == 1);
  // The replayed handler reoptimized onto the direct link.
  const auto* sso = fx.proxy->find_instance(again.value().sso_id);
  REQUIRE(sso != nullptr);
  REQUIRE(sso->pool.size() == 1);
  CHECK(sso->pool[0].nodes == std::vector<std::string>{"A", "C"});
}

TEST_CASE("samples update attainment, EWMA, and objective violations") {
  Fixture fx;
  fx.publish_module("m1", "latency_guard");
  auto ent = fx.buy("m1");
  std::vector<core::Json> violations;
  proxy::DeviceSink sink;
  sink.on_violation = [&](const core::Json& d) { violations.push_back(d); };
  auto opened = fx.proxy->open_session(ent, "m1", "gold", "10.0.0.3", 7, std::move(sink));
  REQUIRE(opened.ok());
  const auto sso_id = opened.value().sso_id;

  auto s1 = fx.proxy->record_sample(sso_id, 10.0);
  REQUIRE(s1.ok());
  CHECK(s1.value().ewma == 10.0);  // first sample seeds the EWMA
  CHECK(s1.value().attained == 1);
  auto s2 = fx.proxy->record_sample(sso_id, 20.0);
  REQUIRE(s2.ok());
  CHECK(s2.value().ewma == 12.0);  // 0.2*20 + 0.8*10
  CHECK(s2.value().attained == 2);

  auto s3 = fx.proxy->record_sample(sso_id, 60.0);  // above the at_most 50 bound
  REQUIRE(s3.ok());
  CHECK(s3.value().attained == 2);
  CHECK(s3.value().samples == 3);
  CHECK_FALSE(s3.value().violation);  // EWMA 21.6 still under the bound
  CHECK(violations.empty());

  // Push the EWMA over the bound; each violating report fires one event.
  std::size_t fired = 0;
  for (int i = 0; i < 20; ++i) {
    auto s = fx.proxy->record_sample(sso_id, 200.0);
    REQUIRE(s.ok());
    if (s.value().violation) ++fired;
  }
  CHECK(fired > 0);
  CHECK(violations.size() == fired);

  // Registry-side objective stats match an independent recomputation.
  const auto* sso = fx.proxy->find_instance(sso_id);
  REQUIRE(sso != nullptr);
  std::int64_t expected_attained = 0;
  for (double v : sso->raw_samples) {
    if (v <= 50.0) ++expected_attained;
  }
  CHECK(sso->attained_count == expected_attained);
  auto stats = fx.registry.stats_of("m1");
  REQUIRE(stats.has_value());
  CHECK(stats->samples == sso->sample_count);
  CHECK(stats->attained == expected_attained);
}

TEST_CASE("record_sample on an unknown session is invalid") {
  Fixture fx;
  CHECK(fx.proxy->record_sample("sso-999999", 1.0).code() == core::Errc::invalid_session);
}

TEST_CASE("resource conservation over randomized open/close/sweep scenarios") {
  std::mt19937 rng(77);
  for (int trial = 0; trial < 25; ++trial) {
    auto topo = oracle::random_connected_topology(rng, 8);
    proxy::PoolPolicy policy;
    policy.reuse_threshold = 1 + static_cast<int>(rng() % 4);
    Fixture fx(topo, policy);
    std::vector<std::string> ips;
    int host = 20;
    for (const auto& node : topo.nodes) {
      std::string ip = "10.2.0." + std::to_string(host++);
      REQUIRE(fx.endpoints.register_host(ip, node).ok());
      REQUIRE(sim::bind_echo_peer(fx.endpoints, ip, 7).ok());
      ips.push_back(ip);
    }
    fx.publish_module("m1", "latency_guard");
    auto ent = fx.buy("m1");
    std::vector<std::string> live;
    std::uniform_int_distribution<int> action(0, 3);
    std::uniform_int_distribution<std::size_t> ip_pick(0, ips.size() - 1);
    for (int step = 0; step < 40; ++step) {
      fx.clock->advance(1 + rng() % 5000);
      switch (action(rng)) {
        case 0:
        case 1: {
          auto opened = fx.proxy->open_session(ent, "m1", "gold", ips[ip_pick(rng)], 7,
                                               proxy::DeviceSink{});
          if (opened.ok()) live.push_back(opened.value().sso_id);
          break;
        }
        case 2: {
          if (!live.empty()) {
            const auto id = live.back();
            live.pop_back();
            (void)fx.proxy->close_session(id, proxy::CloseReason::explicit_close);
          }
          break;
        }
        default:
          fx.proxy->sweep_timeouts(fx.clock->now_ms());
          break;
      }
    }
    for (const auto& id : live) {
      (void)fx.proxy->close_session(id, proxy::CloseReason::explicit_close);
    }
    // Quiescence: sweep far enough ahead to destroy every pooled instance.
    fx.clock->advance(10 * policy.inactivity_timeout_ms);
    fx.proxy->sweep_timeouts(fx.clock->now_ms());
    CHECK(fx.control.allocation_count() == 0);
  }
}
