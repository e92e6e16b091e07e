#pragma once

#include "socketstore/proxy/behavior.hpp"

namespace socketstore::modules {

// Registers the built-in store-side behaviors: latency_guard,
// multipath_failover, dtn_store, and the composition pipeline.
void register_network_behaviors(proxy::BehaviorRegistry& registry);

// Path constraints read from an instance's constants
// (min_bandwidth_mbps when present).
netsim::PathConstraints constraints_of(const core::ParameterSet& constants);

}  // namespace socketstore::modules
