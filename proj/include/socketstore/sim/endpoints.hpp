#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "socketstore/core/result.hpp"

namespace socketstore::sim {

// One direction of a simulated duplex byte channel.
using Sink = std::function<void(std::string_view payload)>;

// Called when someone connects to a bound port. reply_to_initiator pushes
// bytes back toward the connecting side; the returned sink receives the
// initiator's payloads.
using AcceptHandler = std::function<core::Result<Sink>(Sink reply_to_initiator)>;

// Simulated network edge shared by device SDKs and the store proxy: hosts at
// topology nodes, listening ports, and direct payload delivery for both the
// legacy transport and SSO forwarding. No latency model; path metrics come
// from the Network Control.
class EndpointTable {
 public:
  core::Result<void> register_host(const std::string& ip, const std::string& node) {
    std::lock_guard lock(mu_);
    hosts_[ip] = node;
    return core::ok_result();
  }

  core::Result<std::string> node_of(const std::string& ip) const {
    std::lock_guard lock(mu_);
    auto it = hosts_.find(ip);
    if (it == hosts_.end()) {
      return core::Error{core::Errc::not_found, "unknown host '" + ip + "'"};
    }
    return it->second;
  }

  core::Result<void> bind(const std::string& ip, int port, AcceptHandler on_connect) {
    std::lock_guard lock(mu_);
    if (hosts_.count(ip) == 0) {
      return core::Error{core::Errc::not_found, "unknown host '" + ip + "'"};
    }
    const auto key = endpoint_key(ip, port);
    if (listeners_.count(key) > 0) {
      return core::Error{core::Errc::bind_failed, "port in use: " + key};
    }
    listeners_[key] = Listener{std::move(on_connect), false};
    return core::ok_result();
  }

  void unbind(const std::string& ip, int port) {
    std::lock_guard lock(mu_);
    listeners_.erase(endpoint_key(ip, port));
  }

  // Fault injection: a down endpoint refuses new connections.
  void set_down(const std::string& ip, int port, bool down) {
    std::lock_guard lock(mu_);
    auto it = listeners_.find(endpoint_key(ip, port));
    if (it != listeners_.end()) it->second.down = down;
  }

  core::Result<Sink> connect(const std::string& ip, int port, Sink reply_to_initiator) {
    AcceptHandler handler;
    {
      std::lock_guard lock(mu_);
      auto it = listeners_.find(endpoint_key(ip, port));
      if (it == listeners_.end() || it->second.down) {
        return core::Error{core::Errc::connect_failed, "no listener at " + endpoint_key(ip, port)};
      }
      handler = it->second.on_connect;
    }
    return handler(std::move(reply_to_initiator));
  }

  static std::string endpoint_key(const std::string& ip, int port) {
    return ip + ":" + std::to_string(port);
  }

 private:
  struct Listener {
    AcceptHandler on_connect;
    bool down = false;
  };

  mutable std::mutex mu_;
  std::map<std::string, std::string> hosts_;  // ip -> topology node
  std::map<std::string, Listener> listeners_;
};

// Convenience peer that echoes every payload back to the sender.
inline core::Result<void> bind_echo_peer(EndpointTable& endpoints, const std::string& ip, int port) {
  return endpoints.bind(ip, port, [](Sink reply) -> core::Result<Sink> {
    return Sink([reply = std::move(reply)](std::string_view payload) { reply(payload); });
  });
}

}  // namespace socketstore::sim
