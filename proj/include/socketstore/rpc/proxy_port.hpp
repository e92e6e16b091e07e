#pragma once

#include "socketstore/proxy/store_proxy.hpp"

namespace socketstore::rpc {

// Client surface of the store proxy as seen by device runtimes.
class ProxyPort {
 public:
  virtual ~ProxyPort() = default;
  virtual core::Result<proxy::OpenOutcome> open_session(const core::Entitlement& ent,
                                                        const std::string& module_key,
                                                        const std::string& module_id,
                                                        const std::string& dst_ip, int dst_port,
                                                        proxy::DeviceSink device) = 0;
  virtual core::Result<core::Json> session_data(const std::string& sso_id,
                                                const proxy::DataRequest& request) = 0;
  virtual core::Result<proxy::SampleOutcome> session_sample(const std::string& sso_id,
                                                            double value) = 0;
  virtual core::Result<proxy::CloseOutcome> close_session(const std::string& sso_id) = 0;
};

class InProcProxyPort : public ProxyPort {
 public:
  explicit InProcProxyPort(proxy::StoreProxy& proxy) : proxy_(proxy) {}

  void set_down(bool down) { down_ = down; }

  core::Result<proxy::OpenOutcome> open_session(const core::Entitlement& ent,
                                                const std::string& module_key,
                                                const std::string& module_id,
                                                const std::string& dst_ip, int dst_port,
                                                proxy::DeviceSink device) override {
    if (down_) return unreachable();
    return proxy_.open_session(ent, module_key, module_id, dst_ip, dst_port, std::move(device));
  }
  core::Result<core::Json> session_data(const std::string& sso_id,
                                        const proxy::DataRequest& request) override {
    if (down_) return unreachable();
    return proxy_.handle_data(sso_id, request);
  }
  core::Result<proxy::SampleOutcome> session_sample(const std::string& sso_id,
                                                    double value) override {
    if (down_) return unreachable();
    return proxy_.record_sample(sso_id, value);
  }
  core::Result<proxy::CloseOutcome> close_session(const std::string& sso_id) override {
    if (down_) return unreachable();
    return proxy_.close_session(sso_id, proxy::CloseReason::explicit_close);
  }

 private:
  static core::Error unreachable() {
    return core::Error{core::Errc::connect_failed, "store proxy unreachable"};
  }
  proxy::StoreProxy& proxy_;
  bool down_ = false;
};

}  // namespace socketstore::rpc
