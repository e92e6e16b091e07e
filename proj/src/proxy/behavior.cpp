#include "socketstore/proxy/behavior.hpp"

namespace socketstore::proxy {

core::Json DataRequest::to_json() const {
  core::Json j{{"op", op}};
  if (!payload.empty() || op == "send") j["payload"] = payload;
  if (!extra.empty()) j["extra"] = extra;
  return j;
}

core::Result<DataRequest> DataRequest::from_json(const core::Json& j) {
  if (!j.is_object() || !j.contains("op") || !j["op"].is_string()) {
    return core::Error{core::Errc::protocol_error, "data request missing op"};
  }
  DataRequest r;
  r.op = j["op"];
  if (j.contains("payload") && j["payload"].is_string()) r.payload = j["payload"];
  if (j.contains("extra") && j["extra"].is_object()) r.extra = j["extra"];
  return r;
}

}  // namespace socketstore::proxy
