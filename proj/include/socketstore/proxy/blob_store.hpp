#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace socketstore::proxy {

// Local stand-in for the online storage service an SSO may use to park
// pending payloads. Entries are keyed by session and FIFO-ordered by seq.
class BlobStore {
 public:
  std::int64_t put(const std::string& session, std::string payload) {
    std::lock_guard lock(mu_);
    const std::int64_t seq = next_seq_++;
    blobs_[session].emplace(seq, std::move(payload));
    return seq;
  }

  std::optional<std::string> get(const std::string& session, std::int64_t seq) const {
    std::lock_guard lock(mu_);
    auto s = blobs_.find(session);
    if (s == blobs_.end()) return std::nullopt;
    auto it = s->second.find(seq);
    if (it == s->second.end()) return std::nullopt;
    return it->second;
  }

  std::vector<std::pair<std::int64_t, std::string>> list(const std::string& session) const {
    std::lock_guard lock(mu_);
    std::vector<std::pair<std::int64_t, std::string>> out;
    auto s = blobs_.find(session);
    if (s != blobs_.end()) out.assign(s->second.begin(), s->second.end());
    return out;
  }

  bool erase(const std::string& session, std::int64_t seq) {
    std::lock_guard lock(mu_);
    auto s = blobs_.find(session);
    if (s == blobs_.end()) return false;
    return s->second.erase(seq) > 0;
  }

  void drop_session(const std::string& session) {
    std::lock_guard lock(mu_);
    blobs_.erase(session);
  }

  std::size_t count(const std::string& session) const {
    std::lock_guard lock(mu_);
    auto s = blobs_.find(session);
    return s == blobs_.end() ? 0 : s->second.size();
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::map<std::int64_t, std::string>> blobs_;
  std::int64_t next_seq_ = 1;
};

}  // namespace socketstore::proxy
