#pragma once

#include <mutex>
#include <string>
#include <vector>

#include "socketstore/core/json.hpp"

namespace socketstore::core {

// Ordered, append-only event log shared by the services. Entry order is the
// execution order, which is what makes scenario reports reproducible.
class TraceLog {
 public:
  void record(std::string_view kind, Json detail) {
    std::lock_guard lock(mu_);
    detail["kind"] = std::string(kind);
    detail["index"] = next_index_++;
    entries_.push_back(std::move(detail));
  }

  std::vector<Json> entries() const {
    std::lock_guard lock(mu_);
    return entries_;
  }

  std::vector<Json> entries_of(std::string_view kind) const {
    std::lock_guard lock(mu_);
    std::vector<Json> out;
    for (const auto& e : entries_) {
      if (e.at("kind") == kind) out.push_back(e);
    }
    return out;
  }

  std::size_t count_of(std::string_view kind) const {
    std::lock_guard lock(mu_);
    std::size_t n = 0;
    for (const auto& e : entries_) {
      if (e.at("kind") == kind) ++n;
    }
    return n;
  }

  Json to_json() const {
    std::lock_guard lock(mu_);
    return Json(entries_);
  }

  void clear() {
    std::lock_guard lock(mu_);
    entries_.clear();
    next_index_ = 0;
  }

 private:
  mutable std::mutex mu_;
  std::vector<Json> entries_;
  std::int64_t next_index_ = 0;
};

}  // namespace socketstore::core
