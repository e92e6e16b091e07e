#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>

namespace socketstore::core {

// All timestamps in the system are integer milliseconds from one of these.
class Clock {
 public:
  virtual ~Clock() = default;
  virtual std::int64_t now_ms() const = 0;
};

// Settable clock for deterministic scenario replay.
class VirtualClock : public Clock {
 public:
  explicit VirtualClock(std::int64_t start_ms = 0) : now_(start_ms) {}

  std::int64_t now_ms() const override { return now_.load(); }
  void set(std::int64_t t) { now_.store(t); }
  void advance(std::int64_t delta_ms) { now_.fetch_add(delta_ms); }

 private:
  std::atomic<std::int64_t> now_;
};

class SystemClock : public Clock {
 public:
  std::int64_t now_ms() const override {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
  }
};

using ClockRef = std::shared_ptr<Clock>;

}  // namespace socketstore::core
