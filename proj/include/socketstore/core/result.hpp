#pragma once

#include <cassert>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace socketstore::core {

// Domain error codes. Wire-level Error messages carry the PascalCase name.
enum class Errc {
  invalid_argument,
  frame_too_large,
  protocol_error,
  eponymity_violation,
  validation_failed,
  disposed,
  illegal_transition,
  invalid_rating,
  not_rateable,
  not_purchasable,
  unauthorized,
  not_found,
  disposal_refused,
  composition_refused,
  topology_error,
  no_route,
  already_released,
  stale_path,
  unknown_parameterization,
  allocation_failed,
  invalid_session,
  delegation_refused,
  nothing_to_undo,
  connection_closed,
  connect_failed,
  bind_failed,
  unsupported,
  scenario_error,
  timeout,
  io_error,
};

std::string_view errc_name(Errc code);
std::optional<Errc> errc_from_name(std::string_view name);

struct Error {
  Errc code;
  std::string detail;

  Error(Errc c, std::string d = {}) : code(c), detail(std::move(d)) {}

  std::string to_string() const;
};

inline bool operator==(const Error& a, const Error& b) {
  return a.code == b.code && a.detail == b.detail;
}

template <typename T>
class [[nodiscard]] Result {
 public:
  Result(T value) : state_(std::move(value)) {}
  Result(Error err) : state_(std::move(err)) {}
  Result(Errc code, std::string detail = {}) : state_(Error{code, std::move(detail)}) {}

  bool ok() const { return std::holds_alternative<T>(state_); }
  explicit operator bool() const { return ok(); }

  T& value() & {
    assert(ok());
    return std::get<T>(state_);
  }
  const T& value() const& {
    assert(ok());
    return std::get<T>(state_);
  }
  T&& value() && {
    assert(ok());
    return std::get<T>(std::move(state_));
  }

  const Error& error() const {
    assert(!ok());
    return std::get<Error>(state_);
  }
  Errc code() const { return error().code; }

  T value_or(T fallback) const {
    return ok() ? std::get<T>(state_) : std::move(fallback);
  }

 private:
  std::variant<T, Error> state_;
};

template <>
class [[nodiscard]] Result<void> {
 public:
  Result() = default;
  Result(Error err) : err_(std::move(err)) {}
  Result(Errc code, std::string detail = {}) : err_(Error{code, std::move(detail)}) {}

  bool ok() const { return !err_.has_value(); }
  explicit operator bool() const { return ok(); }

  const Error& error() const {
    assert(err_);
    return *err_;
  }
  Errc code() const { return error().code; }

 private:
  std::optional<Error> err_;
};

inline Result<void> ok_result() { return Result<void>{}; }

}  // namespace socketstore::core
