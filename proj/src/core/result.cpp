#include "socketstore/core/result.hpp"

#include <array>
#include <utility>

namespace socketstore::core {

namespace {

constexpr std::array<std::pair<Errc, std::string_view>, 30> kNames{{
    {Errc::invalid_argument, "InvalidArgument"},
    {Errc::frame_too_large, "FrameTooLarge"},
    {Errc::protocol_error, "ProtocolError"},
    {Errc::eponymity_violation, "EponymityViolation"},
    {Errc::validation_failed, "ValidationFailed"},
    {Errc::disposed, "Disposed"},
    {Errc::illegal_transition, "IllegalTransition"},
    {Errc::invalid_rating, "InvalidRating"},
    {Errc::not_rateable, "NotRateable"},
    {Errc::not_purchasable, "NotPurchasable"},
    {Errc::unauthorized, "Unauthorized"},
    {Errc::not_found, "NotFound"},
    {Errc::disposal_refused, "DisposalRefused"},
    {Errc::composition_refused, "CompositionRefused"},
    {Errc::topology_error, "TopologyError"},
    {Errc::no_route, "NoRoute"},
    {Errc::already_released, "AlreadyReleased"},
    {Errc::stale_path, "StalePath"},
    {Errc::unknown_parameterization, "UnknownParameterization"},
    {Errc::allocation_failed, "AllocationFailed"},
    {Errc::invalid_session, "InvalidSession"},
    {Errc::delegation_refused, "DelegationRefused"},
    {Errc::nothing_to_undo, "NothingToUndo"},
    {Errc::connection_closed, "ConnectionClosed"},
    {Errc::connect_failed, "ConnectFailed"},
    {Errc::bind_failed, "BindFailed"},
    {Errc::unsupported, "Unsupported"},
    {Errc::scenario_error, "ScenarioError"},
    {Errc::timeout, "Timeout"},
    {Errc::io_error, "IoError"},
}};

}  // namespace

std::string_view errc_name(Errc code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "UnknownError";
}

std::optional<Errc> errc_from_name(std::string_view name) {
  for (const auto& [c, n] : kNames) {
    if (n == name) return c;
  }
  return std::nullopt;
}

std::string Error::to_string() const {
  std::string out{errc_name(code)};
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

}  // namespace socketstore::core
