#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "lfm/timestamp.hpp"

namespace lfm {

enum class Direction : std::uint8_t { uplink, downlink };

// Ground-truth failure annotation. Records ingested from live traffic are
// typically `unknown`; the simulator labels every record.
enum class FailureLabel : std::uint8_t { no_failure = 0, failure = 1, unknown = 2 };

constexpr std::string_view to_string(Direction d) {
  return d == Direction::uplink ? "uplink" : "downlink";
}

inline std::optional<Direction> parse_direction(std::string_view s) {
  if (s == "uplink") return Direction::uplink;
  if (s == "downlink") return Direction::downlink;
  return std::nullopt;
}

constexpr std::string_view to_string(FailureLabel f) {
  switch (f) {
    case FailureLabel::no_failure: return "0";
    case FailureLabel::failure: return "1";
    case FailureLabel::unknown: return "unknown";
  }
  return "unknown";
}

inline std::optional<FailureLabel> parse_failure_label(std::string_view s) {
  if (s == "0") return FailureLabel::no_failure;
  if (s == "1") return FailureLabel::failure;
  if (s == "unknown") return FailureLabel::unknown;
  return std::nullopt;
}

// One uplink or downlink transmission event. The device stamps its side of
// the exchange, the server stamps the other; which side sent depends on the
// direction.
struct TransmissionRecord {
  std::string device_id;
  Direction direction = Direction::uplink;
  UtcInstant device_timestamp{};
  UtcInstant server_timestamp{};
  std::uint64_t payload_size_bytes = 0;
  FailureLabel failure_label = FailureLabel::unknown;

  UtcInstant sender_timestamp() const {
    return direction == Direction::uplink ? device_timestamp : server_timestamp;
  }
  UtcInstant receiver_timestamp() const {
    return direction == Direction::uplink ? server_timestamp : device_timestamp;
  }

  // Receiver minus sender, in seconds. Negative values mean the clocks
  // disagree; clean() rejects them.
  double latency_seconds() const {
    return seconds_between(sender_timestamp(), receiver_timestamp());
  }

  bool operator==(const TransmissionRecord&) const = default;
};

// Per-record latency derived from the timestamps.
struct LatencySample {
  std::size_t record_index = 0;  // position of the source record in its list
  double latency_seconds = 0.0;
  Direction direction = Direction::uplink;
};

}  // namespace lfm
