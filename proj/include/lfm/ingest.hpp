#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "lfm/record.hpp"

namespace lfm {

inline constexpr const char* kDropReasonNegativeLatency = "negative latency";
inline constexpr const char* kDropReasonDuplicate = "duplicate";

struct DroppedRecord {
  TransmissionRecord record;
  std::string reason;
};

struct CleanResult {
  std::vector<TransmissionRecord> kept;
  std::vector<DroppedRecord> dropped;
};

namespace detail {

struct DedupKey {
  std::string device_id;
  Direction direction;
  std::int64_t device_ms;

  bool operator==(const DedupKey&) const = default;
};

struct DedupKeyHash {
  std::size_t operator()(const DedupKey& k) const {
    std::size_t h = std::hash<std::string>{}(k.device_id);
    h ^= std::hash<std::int64_t>{}(k.device_ms) + 0x9e3779b9 + (h << 6) + (h >> 2);
    h ^= static_cast<std::size_t>(k.direction) + 0x9e3779b9 + (h << 6) + (h >> 2);
    return h;
  }
};

}  // namespace detail

// Partitions records into kept and dropped, preserving order. Drops records
// whose receiver timestamp precedes the sender timestamp, and every repeat of
// an already-seen (device_id, direction, device_timestamp) key. Never fails;
// clean(clean(x).kept) drops nothing.
inline CleanResult clean(std::span<const TransmissionRecord> records) {
  CleanResult result;
  std::unordered_set<detail::DedupKey, detail::DedupKeyHash> seen;
  for (const auto& r : records) {
    if (r.latency_seconds() < 0.0) {
      result.dropped.push_back({r, kDropReasonNegativeLatency});
      continue;
    }
    detail::DedupKey key{r.device_id, r.direction, to_millis(r.device_timestamp)};
    if (!seen.insert(std::move(key)).second) {
      result.dropped.push_back({r, kDropReasonDuplicate});
      continue;
    }
    result.kept.push_back(r);
  }
  return result;
}

// Shifts every device_timestamp by +offset seconds (millisecond-rounded).
// Used to undo a known device clock error before cleaning and analysis.
inline std::vector<TransmissionRecord> apply_clock_offset(
    std::span<const TransmissionRecord> records, double offset_seconds) {
  std::vector<TransmissionRecord> out(records.begin(), records.end());
  for (auto& r : out) {
    r.device_timestamp = add_seconds(r.device_timestamp, offset_seconds);
  }
  return out;
}

// Receiver-minus-sender latency for each record, in seconds at millisecond
// resolution. Output order and length match the input.
inline std::vector<LatencySample> compute_latencies(
    std::span<const TransmissionRecord> records) {
  std::vector<LatencySample> out;
  out.reserve(records.size());
  for (std::size_t i = 0; i < records.size(); ++i) {
    out.push_back({i, records[i].latency_seconds(), records[i].direction});
  }
  return out;
}

}  // namespace lfm
