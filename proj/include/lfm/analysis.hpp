#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "lfm/error.hpp"
#include "lfm/model.hpp"
#include "lfm/record.hpp"
#include "lfm/rng.hpp"

namespace lfm {

// --- thresholds ---------------------------------------------------------------

struct ThresholdConfig {
  double uplink_seconds = 37.0;
  double downlink_seconds = 42.0;

  double for_direction(Direction d) const {
    return d == Direction::uplink ? uplink_seconds : downlink_seconds;
  }

  void validate() const {
    if (!(uplink_seconds > 0.0) || !std::isfinite(uplink_seconds)) {
      throw Error(Errc::invalid_config, "uplink threshold must be positive and finite");
    }
    if (!(downlink_seconds > 0.0) || !std::isfinite(downlink_seconds)) {
      throw Error(Errc::invalid_config, "downlink threshold must be positive and finite");
    }
  }
};

// --- per-direction exceedance series ------------------------------------------

struct ExceedanceDataset {
  Direction direction = Direction::uplink;
  std::vector<std::uint8_t> indicators;  // 1 iff latency >= threshold, sample order
  double threshold_seconds = 0.0;

  std::size_t exceed_count() const {
    std::size_t n = 0;
    for (auto v : indicators) n += v;
    return n;
  }

  double exceed_fraction() const {
    if (indicators.empty()) {
      throw Error(Errc::empty_dataset, "no samples in exceedance series");
    }
    return static_cast<double>(exceed_count()) / static_cast<double>(indicators.size());
  }
};

struct DirectionalExceedance {
  ExceedanceDataset uplink;
  ExceedanceDataset downlink;
};

inline DirectionalExceedance threshold_series(std::span<const LatencySample> samples,
                                              const ThresholdConfig& config = {}) {
  config.validate();
  DirectionalExceedance out;
  out.uplink.direction = Direction::uplink;
  out.uplink.threshold_seconds = config.uplink_seconds;
  out.downlink.direction = Direction::downlink;
  out.downlink.threshold_seconds = config.downlink_seconds;
  for (const auto& s : samples) {
    auto& series = s.direction == Direction::uplink ? out.uplink : out.downlink;
    series.indicators.push_back(s.latency_seconds >= series.threshold_seconds ? 1 : 0);
  }
  return out;
}

// --- train/test splitting -------------------------------------------------------

enum class SplitPolicy : std::uint8_t {
  chronological,   // first ceil(n * fraction) items train, rest test
  seeded_shuffle,  // Fisher-Yates permutation first, then the same cut
};

struct SplitOptions {
  double fraction = 0.5;  // share of samples that lands in the training set
  SplitPolicy policy = SplitPolicy::chronological;
  std::uint64_t seed = 0;

  void validate() const {
    if (!std::isfinite(fraction) || fraction <= 0.0 || fraction >= 1.0) {
      throw Error(Errc::invalid_config, "split fraction must lie strictly between 0 and 1");
    }
  }
};

template <typename T>
struct SplitResult {
  std::vector<T> train;
  std::vector<T> test;
};

template <typename T>
SplitResult<T> split_sequence(std::span<const T> items, const SplitOptions& options = {}) {
  options.validate();
  if (items.empty()) {
    throw Error(Errc::empty_dataset, "nothing to split");
  }
  std::vector<T> ordered(items.begin(), items.end());
  if (options.policy == SplitPolicy::seeded_shuffle) {
    SplitMix64 rng(options.seed);
    for (std::size_t i = ordered.size() - 1; i > 0; --i) {
      const std::size_t j = static_cast<std::size_t>(rng.next() % (i + 1));
      std::swap(ordered[i], ordered[j]);
    }
  }
  const auto n = ordered.size();
  auto train_size = static_cast<std::size_t>(
      std::ceil(static_cast<double>(n) * options.fraction));
  train_size = std::min(train_size, n);
  SplitResult<T> result;
  result.train.assign(ordered.begin(), ordered.begin() + static_cast<std::ptrdiff_t>(train_size));
  result.test.assign(ordered.begin() + static_cast<std::ptrdiff_t>(train_size), ordered.end());
  return result;
}

using DatasetSplit = SplitResult<LabeledTriple>;

inline DatasetSplit split_train_test(std::span<const LabeledTriple> triples,
                                     const SplitOptions& options = {}) {
  return split_sequence(triples, options);
}

// --- latency summary statistics -------------------------------------------------

struct LatencySummary {
  std::size_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

// Percentiles use the nearest-rank rule on the sorted samples.
inline LatencySummary summarize_latencies(std::span<const double> latencies_seconds) {
  if (latencies_seconds.empty()) {
    throw Error(Errc::empty_dataset, "no latency samples to summarize");
  }
  std::vector<double> sorted(latencies_seconds.begin(), latencies_seconds.end());
  std::sort(sorted.begin(), sorted.end());
  LatencySummary s;
  s.count = sorted.size();
  s.min = sorted.front();
  s.max = sorted.back();
  double total = 0.0;
  for (double v : sorted) total += v;
  s.mean = total / static_cast<double>(s.count);
  const auto rank = [&](double percentile) {
    auto r = static_cast<std::size_t>(
        std::ceil(percentile / 100.0 * static_cast<double>(s.count)));
    if (r == 0) r = 1;
    return sorted[r - 1];
  };
  s.p50 = rank(50.0);
  s.p95 = rank(95.0);
  return s;
}

// --- deriving network observations from a record stream -------------------------

// Exceedance state as seen after each record: the record's own direction takes
// the record's indicator, the other direction carries the latest one seen
// (0 before any record of that direction).
struct ExceedanceState {
  std::uint8_t uplink = 0;
  std::uint8_t downlink = 0;

  bool operator==(const ExceedanceState&) const = default;
};

inline std::vector<ExceedanceState> exceedance_state_walk(
    std::span<const TransmissionRecord> records, const ThresholdConfig& config = {}) {
  config.validate();
  std::vector<ExceedanceState> states;
  states.reserve(records.size());
  ExceedanceState current;
  for (const auto& r : records) {
    const std::uint8_t exceeded =
        r.latency_seconds() >= config.for_direction(r.direction) ? 1 : 0;
    if (r.direction == Direction::uplink) {
      current.uplink = exceeded;
    } else {
      current.downlink = exceeded;
    }
    states.push_back(current);
  }
  return states;
}

// Pairs each labeled record's failure flag with the walk state at that record.
// Records labeled `unknown` contribute to the walk but produce no triple.
inline std::vector<LabeledTriple> labeled_triples(std::span<const TransmissionRecord> records,
                                                  const ThresholdConfig& config = {}) {
  const auto states = exceedance_state_walk(records, config);
  std::vector<LabeledTriple> triples;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].failure_label == FailureLabel::unknown) continue;
    triples.push_back({states[i].uplink, states[i].downlink,
                       records[i].failure_label == FailureLabel::failure
                           ? std::uint8_t{1}
                           : std::uint8_t{0}});
  }
  return triples;
}

}  // namespace lfm
