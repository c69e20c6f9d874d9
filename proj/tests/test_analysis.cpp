#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <vector>

#include "lfm/analysis.hpp"
#include "oracle.hpp"

using Catch::Matchers::WithinAbs;

namespace {

lfm::TransmissionRecord make_record(lfm::Direction direction, std::int64_t send_ms,
                                    std::int64_t latency_ms,
                                    lfm::FailureLabel label = lfm::FailureLabel::unknown) {
  lfm::TransmissionRecord r;
  r.device_id = "dev-0001";
  r.direction = direction;
  if (direction == lfm::Direction::uplink) {
    r.device_timestamp = lfm::utc_from_millis(send_ms);
    r.server_timestamp = lfm::utc_from_millis(send_ms + latency_ms);
  } else {
    r.server_timestamp = lfm::utc_from_millis(send_ms);
    r.device_timestamp = lfm::utc_from_millis(send_ms + latency_ms);
  }
  r.payload_size_bytes = 16;
  r.failure_label = label;
  return r;
}

}  // namespace

TEST_CASE("threshold defaults and direction lookup") {
  const lfm::ThresholdConfig config;
  CHECK(config.uplink_seconds == 37.0);
  CHECK(config.downlink_seconds == 42.0);
  CHECK(config.for_direction(lfm::Direction::uplink) == 37.0);
  CHECK(config.for_direction(lfm::Direction::downlink) == 42.0);

  lfm::ThresholdConfig bad;
  bad.uplink_seconds = 0.0;
  CHECK_THROWS_AS(bad.validate(), lfm::Error);
}

TEST_CASE("threshold series is inclusive at the boundary") {
  std::vector<lfm::LatencySample> samples = {
      {0, 36.999, lfm::Direction::uplink},  {1, 37.0, lfm::Direction::uplink},
      {2, 40.0, lfm::Direction::uplink},    {3, 42.0, lfm::Direction::downlink},
      {4, 41.999, lfm::Direction::downlink}};
  const auto series = lfm::threshold_series(samples);
  CHECK(series.uplink.indicators == std::vector<std::uint8_t>{0, 1, 1});
  CHECK(series.downlink.indicators == std::vector<std::uint8_t>{1, 0});
  CHECK(series.uplink.exceed_count() == 2);
  CHECK_THAT(series.uplink.exceed_fraction(), WithinAbs(2.0 / 3.0, 1e-15));
  CHECK_THAT(series.downlink.exceed_fraction(), WithinAbs(0.5, 1e-15));
}

TEST_CASE("chronological split takes the leading share") {
  std::vector<lfm::LabeledTriple> triples;
  for (std::uint8_t i = 0; i < 10; ++i) triples.push_back({i, 0, 0});
  const auto parts = lfm::split_train_test(triples);
  REQUIRE(parts.train.size() == 5);
  REQUIRE(parts.test.size() == 5);
  CHECK(parts.train.front().uplink == 0);
  CHECK(parts.train.back().uplink == 4);
  CHECK(parts.test.front().uplink == 5);

  // odd count: the training share rounds up
  triples.push_back({10, 0, 0});
  const auto parts2 = lfm::split_train_test(triples);
  CHECK(parts2.train.size() == 6);
  CHECK(parts2.test.size() == 5);
}

TEST_CASE("seeded shuffle split is deterministic and preserves the multiset") {
  std::vector<lfm::LabeledTriple> triples;
  for (int i = 0; i < 101; ++i) {
    triples.push_back({static_cast<std::uint8_t>(i % 2), static_cast<std::uint8_t>(i % 3 == 0),
                       static_cast<std::uint8_t>(i % 5 == 0)});
  }
  lfm::SplitOptions options;
  options.policy = lfm::SplitPolicy::seeded_shuffle;
  options.seed = 17;
  options.fraction = 0.7;
  const auto a = lfm::split_train_test(triples, options);
  const auto b = lfm::split_train_test(triples, options);
  CHECK(a.train == b.train);
  CHECK(a.test == b.test);
  CHECK(a.train.size() == 71);  // ceil(101 * 0.7)

  auto combined = a.train;
  combined.insert(combined.end(), a.test.begin(), a.test.end());
  auto key = [](const lfm::LabeledTriple& t) {
    return (t.uplink << 2) | (t.downlink << 1) | t.failure;
  };
  auto sorted_combined = combined;
  auto sorted_original = triples;
  std::sort(sorted_combined.begin(), sorted_combined.end(),
            [&](auto& x, auto& y) { return key(x) < key(y); });
  std::sort(sorted_original.begin(), sorted_original.end(),
            [&](auto& x, auto& y) { return key(x) < key(y); });
  CHECK(sorted_combined == sorted_original);

  options.seed = 18;
  const auto c = lfm::split_train_test(triples, options);
  CHECK(c.train != a.train);  // different seed, different permutation
}

TEST_CASE("split rejects bad options and empty input") {
  const std::vector<lfm::LabeledTriple> empty;
  CHECK_THROWS_AS(lfm::split_train_test(empty), lfm::Error);

  std::vector<lfm::LabeledTriple> one = {{1, 1, 1}};
  lfm::SplitOptions options;
  options.fraction = 0.0;
  CHECK_THROWS_AS(lfm::split_train_test(one, options), lfm::Error);
  options.fraction = 1.0;
  CHECK_THROWS_AS(lfm::split_train_test(one, options), lfm::Error);
}

TEST_CASE("latency summary uses nearest-rank percentiles") {
  const std::vector<double> latencies = {5.0, 1.0, 4.0, 2.0, 3.0};
  const auto summary = lfm::summarize_latencies(latencies);
  CHECK(summary.count == 5);
  CHECK(summary.min == 1.0);
  CHECK(summary.max == 5.0);
  CHECK_THAT(summary.mean, WithinAbs(3.0, 1e-15));
  CHECK(summary.p50 == 3.0);  // ceil(0.5 * 5) = rank 3
  CHECK(summary.p95 == 5.0);  // ceil(0.95 * 5) = rank 5

  const std::vector<double> empty;
  CHECK_THROWS_AS(lfm::summarize_latencies(empty), lfm::Error);
}

TEST_CASE("exceedance walk carries the latest indicator per direction") {
  // latencies in ms; thresholds 37s / 42s
  std::vector<lfm::TransmissionRecord> records = {
      make_record(lfm::Direction::uplink, 0, 40'000),       // u=1 -> (1,0)
      make_record(lfm::Direction::downlink, 1'000, 10'000), // d=0 -> (1,0)
      make_record(lfm::Direction::downlink, 2'000, 50'000), // d=1 -> (1,1)
      make_record(lfm::Direction::uplink, 3'000, 5'000),    // u=0 -> (0,1)
      make_record(lfm::Direction::uplink, 4'000, 37'000),   // boundary: u=1 -> (1,1)
  };
  const auto states = lfm::exceedance_state_walk(records);
  REQUIRE(states.size() == 5);
  CHECK(states[0] == lfm::ExceedanceState{1, 0});
  CHECK(states[1] == lfm::ExceedanceState{1, 0});
  CHECK(states[2] == lfm::ExceedanceState{1, 1});
  CHECK(states[3] == lfm::ExceedanceState{0, 1});
  CHECK(states[4] == lfm::ExceedanceState{1, 1});
}

TEST_CASE("labeled triples skip unknown labels but keep walking") {
  std::vector<lfm::TransmissionRecord> records = {
      make_record(lfm::Direction::uplink, 0, 40'000, lfm::FailureLabel::failure),
      make_record(lfm::Direction::downlink, 1'000, 50'000, lfm::FailureLabel::unknown),
      make_record(lfm::Direction::uplink, 2'000, 1'000, lfm::FailureLabel::no_failure),
  };
  const auto triples = lfm::labeled_triples(records);
  REQUIRE(triples.size() == 2);
  CHECK(triples[0] == lfm::LabeledTriple{1, 0, 1});
  // the skipped downlink still flipped the carried downlink indicator
  CHECK(triples[1] == lfm::LabeledTriple{0, 1, 0});
}
