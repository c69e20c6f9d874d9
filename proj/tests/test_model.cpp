#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <vector>

#include "lfm/model.hpp"
#include "lfm/rng.hpp"
#include "oracle.hpp"

using Catch::Matchers::WithinAbs;

namespace {

lfm::BeliefNetwork fixture_network() {
  lfm::BeliefNetwork net;
  net.p_uplink_exceed = 0.503;
  net.p_downlink_exceed = 0.605;
  net.failure_cpt = lfm::FailureCpt{{0.023, 0.267, 0.093, 0.605}};
  return net;
}

lfm::BeliefNetwork random_network(lfm::SplitMix64& rng) {
  lfm::BeliefNetwork net;
  net.p_uplink_exceed = rng.next_double();
  net.p_downlink_exceed = rng.next_double();
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) net.failure_cpt.set(u, d, rng.next_double());
  }
  return net;
}

}  // namespace

TEST_CASE("exceedance estimate counts the boundary as an exceedance") {
  const std::vector<double> latencies = {36.999, 37.0, 37.001, 12.0};
  const auto estimate = lfm::estimate_exceedance_probability(latencies, 37.0);
  CHECK(estimate.sample_count == 4);
  CHECK(estimate.threshold_seconds == 37.0);
  CHECK(estimate.probability == 0.5);  // exactly 2 of 4, including the boundary sample
}

TEST_CASE("exceedance estimate matches a hand count on arbitrary data") {
  lfm::SplitMix64 rng(7);
  std::vector<double> latencies;
  for (int i = 0; i < 5000; ++i) latencies.push_back(draw_exponential(rng, 40.0));
  const auto estimate = lfm::estimate_exceedance_probability(latencies, 37.0);
  CHECK(estimate.probability == oracle::exceed_fraction(latencies, 37.0));
}

TEST_CASE("exceedance estimate rejects bad input") {
  const std::vector<double> empty;
  const std::vector<double> one = {1.0};
  CHECK_THROWS_AS(lfm::estimate_exceedance_probability(empty, 37.0), lfm::Error);
  CHECK_THROWS_AS(lfm::estimate_exceedance_probability(one, 0.0), lfm::Error);
  CHECK_THROWS_AS(lfm::estimate_exceedance_probability(one, -5.0), lfm::Error);
  try {
    lfm::estimate_exceedance_probability(empty, 37.0);
  } catch (const lfm::Error& e) {
    CHECK(e.code() == lfm::Errc::empty_dataset);
    CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("EmptyDataset"));
  }
}

TEST_CASE("CPT storage layout and accessors agree") {
  lfm::FailureCpt cpt;
  cpt.set(0, 0, 0.1);
  cpt.set(0, 1, 0.2);
  cpt.set(1, 0, 0.3);
  cpt.set(1, 1, 0.4);
  CHECK(cpt(0, 0) == 0.1);
  CHECK(cpt(0, 1) == 0.2);
  CHECK(cpt(1, 0) == 0.3);
  CHECK(cpt(1, 1) == 0.4);
  CHECK(lfm::FailureCpt::index(1, 0) == 2);
  CHECK_THROWS_AS(cpt(2, 0), lfm::Error);
  CHECK_THROWS_AS(cpt.set(0, 0, 1.5), lfm::Error);
}

TEST_CASE("joint probabilities match enumeration on the fixture network") {
  const auto net = fixture_network();
  const auto ref = oracle::fixture_net();
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      for (int f = 0; f < 2; ++f) {
        CHECK_THAT(lfm::joint_probability(net, u, d, f),
                   WithinAbs(oracle::state_probability(ref, u, d, f), 1e-15));
      }
    }
  }
  CHECK_THAT(lfm::joint_probability(net, 1, 1, 1),
             WithinAbs(oracle::kFixtureJoint111, 1e-12));
  CHECK_THROWS_AS(lfm::joint_probability(net, 2, 0, 0), lfm::Error);
  CHECK_THROWS_AS(lfm::joint_probability(net, 0, -1, 0), lfm::Error);
}

TEST_CASE("fixture marginal failure probability matches the frozen value") {
  const auto net = fixture_network();
  CHECK_THAT(lfm::marginal_failure_probability(net),
             WithinAbs(oracle::kFixtureMarginalFailure, 1e-12));
  CHECK_THAT(lfm::marginal_failure_probability(net),
             WithinAbs(oracle::marginal_failure(oracle::fixture_net()), 1e-15));
}

TEST_CASE("joint distribution normalizes for random networks") {
  lfm::SplitMix64 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    const auto net = random_network(rng);
    double total = 0.0;
    for (int u = 0; u < 2; ++u) {
      for (int d = 0; d < 2; ++d) {
        for (int f = 0; f < 2; ++f) total += lfm::joint_probability(net, u, d, f);
      }
    }
    CHECK_THAT(total, WithinAbs(1.0, 1e-12));
  }
}

TEST_CASE("posterior over parents given failure") {
  const auto net = fixture_network();
  const auto posterior = lfm::posterior_parents_given_failure(net);
  double total = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) total += posterior(u, d);
  }
  CHECK_THAT(total, WithinAbs(1.0, 1e-12));
  CHECK_THAT(posterior.marginal_uplink(), WithinAbs(oracle::kFixturePosteriorUplink, 1e-12));
  CHECK_THAT(posterior.marginal_uplink(),
             WithinAbs(oracle::posterior_uplink_given_failure(oracle::fixture_net()), 1e-15));
}

TEST_CASE("posterior requires non-zero evidence") {
  lfm::BeliefNetwork net;  // all probabilities zero, so P(F=1) = 0
  CHECK_THROWS_AS(lfm::posterior_parents_given_failure(net, 1), lfm::Error);
  try {
    lfm::posterior_parents_given_failure(net, 1);
  } catch (const lfm::Error& e) {
    CHECK(e.code() == lfm::Errc::zero_evidence);
  }
  // ...but conditioning on no-failure is fine for the same network.
  const auto posterior = lfm::posterior_parents_given_failure(net, 0);
  CHECK_THAT(posterior(0, 0), WithinAbs(1.0, 1e-12));
}

TEST_CASE("CPT fit recovers exact cell frequencies") {
  std::vector<lfm::LabeledTriple> triples;
  // (1,1): 3 of 4 fail; (0,1): 1 of 4 fail; (1,0): 0 of 2 fail; (0,0) unseen.
  triples.push_back({1, 1, 1});
  triples.push_back({1, 1, 1});
  triples.push_back({1, 1, 1});
  triples.push_back({1, 1, 0});
  triples.push_back({0, 1, 1});
  triples.push_back({0, 1, 0});
  triples.push_back({0, 1, 0});
  triples.push_back({0, 1, 0});
  triples.push_back({1, 0, 0});
  triples.push_back({1, 0, 0});

  const auto fit = lfm::fit_failure_cpt(triples);
  CHECK(fit.cpt(1, 1) == 0.75);
  CHECK(fit.cpt(0, 1) == 0.25);
  CHECK(fit.cpt(1, 0) == 0.0);
  CHECK(fit.cpt(0, 0) == 0.5);  // unseen cell falls back to the default prior
  CHECK(fit.defaulted[lfm::FailureCpt::index(0, 0)]);
  CHECK_FALSE(fit.defaulted[lfm::FailureCpt::index(1, 1)]);
  CHECK(fit.cell_total[lfm::FailureCpt::index(1, 1)] == 4);
  CHECK(fit.cell_failures[lfm::FailureCpt::index(1, 1)] == 3);

  lfm::CptFitOptions smoothed;
  smoothed.add_one_smoothing = true;
  const auto fit2 = lfm::fit_failure_cpt(triples, smoothed);
  CHECK_THAT(fit2.cpt(1, 1), WithinAbs(4.0 / 6.0, 1e-15));
  CHECK_THAT(fit2.cpt(0, 0), WithinAbs(1.0 / 2.0, 1e-15));
  CHECK_FALSE(fit2.defaulted[lfm::FailureCpt::index(0, 0)]);

  const std::vector<lfm::LabeledTriple> empty;
  CHECK_THROWS_AS(lfm::fit_failure_cpt(empty), lfm::Error);
}

TEST_CASE("network JSON round trip is exact") {
  lfm::SplitMix64 rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    const auto net = random_network(rng);
    const auto restored = lfm::network_from_json(lfm::network_to_json(net));
    CHECK(restored.p_uplink_exceed == net.p_uplink_exceed);
    CHECK(restored.p_downlink_exceed == net.p_downlink_exceed);
    for (int u = 0; u < 2; ++u) {
      for (int d = 0; d < 2; ++d) CHECK(restored.failure_cpt(u, d) == net.failure_cpt(u, d));
    }
  }
}

TEST_CASE("bundled fixture file loads with the expected values") {
  const auto net = lfm::load_network("data/tableIII.json");
  CHECK(net.p_uplink_exceed == 0.503);
  CHECK(net.p_downlink_exceed == 0.605);
  CHECK(net.failure_cpt(0, 0) == 0.023);
  CHECK(net.failure_cpt(0, 1) == 0.267);
  CHECK(net.failure_cpt(1, 0) == 0.093);
  CHECK(net.failure_cpt(1, 1) == 0.605);
}

TEST_CASE("network loading distinguishes io from validation failures") {
  CHECK_THROWS_AS(lfm::load_network("data/does-not-exist.json"), lfm::Error);
  try {
    lfm::load_network("data/does-not-exist.json");
  } catch (const lfm::Error& e) {
    CHECK(e.code() == lfm::Errc::store_io);
    CHECK(e.is_io());
  }

  const auto dir = std::filesystem::temp_directory_path() / "lfm_model_test";
  std::filesystem::create_directories(dir);
  const auto bad_json = dir / "bad.json";
  std::ofstream(bad_json) << "{ not json";
  CHECK_THROWS_AS(lfm::load_network(bad_json), lfm::Error);
  try {
    lfm::load_network(bad_json);
  } catch (const lfm::Error& e) {
    CHECK(e.code() == lfm::Errc::invalid_config);
    CHECK_FALSE(e.is_io());
  }

  const auto out_of_range = dir / "range.json";
  std::ofstream(out_of_range)
      << R"({"p_uplink_exceed": 1.5, "p_downlink_exceed": 0.5,
             "failure_cpt": {"0,0": 0.1, "0,1": 0.2, "1,0": 0.3, "1,1": 0.4}})";
  CHECK_THROWS_AS(lfm::load_network(out_of_range), lfm::Error);

  // save/load round trip through a real file
  const auto net = fixture_network();
  const auto saved = dir / "net.json";
  lfm::save_network(saved, net);
  const auto restored = lfm::load_network(saved);
  CHECK(restored.p_uplink_exceed == net.p_uplink_exceed);
  CHECK(restored.failure_cpt(1, 1) == net.failure_cpt(1, 1));
  std::filesystem::remove_all(dir);
}
