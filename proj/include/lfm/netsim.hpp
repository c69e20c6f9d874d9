#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfm/analysis.hpp"
#include "lfm/error.hpp"
#include "lfm/ingest.hpp"
#include "lfm/model.hpp"
#include "lfm/record.hpp"
#include "lfm/rng.hpp"
#include "lfm/store.hpp"
#include "lfm/timestamp.hpp"

namespace lfm {

// Synthetic Class-C traffic generator.  Periodic uplinks, Poisson downlink
// commands, per-hop latency draws, and failure labels sampled from a ground
// truth CPT over the exceedance state at each transmission.

// --- latency distributions ------------------------------------------------------

enum class DistKind : std::uint8_t { constant, uniform, exponential, lognormal };

struct LatencyDist {
  DistKind kind = DistKind::constant;
  double a = 0.0;  // value | low | mean | mu
  double b = 0.0;  // unused | high | unused | sigma

  static LatencyDist constant(double value) { return {DistKind::constant, value, 0.0}; }
  static LatencyDist uniform(double low, double high) { return {DistKind::uniform, low, high}; }
  static LatencyDist exponential(double mean) { return {DistKind::exponential, mean, 0.0}; }
  static LatencyDist lognormal(double mu, double sigma) {
    return {DistKind::lognormal, mu, sigma};
  }

  double sample(SplitMix64& rng) const {
    switch (kind) {
      case DistKind::constant:
        return a;
      case DistKind::uniform:
        return draw_uniform(rng, a, b);
      case DistKind::exponential:
        return draw_exponential(rng, a);
      case DistKind::lognormal:
        return draw_lognormal(rng, a, b);
    }
    return 0.0;  // unreachable
  }

  void validate(const std::string& field) const {
    const auto fail = [&](const char* what) {
      throw Error(Errc::invalid_config, field + ": " + what);
    };
    if (!std::isfinite(a) || !std::isfinite(b)) fail("parameters must be finite");
    switch (kind) {
      case DistKind::constant:
        if (a < 0.0) fail("constant latency must be non-negative");
        break;
      case DistKind::uniform:
        if (a < 0.0 || b < a) fail("uniform bounds must satisfy 0 <= low <= high");
        break;
      case DistKind::exponential:
        if (!(a > 0.0)) fail("exponential mean must be positive");
        break;
      case DistKind::lognormal:
        if (b < 0.0) fail("lognormal sigma must be non-negative");
        break;
    }
  }
};

struct HopChain {
  std::array<LatencyDist, 3> hops{};

  double sample_total(SplitMix64& rng) const {
    double total = 0.0;
    for (const auto& hop : hops) total += hop.sample(rng);
    return total;
  }

  void validate(const std::string& field_prefix) const {
    for (std::size_t i = 0; i < hops.size(); ++i) {
      hops[i].validate(field_prefix + "[" + std::to_string(i) + "]");
    }
  }
};

inline constexpr std::array<const char*, 3> kUplinkHopNames = {
    "device_to_gateway", "gateway_to_network_server", "network_server_to_application_server"};
inline constexpr std::array<const char*, 3> kDownlinkHopNames = {
    "application_server_to_network_server", "network_server_to_gateway", "gateway_to_device"};

// --- configuration ----------------------------------------------------------------

inline UtcInstant default_simulation_start() {
  return *parse_utc("2021-01-01T00:00:00.000Z");
}

struct SimulationConfig {
  std::uint64_t seed = 1;
  double duration_seconds = 3600.0;
  double uplink_period_seconds = 10.0;
  double downlink_command_rate_per_minute = 6.0;
  HopChain uplink_path{{LatencyDist::exponential(18.0), LatencyDist::uniform(0.5, 2.5),
                        LatencyDist::constant(0.2)}};
  HopChain downlink_path{{LatencyDist::constant(0.3), LatencyDist::uniform(0.5, 2.5),
                          LatencyDist::exponential(30.0)}};
  double uplink_drop_probability = 0.0;
  double downlink_drop_probability = 0.0;
  double device_clock_offset_seconds = 0.0;
  // Ground truth P(F=1|u,d); defaults mirror the bundled reference fixture.
  FailureCpt failure_model{{0.023, 0.267, 0.093, 0.605}};
  ThresholdConfig thresholds;
  std::string device_id = "dev-0001";
  UtcInstant start_time = default_simulation_start();
  std::uint64_t uplink_payload_bytes = 24;
  std::uint64_t downlink_payload_bytes = 12;

  void validate() const {
    if (!(duration_seconds > 0.0) || !std::isfinite(duration_seconds)) {
      throw Error(Errc::invalid_config, "duration_seconds must be positive and finite");
    }
    if (!(uplink_period_seconds > 0.0) || !std::isfinite(uplink_period_seconds)) {
      throw Error(Errc::invalid_config, "uplink_period_seconds must be positive and finite");
    }
    if (downlink_command_rate_per_minute < 0.0 ||
        !std::isfinite(downlink_command_rate_per_minute)) {
      throw Error(Errc::invalid_config,
                  "downlink_command_rate_per_minute must be non-negative and finite");
    }
    detail::check_probability(uplink_drop_probability, "uplink_drop_probability");
    detail::check_probability(downlink_drop_probability, "downlink_drop_probability");
    if (!std::isfinite(device_clock_offset_seconds)) {
      throw Error(Errc::invalid_config, "device_clock_offset_seconds must be finite");
    }
    if (device_id.empty()) {
      throw Error(Errc::invalid_config, "device_id must not be empty");
    }
    uplink_path.validate("uplink_path");
    downlink_path.validate("downlink_path");
    failure_model.validate();
    thresholds.validate();
  }
};

// --- configuration serialisation ---------------------------------------------------

namespace detail {

inline nlohmann::json dist_to_json(const LatencyDist& dist) {
  switch (dist.kind) {
    case DistKind::constant:
      return {{"kind", "constant"}, {"value", dist.a}};
    case DistKind::uniform:
      return {{"kind", "uniform"}, {"low", dist.a}, {"high", dist.b}};
    case DistKind::exponential:
      return {{"kind", "exponential"}, {"mean", dist.a}};
    case DistKind::lognormal:
      return {{"kind", "lognormal"}, {"mu", dist.a}, {"sigma", dist.b}};
  }
  return nlohmann::json::object();  // unreachable
}

inline LatencyDist dist_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string()) {
    throw Error(Errc::invalid_config, field + ": expected an object with a \"kind\" string");
  }
  const std::string kind = j.at("kind").get<std::string>();
  try {
    if (kind == "constant") return LatencyDist::constant(j.at("value").get<double>());
    if (kind == "uniform") {
      return LatencyDist::uniform(j.at("low").get<double>(), j.at("high").get<double>());
    }
    if (kind == "exponential") return LatencyDist::exponential(j.at("mean").get<double>());
    if (kind == "lognormal") {
      return LatencyDist::lognormal(j.at("mu").get<double>(), j.at("sigma").get<double>());
    }
  } catch (const std::exception& e) {
    throw Error(Errc::invalid_config, field + ": " + e.what());
  }
  throw Error(Errc::invalid_config, field + ": unknown distribution kind \"" + kind + "\"");
}

inline nlohmann::json hop_chain_to_json(const HopChain& chain,
                                        const std::array<const char*, 3>& names) {
  nlohmann::json j = nlohmann::json::object();
  for (std::size_t i = 0; i < 3; ++i) j[names[i]] = dist_to_json(chain.hops[i]);
  return j;
}

inline HopChain hop_chain_from_json(const nlohmann::json& j,
                                    const std::array<const char*, 3>& names,
                                    const std::string& field) {
  if (!j.is_object()) {
    throw Error(Errc::invalid_config, field + ": expected an object of hop distributions");
  }
  HopChain chain;
  for (std::size_t i = 0; i < 3; ++i) {
    const std::string hop_field = field + "." + names[i];
    if (!j.contains(names[i])) {
      throw Error(Errc::invalid_config, hop_field + ": missing hop");
    }
    chain.hops[i] = dist_from_json(j.at(names[i]), hop_field);
  }
  return chain;
}

inline nlohmann::json cpt_cells_to_json(const FailureCpt& cpt) {
  nlohmann::json j = nlohmann::json::object();
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) j[cpt_key(u, d)] = cpt(u, d);
  }
  return j;
}

inline FailureCpt cpt_cells_from_json(const nlohmann::json& j, const std::string& field) {
  if (!j.is_object()) {
    throw Error(Errc::invalid_config, field + ": expected an object keyed by \"u,d\"");
  }
  FailureCpt cpt;
  try {
    for (int u = 0; u < 2; ++u) {
      for (int d = 0; d < 2; ++d) cpt.set(u, d, j.at(cpt_key(u, d)).get<double>());
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::invalid_config, field + ": " + e.what());
  }
  return cpt;
}

}  // namespace detail

inline nlohmann::json simulation_config_to_json(const SimulationConfig& config) {
  return nlohmann::json{
      {"rng_algorithm", std::string(kRngAlgorithm)},
      {"seed", config.seed},
      {"duration_seconds", config.duration_seconds},
      {"uplink_period_seconds", config.uplink_period_seconds},
      {"downlink_command_rate_per_minute", config.downlink_command_rate_per_minute},
      {"uplink_path", detail::hop_chain_to_json(config.uplink_path, kUplinkHopNames)},
      {"downlink_path", detail::hop_chain_to_json(config.downlink_path, kDownlinkHopNames)},
      {"uplink_drop_probability", config.uplink_drop_probability},
      {"downlink_drop_probability", config.downlink_drop_probability},
      {"device_clock_offset_seconds", config.device_clock_offset_seconds},
      {"failure_model", detail::cpt_cells_to_json(config.failure_model)},
      {"thresholds",
       {{"uplink_seconds", config.thresholds.uplink_seconds},
        {"downlink_seconds", config.thresholds.downlink_seconds}}},
      {"device_id", config.device_id},
      {"start_time", format_utc(config.start_time)},
      {"uplink_payload_bytes", config.uplink_payload_bytes},
      {"downlink_payload_bytes", config.downlink_payload_bytes},
  };
}

// Partial documents are fine: absent keys keep their defaults.
inline SimulationConfig simulation_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(Errc::invalid_config, "simulation config must be a JSON object");
  }
  SimulationConfig config;
  try {
    if (j.contains("rng_algorithm") &&
        j.at("rng_algorithm").get<std::string>() != kRngAlgorithm) {
      throw Error(Errc::invalid_config, "unsupported rng_algorithm (expected \"" +
                                            std::string(kRngAlgorithm) + "\")");
    }
    if (j.contains("seed")) config.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("duration_seconds")) {
      config.duration_seconds = j.at("duration_seconds").get<double>();
    }
    if (j.contains("uplink_period_seconds")) {
      config.uplink_period_seconds = j.at("uplink_period_seconds").get<double>();
    }
    if (j.contains("downlink_command_rate_per_minute")) {
      config.downlink_command_rate_per_minute =
          j.at("downlink_command_rate_per_minute").get<double>();
    }
    if (j.contains("uplink_path")) {
      config.uplink_path =
          detail::hop_chain_from_json(j.at("uplink_path"), kUplinkHopNames, "uplink_path");
    }
    if (j.contains("downlink_path")) {
      config.downlink_path = detail::hop_chain_from_json(j.at("downlink_path"),
                                                         kDownlinkHopNames, "downlink_path");
    }
    if (j.contains("uplink_drop_probability")) {
      config.uplink_drop_probability = j.at("uplink_drop_probability").get<double>();
    }
    if (j.contains("downlink_drop_probability")) {
      config.downlink_drop_probability = j.at("downlink_drop_probability").get<double>();
    }
    if (j.contains("device_clock_offset_seconds")) {
      config.device_clock_offset_seconds = j.at("device_clock_offset_seconds").get<double>();
    }
    if (j.contains("failure_model")) {
      config.failure_model = detail::cpt_cells_from_json(j.at("failure_model"), "failure_model");
    }
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      if (t.contains("uplink_seconds")) {
        config.thresholds.uplink_seconds = t.at("uplink_seconds").get<double>();
      }
      if (t.contains("downlink_seconds")) {
        config.thresholds.downlink_seconds = t.at("downlink_seconds").get<double>();
      }
    }
    if (j.contains("device_id")) config.device_id = j.at("device_id").get<std::string>();
    if (j.contains("start_time")) {
      const auto parsed = parse_utc(j.at("start_time").get<std::string>());
      if (!parsed) throw Error(Errc::invalid_config, "start_time is not a valid UTC timestamp");
      config.start_time = *parsed;
    }
    if (j.contains("uplink_payload_bytes")) {
      config.uplink_payload_bytes = j.at("uplink_payload_bytes").get<std::uint64_t>();
    }
    if (j.contains("downlink_payload_bytes")) {
      config.downlink_payload_bytes = j.at("downlink_payload_bytes").get<std::uint64_t>();
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::invalid_config, std::string("bad simulation config: ") + e.what());
  }
  config.validate();
  return config;
}

inline SimulationConfig load_simulation_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::store_io, "cannot open simulation config " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(Errc::invalid_config, std::string("bad simulation config: ") + e.what());
  }
  return simulation_config_from_json(j);
}

// --- simulation --------------------------------------------------------------------

struct SimulationSummary {
  std::size_t record_count = 0;
  std::size_t uplink_count = 0;
  std::size_t downlink_count = 0;
  std::size_t uplink_dropped = 0;
  std::size_t downlink_dropped = 0;
  std::size_t uplink_exceed_count = 0;
  std::size_t downlink_exceed_count = 0;
  std::size_t failure_count = 0;
};

struct SimulationOutput {
  std::vector<TransmissionRecord> records;   // chronological, clock offset applied
  std::vector<ExceedanceState> states;       // walk over the true (pre-offset) latencies
  std::vector<LabeledTriple> ground_truth;   // one triple per record
  SimulationSummary summary;
};

// Deterministic for a fixed config: six independent SplitMix64 streams are
// derived from the seed in a fixed order (uplink latency, uplink drop,
// downlink arrivals, downlink latency, downlink drop, failure labels), so
// changing one traffic knob does not reshuffle unrelated draws.
inline SimulationOutput simulate(const SimulationConfig& config) {
  config.validate();
  SplitMix64 seeder(config.seed);
  SplitMix64 uplink_latency_rng(seeder.next());
  SplitMix64 uplink_drop_rng(seeder.next());
  SplitMix64 downlink_arrival_rng(seeder.next());
  SplitMix64 downlink_latency_rng(seeder.next());
  SplitMix64 downlink_drop_rng(seeder.next());
  SplitMix64 failure_rng(seeder.next());

  const std::int64_t start_ms = to_millis(config.start_time);

  struct Pending {
    std::int64_t send_ms;
    std::int64_t latency_ms;
    Direction direction;
  };
  std::vector<Pending> uplinks;
  std::vector<Pending> downlinks;
  SimulationSummary summary;

  for (std::uint64_t k = 0;; ++k) {
    const double t = static_cast<double>(k) * config.uplink_period_seconds;
    if (!(t < config.duration_seconds)) break;
    if (draw_bernoulli(uplink_drop_rng, config.uplink_drop_probability)) {
      ++summary.uplink_dropped;
      continue;
    }
    const double total = config.uplink_path.sample_total(uplink_latency_rng);
    uplinks.push_back({start_ms + std::llround(t * 1000.0),
                       std::llround(total * 1000.0), Direction::uplink});
  }

  if (config.downlink_command_rate_per_minute > 0.0) {
    const double mean_gap = 60.0 / config.downlink_command_rate_per_minute;
    for (double t = draw_exponential(downlink_arrival_rng, mean_gap);
         t < config.duration_seconds;
         t += draw_exponential(downlink_arrival_rng, mean_gap)) {
      if (draw_bernoulli(downlink_drop_rng, config.downlink_drop_probability)) {
        ++summary.downlink_dropped;
        continue;
      }
      const double total = config.downlink_path.sample_total(downlink_latency_rng);
      downlinks.push_back({start_ms + std::llround(t * 1000.0),
                           std::llround(total * 1000.0), Direction::downlink});
    }
  }

  std::vector<Pending> merged;
  merged.reserve(uplinks.size() + downlinks.size());
  std::merge(uplinks.begin(), uplinks.end(), downlinks.begin(), downlinks.end(),
             std::back_inserter(merged),
             [](const Pending& a, const Pending& b) { return a.send_ms < b.send_ms; });

  SimulationOutput out;
  out.records.reserve(merged.size());
  for (const auto& p : merged) {
    TransmissionRecord r;
    r.device_id = config.device_id;
    r.direction = p.direction;
    if (p.direction == Direction::uplink) {
      r.device_timestamp = utc_from_millis(p.send_ms);
      r.server_timestamp = utc_from_millis(p.send_ms + p.latency_ms);
      r.payload_size_bytes = config.uplink_payload_bytes;
    } else {
      r.server_timestamp = utc_from_millis(p.send_ms);
      r.device_timestamp = utc_from_millis(p.send_ms + p.latency_ms);
      r.payload_size_bytes = config.downlink_payload_bytes;
    }
    out.records.push_back(std::move(r));
  }

  // Exceedance is judged on the stored (millisecond-quantised) latencies so a
  // later analysis pass reproduces these states bit for bit.
  out.states = exceedance_state_walk(out.records, config.thresholds);
  out.ground_truth.reserve(out.records.size());
  for (std::size_t i = 0; i < out.records.size(); ++i) {
    const auto& st = out.states[i];
    const double p_fail = config.failure_model(st.uplink, st.downlink);
    const std::uint8_t failed = draw_bernoulli(failure_rng, p_fail) ? 1 : 0;
    out.records[i].failure_label = failed ? FailureLabel::failure : FailureLabel::no_failure;
    out.ground_truth.push_back({st.uplink, st.downlink, failed});

    ++summary.record_count;
    if (out.records[i].direction == Direction::uplink) {
      ++summary.uplink_count;
      summary.uplink_exceed_count += st.uplink;
    } else {
      ++summary.downlink_count;
      summary.downlink_exceed_count += st.downlink;
    }
    summary.failure_count += failed;
  }
  out.summary = summary;

  if (config.device_clock_offset_seconds != 0.0) {
    out.records = apply_clock_offset(out.records, config.device_clock_offset_seconds);
  }
  return out;
}

inline std::size_t replay_to_store(const std::filesystem::path& store_path,
                                   const SimulationOutput& output) {
  return store_append(store_path, output.records);
}

inline nlohmann::json ground_truth_to_json(const SimulationConfig& config,
                                           const SimulationOutput& output) {
  nlohmann::json triples = nlohmann::json::array();
  for (const auto& t : output.ground_truth) {
    triples.push_back({t.uplink, t.downlink, t.failure});
  }
  return nlohmann::json{
      {"config", simulation_config_to_json(config)},
      {"summary",
       {{"record_count", output.summary.record_count},
        {"uplink_count", output.summary.uplink_count},
        {"downlink_count", output.summary.downlink_count},
        {"uplink_dropped", output.summary.uplink_dropped},
        {"downlink_dropped", output.summary.downlink_dropped},
        {"uplink_exceed_count", output.summary.uplink_exceed_count},
        {"downlink_exceed_count", output.summary.downlink_exceed_count},
        {"failure_count", output.summary.failure_count}}},
      {"triples", std::move(triples)},
  };
}

}  // namespace lfm
