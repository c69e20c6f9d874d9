#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"
#include "lfm/error.hpp"

namespace lfm {

// --- exceedance probabilities -----------------------------------------------

struct ExceedanceEstimate {
  double probability = 0.0;
  std::size_t sample_count = 0;
  double threshold_seconds = 0.0;
};

// Fraction of latency samples at or above the threshold. The boundary is
// inclusive: a sample exactly at the threshold counts as an exceedance.
inline ExceedanceEstimate estimate_exceedance_probability(
    std::span<const double> latencies_seconds, double threshold_seconds) {
  if (!(threshold_seconds > 0.0) || !std::isfinite(threshold_seconds)) {
    throw Error(Errc::invalid_config, "threshold must be a positive finite number of seconds");
  }
  if (latencies_seconds.empty()) {
    throw Error(Errc::empty_dataset, "no latency samples to estimate exceedance from");
  }
  std::size_t exceed = 0;
  for (double latency : latencies_seconds) {
    if (latency >= threshold_seconds) ++exceed;
  }
  return {static_cast<double>(exceed) / static_cast<double>(latencies_seconds.size()),
          latencies_seconds.size(), threshold_seconds};
}

// --- the three-node belief network ------------------------------------------

// One observation: did the uplink exceed, did the downlink exceed, did the
// link fail.  All components are 0 or 1.
struct LabeledTriple {
  std::uint8_t uplink = 0;
  std::uint8_t downlink = 0;
  std::uint8_t failure = 0;

  bool operator==(const LabeledTriple&) const = default;
};

namespace detail {

inline void check_binary(int value, const char* name) {
  if (value != 0 && value != 1) {
    throw Error(Errc::invalid_config, std::string(name) + " must be 0 or 1");
  }
}

inline void check_probability(double p, const std::string& name) {
  if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
    throw Error(Errc::invalid_config, name + " must lie in [0, 1]");
  }
}

}  // namespace detail

// P(Failure = 1 | Uplink = u, Downlink = d), stored flat with index (u<<1)|d.
struct FailureCpt {
  std::array<double, 4> p_fail{};

  static constexpr std::size_t index(int u, int d) {
    return static_cast<std::size_t>((u << 1) | d);
  }

  double operator()(int u, int d) const {
    detail::check_binary(u, "uplink state");
    detail::check_binary(d, "downlink state");
    return p_fail[index(u, d)];
  }

  void set(int u, int d, double p) {
    detail::check_binary(u, "uplink state");
    detail::check_binary(d, "downlink state");
    detail::check_probability(p, "conditional failure probability");
    p_fail[index(u, d)] = p;
  }

  void validate() const {
    static constexpr const char* kNames[4] = {
        "P(F=1|u=0,d=0)", "P(F=1|u=0,d=1)", "P(F=1|u=1,d=0)", "P(F=1|u=1,d=1)"};
    for (std::size_t i = 0; i < 4; ++i) {
      detail::check_probability(p_fail[i], kNames[i]);
    }
  }
};

// Uplink and Downlink are marginally independent root nodes; Failure has both
// as parents.  That is the whole graph.
struct BeliefNetwork {
  double p_uplink_exceed = 0.0;
  double p_downlink_exceed = 0.0;
  FailureCpt failure_cpt;

  void validate() const {
    detail::check_probability(p_uplink_exceed, "p_uplink_exceed");
    detail::check_probability(p_downlink_exceed, "p_downlink_exceed");
    failure_cpt.validate();
  }
};

namespace detail {

inline double parent_probability(double p_one, int state) {
  return state == 1 ? p_one : 1.0 - p_one;
}

}  // namespace detail

// P(U=u, D=d, F=f) under the factorisation P(U) P(D) P(F|U,D).
inline double joint_probability(const BeliefNetwork& net, int u, int d, int f) {
  detail::check_binary(u, "uplink state");
  detail::check_binary(d, "downlink state");
  detail::check_binary(f, "failure state");
  const double pu = detail::parent_probability(net.p_uplink_exceed, u);
  const double pd = detail::parent_probability(net.p_downlink_exceed, d);
  const double pf_given = net.failure_cpt(u, d);
  return pu * pd * (f == 1 ? pf_given : 1.0 - pf_given);
}

// P(F=1) by summing the joint over the four parent states.
inline double marginal_failure_probability(const BeliefNetwork& net) {
  double total = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      total += joint_probability(net, u, d, 1);
    }
  }
  return total;
}

inline double conditional_failure_probability(const BeliefNetwork& net, int u, int d) {
  return net.failure_cpt(u, d);
}

// P(U=u, D=d | F=f), indexed like the CPT.
struct ParentPosterior {
  std::array<double, 4> p{};

  double operator()(int u, int d) const {
    detail::check_binary(u, "uplink state");
    detail::check_binary(d, "downlink state");
    return p[FailureCpt::index(u, d)];
  }

  double marginal_uplink() const { return p[FailureCpt::index(1, 0)] + p[FailureCpt::index(1, 1)]; }
  double marginal_downlink() const { return p[FailureCpt::index(0, 1)] + p[FailureCpt::index(1, 1)]; }
};

inline ParentPosterior posterior_parents_given_failure(const BeliefNetwork& net, int f = 1) {
  detail::check_binary(f, "failure state");
  std::array<double, 4> joint{};
  double evidence = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      const double pj = joint_probability(net, u, d, f);
      joint[FailureCpt::index(u, d)] = pj;
      evidence += pj;
    }
  }
  if (evidence <= 0.0) {
    throw Error(Errc::zero_evidence,
                std::string("P(F=") + (f == 1 ? "1" : "0") + ") is zero; posterior undefined");
  }
  ParentPosterior posterior;
  for (std::size_t i = 0; i < 4; ++i) posterior.p[i] = joint[i] / evidence;
  return posterior;
}

// --- fitting from labeled observations --------------------------------------

struct CptFitOptions {
  // Probability assigned to a parent-state cell that has no observations.
  double zero_count_prior = 0.5;
  // Laplace smoothing: (failures + 1) / (total + 2) in every cell.
  bool add_one_smoothing = false;
};

struct CptFitResult {
  FailureCpt cpt;
  std::array<std::uint64_t, 4> cell_total{};
  std::array<std::uint64_t, 4> cell_failures{};
  std::array<bool, 4> defaulted{};  // cells filled from zero_count_prior
};

inline CptFitResult fit_failure_cpt(std::span<const LabeledTriple> triples,
                                    const CptFitOptions& options = {}) {
  if (triples.empty()) {
    throw Error(Errc::empty_dataset, "no labeled observations to fit the CPT from");
  }
  detail::check_probability(options.zero_count_prior, "zero_count_prior");
  CptFitResult result;
  for (const auto& t : triples) {
    const std::size_t i = FailureCpt::index(t.uplink, t.downlink);
    ++result.cell_total[i];
    if (t.failure) ++result.cell_failures[i];
  }
  for (std::size_t i = 0; i < 4; ++i) {
    if (options.add_one_smoothing) {
      result.cpt.p_fail[i] = (static_cast<double>(result.cell_failures[i]) + 1.0) /
                             (static_cast<double>(result.cell_total[i]) + 2.0);
    } else if (result.cell_total[i] == 0) {
      result.cpt.p_fail[i] = options.zero_count_prior;
      result.defaulted[i] = true;
    } else {
      result.cpt.p_fail[i] = static_cast<double>(result.cell_failures[i]) /
                             static_cast<double>(result.cell_total[i]);
    }
  }
  return result;
}

// --- serialisation ------------------------------------------------------------

namespace detail {

inline std::string cpt_key(int u, int d) {
  return std::to_string(u) + "," + std::to_string(d);
}

}  // namespace detail

inline nlohmann::json network_to_json(const BeliefNetwork& net) {
  nlohmann::json cpt = nlohmann::json::object();
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      cpt[detail::cpt_key(u, d)] = net.failure_cpt(u, d);
    }
  }
  return nlohmann::json{
      {"p_uplink_exceed", net.p_uplink_exceed},
      {"p_downlink_exceed", net.p_downlink_exceed},
      {"failure_cpt", std::move(cpt)},
  };
}

inline BeliefNetwork network_from_json(const nlohmann::json& j) {
  if (!j.is_object()) {
    throw Error(Errc::invalid_config, "network document must be a JSON object");
  }
  BeliefNetwork net;
  try {
    net.p_uplink_exceed = j.at("p_uplink_exceed").get<double>();
    net.p_downlink_exceed = j.at("p_downlink_exceed").get<double>();
    const auto& cpt = j.at("failure_cpt");
    if (!cpt.is_object()) {
      throw Error(Errc::invalid_config, "failure_cpt must be a JSON object");
    }
    for (int u = 0; u < 2; ++u) {
      for (int d = 0; d < 2; ++d) {
        net.failure_cpt.set(u, d, cpt.at(detail::cpt_key(u, d)).get<double>());
      }
    }
  } catch (const Error&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(Errc::invalid_config, std::string("bad network document: ") + e.what());
  }
  net.validate();
  return net;
}

inline BeliefNetwork load_network(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::store_io, "cannot open network file " + path.string());
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw Error(Errc::invalid_config, std::string("bad network document: ") + e.what());
  }
  return network_from_json(j);
}

inline void save_network(const std::filesystem::path& path, const BeliefNetwork& net) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(Errc::store_io, "cannot write network file " + path.string());
  }
  out << network_to_json(net).dump(2) << '\n';
  if (!out) {
    throw Error(Errc::store_io, "write failed on " + path.string());
  }
}

}  // namespace lfm
