#pragma once

// Reference implementations used to cross-check the library.  Everything here
// is deliberately written without touching the library's inference code: state
// probabilities come from brute-force enumeration of the eight network states,
// and the frozen constants below were produced once by an independent
// calculation and pinned.

#include <cstddef>
#include <vector>

namespace oracle {

struct Net {
  double pu = 0.0;  // P(U=1)
  double pd = 0.0;  // P(D=1)
  double cpt[2][2] = {{0.0, 0.0}, {0.0, 0.0}};  // P(F=1 | u, d), indexed [u][d]
};

inline double state_probability(const Net& n, int u, int d, int f) {
  const double pu = u ? n.pu : 1.0 - n.pu;
  const double pd = d ? n.pd : 1.0 - n.pd;
  const double pf = n.cpt[u][d];
  return pu * pd * (f ? pf : 1.0 - pf);
}

inline double total_probability(const Net& n) {
  double total = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      for (int f = 0; f < 2; ++f) total += state_probability(n, u, d, f);
    }
  }
  return total;
}

inline double marginal_failure(const Net& n) {
  double total = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) total += state_probability(n, u, d, 1);
  }
  return total;
}

inline double posterior_uplink_given_failure(const Net& n) {
  double uplink_mass = 0.0;
  double evidence = 0.0;
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      const double p = state_probability(n, u, d, 1);
      evidence += p;
      if (u == 1) uplink_mass += p;
    }
  }
  return uplink_mass / evidence;
}

inline double exceed_fraction(const std::vector<double>& samples, double threshold) {
  std::size_t count = 0;
  for (double s : samples) {
    if (s >= threshold) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(samples.size());
}

// The network bundled as data/tableIII.json.
inline Net fixture_net() {
  Net n;
  n.pu = 0.503;
  n.pd = 0.605;
  n.cpt[0][0] = 0.023;
  n.cpt[0][1] = 0.267;
  n.cpt[1][0] = 0.093;
  n.cpt[1][1] = 0.605;
  return n;
}

// Frozen values for the fixture network.
inline constexpr double kFixtureMarginalFailure = 0.28738642;
inline constexpr double kFixturePosteriorUplink = 0.7049333785500373;
inline constexpr double kFixtureJoint111 = 0.184110575;

// Frozen accuracy for the reference rate matrix
// (tp 0.7485, tn 0.982, fp 0.018, fn 0.2515).
inline constexpr double kFixtureRateAccuracy = 0.86525;

}  // namespace oracle
