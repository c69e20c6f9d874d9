#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "json.hpp"
#include "lfm/analysis.hpp"
#include "lfm/error.hpp"
#include "lfm/model.hpp"

namespace lfm {

// --- confusion counts and rates ------------------------------------------------

// Positive class is "failure" (label 1).
struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + tn + fp + fn; }
};

// Class-conditional rates: tp_rate + fn_rate = 1 over actual positives,
// tn_rate + fp_rate = 1 over actual negatives (when those classes are present).
struct RateMatrix {
  double tp_rate = 0.0;
  double tn_rate = 0.0;
  double fp_rate = 0.0;
  double fn_rate = 0.0;
};

inline ConfusionMatrix confusion_matrix(std::span<const std::uint8_t> predicted,
                                        std::span<const std::uint8_t> actual) {
  if (predicted.size() != actual.size()) {
    throw Error(Errc::length_mismatch, "predicted and actual label sequences differ in length");
  }
  if (predicted.empty()) {
    throw Error(Errc::empty_dataset, "no labels to score");
  }
  ConfusionMatrix m;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    const bool p = predicted[i] != 0;
    const bool a = actual[i] != 0;
    if (p && a) {
      ++m.tp;
    } else if (!p && !a) {
      ++m.tn;
    } else if (p && !a) {
      ++m.fp;
    } else {
      ++m.fn;
    }
  }
  return m;
}

inline RateMatrix to_rates(const ConfusionMatrix& m) {
  const double positives = static_cast<double>(m.tp + m.fn);
  const double negatives = static_cast<double>(m.tn + m.fp);
  RateMatrix r;
  if (positives > 0.0) {
    r.tp_rate = static_cast<double>(m.tp) / positives;
    r.fn_rate = static_cast<double>(m.fn) / positives;
  }
  if (negatives > 0.0) {
    r.tn_rate = static_cast<double>(m.tn) / negatives;
    r.fp_rate = static_cast<double>(m.fp) / negatives;
  }
  return r;
}

inline double accuracy(const ConfusionMatrix& m) {
  if (m.total() == 0) {
    throw Error(Errc::empty_matrix, "confusion matrix has no entries");
  }
  return static_cast<double>(m.tp + m.tn) / static_cast<double>(m.total());
}

// Accuracy over class-conditional rates: (tp_rate + tn_rate) normalised by the
// sum of all four rates.  With both classes present the denominator is 2.
inline double accuracy(const RateMatrix& r) {
  const double denom = r.tp_rate + r.tn_rate + r.fp_rate + r.fn_rate;
  if (denom <= 0.0) {
    throw Error(Errc::empty_matrix, "rate matrix has no mass");
  }
  return (r.tp_rate + r.tn_rate) / denom;
}

// --- end-to-end evaluation -------------------------------------------------------

struct PriorPair {
  double uplink = 0.0;
  double downlink = 0.0;
};

struct EvaluationReport {
  ConfusionMatrix confusion;
  RateMatrix rates;
  double accuracy = 0.0;       // count-based, over the test set
  double rate_accuracy = 0.0;  // from class-conditional rates
  PriorPair train_priors;      // the network's parent probabilities
  PriorPair test_priors;       // empirical exceedance shares in the test set
  FailureCpt train_cpt;        // the network's CPT
  FailureCpt test_cpt;         // CPT refit on the test set alone
  std::array<std::uint64_t, 4> test_cell_counts{};
  double decision_threshold = 0.5;
};

// Scores the fitted network against held-out triples.  Prediction for a triple
// is "failure" when the CPT entry for its parent state reaches the decision
// threshold.
inline EvaluationReport evaluate(const BeliefNetwork& net,
                                 std::span<const LabeledTriple> test_triples,
                                 double decision_threshold = 0.5) {
  net.validate();
  detail::check_probability(decision_threshold, "decision_threshold");
  if (test_triples.empty()) {
    throw Error(Errc::empty_dataset, "no test observations to evaluate against");
  }

  std::vector<std::uint8_t> predicted;
  std::vector<std::uint8_t> actual;
  predicted.reserve(test_triples.size());
  actual.reserve(test_triples.size());
  double uplink_sum = 0.0;
  double downlink_sum = 0.0;
  for (const auto& t : test_triples) {
    const double p_fail = net.failure_cpt(t.uplink, t.downlink);
    predicted.push_back(p_fail >= decision_threshold ? 1 : 0);
    actual.push_back(t.failure);
    uplink_sum += t.uplink;
    downlink_sum += t.downlink;
  }

  EvaluationReport report;
  report.decision_threshold = decision_threshold;
  report.confusion = confusion_matrix(predicted, actual);
  report.rates = to_rates(report.confusion);
  report.accuracy = accuracy(report.confusion);
  report.rate_accuracy = accuracy(report.rates);
  report.train_priors = {net.p_uplink_exceed, net.p_downlink_exceed};
  const auto n = static_cast<double>(test_triples.size());
  report.test_priors = {uplink_sum / n, downlink_sum / n};
  report.train_cpt = net.failure_cpt;
  const CptFitResult test_fit = fit_failure_cpt(test_triples);
  report.test_cpt = test_fit.cpt;
  report.test_cell_counts = test_fit.cell_total;
  return report;
}

inline nlohmann::json evaluation_to_json(const EvaluationReport& report) {
  nlohmann::json cpt_train = nlohmann::json::object();
  nlohmann::json cpt_test = nlohmann::json::object();
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      cpt_train[detail::cpt_key(u, d)] = report.train_cpt(u, d);
      cpt_test[detail::cpt_key(u, d)] = report.test_cpt(u, d);
    }
  }
  return nlohmann::json{
      {"confusion",
       {{"tp", report.confusion.tp},
        {"tn", report.confusion.tn},
        {"fp", report.confusion.fp},
        {"fn", report.confusion.fn}}},
      {"rates",
       {{"tp", report.rates.tp_rate},
        {"tn", report.rates.tn_rate},
        {"fp", report.rates.fp_rate},
        {"fn", report.rates.fn_rate}}},
      {"accuracy", report.accuracy},
      {"rate_accuracy", report.rate_accuracy},
      {"priors",
       {{"train", {{"u", report.train_priors.uplink}, {"d", report.train_priors.downlink}}},
        {"test", {{"u", report.test_priors.uplink}, {"d", report.test_priors.downlink}}}}},
      {"cpt", {{"train", std::move(cpt_train)}, {"test", std::move(cpt_test)}}},
      {"decision_threshold", report.decision_threshold},
  };
}

}  // namespace lfm
