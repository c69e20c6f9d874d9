// Command-line front end for the latency failure model library.
//
// Subcommands: simulate, ingest, export, analyze, fit, infer, eval, report.
// Store resolution order: --store flag, run config, LFM_STORE env, default.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "lfm/lfm.hpp"

namespace {

constexpr const char* kDefaultStore = "lfm_store.jsonl";

struct RunConfig {
  std::optional<std::string> store;
  lfm::ThresholdConfig thresholds;
  lfm::SplitOptions split;
  double decision_threshold = 0.5;
  std::optional<std::string> report_path;
  std::string report_format = "json";
  double clock_offset_seconds = 0.0;
};

lfm::SplitPolicy parse_split_policy(const std::string& name) {
  if (name == "chronological") return lfm::SplitPolicy::chronological;
  if (name == "seeded_shuffle") return lfm::SplitPolicy::seeded_shuffle;
  throw lfm::Error(lfm::Errc::invalid_config,
                   "split policy must be \"chronological\" or \"seeded_shuffle\"");
}

const char* split_policy_name(lfm::SplitPolicy policy) {
  return policy == lfm::SplitPolicy::chronological ? "chronological" : "seeded_shuffle";
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw lfm::Error(lfm::Errc::store_io, "cannot open run config " + path);
  }
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw lfm::Error(lfm::Errc::invalid_config, std::string("bad run config: ") + e.what());
  }
  if (!j.is_object()) {
    throw lfm::Error(lfm::Errc::invalid_config, "run config must be a JSON object");
  }
  RunConfig config;
  try {
    if (j.contains("store")) config.store = j.at("store").get<std::string>();
    if (j.contains("thresholds")) {
      const auto& t = j.at("thresholds");
      if (t.contains("uplink_seconds")) {
        config.thresholds.uplink_seconds = t.at("uplink_seconds").get<double>();
      }
      if (t.contains("downlink_seconds")) {
        config.thresholds.downlink_seconds = t.at("downlink_seconds").get<double>();
      }
    }
    if (j.contains("split")) {
      const auto& s = j.at("split");
      if (s.contains("fraction")) config.split.fraction = s.at("fraction").get<double>();
      if (s.contains("policy")) {
        config.split.policy = parse_split_policy(s.at("policy").get<std::string>());
      }
      if (s.contains("seed")) config.split.seed = s.at("seed").get<std::uint64_t>();
    }
    if (j.contains("decision_threshold")) {
      config.decision_threshold = j.at("decision_threshold").get<double>();
    }
    if (j.contains("report")) {
      const auto& r = j.at("report");
      if (r.contains("path")) config.report_path = r.at("path").get<std::string>();
      if (r.contains("format")) config.report_format = r.at("format").get<std::string>();
    }
    if (j.contains("clock_offset_seconds")) {
      config.clock_offset_seconds = j.at("clock_offset_seconds").get<double>();
    }
  } catch (const lfm::Error&) {
    throw;
  } catch (const std::exception& e) {
    throw lfm::Error(lfm::Errc::invalid_config, std::string("bad run config: ") + e.what());
  }
  config.thresholds.validate();
  config.split.validate();
  return config;
}

std::string resolve_store(const std::string& cli_store, const RunConfig& config) {
  if (!cli_store.empty()) return cli_store;
  if (config.store) return *config.store;
  if (const char* env = std::getenv("LFM_STORE"); env != nullptr && *env != '\0') return env;
  return kDefaultStore;
}

// --- output rendering ---------------------------------------------------------

std::string fmt3(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.3f", v);
  return buf;
}

void flatten(const nlohmann::json& j, const std::string& prefix, const char* sep,
             bool three_decimals, std::string& out) {
  if (j.is_object()) {
    for (const auto& [key, value] : j.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, sep, three_decimals, out);
    }
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      flatten(j[i], prefix + "[" + std::to_string(i) + "]", sep, three_decimals, out);
    }
  } else {
    out += prefix;
    out += sep;
    if (three_decimals && j.is_number_float()) {
      out += fmt3(j.get<double>());
    } else if (j.is_string()) {
      out += j.get<std::string>();
    } else {
      out += j.dump();
    }
    out += '\n';
  }
}

// json: pretty document.  text: "key = value" lines, floats at 3 decimals.
// csv: "key,value" lines with JSON-encoded values.
std::string render(const nlohmann::json& doc, const std::string& format) {
  if (format == "json") return doc.dump(2) + "\n";
  std::string out;
  if (format == "text") {
    flatten(doc, "", " = ", true, out);
    return out;
  }
  if (format == "csv") {
    out = "key,value\n";
    flatten(doc, "", ",", false, out);
    return out;
  }
  throw lfm::Error(lfm::Errc::invalid_config,
                   "format must be \"json\", \"text\", or \"csv\"");
}

void write_or_print(const nlohmann::json& doc, const std::string& format,
                    const std::optional<std::string>& path) {
  const std::string body = render(doc, format);
  if (!path) {
    std::cout << body;
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw lfm::Error(lfm::Errc::store_io, "cannot write " + *path);
  }
  out << body;
  if (!out) {
    throw lfm::Error(lfm::Errc::store_io, "write failed on " + *path);
  }
}

// --- shared pipeline pieces ------------------------------------------------------

std::vector<lfm::TransmissionRecord> read_store_records(const std::string& store) {
  auto result = lfm::store_read(store);
  for (const auto& issue : result.issues) {
    std::cerr << "warning: " << store << " line " << issue.line << ": skipped ("
              << issue.message << ")\n";
  }
  return std::move(result.records);
}

nlohmann::json analysis_document(const std::string& store,
                                 const std::vector<lfm::TransmissionRecord>& records,
                                 const lfm::ThresholdConfig& thresholds) {
  const auto samples = lfm::compute_latencies(records);
  const auto series = lfm::threshold_series(samples, thresholds);

  const auto direction_doc = [&](const lfm::ExceedanceDataset& set) {
    nlohmann::json doc{{"samples", set.indicators.size()},
                       {"threshold_seconds", set.threshold_seconds}};
    std::vector<double> latencies;
    for (const auto& s : samples) {
      if (s.direction == set.direction) latencies.push_back(s.latency_seconds);
    }
    if (!set.indicators.empty()) {
      doc["exceed_count"] = set.exceed_count();
      doc["exceed_fraction"] = set.exceed_fraction();
      const auto summary = lfm::summarize_latencies(latencies);
      doc["latency_seconds"] = {{"min", summary.min}, {"max", summary.max},
                                {"mean", summary.mean}, {"p50", summary.p50},
                                {"p95", summary.p95}};
    }
    return doc;
  };

  return nlohmann::json{
      {"store", store},
      {"records", records.size()},
      {"uplink", direction_doc(series.uplink)},
      {"downlink", direction_doc(series.downlink)},
  };
}

struct FitOutcome {
  lfm::BeliefNetwork network;
  lfm::CptFitResult cpt_fit;
  std::size_t train_count = 0;
  std::size_t test_count = 0;
};

// Priors and CPT both come from the training share of the labeled triples, so
// the fitted network and a later evaluation agree on what "training data" means.
FitOutcome fit_from_records(const std::vector<lfm::TransmissionRecord>& records,
                            const lfm::ThresholdConfig& thresholds,
                            const lfm::SplitOptions& split) {
  const auto triples = lfm::labeled_triples(records, thresholds);
  if (triples.empty()) {
    throw lfm::Error(lfm::Errc::empty_dataset, "store has no labeled records to fit from");
  }
  const auto parts = lfm::split_train_test(triples, split);
  FitOutcome outcome;
  outcome.train_count = parts.train.size();
  outcome.test_count = parts.test.size();
  double uplink_sum = 0.0;
  double downlink_sum = 0.0;
  for (const auto& t : parts.train) {
    uplink_sum += t.uplink;
    downlink_sum += t.downlink;
  }
  const auto n = static_cast<double>(parts.train.size());
  outcome.network.p_uplink_exceed = uplink_sum / n;
  outcome.network.p_downlink_exceed = downlink_sum / n;
  outcome.cpt_fit = lfm::fit_failure_cpt(parts.train);
  outcome.network.failure_cpt = outcome.cpt_fit.cpt;
  outcome.network.validate();
  return outcome;
}

nlohmann::json fit_document(const FitOutcome& outcome) {
  nlohmann::json cells = nlohmann::json::object();
  nlohmann::json defaulted = nlohmann::json::array();
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      const auto i = lfm::FailureCpt::index(u, d);
      const std::string key = std::to_string(u) + "," + std::to_string(d);
      cells[key] = {{"total", outcome.cpt_fit.cell_total[i]},
                    {"failures", outcome.cpt_fit.cell_failures[i]}};
      if (outcome.cpt_fit.defaulted[i]) defaulted.push_back(key);
    }
  }
  return nlohmann::json{
      {"network", lfm::network_to_json(outcome.network)},
      {"train_triples", outcome.train_count},
      {"test_triples", outcome.test_count},
      {"cell_counts", std::move(cells)},
      {"defaulted_cells", std::move(defaulted)},
  };
}

std::string fit_text(const FitOutcome& outcome, const std::string& out_path) {
  std::string text;
  text += "P(U=1) = " + fmt3(outcome.network.p_uplink_exceed) + "\n";
  text += "P(D=1) = " + fmt3(outcome.network.p_downlink_exceed) + "\n";
  for (int u = 0; u < 2; ++u) {
    for (int d = 0; d < 2; ++d) {
      text += "P(F=1|U=" + std::to_string(u) + ",D=" + std::to_string(d) +
              ") = " + fmt3(outcome.network.failure_cpt(u, d)) + "\n";
    }
  }
  text += "train_triples = " + std::to_string(outcome.train_count) + "\n";
  text += "test_triples = " + std::to_string(outcome.test_count) + "\n";
  text += "written = " + out_path + "\n";
  return text;
}

nlohmann::json infer_document(const lfm::BeliefNetwork& net, std::optional<int> uplink,
                              std::optional<int> downlink) {
  net.validate();
  if (uplink && downlink) {
    return nlohmann::json{
        {"evidence", {{"uplink", *uplink}, {"downlink", *downlink}}},
        {"conditional_failure", lfm::conditional_failure_probability(net, *uplink, *downlink)},
    };
  }
  if (uplink || downlink) {
    // One parent observed: average the CPT over the other parent's prior.
    double p = 0.0;
    for (int other = 0; other < 2; ++other) {
      if (uplink) {
        const double pd = other == 1 ? net.p_downlink_exceed : 1.0 - net.p_downlink_exceed;
        p += pd * net.failure_cpt(*uplink, other);
      } else {
        const double pu = other == 1 ? net.p_uplink_exceed : 1.0 - net.p_uplink_exceed;
        p += pu * net.failure_cpt(other, *downlink);
      }
    }
    nlohmann::json evidence = nlohmann::json::object();
    if (uplink) evidence["uplink"] = *uplink;
    if (downlink) evidence["downlink"] = *downlink;
    return nlohmann::json{{"evidence", std::move(evidence)}, {"conditional_failure", p}};
  }
  const double marginal = lfm::marginal_failure_probability(net);
  nlohmann::json doc{{"marginal_failure", marginal}};
  if (marginal > 0.0) {
    const auto posterior = lfm::posterior_parents_given_failure(net);
    nlohmann::json cells = nlohmann::json::object();
    for (int u = 0; u < 2; ++u) {
      for (int d = 0; d < 2; ++d) {
        cells[std::to_string(u) + "," + std::to_string(d)] = posterior(u, d);
      }
    }
    doc["posterior_given_failure"] = {{"cells", std::move(cells)},
                                      {"uplink", posterior.marginal_uplink()},
                                      {"downlink", posterior.marginal_downlink()}};
  }
  return doc;
}

std::string infer_text(const nlohmann::json& doc) {
  std::string text;
  if (doc.contains("marginal_failure")) {
    text += "P(F=1) = " + fmt3(doc.at("marginal_failure").get<double>()) + "\n";
    if (doc.contains("posterior_given_failure")) {
      const auto& post = doc.at("posterior_given_failure");
      text += "P(U=1|F=1) = " + fmt3(post.at("uplink").get<double>()) + "\n";
      text += "P(D=1|F=1) = " + fmt3(post.at("downlink").get<double>()) + "\n";
    }
    return text;
  }
  text += "P(F=1|evidence) = " + fmt3(doc.at("conditional_failure").get<double>()) + "\n";
  return text;
}

nlohmann::json eval_document(const std::vector<lfm::TransmissionRecord>& records,
                             const RunConfig& run, const std::string& network_path) {
  const auto triples = lfm::labeled_triples(records, run.thresholds);
  if (triples.empty()) {
    throw lfm::Error(lfm::Errc::empty_dataset, "store has no labeled records to evaluate");
  }
  lfm::EvaluationReport report;
  nlohmann::json extras;
  if (!network_path.empty()) {
    // Externally supplied network: every labeled triple is test data.
    const auto net = lfm::load_network(network_path);
    report = lfm::evaluate(net, triples, run.decision_threshold);
    extras = {{"network_source", network_path},
              {"train_triples", 0},
              {"test_triples", triples.size()}};
  } else {
    const auto parts = lfm::split_train_test(triples, run.split);
    if (parts.test.empty()) {
      throw lfm::Error(lfm::Errc::empty_dataset,
                       "split left no test observations; lower the split fraction");
    }
    FitOutcome outcome = fit_from_records(records, run.thresholds, run.split);
    report = lfm::evaluate(outcome.network, parts.test, run.decision_threshold);
    extras = {{"network_source", "fitted"},
              {"train_triples", parts.train.size()},
              {"test_triples", parts.test.size()}};
  }
  nlohmann::json doc = lfm::evaluation_to_json(report);
  doc.update(extras);
  return doc;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latency failure model for Class-C LoRaWAN links"};
  app.require_subcommand(1);

  std::string cli_store;
  std::string run_config_path;
  std::string format = "json";
  app.add_option("-s,--store", cli_store, "Path to the JSON-lines transmission store");
  app.add_option("-c,--config", run_config_path, "Run configuration JSON file");
  app.add_option("-f,--format", format, "Output format: json, text, or csv")
      ->check(CLI::IsMember({"json", "text", "csv"}));

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "Generate synthetic traffic into the store");
  std::string sim_config_path;
  std::string sim_out;
  std::string sim_truth;
  std::optional<std::uint64_t> sim_seed;
  sim_cmd->add_option("--config", sim_config_path, "Simulation parameter JSON file");
  sim_cmd->add_option("--out", sim_out, "Destination store (defaults to the resolved store)");
  sim_cmd->add_option("--seed", sim_seed, "Override the configured seed");
  sim_cmd->add_option("--truth", sim_truth, "Ground truth path (default: <out>.truth.json)");

  // ingest
  auto* ingest_cmd = app.add_subcommand("ingest", "Validate a CSV file and append it");
  std::string ingest_csv;
  std::optional<double> ingest_offset;
  ingest_cmd->add_option("--csv", ingest_csv, "CSV file of transmission records")->required();
  ingest_cmd->add_option("--clock-offset", ingest_offset,
                         "Seconds to add to device timestamps before cleaning");

  // export
  auto* export_cmd = app.add_subcommand("export", "Write store contents back out as CSV");
  std::string export_out;
  std::string export_direction;
  std::string export_device;
  std::string export_from;
  std::string export_to;
  export_cmd->add_option("--out", export_out, "Output CSV path (default: stdout)");
  export_cmd->add_option("--direction", export_direction, "Keep only uplink or downlink")
      ->check(CLI::IsMember({"uplink", "downlink"}));
  export_cmd->add_option("--device", export_device, "Keep only this device id");
  export_cmd->add_option("--from", export_from,
                         "Keep device timestamps at or after this UTC instant");
  export_cmd->add_option("--to", export_to, "Keep device timestamps before this UTC instant");

  // analyze
  auto* analyze_cmd =
      app.add_subcommand("analyze", "Latency summaries and exceedance fractions");
  std::optional<double> uplink_threshold;
  std::optional<double> downlink_threshold;
  analyze_cmd->add_option("--uplink-threshold", uplink_threshold,
                          "Uplink exceedance threshold in seconds");
  analyze_cmd->add_option("--downlink-threshold", downlink_threshold,
                          "Downlink exceedance threshold in seconds");

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "Fit the belief network from the store");
  std::string fit_out = "network.json";
  std::optional<double> fit_fraction;
  std::optional<std::string> fit_policy;
  std::optional<std::uint64_t> fit_seed;
  fit_cmd->add_option("--out", fit_out, "Where to write the fitted network JSON");
  fit_cmd->add_option("--split-fraction", fit_fraction, "Training share, strictly in (0,1)");
  fit_cmd->add_option("--split-policy", fit_policy, "chronological or seeded_shuffle")
      ->check(CLI::IsMember({"chronological", "seeded_shuffle"}));
  fit_cmd->add_option("--split-seed", fit_seed, "Seed for the seeded_shuffle policy");
  fit_cmd->add_option("--uplink-threshold", uplink_threshold,
                      "Uplink exceedance threshold in seconds");
  fit_cmd->add_option("--downlink-threshold", downlink_threshold,
                      "Downlink exceedance threshold in seconds");

  // infer
  auto* infer_cmd = app.add_subcommand("infer", "Query a fitted network");
  std::string infer_network;
  std::optional<int> infer_uplink;
  std::optional<int> infer_downlink;
  infer_cmd->add_option("--network", infer_network, "Network JSON file")->required();
  infer_cmd->add_option("--uplink", infer_uplink, "Observed uplink exceedance (0 or 1)")
      ->check(CLI::Range(0, 1));
  infer_cmd->add_option("--downlink", infer_downlink, "Observed downlink exceedance (0 or 1)")
      ->check(CLI::Range(0, 1));

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "Score the model on held-out data");
  std::string eval_network;
  std::optional<double> eval_threshold;
  eval_cmd->add_option("--network", eval_network,
                       "Score this network on all labeled data instead of refitting");
  eval_cmd->add_option("--decision-threshold", eval_threshold,
                       "Failure probability above which the model predicts failure");
  eval_cmd->add_option("--split-fraction", fit_fraction, "Training share, strictly in (0,1)");
  eval_cmd->add_option("--split-policy", fit_policy, "chronological or seeded_shuffle")
      ->check(CLI::IsMember({"chronological", "seeded_shuffle"}));
  eval_cmd->add_option("--split-seed", fit_seed, "Seed for the seeded_shuffle policy");
  eval_cmd->add_option("--uplink-threshold", uplink_threshold,
                       "Uplink exceedance threshold in seconds");
  eval_cmd->add_option("--downlink-threshold", downlink_threshold,
                       "Downlink exceedance threshold in seconds");

  // report
  auto* report_cmd =
      app.add_subcommand("report", "Combined analysis, fit, and evaluation document");
  std::string report_out;
  report_cmd->add_option("--out", report_out, "Report path (default: run config, else stdout)");
  report_cmd->add_option("--split-fraction", fit_fraction, "Training share, strictly in (0,1)");
  report_cmd->add_option("--split-policy", fit_policy, "chronological or seeded_shuffle")
      ->check(CLI::IsMember({"chronological", "seeded_shuffle"}));
  report_cmd->add_option("--split-seed", fit_seed, "Seed for the seeded_shuffle policy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    RunConfig run;
    if (!run_config_path.empty()) run = load_run_config(run_config_path);
    if (uplink_threshold) run.thresholds.uplink_seconds = *uplink_threshold;
    if (downlink_threshold) run.thresholds.downlink_seconds = *downlink_threshold;
    if (fit_fraction) run.split.fraction = *fit_fraction;
    if (fit_policy) run.split.policy = parse_split_policy(*fit_policy);
    if (fit_seed) run.split.seed = *fit_seed;
    if (eval_threshold) run.decision_threshold = *eval_threshold;
    run.thresholds.validate();
    run.split.validate();
    const std::string store = resolve_store(cli_store, run);

    if (sim_cmd->parsed()) {
      lfm::SimulationConfig config;
      if (!sim_config_path.empty()) config = lfm::load_simulation_config(sim_config_path);
      if (sim_seed) config.seed = *sim_seed;
      const auto output = lfm::simulate(config);
      const std::string destination = sim_out.empty() ? store : sim_out;
      const std::size_t appended = lfm::replay_to_store(destination, output);
      const std::string truth_path =
          sim_truth.empty() ? destination + ".truth.json" : sim_truth;
      {
        std::ofstream truth(truth_path, std::ios::binary | std::ios::trunc);
        if (!truth) {
          throw lfm::Error(lfm::Errc::store_io, "cannot write " + truth_path);
        }
        truth << lfm::ground_truth_to_json(config, output).dump(2) << '\n';
      }
      write_or_print(
          nlohmann::json{{"store", destination},
                         {"appended", appended},
                         {"truth", truth_path},
                         {"summary",
                          {{"record_count", output.summary.record_count},
                           {"uplink_count", output.summary.uplink_count},
                           {"downlink_count", output.summary.downlink_count},
                           {"uplink_dropped", output.summary.uplink_dropped},
                           {"downlink_dropped", output.summary.downlink_dropped},
                           {"uplink_exceed_count", output.summary.uplink_exceed_count},
                           {"downlink_exceed_count", output.summary.downlink_exceed_count},
                           {"failure_count", output.summary.failure_count}}}},
          format, std::nullopt);
      return 0;
    }

    if (ingest_cmd->parsed()) {
      std::ifstream in(ingest_csv, std::ios::binary);
      if (!in) {
        throw lfm::Error(lfm::Errc::store_io, "cannot open csv file " + ingest_csv);
      }
      std::string text((std::istreambuf_iterator<char>(in)),
                       std::istreambuf_iterator<char>());
      auto records = lfm::parse_csv(text);
      const double offset = ingest_offset.value_or(run.clock_offset_seconds);
      if (offset != 0.0) records = lfm::apply_clock_offset(records, offset);
      const auto cleaned = lfm::clean(records);
      const std::size_t appended = lfm::store_append(store, cleaned.kept);
      std::size_t negative = 0;
      std::size_t duplicate = 0;
      for (const auto& d : cleaned.dropped) {
        if (d.reason == lfm::kDropReasonNegativeLatency) ++negative;
        if (d.reason == lfm::kDropReasonDuplicate) ++duplicate;
      }
      write_or_print(nlohmann::json{{"store", store},
                                    {"parsed", records.size()},
                                    {"appended", appended},
                                    {"clock_offset_seconds", offset},
                                    {"dropped",
                                     {{"negative latency", negative},
                                      {"duplicate", duplicate}}}},
                     format, std::nullopt);
      return 0;
    }

    if (export_cmd->parsed()) {
      lfm::ExportFilter filter;
      if (!export_direction.empty()) filter.direction = *lfm::parse_direction(export_direction);
      if (!export_device.empty()) filter.device_id = export_device;
      if (!export_from.empty()) {
        const auto parsed = lfm::parse_utc(export_from);
        if (!parsed) {
          throw lfm::Error(lfm::Errc::invalid_config, "--from is not a valid UTC timestamp");
        }
        filter.from = *parsed;
      }
      if (!export_to.empty()) {
        const auto parsed = lfm::parse_utc(export_to);
        if (!parsed) {
          throw lfm::Error(lfm::Errc::invalid_config, "--to is not a valid UTC timestamp");
        }
        filter.to = *parsed;
      }
      std::vector<lfm::StoreIssue> issues;
      const std::string csv = lfm::store_export_csv(store, filter, &issues);
      for (const auto& issue : issues) {
        std::cerr << "warning: " << store << " line " << issue.line << ": skipped ("
                  << issue.message << ")\n";
      }
      if (export_out.empty()) {
        std::cout << csv;
      } else {
        std::ofstream out(export_out, std::ios::binary | std::ios::trunc);
        if (!out) {
          throw lfm::Error(lfm::Errc::store_io, "cannot write " + export_out);
        }
        out << csv;
        if (!out) {
          throw lfm::Error(lfm::Errc::store_io, "write failed on " + export_out);
        }
      }
      return 0;
    }

    if (analyze_cmd->parsed()) {
      const auto records = read_store_records(store);
      if (records.empty()) {
        throw lfm::Error(lfm::Errc::empty_dataset, "store " + store + " has no records");
      }
      write_or_print(analysis_document(store, records, run.thresholds), format, std::nullopt);
      return 0;
    }

    if (fit_cmd->parsed()) {
      const auto records = read_store_records(store);
      const auto outcome = fit_from_records(records, run.thresholds, run.split);
      lfm::save_network(fit_out, outcome.network);
      if (format == "text") {
        std::cout << fit_text(outcome, fit_out);
      } else {
        nlohmann::json doc = fit_document(outcome);
        doc["written"] = fit_out;
        write_or_print(doc, format, std::nullopt);
      }
      return 0;
    }

    if (infer_cmd->parsed()) {
      const auto net = lfm::load_network(infer_network);
      const auto doc = infer_document(net, infer_uplink, infer_downlink);
      if (format == "text") {
        std::cout << infer_text(doc);
      } else {
        write_or_print(doc, format, std::nullopt);
      }
      return 0;
    }

    if (eval_cmd->parsed()) {
      const auto records = read_store_records(store);
      write_or_print(eval_document(records, run, eval_network), format, std::nullopt);
      return 0;
    }

    if (report_cmd->parsed()) {
      const auto records = read_store_records(store);
      if (records.empty()) {
        throw lfm::Error(lfm::Errc::empty_dataset, "store " + store + " has no records");
      }
      const auto outcome = fit_from_records(records, run.thresholds, run.split);
      nlohmann::json doc{
          {"analysis", analysis_document(store, records, run.thresholds)},
          {"fit", fit_document(outcome)},
          {"evaluation", eval_document(records, run, "")},
      };
      std::optional<std::string> path;
      if (!report_out.empty()) {
        path = report_out;
      } else if (run.report_path) {
        path = *run.report_path;
      }
      const std::string report_format =
          app.count("--format") > 0 ? format : run.report_format;
      write_or_print(doc, report_format, path);
      if (path) std::cout << "report written to " << *path << "\n";
      return 0;
    }
  } catch (const lfm::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.is_io() ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
