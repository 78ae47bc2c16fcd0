#include "commands.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "kgeval/eval.hpp"
#include "kgeval/graph.hpp"
#include "kgeval/negatives.hpp"
#include "kgeval/ranker.hpp"
#include "kgeval/report.hpp"
#include "kgeval/rules.hpp"

namespace kgeval::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Everything that determines a command's output. Serialized into every file
// the command writes.
struct RunConfig {
  std::string command;
  std::vector<std::string> datasets;
  std::vector<std::string> versions;
  DatasetLayout layout;
  std::string protocol = "non-sampling";
  std::size_t runs = 100;
  std::optional<std::size_t> num_negatives;
  std::string tmn_file;
  std::vector<int> ks = {1, 3, 10};
  std::optional<std::uint64_t> seed;
  std::string model = "baseline";
  std::string rules_file;
  std::size_t min_support = 1;
  double min_confidence = 0.0;
  std::string tie = "average";
  std::string reference;
  std::vector<std::string> report_files;
  std::string out;
  unsigned threads = 1;

  json to_json() const {
    json j = {{"command", command}, {"tool", "kgeval"}};
    auto put_datasets = [&] {
      j["datasets"] = datasets;
      j["versions"] = versions;
      j["layout"] = {{"train", layout.train},
                     {"valid", layout.valid},
                     {"test", layout.test},
                     {"inference", layout.inference},
                     {"valid_inductive", layout.valid_inductive},
                     {"test_inductive", layout.test_inductive}};
    };
    if (command == "stats") {
      put_datasets();
    } else if (command == "learn-rules") {
      put_datasets();
      j["min_support"] = min_support;
      j["min_confidence"] = min_confidence;
    } else if (command == "gen-negatives") {
      put_datasets();
      j["rules"] = rules_file.empty() ? "auto" : rules_file;
      j["min_support"] = min_support;
      j["min_confidence"] = min_confidence;
      j["num_negatives"] = num_negatives.value_or(50);
      j["seed"] = seed ? json(*seed) : json(nullptr);
    } else if (command == "evaluate") {
      put_datasets();
      j["protocol"] = protocol;
      j["runs"] = runs;
      j["num_negatives"] = num_negatives.value_or(49);
      j["tmn_file"] = tmn_file;
      j["k"] = ks;
      j["seed"] = seed ? json(*seed) : json(nullptr);
      j["model"] = model;
      j["min_support"] = min_support;
      j["min_confidence"] = min_confidence;
      j["tie"] = tie;
    } else if (command == "compare") {
      j["reports"] = report_files;
      j["reference"] = reference;
    }
    return j;
  }
};

std::vector<fs::path> dataset_dirs(const RunConfig& config) {
  std::vector<fs::path> dirs;
  for (const auto& d : config.datasets) {
    if (config.versions.empty()) {
      dirs.emplace_back(d);
    } else {
      for (const auto& v : config.versions) dirs.emplace_back(fmt::format("{}_{}", d, v));
    }
  }
  if (dirs.empty()) throw UsageError("--dataset is required");
  return dirs;
}

std::string substitute(std::string pattern, const std::string& dataset) {
  const std::string key = "{dataset}";
  for (auto pos = pattern.find(key); pos != std::string::npos; pos = pattern.find(key, pos + dataset.size())) {
    pattern.replace(pos, key.size(), dataset);
  }
  return pattern;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write {}", path.string()));
  return out;
}

RuleLearningOptions rule_options(const RunConfig& config) {
  return {config.min_support, config.min_confidence, config.threads};
}

int cmd_stats(const RunConfig& config, std::ostream& out) {
  std::vector<StatsReport> reports;
  for (const auto& dir : dataset_dirs(config)) {
    reports.push_back(stats(load_dataset(dir, config.layout)));
  }
  const auto table = stats_table(reports);
  out << table;
  if (!config.out.empty()) {
    json j = {{"config", config.to_json()}, {"reports", json::array()}};
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
    open_output(config.out + ".json") << j.dump(2) << '\n';
    open_output(config.out + ".txt") << "# config: " << config.to_json().dump() << '\n' << table;
  }
  return kOk;
}

InductiveDataset single_dataset(const RunConfig& config) {
  auto dirs = dataset_dirs(config);
  if (dirs.size() != 1) throw UsageError(fmt::format("{} takes exactly one dataset", config.command));
  return load_dataset(dirs.front(), config.layout);
}

int cmd_learn_rules(const RunConfig& config, std::ostream& out) {
  if (config.out.empty()) throw UsageError("--out is required");
  auto file = open_output(config.out);
  const auto dataset = single_dataset(config);
  const auto rules = learn_rules(dataset.train_graph.base, rule_options(config));
  file << "# config: " << config.to_json().dump() << '\n';
  write_rules(file, rules, dataset.train_graph.vocabulary->relations);
  out << fmt::format("{}: {} rule(s) -> {}\n", dataset.name, rules.size(), config.out);
  return kOk;
}

int cmd_gen_negatives(const RunConfig& config, std::ostream& out) {
  if (!config.seed) throw UsageError("--seed is required for negative sampling");
  if (config.out.empty()) throw UsageError("--out is required");
  const auto dataset = single_dataset(config);
  auto rules = config.rules_file.empty() || config.rules_file == "auto"
                   ? learn_rules(dataset.train_graph.base, rule_options(config))
                   : read_rules(fs::path(config.rules_file), dataset.test_graph.vocabulary->relations);
  const auto type_scores = apply_rules(rules, dataset.test_graph.base);
  TmnOptions options{config.num_negatives.value_or(50), *config.seed, config.threads};
  const auto sets = generate_tmn(dataset, type_scores, options);
  auto file = open_output(config.out);
  file << json{{"config", config.to_json()}}.dump() << '\n';
  write_tmn(file, sets, *dataset.test_graph.vocabulary);
  const auto undersized = std::count_if(sets.begin(), sets.end(), [](const NegativeSet& s) {
    return s.head_undersized || s.tail_undersized;
  });
  out << fmt::format("{}: {} test triple(s), {} undersized -> {}\n", dataset.name, sets.size(), undersized,
                     config.out);
  return kOk;
}

Protocol protocol_of(const RunConfig& config, const std::string& dataset) {
  if (config.protocol == "non-sampling") return Protocol::non_sampling();
  if (config.protocol == "random") {
    if (!config.seed) throw UsageError("--seed is required for the random protocol");
    return Protocol::random_sampling(config.runs, config.num_negatives.value_or(49));
  }
  if (config.protocol == "tmn") {
    if (config.tmn_file.empty()) throw UsageError("--protocol tmn requires --tmn-file");
    return Protocol::type_matched(substitute(config.tmn_file, dataset));
  }
  throw UsageError(fmt::format("unknown protocol '{}'", config.protocol));
}

std::unique_ptr<ScoringModel> model_of(const RunConfig& config, const InductiveDataset& dataset) {
  if (config.model == "baseline") {
    return std::make_unique<BaselineModel>(BaselineModel::fit(dataset, rule_options(config)));
  }
  if (config.model == "random") {
    return std::make_unique<RandomScoringModel>(dataset.test_graph.vocabulary->entities.size(),
                                                config.seed.value_or(0));
  }
  const std::string prefix = "predictions:";
  if (config.model.starts_with(prefix)) {
    auto path = substitute(config.model.substr(prefix.size()), dataset.name);
    auto name = fs::path(path).stem().string();
    return std::make_unique<PredictionModel>(name, ingest_predictions(path, dataset, name));
  }
  throw UsageError(fmt::format("unknown model '{}'", config.model));
}

std::string average_label(const std::vector<MetricReport>& reports) {
  auto stem = [](const std::string& name) {
    auto pos = name.rfind('_');
    return pos == std::string::npos ? name : name.substr(0, pos);
  };
  const auto first = stem(reports.front().dataset);
  bool same = std::all_of(reports.begin(), reports.end(), [&](const auto& r) { return stem(r.dataset) == first; });
  return same ? first + "_avg" : "avg";
}

int cmd_evaluate(const RunConfig& config, std::ostream& out) {
  auto tie = parse_tie_mode(config.tie);
  if (!tie) throw UsageError(fmt::format("unknown tie mode '{}'", config.tie));
  if (config.ks.empty() || std::any_of(config.ks.begin(), config.ks.end(), [](int k) { return k < 1; })) {
    throw UsageError("--k values must be positive");
  }
  // Validate protocol flags before touching any data.
  protocol_of(config, "");
  EvalOptions options{config.ks, config.seed.value_or(0), *tie, config.threads};

  std::vector<MetricReport> reports;
  for (const auto& dir : dataset_dirs(config)) {
    const auto dataset = load_dataset(dir, config.layout);
    const auto protocol = protocol_of(config, dataset.name);
    const auto model = model_of(config, dataset);
    auto report = evaluate(*model, dataset, protocol, options);
    if (protocol.kind == Protocol::Kind::kTypeMatched) report.tmn_checksum = sha256_file(protocol.tmn_file);
    reports.push_back(std::move(report));
  }
  std::optional<MetricReport> average;
  if (reports.size() > 1) average = average_reports(reports, average_label(reports));

  std::vector<MetricReport> shown = reports;
  if (average) shown.push_back(*average);
  out << report_table(shown);
  if (!config.out.empty()) {
    json j = {{"config", config.to_json()}, {"reports", json::array()}};
    for (const auto& r : reports) j["reports"].push_back(to_json(r));
    if (average) j["average"] = to_json(*average);
    open_output(config.out + ".json") << j.dump(2) << '\n';
    auto csv = open_output(config.out + ".csv");
    csv << "# config: " << config.to_json().dump() << '\n';
    write_report_csv(csv, shown);
  }
  return kOk;
}

// The headline report of an evaluate output file: its average when several
// versions were evaluated, otherwise its single report.
MetricReport headline_report(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot open {}", path.string()));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw std::runtime_error(fmt::format("{}: {}", path.string(), e.what()));
  }
  if (j.contains("average")) return report_from_json(j["average"]);
  if (j.contains("reports") && j["reports"].size() == 1) return report_from_json(j["reports"][0]);
  if (j.contains("model")) return report_from_json(j);
  throw std::runtime_error(fmt::format("{}: no single headline report", path.string()));
}

int cmd_compare(const RunConfig& config, std::ostream& out) {
  if (config.report_files.empty()) throw UsageError("compare needs at least one report file");
  if (config.reference.empty()) throw UsageError("--reference is required");
  std::vector<MetricReport> reports;
  for (const auto& f : config.report_files) reports.push_back(headline_report(f));
  const auto rows = compare(reports, config.reference);
  std::ostringstream csv;
  write_delta_csv(csv, rows);
  if (config.out.empty()) {
    out << csv.str();
  } else {
    auto file = open_output(config.out);
    file << "# config: " << config.to_json().dump() << '\n' << csv.str();
    out << fmt::format("{} row(s) -> {}\n", rows.size(), config.out);
  }
  return kOk;
}

void add_dataset_options(CLI::App& cmd, RunConfig& config, bool many) {
  auto* dataset = cmd.add_option("--dataset", config.datasets, many ? "benchmark directory (repeatable)"
                                                                     : "benchmark directory");
  dataset->required()->envname("KGEVAL_DATASET");
  if (!many) dataset->expected(1);
  cmd.add_option("--versions", config.versions, "versions appended as <dataset>_<version>")
      ->delimiter(',')
      ->envname("KGEVAL_VERSIONS");
  cmd.add_option("--train-file", config.layout.train)->capture_default_str();
  cmd.add_option("--valid-file", config.layout.valid)->capture_default_str();
  cmd.add_option("--test-file", config.layout.test)->capture_default_str();
  cmd.add_option("--inference-file", config.layout.inference)->capture_default_str();
  cmd.add_option("--valid-ind-file", config.layout.valid_inductive)->capture_default_str();
  cmd.add_option("--test-ind-file", config.layout.test_inductive)->capture_default_str();
}

void add_rule_options(CLI::App& cmd, RunConfig& config) {
  cmd.add_option("--min-support", config.min_support, "minimum |X_b intersect X_h|")
      ->capture_default_str()
      ->envname("KGEVAL_MIN_SUPPORT");
  cmd.add_option("--min-confidence", config.min_confidence, "minimum rule confidence")
      ->capture_default_str()
      ->envname("KGEVAL_MIN_CONFIDENCE");
}

void add_threads_option(CLI::App& cmd, RunConfig& config) {
  cmd.add_option("--threads", config.threads, "worker threads")
      ->check(CLI::Range(1u, 1024u))
      ->capture_default_str()
      ->envname("KGEVAL_THREADS");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inductive link prediction evaluation: type-rule baseline, type-matched negatives, ranking protocols", "kgeval"};
  app.require_subcommand(1);
  RunConfig config;

  auto* stats_cmd = app.add_subcommand("stats", "dataset statistics per graph and split");
  add_dataset_options(*stats_cmd, config, true);
  stats_cmd->add_option("--out", config.out, "output prefix (.json, .txt)");

  auto* learn_cmd = app.add_subcommand("learn-rules", "learn type rules on the train graph");
  add_dataset_options(*learn_cmd, config, false);
  add_rule_options(*learn_cmd, config);
  add_threads_option(*learn_cmd, config);
  learn_cmd->add_option("--out", config.out, "rule TSV file")->required();

  auto* neg_cmd = app.add_subcommand("gen-negatives", "generate type-matched negatives for the test split");
  add_dataset_options(*neg_cmd, config, false);
  add_rule_options(*neg_cmd, config);
  add_threads_option(*neg_cmd, config);
  neg_cmd->add_option("--rules", config.rules_file, "rule TSV file, or 'auto' to learn rules")->default_str("auto");
  neg_cmd->add_option("--num-negatives", config.num_negatives, "negatives per query (default 50)")
      ->envname("KGEVAL_NUM_NEGATIVES");
  neg_cmd->add_option("--seed", config.seed, "master seed")->envname("KGEVAL_SEED");
  neg_cmd->add_option("--out", config.out, "TMN JSONL file")->required();

  auto* eval_cmd = app.add_subcommand("evaluate", "rank the test split under a protocol");
  add_dataset_options(*eval_cmd, config, true);
  add_rule_options(*eval_cmd, config);
  add_threads_option(*eval_cmd, config);
  eval_cmd->add_option("--protocol", config.protocol)
      ->check(CLI::IsMember({"non-sampling", "random", "tmn"}))
      ->capture_default_str()
      ->envname("KGEVAL_PROTOCOL");
  eval_cmd->add_option("--runs", config.runs, "runs of the random protocol")
      ->check(CLI::PositiveNumber)
      ->capture_default_str()
      ->envname("KGEVAL_RUNS");
  eval_cmd->add_option("--num-negatives", config.num_negatives, "random negatives per query (default 49)")
      ->check(CLI::PositiveNumber)
      ->envname("KGEVAL_NUM_NEGATIVES");
  eval_cmd->add_option("--tmn-file", config.tmn_file, "TMN JSONL; {dataset} expands to the directory name")
      ->envname("KGEVAL_TMN_FILE");
  eval_cmd->add_option("--k", config.ks, "hits@k cutoffs")->delimiter(',')->capture_default_str();
  eval_cmd->add_option("--seed", config.seed, "master seed")->envname("KGEVAL_SEED");
  eval_cmd->add_option("--model", config.model, "baseline | random | predictions:<path>")
      ->capture_default_str()
      ->envname("KGEVAL_MODEL");
  eval_cmd->add_option("--tie", config.tie)
      ->check(CLI::IsMember({"average", "pessimistic"}))
      ->capture_default_str()
      ->envname("KGEVAL_TIE");
  eval_cmd->add_option("--out", config.out, "output prefix (.json, .csv)");

  auto* cmp_cmd = app.add_subcommand("compare", "metric deltas against a reference model");
  cmp_cmd->add_option("reports", config.report_files, "evaluate JSON outputs")->required();
  cmp_cmd->add_option("--reference", config.reference, "reference model name")->required();
  cmp_cmd->add_option("--out", config.out, "delta CSV file");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (stats_cmd->parsed()) {
      config.command = "stats";
      return cmd_stats(config, out);
    }
    if (learn_cmd->parsed()) {
      config.command = "learn-rules";
      return cmd_learn_rules(config, out);
    }
    if (neg_cmd->parsed()) {
      config.command = "gen-negatives";
      return cmd_gen_negatives(config, out);
    }
    if (eval_cmd->parsed()) {
      config.command = "evaluate";
      return cmd_evaluate(config, out);
    }
    if (cmp_cmd->parsed()) {
      config.command = "compare";
      return cmd_compare(config, out);
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace kgeval::cli
