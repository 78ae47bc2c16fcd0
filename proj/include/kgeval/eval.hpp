#pragma once

// Filtered ranking evaluation under the non-sampling, random-sampling and
// type-matched-sampling protocols.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "kgeval/graph.hpp"
#include "kgeval/negatives.hpp"
#include "kgeval/ranker.hpp"

namespace kgeval {

enum class TieMode : std::uint8_t {
  kAverage,      // 1 + #better + #tied / 2
  kPessimistic,  // 1 + #better + #tied
};

std::string_view to_string(TieMode mode);
std::optional<TieMode> parse_tie_mode(std::string_view s);

struct Protocol {
  enum class Kind : std::uint8_t { kNonSampling, kRandomSampling, kTypeMatched };

  Kind kind = Kind::kNonSampling;
  std::size_t runs = 100;
  std::size_t negatives = 49;
  std::filesystem::path tmn_file;

  static Protocol non_sampling() { return {}; }
  static Protocol random_sampling(std::size_t runs = 100, std::size_t negatives = 49) {
    return {Kind::kRandomSampling, runs, negatives, {}};
  }
  static Protocol type_matched(std::filesystem::path file) { return {Kind::kTypeMatched, 1, 50, std::move(file)}; }

  // "non-sampling", "random" or "tmn".
  std::string name() const;
  // Throws std::invalid_argument on runs < 1 or negatives < 1.
  void validate() const;
};

struct RankingRecord {
  CompletionTask task;
  double rank = 1.0;
  std::size_t candidate_count = 1;
};

// Rank of the truth among `candidates` after removing every non-truth
// candidate whose corrupted triple is in `filter`. Duplicate candidates count
// once. Throws std::invalid_argument when the truth is not a candidate.
RankingRecord filtered_rank(const ScoredCandidates& scores, std::span<const EntityId> candidates,
                            const KnowledgeGraph& filter, TieMode tie = TieMode::kAverage);

// Same, with every entity of the score vector as a candidate.
RankingRecord filtered_rank_all(const ScoredCandidates& scores, const KnowledgeGraph& filter,
                                TieMode tie = TieMode::kAverage);

// Throw std::invalid_argument on empty input.
double hits_at_k(std::span<const RankingRecord> records, double k);
double mrr(std::span<const RankingRecord> records);

struct MetricSummary {
  std::map<int, double> hits;
  double mrr = 0.0;
  std::size_t tasks = 0;
};

MetricSummary summarize(std::span<const RankingRecord> records, std::span<const int> ks);

struct MetricReport {
  std::string dataset;
  std::string model;
  std::string protocol;
  MetricSummary overall;
  MetricSummary head;
  MetricSummary tail;
  std::size_t runs = 1;
  std::string tmn_checksum;
};

struct EvalOptions {
  std::vector<int> ks = {1, 3, 10};
  std::uint64_t seed = 0;
  TieMode tie = TieMode::kAverage;
  unsigned threads = 1;
};

// Per-task filtered ranks for one run. `runs` of the random protocol are
// evaluated separately; see evaluate().
struct EvaluationRun {
  std::vector<RankingRecord> records;
};

// Scores every completion task of the test graph's test split and ranks it
// under `protocol`. Filtering uses all three splits of the test graph. For
// the random protocol each run draws fresh negatives and the per-run metrics
// are averaged. The type-matched protocol reads protocol.tmn_file.
MetricReport evaluate(const ScoringModel& model, const InductiveDataset& dataset, const Protocol& protocol,
                      const EvalOptions& options);

// Type-matched evaluation against negatives already in memory.
MetricReport evaluate_type_matched(const ScoringModel& model, const InductiveDataset& dataset,
                                   std::span<const NegativeSet> negatives, const EvalOptions& options);

// The ranking records behind evaluate(), one EvaluationRun per run.
std::vector<EvaluationRun> rank_tasks(const ScoringModel& model, const InductiveDataset& dataset,
                                      const Protocol& protocol, std::span<const NegativeSet> negatives,
                                      const EvalOptions& options);

// Unweighted mean over versions of the same model and protocol.
MetricReport average_reports(std::span<const MetricReport> reports, const std::string& dataset_label);

struct DeltaRow {
  std::string model;
  std::string protocol;
  std::string metric;  // "hits" or "mrr"
  int k = 0;           // 0 for mrr
  double value = 0.0;
  double delta = 0.0;
};

// Differences to `reference_model` per (model, protocol, metric). Throws
// std::invalid_argument when the reports span several datasets, the
// reference is absent, or a model's protocol has no reference counterpart.
std::vector<DeltaRow> compare(std::span<const MetricReport> reports, const std::string& reference_model);

}  // namespace kgeval
