#include "kgeval/eval.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

#include <fmt/format.h>

#include "kgeval/parallel.hpp"
#include "kgeval/random.hpp"

namespace kgeval {

std::string_view to_string(TieMode mode) { return mode == TieMode::kAverage ? "average" : "pessimistic"; }

std::optional<TieMode> parse_tie_mode(std::string_view s) {
  if (s == "average") return TieMode::kAverage;
  if (s == "pessimistic") return TieMode::kPessimistic;
  return std::nullopt;
}

std::string Protocol::name() const {
  switch (kind) {
    case Kind::kNonSampling: return "non-sampling";
    case Kind::kRandomSampling: return "random";
    case Kind::kTypeMatched: return "tmn";
  }
  return "unknown";
}

void Protocol::validate() const {
  if (runs < 1) throw std::invalid_argument("protocol needs at least one run");
  if (negatives < 1) throw std::invalid_argument("protocol needs at least one negative");
  if (kind == Kind::kTypeMatched && tmn_file.empty()) {
    throw std::invalid_argument("type-matched protocol needs a negatives file");
  }
}

namespace {

class RankCounter {
 public:
  explicit RankCounter(double truth_score) : truth_score_(truth_score) {}

  void add(double score) {
    ++candidates_;
    if (score > truth_score_) {
      ++better_;
    } else if (score == truth_score_) {
      ++tied_;
    }
  }

  RankingRecord finish(const CompletionTask& task, TieMode tie) const {
    const double tied_share = tie == TieMode::kAverage ? static_cast<double>(tied_) / 2.0 : static_cast<double>(tied_);
    return {task, 1.0 + static_cast<double>(better_) + tied_share, candidates_ + 1};
  }

 private:
  double truth_score_;
  std::size_t better_ = 0;
  std::size_t tied_ = 0;
  std::size_t candidates_ = 0;  // excluding the truth
};

}  // namespace

RankingRecord filtered_rank(const ScoredCandidates& scores, std::span<const EntityId> candidates,
                            const KnowledgeGraph& filter, TieMode tie) {
  const auto& task = scores.task;
  if (task.truth >= scores.scores.size() ||
      std::find(candidates.begin(), candidates.end(), task.truth) == candidates.end()) {
    throw std::invalid_argument("truth is not among the candidates");
  }
  std::vector<EntityId> unique(candidates.begin(), candidates.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

  RankCounter counter(scores.scores[task.truth]);
  for (auto e : unique) {
    if (e == task.truth) continue;
    if (e >= scores.scores.size()) throw std::out_of_range("candidate outside the score vector");
    if (filter.contains(task.corrupt(e))) continue;
    counter.add(scores.scores[e]);
  }
  return counter.finish(task, tie);
}

RankingRecord filtered_rank_all(const ScoredCandidates& scores, const KnowledgeGraph& filter, TieMode tie) {
  const auto& task = scores.task;
  if (task.truth >= scores.scores.size()) throw std::invalid_argument("truth is not among the candidates");
  RankCounter counter(scores.scores[task.truth]);
  for (EntityId e = 0; e < scores.scores.size(); ++e) {
    if (e == task.truth || filter.contains(task.corrupt(e))) continue;
    counter.add(scores.scores[e]);
  }
  return counter.finish(task, tie);
}

double hits_at_k(std::span<const RankingRecord> records, double k) {
  if (records.empty()) throw std::invalid_argument("hits@k of an empty record set");
  std::size_t hits = 0;
  for (const auto& r : records) hits += r.rank <= k;
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

double mrr(std::span<const RankingRecord> records) {
  if (records.empty()) throw std::invalid_argument("MRR of an empty record set");
  double sum = 0.0;
  for (const auto& r : records) sum += 1.0 / r.rank;
  return sum / static_cast<double>(records.size());
}

MetricSummary summarize(std::span<const RankingRecord> records, std::span<const int> ks) {
  MetricSummary s;
  s.tasks = records.size();
  if (records.empty()) return s;
  for (int k : ks) s.hits[k] = hits_at_k(records, k);
  s.mrr = mrr(records);
  return s;
}

std::vector<EvaluationRun> rank_tasks(const ScoringModel& model, const InductiveDataset& dataset,
                                      const Protocol& protocol, std::span<const NegativeSet> negatives,
                                      const EvalOptions& options) {
  protocol.validate();
  const auto& test = dataset.test_graph.test;
  const auto& filter = dataset.test_graph.known;
  const auto num_entities = dataset.test_graph.vocabulary->entities.size();
  const auto tasks = completion_tasks(test);
  const bool random = protocol.kind == Protocol::Kind::kRandomSampling;
  const auto runs = random ? protocol.runs : 1;
  if (protocol.kind == Protocol::Kind::kTypeMatched && negatives.size() != test.size()) {
    throw std::invalid_argument(
        fmt::format("negatives cover {} triple(s), test split has {}", negatives.size(), test.size()));
  }

  std::vector<EvaluationRun> out(runs);
  for (auto& run : out) run.records.resize(tasks.size());
  parallel_for(tasks.size(), options.threads, [&](std::size_t i) {
    const auto& task = tasks[i];
    auto scored = model.score(task, i);
    if (!(scored.task == task) || scored.scores.size() != num_entities) {
      throw std::runtime_error(fmt::format("model {} returned scores for the wrong task", model.name()));
    }
    switch (protocol.kind) {
      case Protocol::Kind::kNonSampling:
        out[0].records[i] = filtered_rank_all(scored, filter, options.tie);
        break;
      case Protocol::Kind::kRandomSampling:
        for (std::size_t r = 0; r < runs; ++r) {
          auto rng = query_stream(options.seed, i / 2, static_cast<std::uint64_t>(task.direction), r);
          auto sampled = gen_random_negatives(task, num_entities, protocol.negatives, rng);
          sampled.entities.push_back(task.truth);
          out[r].records[i] = filtered_rank(scored, sampled.entities, filter, options.tie);
        }
        break;
      case Protocol::Kind::kTypeMatched: {
        const auto& set = negatives[i / 2];
        if (set.triple != test[i / 2]) throw std::invalid_argument("negatives are not aligned with the test split");
        std::vector<EntityId> candidates =
            task.direction == Direction::kTail ? set.tail_negatives : set.head_negatives;
        candidates.push_back(task.truth);
        out[0].records[i] = filtered_rank(scored, candidates, filter, options.tie);
        break;
      }
    }
  });
  return out;
}

namespace {

MetricReport report_from_runs(const std::vector<EvaluationRun>& runs, const std::string& dataset,
                              const std::string& model, const Protocol& protocol, const EvalOptions& options) {
  std::vector<MetricReport> per_run;
  per_run.reserve(runs.size());
  for (const auto& run : runs) {
    MetricReport r;
    std::vector<RankingRecord> heads;
    std::vector<RankingRecord> tails;
    for (const auto& rec : run.records) (rec.task.direction == Direction::kHead ? heads : tails).push_back(rec);
    r.overall = summarize(run.records, options.ks);
    r.head = summarize(heads, options.ks);
    r.tail = summarize(tails, options.ks);
    per_run.push_back(std::move(r));
  }
  MetricReport report = average_reports(per_run, dataset);
  // Runs share one task set; the averaged counts describe a single run.
  report.overall.tasks = per_run.front().overall.tasks;
  report.head.tasks = per_run.front().head.tasks;
  report.tail.tasks = per_run.front().tail.tasks;
  report.model = model;
  report.protocol = protocol.name();
  report.runs = runs.size();
  return report;
}

}  // namespace

MetricReport evaluate(const ScoringModel& model, const InductiveDataset& dataset, const Protocol& protocol,
                      const EvalOptions& options) {
  protocol.validate();
  if (protocol.kind == Protocol::Kind::kTypeMatched) {
    auto negatives = read_tmn(protocol.tmn_file, dataset);
    return evaluate_type_matched(model, dataset, negatives, options);
  }
  return report_from_runs(rank_tasks(model, dataset, protocol, {}, options), dataset.name, model.name(), protocol,
                          options);
}

MetricReport evaluate_type_matched(const ScoringModel& model, const InductiveDataset& dataset,
                                   std::span<const NegativeSet> negatives, const EvalOptions& options) {
  auto protocol = Protocol::type_matched("<memory>");
  return report_from_runs(rank_tasks(model, dataset, protocol, negatives, options), dataset.name, model.name(),
                          protocol, options);
}

namespace {

MetricSummary mean_summary(std::span<const MetricReport> reports, MetricSummary MetricReport::*field) {
  MetricSummary out;
  const auto n = static_cast<double>(reports.size());
  for (const auto& r : reports) {
    const auto& s = r.*field;
    for (const auto& [k, v] : s.hits) out.hits[k] += v / n;
    out.mrr += s.mrr / n;
    out.tasks += s.tasks;
  }
  return out;
}

}  // namespace

MetricReport average_reports(std::span<const MetricReport> reports, const std::string& dataset_label) {
  if (reports.empty()) throw std::invalid_argument("no reports to average");
  for (const auto& r : reports) {
    if (r.model != reports.front().model || r.protocol != reports.front().protocol) {
      throw std::invalid_argument("averaged reports must share model and protocol");
    }
    if (r.overall.hits.size() != reports.front().overall.hits.size()) {
      throw std::invalid_argument("averaged reports must share the hits@k cutoffs");
    }
  }
  MetricReport out;
  out.dataset = dataset_label;
  out.model = reports.front().model;
  out.protocol = reports.front().protocol;
  out.runs = reports.front().runs;
  out.overall = mean_summary(reports, &MetricReport::overall);
  out.head = mean_summary(reports, &MetricReport::head);
  out.tail = mean_summary(reports, &MetricReport::tail);
  return out;
}

std::vector<DeltaRow> compare(std::span<const MetricReport> reports, const std::string& reference_model) {
  if (reports.empty()) throw std::invalid_argument("no reports to compare");
  for (const auto& r : reports) {
    if (r.dataset != reports.front().dataset) {
      throw std::invalid_argument(fmt::format("reports span datasets {} and {}", reports.front().dataset, r.dataset));
    }
  }
  std::map<std::string, const MetricReport*> reference;
  for (const auto& r : reports) {
    if (r.model == reference_model) reference[r.protocol] = &r;
  }
  if (reference.empty()) throw std::invalid_argument(fmt::format("reference model {} not found", reference_model));

  std::vector<DeltaRow> rows;
  for (const auto& r : reports) {
    auto it = reference.find(r.protocol);
    if (it == reference.end()) {
      throw std::invalid_argument(
          fmt::format("no {} report for reference {} to compare {} against", r.protocol, reference_model, r.model));
    }
    const auto& ref = it->second->overall;
    for (const auto& [k, v] : r.overall.hits) {
      auto rk = ref.hits.find(k);
      if (rk == ref.hits.end()) {
        throw std::invalid_argument(fmt::format("reference lacks hits@{} for protocol {}", k, r.protocol));
      }
      rows.push_back({r.model, r.protocol, "hits", k, v, v - rk->second});
    }
    rows.push_back({r.model, r.protocol, "mrr", 0, r.overall.mrr, r.overall.mrr - ref.mrr});
  }
  return rows;
}

}  // namespace kgeval
