#pragma once

// Scoring sources for completion tasks: the type-rule baseline, external
// prediction files, and a uniform random scorer used for sanity checks.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "kgeval/graph.hpp"
#include "kgeval/rules.hpp"

namespace kgeval {

// Score assigned to entities an external model did not list.
inline constexpr double kUnlistedScore = -std::numeric_limits<double>::infinity();

// Dense scores over every entity of the task's graph.
struct ScoredCandidates {
  CompletionTask task;
  std::vector<double> scores;
  std::string source;
};

// Scores for p(s,?) come from the (p, object) slot, for p(?,o) from the
// (p, subject) slot. Entities without a firing rule score 0.
ScoredCandidates baseline_score(const CompletionTask& task, const TypeScores& type_scores, std::size_t num_entities);

// A model that scores the completion tasks of one dataset's test split.
// `task_index` is the position in completion_tasks(test split).
class ScoringModel {
 public:
  virtual ~ScoringModel() = default;
  virtual std::string name() const = 0;
  virtual ScoredCandidates score(const CompletionTask& task, std::size_t task_index) const = 0;
};

class BaselineModel final : public ScoringModel {
 public:
  BaselineModel(std::vector<TypeRule> rules, const KnowledgeGraph& inference);

  // Learns rules on the train split of the train graph and applies them to
  // the inference split of the test graph.
  static BaselineModel fit(const InductiveDataset& dataset, const RuleLearningOptions& options = {});

  std::string name() const override { return "baseline"; }
  ScoredCandidates score(const CompletionTask& task, std::size_t task_index) const override;

  const std::vector<TypeRule>& rules() const { return rules_; }
  const TypeScores& type_scores() const { return type_scores_; }

 private:
  std::vector<TypeRule> rules_;
  TypeScores type_scores_;
  std::size_t num_entities_;
};

// Reads a prediction JSONL file for the test split of `dataset`. One line per
// test triple: {"triple":[s,p,o],"heads":[[e,score],...],"tails":[[e,score],...]}.
// The result holds two entries per test triple in completion_tasks order;
// unlisted entities score kUnlistedScore.
std::vector<ScoredCandidates> ingest_predictions(const std::filesystem::path& path, const InductiveDataset& dataset,
                                                 const std::string& source = "predictions");

class PredictionModel final : public ScoringModel {
 public:
  PredictionModel(std::string name, std::vector<ScoredCandidates> predictions)
      : name_(std::move(name)), predictions_(std::move(predictions)) {}

  std::string name() const override { return name_; }
  ScoredCandidates score(const CompletionTask& task, std::size_t task_index) const override;

 private:
  std::string name_;
  std::vector<ScoredCandidates> predictions_;
};

// i.i.d. uniform scores in [0, 1), seeded per task.
class RandomScoringModel final : public ScoringModel {
 public:
  RandomScoringModel(std::size_t num_entities, std::uint64_t seed) : num_entities_(num_entities), seed_(seed) {}

  std::string name() const override { return "random"; }
  ScoredCandidates score(const CompletionTask& task, std::size_t task_index) const override;

 private:
  std::size_t num_entities_;
  std::uint64_t seed_;
};

}  // namespace kgeval
