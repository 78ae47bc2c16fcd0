#include "kgeval/ranker.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <unordered_map>

#include <fmt/format.h>
#include <json.hpp>

#include "kgeval/random.hpp"

namespace kgeval {

ScoredCandidates baseline_score(const CompletionTask& task, const TypeScores& type_scores, std::size_t num_entities) {
  ScoredCandidates out{task, std::vector<double>(num_entities, 0.0), "baseline"};
  for (const auto& entry : type_scores.slot(task.relation, task.target_position())) {
    if (entry.entity < num_entities) out.scores[entry.entity] = entry.score;
  }
  return out;
}

BaselineModel::BaselineModel(std::vector<TypeRule> rules, const KnowledgeGraph& inference)
    : rules_(std::move(rules)), type_scores_(apply_rules(rules_, inference)), num_entities_(inference.num_entities()) {}

BaselineModel BaselineModel::fit(const InductiveDataset& dataset, const RuleLearningOptions& options) {
  return BaselineModel(learn_rules(dataset.train_graph.base, options), dataset.test_graph.base);
}

ScoredCandidates BaselineModel::score(const CompletionTask& task, std::size_t) const {
  return baseline_score(task, type_scores_, num_entities_);
}

ScoredCandidates PredictionModel::score(const CompletionTask& task, std::size_t task_index) const {
  if (task_index >= predictions_.size() || !(predictions_[task_index].task == task)) {
    throw std::invalid_argument(fmt::format("{}: no prediction for task {}", name_, task_index));
  }
  return predictions_[task_index];
}

ScoredCandidates RandomScoringModel::score(const CompletionTask& task, std::size_t task_index) const {
  auto rng = query_stream(seed_, task_index / 2, static_cast<std::uint64_t>(task.direction));
  ScoredCandidates out{task, std::vector<double>(num_entities_), "random"};
  for (auto& s : out.scores) s = uniform_unit(rng);
  return out;
}

namespace {

using nlohmann::json;

EntityId resolve_entity(const SymbolTable& entities, const json& value, std::size_t line_no) {
  if (!value.is_string()) throw ParseError(fmt::format("predictions line {}: entity must be a string", line_no));
  const auto& name = value.get_ref<const std::string&>();
  auto id = entities.find(name);
  if (!id) throw ParseError(fmt::format("predictions line {}: unknown entity '{}'", line_no, name));
  return *id;
}

void fill_scores(ScoredCandidates& out, const json& list, const SymbolTable& entities, std::size_t line_no) {
  if (!list.is_array()) throw ParseError(fmt::format("predictions line {}: expected a list of [entity, score]", line_no));
  std::vector<bool> seen(out.scores.size(), false);
  for (const auto& item : list) {
    if (!item.is_array() || item.size() != 2 || !item[1].is_number()) {
      throw ParseError(fmt::format("predictions line {}: expected [entity, score] pairs", line_no));
    }
    const auto entity = resolve_entity(entities, item[0], line_no);
    const double score = item[1].get<double>();
    if (!std::isfinite(score)) {
      throw ParseError(fmt::format("predictions line {}: non-finite score for '{}'", line_no, entities.name(entity)));
    }
    if (seen[entity]) {
      throw ParseError(fmt::format("predictions line {}: duplicate entity '{}'", line_no, entities.name(entity)));
    }
    seen[entity] = true;
    out.scores[entity] = score;
  }
}

}  // namespace

std::vector<ScoredCandidates> ingest_predictions(const std::filesystem::path& path, const InductiveDataset& dataset,
                                                 const std::string& source) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  const auto& test = dataset.test_graph.test;
  const auto& vocabulary = *dataset.test_graph.vocabulary;
  const auto num_entities = vocabulary.entities.size();
  const auto tasks = completion_tasks(test);

  std::unordered_map<Triple, std::size_t, TripleHash> index;
  for (std::size_t i = 0; i < test.size(); ++i) index.emplace(test[i], i);

  std::vector<ScoredCandidates> out(tasks.size());
  std::vector<bool> filled(test.size(), false);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(fmt::format("predictions line {}: {}", line_no, e.what()));
    }
    if (!record.contains("triple")) continue;  // header lines
    const auto& t = record["triple"];
    if (!t.is_array() || t.size() != 3 || !t[1].is_string()) {
      throw ParseError(fmt::format("predictions line {}: \"triple\" must be [s, p, o]", line_no));
    }
    auto relation = vocabulary.relations.find(t[1].get<std::string>());
    if (!relation) throw ParseError(fmt::format("predictions line {}: unknown relation '{}'", line_no, t[1].get<std::string>()));
    const Triple triple{resolve_entity(vocabulary.entities, t[0], line_no), *relation,
                        resolve_entity(vocabulary.entities, t[2], line_no)};
    auto it = index.find(triple);
    if (it == index.end()) {
      throw ParseError(fmt::format("predictions line {}: unmatched triple {}", line_no, format_triple(triple, vocabulary)));
    }
    const auto i = it->second;
    if (filled[i]) {
      throw ParseError(fmt::format("predictions line {}: duplicate triple {}", line_no, format_triple(triple, vocabulary)));
    }
    filled[i] = true;
    auto& tail = out[2 * i];
    auto& head = out[2 * i + 1];
    tail = {tasks[2 * i], std::vector<double>(num_entities, kUnlistedScore), source};
    head = {tasks[2 * i + 1], std::vector<double>(num_entities, kUnlistedScore), source};
    fill_scores(tail, record.value("tails", json::array()), vocabulary.entities, line_no);
    fill_scores(head, record.value("heads", json::array()), vocabulary.entities, line_no);
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!filled[i]) {
      throw ParseError(fmt::format("{}: missing prediction for test triple {}", path.string(),
                                   format_triple(test[i], vocabulary)));
    }
  }
  return out;
}

}  // namespace kgeval
