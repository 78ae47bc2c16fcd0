#include "kgeval/graph.hpp"

#include <algorithm>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

namespace kgeval {

std::uint32_t SymbolTable::intern(std::string_view name) {
  auto it = ids_.find(std::string(name));
  if (it != ids_.end()) return it->second;
  auto id = static_cast<std::uint32_t>(names_.size());
  names_.emplace_back(name);
  ids_.emplace(names_.back(), id);
  return id;
}

std::optional<std::uint32_t> SymbolTable::find(std::string_view name) const {
  auto it = ids_.find(std::string(name));
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

KnowledgeGraph::KnowledgeGraph(std::shared_ptr<const Vocabulary> vocabulary, std::vector<Triple> triples)
    : vocabulary_(std::move(vocabulary)) {
  const auto num_relations = vocabulary_->relations.size();
  const auto num_entities = vocabulary_->entities.size();
  subjects_.resize(num_relations);
  objects_.resize(num_relations);
  triples_.reserve(triples.size());
  membership_.reserve(triples.size());
  for (const auto& t : triples) {
    if (t.relation >= num_relations || t.subject >= num_entities || t.object >= num_entities) {
      throw std::out_of_range("triple references a symbol outside the vocabulary");
    }
    if (!membership_.insert(t).second) {
      ++duplicates_;
      continue;
    }
    triples_.push_back(t);
    subjects_[t.relation].push_back(t.subject);
    objects_[t.relation].push_back(t.object);
  }
  for (auto* index : {&subjects_, &objects_}) {
    for (auto& ids : *index) {
      std::sort(ids.begin(), ids.end());
      ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
      ids.shrink_to_fit();
    }
  }
}

std::span<const EntityId> KnowledgeGraph::entities_at(RelationId relation, Position position) const {
  const auto& index = position == Position::kSubject ? subjects_ : objects_;
  if (relation >= index.size()) return {};
  return index[relation];
}

std::vector<RelationId> KnowledgeGraph::occurring_relations() const {
  std::vector<RelationId> out;
  for (RelationId r = 0; r < subjects_.size(); ++r) {
    if (!subjects_[r].empty()) out.push_back(r);
  }
  return out;
}

std::size_t KnowledgeGraph::occurring_entity_count() const {
  std::vector<bool> seen(num_entities(), false);
  std::size_t count = 0;
  for (const auto& t : triples_) {
    for (auto e : {t.subject, t.object}) {
      if (!seen[e]) {
        seen[e] = true;
        ++count;
      }
    }
  }
  return count;
}

std::vector<Triple> read_triples(const std::filesystem::path& file, Vocabulary& vocabulary) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ParseError(fmt::format("cannot open {}", file.string()));
  std::vector<Triple> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::string_view view(line);
    std::string_view fields[3];
    std::size_t count = 0;
    std::size_t start = 0;
    while (true) {
      auto tab = view.find('\t', start);
      auto field = view.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
      if (count < 3) fields[count] = field;
      ++count;
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (count != 3) {
      throw ParseError(fmt::format("{}:{}: expected 3 tab-separated fields, found {}", file.string(), line_no, count));
    }
    Triple t;
    t.subject = vocabulary.entities.intern(fields[0]);
    t.relation = vocabulary.relations.intern(fields[1]);
    t.object = vocabulary.entities.intern(fields[2]);
    out.push_back(t);
  }
  return out;
}

KnowledgeGraph load_graph(const std::vector<std::filesystem::path>& files) {
  if (files.empty()) throw ParseError("no input");
  auto vocabulary = std::make_shared<Vocabulary>();
  std::vector<Triple> triples;
  for (const auto& file : files) {
    auto part = read_triples(file, *vocabulary);
    triples.insert(triples.end(), part.begin(), part.end());
  }
  KnowledgeGraph graph(std::move(vocabulary), std::move(triples));
  if (graph.duplicate_count() > 0) {
    spdlog::warn("collapsed {} duplicate triple(s)", graph.duplicate_count());
  }
  return graph;
}

namespace {

std::vector<Triple> dedup_split(std::vector<Triple> triples, std::string_view label, InductiveDataset& ds) {
  TripleSet seen;
  std::vector<Triple> out;
  out.reserve(triples.size());
  for (const auto& t : triples) {
    if (seen.insert(t).second) out.push_back(t);
  }
  if (out.size() != triples.size()) {
    ds.warnings.push_back(fmt::format("{}: collapsed {} duplicate triple(s)", label, triples.size() - out.size()));
  }
  return out;
}

void check_disjoint(const std::vector<Triple>& a, std::string_view a_label, const std::vector<Triple>& b,
                    std::string_view b_label, InductiveDataset& ds) {
  TripleSet lhs(a.begin(), a.end());
  std::size_t overlap = 0;
  for (const auto& t : b) overlap += lhs.contains(t);
  if (overlap > 0) {
    ds.warnings.push_back(fmt::format("splits {} and {} share {} triple(s)", a_label, b_label, overlap));
  }
}

SplitGraph load_split_graph(const std::filesystem::path& dir, std::string_view graph_label,
                            const std::string& base_file, const std::string& valid_file, const std::string& test_file,
                            std::string_view base_label, Vocabulary vocabulary, InductiveDataset& ds) {
  struct Part {
    const std::string& file;
    std::string label;
  };
  const Part parts[3] = {{base_file, fmt::format("{}.{}", graph_label, base_label)},
                         {valid_file, fmt::format("{}.valid", graph_label)},
                         {test_file, fmt::format("{}.test", graph_label)}};
  for (const auto& part : parts) {
    if (!std::filesystem::is_regular_file(dir / part.file)) {
      throw ParseError(fmt::format("missing split: {} ({})", part.label, (dir / part.file).string()));
    }
  }
  std::vector<Triple> splits[3];
  for (int i = 0; i < 3; ++i) {
    splits[i] = dedup_split(read_triples(dir / parts[i].file, vocabulary), parts[i].label, ds);
  }
  check_disjoint(splits[0], parts[0].label, splits[1], parts[1].label, ds);
  check_disjoint(splits[0], parts[0].label, splits[2], parts[2].label, ds);
  check_disjoint(splits[1], parts[1].label, splits[2], parts[2].label, ds);

  SplitGraph g;
  g.vocabulary = std::make_shared<const Vocabulary>(std::move(vocabulary));
  std::vector<Triple> all;
  all.reserve(splits[0].size() + splits[1].size() + splits[2].size());
  for (const auto& s : splits) all.insert(all.end(), s.begin(), s.end());
  g.base = KnowledgeGraph(g.vocabulary, splits[0]);
  g.valid = std::move(splits[1]);
  g.test = std::move(splits[2]);
  g.known = KnowledgeGraph(g.vocabulary, std::move(all));
  return g;
}

}  // namespace

InductiveDataset load_dataset(const std::filesystem::path& dir, const DatasetLayout& layout) {
  if (!std::filesystem::is_directory(dir)) {
    throw ParseError(fmt::format("not a directory: {}", dir.string()));
  }
  InductiveDataset ds;
  ds.name = dir.filename().string();
  if (ds.name.empty()) ds.name = dir.parent_path().filename().string();

  ds.train_graph = load_split_graph(dir, "train_graph", layout.train, layout.valid, layout.test, "train", {}, ds);

  Vocabulary test_vocabulary;
  test_vocabulary.relations = ds.train_graph.vocabulary->relations;
  const auto seeded_relations = test_vocabulary.relations.size();
  ds.test_graph = load_split_graph(dir, "test_graph", layout.inference, layout.valid_inductive,
                                   layout.test_inductive, "inference", std::move(test_vocabulary), ds);

  const auto& test_relations = ds.test_graph.vocabulary->relations;
  if (test_relations.size() > seeded_relations) {
    ds.warnings.push_back(fmt::format("test graph uses {} relation(s) absent from the train graph",
                                      test_relations.size() - seeded_relations));
  }
  std::size_t shared_entities = 0;
  for (const auto& name : ds.test_graph.vocabulary->entities.names()) {
    shared_entities += ds.train_graph.vocabulary->entities.find(name).has_value();
  }
  if (shared_entities > 0) {
    ds.warnings.push_back(fmt::format("train and test graph share {} entit(ies)", shared_entities));
  }
  for (const auto& w : ds.warnings) spdlog::warn("{}: {}", ds.name, w);
  return ds;
}

namespace {

GraphStats graph_stats(const SplitGraph& g) {
  GraphStats s;
  s.relations = g.known.occurring_relations().size();
  s.entities = g.known.occurring_entity_count();
  s.train = g.base.size();
  s.valid = g.valid.size();
  s.test = g.test.size();
  s.cross_split_overlap = g.base.size() + g.valid.size() + g.test.size() - g.known.size();
  return s;
}

}  // namespace

StatsReport stats(const InductiveDataset& dataset) {
  return {dataset.name, graph_stats(dataset.train_graph), graph_stats(dataset.test_graph)};
}

std::vector<CompletionTask> completion_tasks(std::span<const Triple> triples) {
  std::vector<CompletionTask> tasks;
  tasks.reserve(triples.size() * 2);
  for (const auto& t : triples) {
    tasks.push_back({Direction::kTail, t.relation, t.subject, t.object});
    tasks.push_back({Direction::kHead, t.relation, t.object, t.subject});
  }
  return tasks;
}

std::string_view to_string(Direction d) { return d == Direction::kHead ? "head" : "tail"; }

std::string_view to_string(Position p) { return p == Position::kSubject ? "subject" : "object"; }

std::string format_triple(const Triple& t, const Vocabulary& vocabulary) {
  return fmt::format("{}\t{}\t{}", vocabulary.entities.name(t.subject), vocabulary.relations.name(t.relation),
                     vocabulary.entities.name(t.object));
}

}  // namespace kgeval
