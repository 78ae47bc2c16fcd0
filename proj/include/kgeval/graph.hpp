#pragma once

// Knowledge graph core: symbol interning, triple storage with per-relation
// subject/object indices, and the six-way split of an inductive benchmark.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace kgeval {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

// Thrown for malformed input files and protocol violations in user data.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Dense string <-> id mapping, ids assigned in first-appearance order.
class SymbolTable {
 public:
  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool operator==(const SymbolTable& other) const { return names_ == other.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

struct Triple {
  EntityId subject = 0;
  RelationId relation = 0;
  EntityId object = 0;

  auto operator<=>(const Triple&) const = default;
};

struct TripleHash {
  std::size_t operator()(const Triple& t) const noexcept {
    std::uint64_t h = (std::uint64_t{t.subject} << 32) ^ (std::uint64_t{t.relation} << 21) ^ t.object;
    h ^= h >> 33;
    h *= 0xff51afd7ed558ccdULL;
    h ^= h >> 33;
    return static_cast<std::size_t>(h);
  }
};

using TripleSet = std::unordered_set<Triple, TripleHash>;

enum class Position : std::uint8_t { kSubject = 0, kObject = 1 };

inline EntityId entity_at(const Triple& t, Position p) {
  return p == Position::kSubject ? t.subject : t.object;
}

// Symbols shared by every split of one graph. The test graph of a dataset
// gets its own entity table; its relation table is seeded from the train
// graph so relation ids agree across graphs.
struct Vocabulary {
  SymbolTable entities;
  SymbolTable relations;
};

// Immutable triple set over a vocabulary with per-relation indices.
class KnowledgeGraph {
 public:
  KnowledgeGraph() : vocabulary_(std::make_shared<Vocabulary>()) {}

  // Duplicate triples collapse; the number dropped is kept in duplicate_count().
  KnowledgeGraph(std::shared_ptr<const Vocabulary> vocabulary, std::vector<Triple> triples);

  const Vocabulary& vocabulary() const { return *vocabulary_; }
  const std::shared_ptr<const Vocabulary>& shared_vocabulary() const { return vocabulary_; }
  const SymbolTable& entities() const { return vocabulary_->entities; }
  const SymbolTable& relations() const { return vocabulary_->relations; }
  std::size_t num_entities() const { return vocabulary_->entities.size(); }

  std::span<const Triple> triples() const { return triples_; }
  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  std::size_t duplicate_count() const { return duplicates_; }

  bool contains(const Triple& t) const { return membership_.contains(t); }
  const TripleSet& membership() const { return membership_; }

  // Sorted, distinct entities appearing at `position` of `relation`.
  std::span<const EntityId> entities_at(RelationId relation, Position position) const;
  std::span<const EntityId> subjects_of(RelationId r) const { return entities_at(r, Position::kSubject); }
  std::span<const EntityId> objects_of(RelationId r) const { return entities_at(r, Position::kObject); }

  // Relations with at least one triple, ascending.
  std::vector<RelationId> occurring_relations() const;
  // Entities with at least one triple.
  std::size_t occurring_entity_count() const;

 private:
  std::shared_ptr<const Vocabulary> vocabulary_;
  std::vector<Triple> triples_;
  TripleSet membership_;
  std::vector<std::vector<EntityId>> subjects_;
  std::vector<std::vector<EntityId>> objects_;
  std::size_t duplicates_ = 0;
};

// Reads TSV triple files into one graph. Throws ParseError on an empty file
// list, unreadable file or a line without exactly three tab-separated fields.
KnowledgeGraph load_graph(const std::vector<std::filesystem::path>& files);

// Parses one TSV file, interning into `vocabulary`. Duplicates are kept.
std::vector<Triple> read_triples(const std::filesystem::path& file, Vocabulary& vocabulary);

struct DatasetLayout {
  std::string train = "train.txt";
  std::string valid = "valid.txt";
  std::string test = "test.txt";
  std::string inference = "train_ind.txt";
  std::string valid_inductive = "valid_ind.txt";
  std::string test_inductive = "test_ind.txt";
};

// One side of an inductive dataset. `base` holds the training split (train
// graph) or the inference split (test graph); `known` is the union of all
// three splits.
struct SplitGraph {
  std::shared_ptr<const Vocabulary> vocabulary;
  KnowledgeGraph base;
  std::vector<Triple> valid;
  std::vector<Triple> test;
  KnowledgeGraph known;
};

struct InductiveDataset {
  std::string name;
  SplitGraph train_graph;
  SplitGraph test_graph;
  std::vector<std::string> warnings;
};

// Loads the GraIL release layout from `dir`. Integrity problems (overlapping
// splits, shared entities, unseen relations) are recorded as warnings.
InductiveDataset load_dataset(const std::filesystem::path& dir, const DatasetLayout& layout = {});

struct GraphStats {
  std::size_t relations = 0;
  std::size_t entities = 0;
  std::size_t train = 0;  // train split, or inference split for the test graph
  std::size_t valid = 0;
  std::size_t test = 0;
  std::size_t cross_split_overlap = 0;  // triples present in more than one split
};

struct StatsReport {
  std::string dataset;
  GraphStats train_graph;
  GraphStats test_graph;
  // One #R per version, taken from the train graph.
  std::size_t relations() const { return train_graph.relations; }
};

StatsReport stats(const InductiveDataset& dataset);

enum class Direction : std::uint8_t { kHead = 0, kTail = 1 };

// p(s,?) is a tail task anchored at s; p(?,o) is a head task anchored at o.
struct CompletionTask {
  Direction direction = Direction::kTail;
  RelationId relation = 0;
  EntityId anchor = 0;
  EntityId truth = 0;

  // Position of the missing entity.
  Position target_position() const {
    return direction == Direction::kTail ? Position::kObject : Position::kSubject;
  }
  // The triple obtained by putting `candidate` into the missing slot.
  Triple corrupt(EntityId candidate) const {
    return direction == Direction::kTail ? Triple{anchor, relation, candidate}
                                         : Triple{candidate, relation, anchor};
  }

  bool operator==(const CompletionTask&) const = default;
};

// Tail task then head task for every triple, in input order.
std::vector<CompletionTask> completion_tasks(std::span<const Triple> triples);

std::string_view to_string(Direction d);
std::string_view to_string(Position p);
std::string format_triple(const Triple& t, const Vocabulary& vocabulary);

}  // namespace kgeval
