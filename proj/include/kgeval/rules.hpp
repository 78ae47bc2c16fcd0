#pragma once

// Type rules: two-atom rules h(X,.) <- b(.,.) whose shared variable X links
// a position of the body relation to a position of the head relation. They
// predict which entities fit a relation slot, i.e. an implicit entity type.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "kgeval/graph.hpp"

namespace kgeval {

// First letter: position of X in the head atom; second: in the body atom.
//   SS  h(X,A) <- b(X,B)      SO  h(X,A) <- b(B,X)
//   OS  h(A,X) <- b(X,B)      OO  h(A,X) <- b(B,X)
enum class RuleTemplate : std::uint8_t { kSS = 0, kSO = 1, kOS = 2, kOO = 3 };

inline constexpr RuleTemplate kAllTemplates[] = {RuleTemplate::kSS, RuleTemplate::kSO, RuleTemplate::kOS,
                                                 RuleTemplate::kOO};

Position head_position(RuleTemplate t);
Position body_position(RuleTemplate t);
std::string_view to_string(RuleTemplate t);
std::optional<RuleTemplate> parse_template(std::string_view s);

struct TypeRule {
  RelationId head_relation = 0;
  RelationId body_relation = 0;
  RuleTemplate rule_template = RuleTemplate::kSS;
  double confidence = 0.0;
  std::size_t support_numerator = 0;    // |X_b intersect X_h|
  std::size_t support_denominator = 0;  // |X_b|

  // Ordering key for deterministic output.
  auto key() const { return std::tuple(head_relation, body_relation, rule_template); }
  bool operator==(const TypeRule&) const = default;
};

struct RuleLearningOptions {
  std::size_t min_support = 1;
  double min_confidence = 0.0;
  unsigned threads = 1;
};

// Enumerates every ordered pair (h, b), h != b, of relations occurring in
// `train` and every template; the confidence of a rule is
// |X_b intersect X_h| / |X_b| over distinct entities. Output is sorted by
// (head, body, template).
std::vector<TypeRule> learn_rules(const KnowledgeGraph& train, const RuleLearningOptions& options = {});

// Per-slot scored entities produced by applying rules to a target graph.
class TypeScores {
 public:
  struct Entry {
    EntityId entity;
    double score;
    std::uint32_t rule;  // index into the applied rule list: smallest key among maximizers
  };

  TypeScores() = default;
  explicit TypeScores(std::size_t num_relations) : slots_(num_relations * 2) {}

  // Entries sorted by entity id. Empty for unknown slots.
  std::span<const Entry> slot(RelationId relation, Position position) const;
  std::optional<double> score(RelationId relation, Position position, EntityId entity) const;
  std::size_t num_relations() const { return slots_.size() / 2; }
  bool empty() const;

 private:
  friend TypeScores apply_rules(std::span<const TypeRule>, const KnowledgeGraph&);
  std::vector<std::vector<Entry>> slots_;
};

// Fires every rule on `target`: entities at the body position of the body
// relation receive the rule's confidence for the head relation's slot at the
// head position. Scores aggregate by max. Rules whose relations are outside
// the target's relation table fire nothing.
TypeScores apply_rules(std::span<const TypeRule> rules, const KnowledgeGraph& target);

// Rule TSV: head<TAB>template<TAB>body<TAB>confidence<TAB>num<TAB>den. Lines
// starting with '#' are comments.
void write_rules(std::ostream& out, std::span<const TypeRule> rules, const SymbolTable& relations);
std::string format_rule(const TypeRule& rule, const SymbolTable& relations);

// Reads a rule file, resolving relation names against `relations`. Rules
// mentioning a relation unknown to the table are dropped.
std::vector<TypeRule> read_rules(std::istream& in, const SymbolTable& relations);
std::vector<TypeRule> read_rules(const std::filesystem::path& path, const SymbolTable& relations);

}  // namespace kgeval
