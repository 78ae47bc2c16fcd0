#include "kgeval/rules.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "kgeval/parallel.hpp"

namespace kgeval {

Position head_position(RuleTemplate t) {
  return (t == RuleTemplate::kSS || t == RuleTemplate::kSO) ? Position::kSubject : Position::kObject;
}

Position body_position(RuleTemplate t) {
  return (t == RuleTemplate::kSS || t == RuleTemplate::kOS) ? Position::kSubject : Position::kObject;
}

std::string_view to_string(RuleTemplate t) {
  switch (t) {
    case RuleTemplate::kSS: return "SS";
    case RuleTemplate::kSO: return "SO";
    case RuleTemplate::kOS: return "OS";
    case RuleTemplate::kOO: return "OO";
  }
  return "??";
}

std::optional<RuleTemplate> parse_template(std::string_view s) {
  for (auto t : kAllTemplates) {
    if (to_string(t) == s) return t;
  }
  return std::nullopt;
}

namespace {

std::size_t intersection_size(std::span<const EntityId> a, std::span<const EntityId> b) {
  std::size_t n = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++n;
      ++i;
      ++j;
    }
  }
  return n;
}

}  // namespace

std::vector<TypeRule> learn_rules(const KnowledgeGraph& train, const RuleLearningOptions& options) {
  const auto relations = train.occurring_relations();
  std::vector<std::vector<TypeRule>> per_head(relations.size());
  parallel_for(relations.size(), options.threads, [&](std::size_t hi) {
    const RelationId head = relations[hi];
    auto& out = per_head[hi];
    for (RelationId body : relations) {
      if (body == head) continue;
      for (auto tmpl : kAllTemplates) {
        auto body_entities = train.entities_at(body, body_position(tmpl));
        auto head_entities = train.entities_at(head, head_position(tmpl));
        const auto den = body_entities.size();
        if (den == 0) continue;
        const auto num = intersection_size(body_entities, head_entities);
        const double confidence = static_cast<double>(num) / static_cast<double>(den);
        if (num < options.min_support || confidence < options.min_confidence) continue;
        out.push_back({head, body, tmpl, confidence, num, den});
      }
    }
  });
  std::vector<TypeRule> rules;
  for (auto& part : per_head) rules.insert(rules.end(), part.begin(), part.end());
  return rules;
}

std::span<const TypeScores::Entry> TypeScores::slot(RelationId relation, Position position) const {
  const auto index = std::size_t{relation} * 2 + static_cast<std::size_t>(position);
  if (index >= slots_.size()) return {};
  return slots_[index];
}

std::optional<double> TypeScores::score(RelationId relation, Position position, EntityId entity) const {
  auto entries = slot(relation, position);
  auto it = std::lower_bound(entries.begin(), entries.end(), entity,
                             [](const Entry& e, EntityId id) { return e.entity < id; });
  if (it == entries.end() || it->entity != entity) return std::nullopt;
  return it->score;
}

bool TypeScores::empty() const {
  return std::all_of(slots_.begin(), slots_.end(), [](const auto& s) { return s.empty(); });
}

TypeScores apply_rules(std::span<const TypeRule> rules, const KnowledgeGraph& target) {
  const auto num_relations = target.relations().size();
  TypeScores scores(num_relations);
  // Apply in key order so the first maximizer seen is the smallest key.
  std::vector<std::uint32_t> order(rules.size());
  for (std::uint32_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return rules[a].key() < rules[b].key(); });

  std::vector<std::vector<std::pair<double, std::uint32_t>>> dense(num_relations * 2);
  for (auto ri : order) {
    const auto& rule = rules[ri];
    if (rule.head_relation >= num_relations || rule.body_relation >= num_relations) continue;
    auto fired = target.entities_at(rule.body_relation, body_position(rule.rule_template));
    if (fired.empty()) continue;
    auto& slot = dense[std::size_t{rule.head_relation} * 2 + static_cast<std::size_t>(head_position(rule.rule_template))];
    if (slot.empty()) slot.assign(target.num_entities(), {-1.0, 0});
    for (auto e : fired) {
      if (rule.confidence > slot[e].first) slot[e] = {rule.confidence, ri};
    }
  }
  for (std::size_t s = 0; s < dense.size(); ++s) {
    for (EntityId e = 0; e < dense[s].size(); ++e) {
      if (dense[s][e].first >= 0.0) scores.slots_[s].push_back({e, dense[s][e].first, dense[s][e].second});
    }
  }
  return scores;
}

std::string format_rule(const TypeRule& rule, const SymbolTable& relations) {
  return fmt::format("{}\t{}\t{}\t{}\t{}\t{}", relations.name(rule.head_relation), to_string(rule.rule_template),
                     relations.name(rule.body_relation), rule.confidence, rule.support_numerator,
                     rule.support_denominator);
}

void write_rules(std::ostream& out, std::span<const TypeRule> rules, const SymbolTable& relations) {
  for (const auto& rule : rules) out << format_rule(rule, relations) << '\n';
}

namespace {

template <typename T>
T parse_number(std::string_view s, std::size_t line_no) {
  T value{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("rule file line {}: bad number '{}'", line_no, s));
  }
  return value;
}

}  // namespace

std::vector<TypeRule> read_rules(std::istream& in, const SymbolTable& relations) {
  std::vector<TypeRule> rules;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string_view> fields;
    std::string_view view(line);
    std::size_t start = 0;
    for (auto tab = view.find('\t'); ; tab = view.find('\t', start)) {
      fields.push_back(view.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (fields.size() != 6) {
      throw ParseError(fmt::format("rule file line {}: expected 6 fields, found {}", line_no, fields.size()));
    }
    auto tmpl = parse_template(fields[1]);
    if (!tmpl) throw ParseError(fmt::format("rule file line {}: unknown template '{}'", line_no, fields[1]));
    auto head = relations.find(fields[0]);
    auto body = relations.find(fields[2]);
    TypeRule rule;
    rule.rule_template = *tmpl;
    rule.confidence = parse_number<double>(fields[3], line_no);
    rule.support_numerator = parse_number<std::size_t>(fields[4], line_no);
    rule.support_denominator = parse_number<std::size_t>(fields[5], line_no);
    if (rule.support_denominator == 0 || rule.confidence < 0.0 || rule.confidence > 1.0) {
      throw ParseError(fmt::format("rule file line {}: invalid confidence", line_no));
    }
    if (!head || !body) continue;
    rule.head_relation = *head;
    rule.body_relation = *body;
    rules.push_back(rule);
  }
  return rules;
}

std::vector<TypeRule> read_rules(const std::filesystem::path& path, const SymbolTable& relations) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  return read_rules(in, relations);
}

}  // namespace kgeval
