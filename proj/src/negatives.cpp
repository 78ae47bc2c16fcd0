#include "kgeval/negatives.hpp"

#include <algorithm>
#include <fstream>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>
#include <spdlog/spdlog.h>

#include "kgeval/parallel.hpp"
#include "kgeval/random.hpp"

namespace kgeval {

std::string_view to_string(Provenance p) {
  switch (p) {
    case Provenance::kBucketHigh: return "bucket_high";
    case Provenance::kBucketMid: return "bucket_mid";
    case Provenance::kBucketLow: return "bucket_low";
    case Provenance::kRandomFill: return "random_fill";
  }
  return "unknown";
}

Provenance bucket_of(double confidence) {
  if (confidence >= kHighBucketMin) return Provenance::kBucketHigh;
  if (confidence >= kMidBucketMin) return Provenance::kBucketMid;
  return Provenance::kBucketLow;
}

SampledNegatives gen_random_negatives(const CompletionTask& task, std::size_t num_entities, std::size_t n,
                                      std::mt19937_64& rng) {
  SampledNegatives out;
  const std::size_t eligible = task.truth < num_entities ? num_entities - 1 : num_entities;
  auto to_entity = [&](std::uint64_t i) {
    return static_cast<EntityId>(i < task.truth || task.truth >= num_entities ? i : i + 1);
  };
  if (n >= eligible) {
    out.undersized = n > eligible;
    for (std::size_t i = 0; i < eligible; ++i) out.entities.push_back(to_entity(i));
    return out;
  }
  // Floyd's algorithm: n distinct draws from [0, eligible).
  std::unordered_set<std::uint64_t> picked;
  picked.reserve(n * 2);
  for (std::size_t j = eligible - n; j < eligible; ++j) {
    auto t = uniform_below(rng, j + 1);
    if (!picked.insert(t).second) {
      picked.insert(j);
      t = j;
    }
    out.entities.push_back(to_entity(t));
  }
  return out;
}

namespace {

// Moves a uniform sample of min(k, pool.size()) elements to the front of
// `pool` and returns how many were taken.
std::size_t sample_prefix(std::vector<EntityId>& pool, std::size_t k, std::mt19937_64& rng) {
  const auto take = std::min(k, pool.size());
  for (std::size_t i = 0; i < take; ++i) {
    auto j = i + uniform_below(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  return take;
}

}  // namespace

SampledNegatives gen_tmn(const CompletionTask& task, const TypeScores& type_scores, const KnowledgeGraph& known,
                         std::size_t n, std::mt19937_64& rng) {
  SampledNegatives out;
  const auto num_entities = known.num_entities();
  std::vector<bool> chosen(num_entities, false);
  auto eligible = [&](EntityId e) { return e != task.truth && !chosen[e] && !known.contains(task.corrupt(e)); };
  auto take = [&](std::vector<EntityId>& pool, Provenance tag) {
    const auto k = sample_prefix(pool, n - out.entities.size(), rng);
    for (std::size_t i = 0; i < k; ++i) {
      chosen[pool[i]] = true;
      out.entities.push_back(pool[i]);
      out.provenance.push_back(tag);
    }
  };

  std::vector<EntityId> buckets[3];
  for (const auto& entry : type_scores.slot(task.relation, task.target_position())) {
    if (entry.entity < num_entities && eligible(entry.entity)) {
      buckets[static_cast<int>(bucket_of(entry.score))].push_back(entry.entity);
    }
  }
  for (int b = 0; b < 3 && out.entities.size() < n; ++b) take(buckets[b], static_cast<Provenance>(b));

  if (out.entities.size() < n) {
    std::vector<EntityId> pool;
    for (EntityId e = 0; e < num_entities; ++e) {
      if (eligible(e)) pool.push_back(e);
    }
    take(pool, Provenance::kRandomFill);
  }
  out.undersized = out.entities.size() < n;
  return out;
}

std::vector<NegativeSet> generate_tmn(const InductiveDataset& dataset, const TypeScores& type_scores,
                                      const TmnOptions& options) {
  const auto& test = dataset.test_graph.test;
  const auto& known = dataset.test_graph.known;
  std::vector<NegativeSet> sets(test.size());
  parallel_for(test.size(), options.threads, [&](std::size_t i) {
    const auto tasks = completion_tasks(std::span(&test[i], 1));
    auto& set = sets[i];
    set.triple = test[i];
    for (const auto& task : tasks) {
      auto rng = query_stream(options.seed, i, static_cast<std::uint64_t>(task.direction));
      auto sampled = gen_tmn(task, type_scores, known, options.negatives, rng);
      if (task.direction == Direction::kTail) {
        set.tail_negatives = std::move(sampled.entities);
        set.tail_provenance = std::move(sampled.provenance);
        set.tail_undersized = sampled.undersized;
      } else {
        set.head_negatives = std::move(sampled.entities);
        set.head_provenance = std::move(sampled.provenance);
        set.head_undersized = sampled.undersized;
      }
    }
  });
  std::size_t undersized = 0;
  for (const auto& set : sets) {
    if (set.head_undersized || set.tail_undersized) {
      ++undersized;
      spdlog::warn("{}: fewer than {} true negatives for {}", dataset.name, options.negatives,
                   format_triple(set.triple, *dataset.test_graph.vocabulary));
    }
  }
  if (undersized > 0) spdlog::warn("{}: {} test triple(s) with undersized negative sets", dataset.name, undersized);
  return sets;
}

namespace {

using nlohmann::json;

json names_of(std::span<const EntityId> ids, const SymbolTable& entities) {
  json out = json::array();
  for (auto id : ids) out.push_back(entities.name(id));
  return out;
}

json provenance_of(std::span<const Provenance> tags) {
  json out = json::array();
  for (auto p : tags) out.push_back(to_string(p));
  return out;
}

std::vector<EntityId> read_entities(const json& list, const SymbolTable& entities, std::size_t line_no) {
  if (!list.is_array()) throw ParseError(fmt::format("TMN line {}: negatives must be a list", line_no));
  std::vector<EntityId> out;
  out.reserve(list.size());
  for (const auto& item : list) {
    if (!item.is_string()) throw ParseError(fmt::format("TMN line {}: entity must be a string", line_no));
    auto id = entities.find(item.get_ref<const std::string&>());
    if (!id) throw ParseError(fmt::format("TMN line {}: unknown entity '{}'", line_no, item.get<std::string>()));
    out.push_back(*id);
  }
  return out;
}

}  // namespace

void write_tmn(std::ostream& out, std::span<const NegativeSet> sets, const Vocabulary& vocabulary) {
  for (const auto& set : sets) {
    json line;
    line["triple"] = {vocabulary.entities.name(set.triple.subject), vocabulary.relations.name(set.triple.relation),
                      vocabulary.entities.name(set.triple.object)};
    line["head_negatives"] = names_of(set.head_negatives, vocabulary.entities);
    line["tail_negatives"] = names_of(set.tail_negatives, vocabulary.entities);
    line["provenance"] = {{"head", provenance_of(set.head_provenance)}, {"tail", provenance_of(set.tail_provenance)}};
    out << line.dump() << '\n';
  }
}

std::vector<NegativeSet> read_tmn(const std::filesystem::path& path, const InductiveDataset& dataset) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open {}", path.string()));
  const auto& test = dataset.test_graph.test;
  const auto& vocabulary = *dataset.test_graph.vocabulary;
  std::unordered_map<Triple, std::size_t, TripleHash> index;
  for (std::size_t i = 0; i < test.size(); ++i) index.emplace(test[i], i);

  std::vector<NegativeSet> sets(test.size());
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
      throw ParseError(fmt::format("TMN line {}: {}", line_no, e.what()));
    }
    if (!record.contains("triple")) continue;
    const auto& t = record["triple"];
    if (!t.is_array() || t.size() != 3 || !t[0].is_string() || !t[1].is_string() || !t[2].is_string()) {
      throw ParseError(fmt::format("TMN line {}: \"triple\" must be [s, p, o]", line_no));
    }
    auto s = vocabulary.entities.find(t[0].get<std::string>());
    auto p = vocabulary.relations.find(t[1].get<std::string>());
    auto o = vocabulary.entities.find(t[2].get<std::string>());
    auto it = (s && p && o) ? index.find(Triple{*s, *p, *o}) : index.end();
    if (it == index.end()) {
      throw ParseError(fmt::format("TMN line {}: triple {}\t{}\t{} is not a test triple", line_no,
                                   t[0].get<std::string>(), t[1].get<std::string>(), t[2].get<std::string>()));
    }
    const auto i = it->second;
    if (filled[i]) throw ParseError(fmt::format("TMN line {}: duplicate triple", line_no));
    filled[i] = true;
    sets[i].triple = test[i];
    sets[i].head_negatives = read_entities(record.value("head_negatives", json::array()), vocabulary.entities, line_no);
    sets[i].tail_negatives = read_entities(record.value("tail_negatives", json::array()), vocabulary.entities, line_no);
  }
  for (std::size_t i = 0; i < test.size(); ++i) {
    if (!filled[i]) {
      throw ParseError(fmt::format("{}: no negatives for test triple {}", path.string(), format_triple(test[i], vocabulary)));
    }
  }
  return sets;
}

}  // namespace kgeval
