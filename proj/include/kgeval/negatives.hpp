#pragma once

// Negative candidate generation for the sampling protocols: uniform random
// corruption, and type-matched negatives (TMN) drawn from confidence buckets
// of the baseline's type scores.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "kgeval/graph.hpp"
#include "kgeval/rules.hpp"

namespace kgeval {

enum class Provenance : std::uint8_t { kBucketHigh, kBucketMid, kBucketLow, kRandomFill };

std::string_view to_string(Provenance p);

inline constexpr double kHighBucketMin = 0.75;
inline constexpr double kMidBucketMin = 0.25;

// Bucket of a type-score confidence: [0.75, 1], [0.25, 0.75), [0, 0.25).
Provenance bucket_of(double confidence);

struct SampledNegatives {
  std::vector<EntityId> entities;
  std::vector<Provenance> provenance;  // parallel to entities; empty for random negatives
  bool undersized = false;
};

// n distinct entities of [0, num_entities) other than the truth, sampled
// uniformly without replacement. Not filtered against known triples.
SampledNegatives gen_random_negatives(const CompletionTask& task, std::size_t num_entities, std::size_t n,
                                      std::mt19937_64& rng);

// Type-matched negatives for one task. Candidates come from the type-score
// slot of the missing position, high bucket first, cascading to lower
// buckets, then uniform random fill. Every step skips the truth, chosen
// entities and entities whose corrupted triple is in `known`.
SampledNegatives gen_tmn(const CompletionTask& task, const TypeScores& type_scores, const KnowledgeGraph& known,
                         std::size_t n, std::mt19937_64& rng);

struct NegativeSet {
  Triple triple;
  std::vector<EntityId> head_negatives;
  std::vector<EntityId> tail_negatives;
  std::vector<Provenance> head_provenance;
  std::vector<Provenance> tail_provenance;
  bool head_undersized = false;
  bool tail_undersized = false;
};

struct TmnOptions {
  std::size_t negatives = 50;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

// TMN for every test triple of the test graph, in test-split order. Each
// query draws from its own stream derived from (seed, triple index,
// direction), so the result does not depend on the thread count.
std::vector<NegativeSet> generate_tmn(const InductiveDataset& dataset, const TypeScores& type_scores,
                                      const TmnOptions& options);

// TMN JSONL, one line per test triple:
// {"triple":[s,p,o],"head_negatives":[...],"tail_negatives":[...],
//  "provenance":{"head":[...],"tail":[...]}}
void write_tmn(std::ostream& out, std::span<const NegativeSet> sets, const Vocabulary& vocabulary);

// Reads a TMN file and orders it by test-split position. Provenance is
// ignored, so files without it load too. Lines without a "triple" key
// (headers) are skipped. Every test triple must be present exactly once.
std::vector<NegativeSet> read_tmn(const std::filesystem::path& path, const InductiveDataset& dataset);

}  // namespace kgeval
