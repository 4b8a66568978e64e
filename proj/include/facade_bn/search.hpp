#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "facade_bn/data_model.hpp"
#include "facade_bn/estimation.hpp"
#include "facade_bn/graph.hpp"

namespace facade_bn {

struct ScoredEntry {
  std::string model_string;
  double score = 0.0;
};

struct ScoredModel {
  std::string model_string;
  double score = 0.0;
  std::size_t rank = 0;
};

/// `count` distinct constraint-satisfying DAGs. Attempt i draws from a seed
/// derived from (seed, i); duplicates by canonical model string are skipped.
std::vector<Dag> generate_candidates(const Schema& schema, const DagConstraints& constraints,
                                     std::size_t count, std::uint64_t seed,
                                     RandomDagOptions options = {});

/// One score per DAG, in input order. Scoring fans out over `threads`
/// workers (0 = hardware concurrency); the result does not depend on it.
std::vector<ScoredEntry> score_networks(const std::vector<Dag>& dags, const Dataset& data,
                                        ScoreType type = ScoreType::Bic, double iss = 1.0,
                                        unsigned threads = 0);

/// Highest `k` scores, descending; equal scores ordered by model string.
std::vector<ScoredModel> top_networks(std::vector<ScoredEntry> scored, std::size_t k);

struct SearchConfig {
  DagConstraints constraints;
  std::size_t pool_size = 200;
  std::size_t top = 5;
  std::uint64_t seed = 0;
  ScoreType score_type = ScoreType::Bic;
  double iss = 1.0;
  RandomDagOptions dag_options;
  unsigned threads = 0;
};

struct SearchResult {
  SearchConfig config;
  std::size_t pool_size = 0;
  std::size_t candidates_satisfying = 0;
  /// Every pooled candidate with its score, in generation order.
  std::vector<ScoredEntry> pool;
  std::vector<ScoredModel> top;
};

/// Generate, score and rank a constrained random pool. `extra` DAGs are
/// appended to the pool (deduplicated); those violating the constraints are
/// pooled but never ranked.
SearchResult run_search(const Dataset& data, const SearchConfig& config,
                        const std::vector<Dag>& extra = {});

}  // namespace facade_bn
