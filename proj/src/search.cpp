#include "facade_bn/search.hpp"

#include <algorithm>
#include <set>
#include <thread>

#include "facade_bn/error.hpp"
#include "facade_bn/rng.hpp"

namespace facade_bn {

std::vector<Dag> generate_candidates(const Schema& schema, const DagConstraints& constraints,
                                     std::size_t count, std::uint64_t seed,
                                     RandomDagOptions options) {
  if (count == 0) throw Error(ErrorKind::DomainError, "candidate count must be at least 1");
  const std::size_t max_attempts = std::max<std::size_t>(options.max_tries, 100 * count);
  std::vector<Dag> out;
  std::set<std::string> seen;
  for (std::size_t attempt = 0; out.size() < count; ++attempt) {
    if (attempt == max_attempts) {
      throw Error(ErrorKind::GenerationExhausted,
                  "found " + std::to_string(out.size()) + " distinct DAGs of " + std::to_string(count));
    }
    Dag dag = random_dag(schema, constraints, mix_seed(seed, attempt), options);
    if (seen.insert(to_model_string(dag)).second) out.push_back(std::move(dag));
  }
  return out;
}

std::vector<ScoredEntry> score_networks(const std::vector<Dag>& dags, const Dataset& data,
                                        ScoreType type, double iss, unsigned threads) {
  if (dags.empty()) throw Error(ErrorKind::DomainError, "no networks to score");
  std::vector<ScoredEntry> out(dags.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t i = begin; i < dags.size(); i += stride) {
      out[i] = {to_model_string(dags[i]), score(dags[i], data, type, iss).total};
    }
  };
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, dags.size()));
  if (threads <= 1) {
    work(0, 1);
    return out;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      try {
        work(t, threads);
      } catch (...) {
        errors[t] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

std::vector<ScoredModel> top_networks(std::vector<ScoredEntry> scored, std::size_t k) {
  if (k == 0) throw Error(ErrorKind::DomainError, "k must be at least 1");
  std::sort(scored.begin(), scored.end(), [](const ScoredEntry& a, const ScoredEntry& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.model_string < b.model_string;
  });
  std::vector<ScoredModel> top;
  for (std::size_t i = 0; i < std::min(k, scored.size()); ++i) {
    top.push_back({scored[i].model_string, scored[i].score, i + 1});
  }
  return top;
}

SearchResult run_search(const Dataset& data, const SearchConfig& config, const std::vector<Dag>& extra) {
  SearchResult result;
  result.config = config;
  auto dags = generate_candidates(data.schema(), config.constraints, config.pool_size, config.seed,
                                  config.dag_options);
  std::set<std::string> seen;
  for (const auto& d : dags) seen.insert(to_model_string(d));
  for (const auto& d : extra) {
    if (seen.insert(to_model_string(d)).second) dags.push_back(d);
  }
  result.pool_size = dags.size();
  result.pool = score_networks(dags, data, config.score_type, config.iss, config.threads);

  std::vector<ScoredEntry> eligible;
  for (std::size_t i = 0; i < dags.size(); ++i) {
    if (check_constraints(dags[i], config.constraints)) eligible.push_back(result.pool[i]);
  }
  result.candidates_satisfying = eligible.size();
  result.top = top_networks(std::move(eligible), config.top);
  return result;
}

}  // namespace facade_bn
