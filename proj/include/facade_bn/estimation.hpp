#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facade_bn/data_model.hpp"
#include "facade_bn/graph.hpp"

namespace facade_bn {

/// Conditional probability table P(node | parents). Parent configurations are
/// enumerated row-major over `parents` (the last parent varies fastest); the
/// table holds `configs() * cardinality` entries, one row per configuration.
struct Cpt {
  std::string node;
  std::size_t cardinality = 0;
  std::vector<std::string> parents;
  std::vector<std::size_t> parent_cardinalities;
  std::vector<double> table;
  /// Training rows observed in each parent configuration.
  std::vector<std::int64_t> support;

  std::size_t configs() const noexcept { return support.size(); }
  double prob(std::size_t config, int level) const { return table[config * cardinality + level]; }
  std::span<const double> row(std::size_t config) const {
    return {table.data() + config * cardinality, cardinality};
  }
  /// Zero-count configurations hold a uniform placeholder row.
  bool unsupported(std::size_t config) const { return support[config] == 0; }
  std::size_t config_index(std::span<const int> parent_levels) const;
  std::vector<int> config_levels(std::size_t config) const;
};

/// A DAG with one CPT per node. `schema` lists the DAG's nodes in DAG order.
struct FittedNetwork {
  Dag dag;
  Schema schema;
  std::vector<Cpt> cpts;
  std::size_t n = 0;
};

/// Maximum-likelihood CPTs from relative frequencies.
FittedNetwork fit_mle(const Dag& dag, const Dataset& data);

/// Number of free parameters, sum over nodes of (r - 1) * q.
std::int64_t param_count(const Dag& dag, const Schema& schema);

double log_likelihood(const Dag& dag, const Dataset& data);

struct LogLikelihood {
  double value = 0.0;
  /// Rows that hit a placeholder row of an unsupported configuration.
  std::size_t unsupported_rows = 0;
  /// Rows with probability zero; when non-zero `value` is -infinity.
  std::size_t zero_probability_rows = 0;
};

/// Log-likelihood of (possibly held-out) data under an already fitted network.
LogLikelihood log_likelihood(const FittedNetwork& fitted, const Dataset& data);

enum class ScoreType { LogLik, Bic, Bdeu };

const char* to_string(ScoreType type);
ScoreType parse_score_type(std::string_view text);

struct ScoreReport {
  ScoreType type = ScoreType::Bic;
  double iss = 0.0;
  /// Per-node components in DAG node order.
  std::vector<std::pair<std::string, double>> per_node;
  double total = 0.0;
  std::int64_t d = 0;
  std::size_t n = 0;
};

ScoreReport loglik_score(const Dag& dag, const Dataset& data);
ScoreReport bic_score(const Dag& dag, const Dataset& data);
ScoreReport bdeu_score(const Dag& dag, const Dataset& data, double iss = 1.0);
ScoreReport score(const Dag& dag, const Dataset& data, ScoreType type, double iss = 1.0);

/// ln Γ(x) for x > 0.
double log_gamma(double x);

/// Counts N[config][level] of `child` within configurations of `parents`
/// (row-major, last parent fastest). Columns index the dataset schema.
std::vector<std::int64_t> family_counts(const Dataset& data, std::size_t child,
                                        std::span<const std::size_t> parents);

}  // namespace facade_bn
