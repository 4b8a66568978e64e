#include "facade_bn/estimation.hpp"

#include <cmath>
#include <limits>

#include "facade_bn/error.hpp"

namespace facade_bn {

namespace {

// Dataset column for each DAG node.
std::vector<std::size_t> columns_for(const Dag& dag, const Schema& schema) {
  std::vector<std::size_t> cols;
  cols.reserve(dag.size());
  for (const auto& name : dag.nodes()) {
    auto col = schema.find(name);
    if (!col) throw Error(ErrorKind::SchemaMismatch, "data lacks DAG node '" + name + "'");
    cols.push_back(*col);
  }
  return cols;
}

void require_rows(const Dataset& data) {
  if (data.rows() == 0) throw Error(ErrorKind::EmptyData, "statistic requires at least one row");
}

struct Family {
  std::size_t child;
  std::vector<std::size_t> parents;  // dataset columns
  std::size_t r;
  std::size_t q;
};

Family family_of(const Dag& dag, const Schema& schema, const std::vector<std::size_t>& cols,
                 std::size_t node) {
  Family f{cols[node], {}, schema.cardinality(cols[node]), 1};
  for (auto p : dag.parents(node)) {
    f.parents.push_back(cols[p]);
    f.q *= schema.cardinality(cols[p]);
  }
  return f;
}

double family_loglik(const std::vector<std::int64_t>& counts, std::size_t r) {
  double ll = 0.0;
  for (std::size_t j = 0; j < counts.size() / r; ++j) {
    std::int64_t nj = 0;
    for (std::size_t k = 0; k < r; ++k) nj += counts[j * r + k];
    for (std::size_t k = 0; k < r; ++k) {
      const auto njk = counts[j * r + k];
      if (njk > 0) ll += static_cast<double>(njk) * std::log(static_cast<double>(njk) / static_cast<double>(nj));
    }
  }
  return ll;
}

}  // namespace

std::size_t Cpt::config_index(std::span<const int> parent_levels) const {
  std::size_t index = 0;
  for (std::size_t i = 0; i < parent_cardinalities.size(); ++i) {
    index = index * parent_cardinalities[i] + static_cast<std::size_t>(parent_levels[i]);
  }
  return index;
}

std::vector<int> Cpt::config_levels(std::size_t config) const {
  std::vector<int> levels(parent_cardinalities.size());
  for (std::size_t i = parent_cardinalities.size(); i-- > 0;) {
    levels[i] = static_cast<int>(config % parent_cardinalities[i]);
    config /= parent_cardinalities[i];
  }
  return levels;
}

std::vector<std::int64_t> family_counts(const Dataset& data, std::size_t child,
                                        std::span<const std::size_t> parents) {
  const auto& schema = data.schema();
  const std::size_t r = schema.cardinality(child);
  std::size_t q = 1;
  for (auto p : parents) q *= schema.cardinality(p);
  std::vector<std::int64_t> counts(q * r, 0);
  for (std::size_t row = 0; row < data.rows(); ++row) {
    std::size_t j = 0;
    for (auto p : parents) j = j * schema.cardinality(p) + static_cast<std::size_t>(data.at(row, p));
    ++counts[j * r + static_cast<std::size_t>(data.at(row, child))];
  }
  return counts;
}

FittedNetwork fit_mle(const Dag& dag, const Dataset& data) {
  require_rows(data);
  const auto& schema = data.schema();
  const auto cols = columns_for(dag, schema);

  std::vector<VariableSpec> vars;
  for (auto c : cols) vars.push_back(schema.variable(c));
  FittedNetwork fitted{dag, Schema(std::move(vars)), {}, data.rows()};

  for (std::size_t node = 0; node < dag.size(); ++node) {
    const auto fam = family_of(dag, schema, cols, node);
    Cpt cpt;
    cpt.node = dag.name(node);
    cpt.cardinality = fam.r;
    for (auto p : dag.parents(node)) {
      cpt.parents.push_back(dag.name(p));
      cpt.parent_cardinalities.push_back(schema.cardinality(cols[p]));
    }
    const auto counts = family_counts(data, fam.child, fam.parents);
    cpt.table.resize(counts.size());
    cpt.support.assign(fam.q, 0);
    for (std::size_t j = 0; j < fam.q; ++j) {
      std::int64_t nj = 0;
      for (std::size_t k = 0; k < fam.r; ++k) nj += counts[j * fam.r + k];
      cpt.support[j] = nj;
      for (std::size_t k = 0; k < fam.r; ++k) {
        cpt.table[j * fam.r + k] = nj == 0 ? 1.0 / static_cast<double>(fam.r)
                                           : static_cast<double>(counts[j * fam.r + k]) / static_cast<double>(nj);
      }
    }
    fitted.cpts.push_back(std::move(cpt));
  }
  return fitted;
}

std::int64_t param_count(const Dag& dag, const Schema& schema) {
  const auto cols = columns_for(dag, schema);
  std::int64_t d = 0;
  for (std::size_t node = 0; node < dag.size(); ++node) {
    const auto fam = family_of(dag, schema, cols, node);
    d += static_cast<std::int64_t>((fam.r - 1) * fam.q);
  }
  return d;
}

double log_likelihood(const Dag& dag, const Dataset& data) { return loglik_score(dag, data).total; }

LogLikelihood log_likelihood(const FittedNetwork& fitted, const Dataset& data) {
  const auto cols = columns_for(fitted.dag, data.schema());
  LogLikelihood out;
  std::vector<int> parent_levels;
  for (std::size_t row = 0; row < data.rows(); ++row) {
    bool unsupported = false;
    double lp = 0.0;
    for (std::size_t node = 0; node < fitted.dag.size(); ++node) {
      const auto& cpt = fitted.cpts[node];
      parent_levels.clear();
      for (auto p : fitted.dag.parents(node)) parent_levels.push_back(data.at(row, cols[p]));
      const auto j = cpt.config_index(parent_levels);
      unsupported = unsupported || cpt.unsupported(j);
      lp += std::log(cpt.prob(j, data.at(row, cols[node])));
    }
    if (unsupported) ++out.unsupported_rows;
    if (std::isinf(lp)) ++out.zero_probability_rows;
    out.value += lp;
  }
  return out;
}

const char* to_string(ScoreType type) {
  switch (type) {
    case ScoreType::LogLik: return "loglik";
    case ScoreType::Bic: return "bic";
    case ScoreType::Bdeu: return "bdeu";
  }
  return "?";
}

ScoreType parse_score_type(std::string_view text) {
  if (text == "loglik") return ScoreType::LogLik;
  if (text == "bic") return ScoreType::Bic;
  if (text == "bdeu") return ScoreType::Bdeu;
  throw Error(ErrorKind::DomainError, "unknown score type '" + std::string(text) + "'");
}

double log_gamma(double x) {
  if (!(x > 0.0)) throw Error(ErrorKind::DomainError, "log_gamma needs x > 0");
  return std::lgamma(x);
}

ScoreReport score(const Dag& dag, const Dataset& data, ScoreType type, double iss) {
  require_rows(data);
  if (type == ScoreType::Bdeu && !(iss > 0.0)) {
    throw Error(ErrorKind::DomainError, "imaginary sample size must be positive");
  }
  const auto& schema = data.schema();
  const auto cols = columns_for(dag, schema);
  const double log_n = std::log(static_cast<double>(data.rows()));

  ScoreReport report;
  report.type = type;
  report.iss = type == ScoreType::Bdeu ? iss : 0.0;
  report.n = data.rows();
  for (std::size_t node = 0; node < dag.size(); ++node) {
    const auto fam = family_of(dag, schema, cols, node);
    const auto counts = family_counts(data, fam.child, fam.parents);
    const auto d_node = static_cast<std::int64_t>((fam.r - 1) * fam.q);
    double component = 0.0;
    switch (type) {
      case ScoreType::LogLik:
        component = family_loglik(counts, fam.r);
        break;
      case ScoreType::Bic:
        component = family_loglik(counts, fam.r) - 0.5 * static_cast<double>(d_node) * log_n;
        break;
      case ScoreType::Bdeu: {
        const double a_j = iss / static_cast<double>(fam.q);
        const double a_jk = a_j / static_cast<double>(fam.r);
        const double lg_aj = log_gamma(a_j);
        const double lg_ajk = log_gamma(a_jk);
        for (std::size_t j = 0; j < fam.q; ++j) {
          std::int64_t nj = 0;
          for (std::size_t k = 0; k < fam.r; ++k) {
            const auto njk = counts[j * fam.r + k];
            nj += njk;
            if (njk > 0) component += log_gamma(a_jk + static_cast<double>(njk)) - lg_ajk;
          }
          if (nj > 0) component += lg_aj - log_gamma(a_j + static_cast<double>(nj));
        }
        break;
      }
    }
    report.per_node.emplace_back(dag.name(node), component);
    report.total += component;
    report.d += d_node;
  }
  return report;
}

ScoreReport loglik_score(const Dag& dag, const Dataset& data) { return score(dag, data, ScoreType::LogLik); }
ScoreReport bic_score(const Dag& dag, const Dataset& data) { return score(dag, data, ScoreType::Bic); }
ScoreReport bdeu_score(const Dag& dag, const Dataset& data, double iss) {
  return score(dag, data, ScoreType::Bdeu, iss);
}

}  // namespace facade_bn
