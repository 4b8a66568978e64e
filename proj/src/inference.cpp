#include "facade_bn/inference.hpp"

#include "facade_bn/error.hpp"
#include "facade_bn/rng.hpp"

namespace facade_bn {

namespace {

struct Factor {
  const Cpt* cpt;
  std::size_t child;
  std::vector<std::size_t> parents;
};

std::vector<Factor> factors_of(const FittedNetwork& fitted) {
  std::vector<Factor> out;
  for (std::size_t node = 0; node < fitted.dag.size(); ++node) {
    out.push_back({&fitted.cpts[node], node, fitted.dag.parents(node)});
  }
  return out;
}

std::size_t config_of(const Factor& f, std::span<const int> levels) {
  std::size_t j = 0;
  for (std::size_t i = 0; i < f.parents.size(); ++i) {
    j = j * f.cpt->parent_cardinalities[i] + static_cast<std::size_t>(levels[f.parents[i]]);
  }
  return j;
}

JointProbability evaluate(const std::vector<Factor>& factors, std::span<const int> levels) {
  JointProbability out{1.0, false};
  for (const auto& f : factors) {
    const auto j = config_of(f, levels);
    out.degenerate = out.degenerate || f.cpt->unsupported(j);
    out.value *= f.cpt->prob(j, levels[f.child]);
    if (out.value == 0.0) break;
  }
  return out;
}

}  // namespace

JointProbability joint_probability(const FittedNetwork& fitted, std::span<const int> levels) {
  if (levels.size() != fitted.schema.size()) {
    throw Error(ErrorKind::DomainError, "assignment must cover every node");
  }
  return evaluate(factors_of(fitted), levels);
}

JointProbability joint_probability(const FittedNetwork& fitted, const Evidence& full_assignment) {
  std::vector<int> levels(fitted.schema.size(), -1);
  for (const auto& [name, code] : full_assignment) {
    const auto v = fitted.schema.index_of(name);
    levels[v] = fitted.schema.level_of(v, code);
  }
  for (std::size_t v = 0; v < levels.size(); ++v) {
    if (levels[v] < 0) {
      throw Error(ErrorKind::DomainError, "assignment lacks '" + fitted.schema.variable(v).name + "'");
    }
  }
  return joint_probability(fitted, levels);
}

Posterior query(const FittedNetwork& fitted, const std::string& target, const Evidence& evidence) {
  const auto& schema = fitted.schema;
  const auto t = schema.index_of(target);
  std::vector<int> levels(schema.size(), 0);
  std::vector<char> fixed(schema.size(), 0);
  for (const auto& [name, code] : evidence) {
    const auto v = schema.index_of(name);
    if (v == t) throw Error(ErrorKind::DomainError, "target '" + target + "' is part of the evidence");
    levels[v] = schema.level_of(v, code);
    fixed[v] = 1;
  }
  std::vector<std::size_t> free;
  for (std::size_t v = 0; v < schema.size(); ++v) {
    if (!fixed[v]) free.push_back(v);
  }

  const auto factors = factors_of(fitted);
  std::vector<double> mass(schema.cardinality(t), 0.0);
  bool degenerate = false;
  // Odometer over the unobserved nodes.
  while (true) {
    const auto p = evaluate(factors, levels);
    if (p.value > 0.0) {
      mass[levels[t]] += p.value;
      degenerate = degenerate || p.degenerate;
    }
    std::size_t i = free.size();
    while (i > 0) {
      const auto v = free[i - 1];
      if (++levels[v] < static_cast<int>(schema.cardinality(v))) break;
      levels[v] = 0;
      --i;
    }
    if (i == 0) break;
  }

  double total = 0.0;
  for (double m : mass) total += m;
  if (!(total > 0.0)) throw Error(ErrorKind::ZeroProbabilityEvidence, "P(evidence) = 0");

  Posterior post;
  post.target = target;
  post.evidence_probability = total;
  post.degenerate = degenerate;
  for (std::size_t k = 0; k < mass.size(); ++k) {
    post.distribution.emplace_back(schema.variable(t).levels[k], mass[k] / total);
  }
  return post;
}

Dataset forward_sample(const FittedNetwork& fitted, std::size_t n, std::uint64_t seed,
                       bool allow_unsupported) {
  const auto factors = factors_of(fitted);
  const auto order = fitted.dag.topological_order();
  const std::size_t width = fitted.schema.size();
  Rng rng = make_rng(seed);
  std::vector<int> cells(n * width);
  for (std::size_t r = 0; r < n; ++r) {
    std::span<int> row(cells.data() + r * width, width);
    for (auto node : order) {
      const auto& f = factors[node];
      const auto j = config_of(f, row);
      if (f.cpt->unsupported(j) && !allow_unsupported) {
        throw Error(ErrorKind::UnsupportedConfiguration,
                    "sampling '" + f.cpt->node + "' reached an unobserved parent configuration");
      }
      const auto probs = f.cpt->row(j);
      const double u = uniform01(rng);
      double cumulative = 0.0;
      int level = static_cast<int>(probs.size()) - 1;
      for (std::size_t k = 0; k < probs.size(); ++k) {
        cumulative += probs[k];
        if (u < cumulative) {
          level = static_cast<int>(k);
          break;
        }
      }
      // Skip trailing zero-probability levels reached through rounding.
      while (level > 0 && probs[level] == 0.0) --level;
      row[node] = level;
    }
  }
  return Dataset(fitted.schema, std::move(cells));
}

}  // namespace facade_bn
