#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "facade_bn/estimation.hpp"

namespace facade_bn {

/// Observed variable -> level code.
using Evidence = std::map<std::string, std::string>;

struct JointProbability {
  double value = 0.0;
  /// Set when a factor came from an unsupported (placeholder) CPT row.
  bool degenerate = false;
};

/// Product of CPT entries; `levels` follows fitted.schema order.
JointProbability joint_probability(const FittedNetwork& fitted, std::span<const int> levels);
JointProbability joint_probability(const FittedNetwork& fitted, const Evidence& full_assignment);

struct Posterior {
  std::string target;
  std::vector<std::pair<std::string, double>> distribution;
  double evidence_probability = 0.0;
  bool degenerate = false;
};

/// Exact P(target | evidence) by enumerating the joint over unobserved nodes.
Posterior query(const FittedNetwork& fitted, const std::string& target, const Evidence& evidence);

/// Ancestral sampling in topological order. Reaching a placeholder row throws
/// UnsupportedConfiguration unless `allow_unsupported` is set.
Dataset forward_sample(const FittedNetwork& fitted, std::size_t n, std::uint64_t seed,
                       bool allow_unsupported = false);

}  // namespace facade_bn
