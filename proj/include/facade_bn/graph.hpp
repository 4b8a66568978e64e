#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "facade_bn/data_model.hpp"

namespace facade_bn {

/// Directed acyclic graph over named nodes. Values are immutable: every
/// mutating operation returns a new graph and leaves the receiver untouched.
class Dag {
 public:
  explicit Dag(std::vector<std::string> nodes);
  static Dag empty(const Schema& schema) { return Dag(schema.names()); }

  std::size_t size() const noexcept { return nodes_.size(); }
  const std::vector<std::string>& nodes() const noexcept { return nodes_; }
  const std::string& name(std::size_t i) const { return nodes_.at(i); }
  std::size_t index_of(std::string_view name) const;

  bool has_arc(std::size_t from, std::size_t to) const { return adj_[from * size() + to] != 0; }
  /// Parents in ascending node-index order.
  std::vector<std::size_t> parents(std::size_t node) const;
  std::vector<std::size_t> children(std::size_t node) const;
  std::size_t in_degree(std::size_t node) const { return parents(node).size(); }
  std::size_t out_degree(std::size_t node) const { return children(node).size(); }
  std::size_t arc_count() const noexcept { return arc_count_; }
  /// All arcs, sorted by (from, to).
  std::vector<std::pair<std::size_t, std::size_t>> arcs() const;

  bool reachable(std::size_t from, std::size_t to) const;
  /// Kahn order; ties broken by node name.
  std::vector<std::size_t> topological_order() const;

  /// Throws CycleDetected (including self-arcs) or DuplicateArc.
  Dag with_arc(std::size_t from, std::size_t to) const;
  Dag without_arc(std::size_t from, std::size_t to) const;

  friend bool operator==(const Dag& a, const Dag& b) {
    return a.nodes_ == b.nodes_ && a.adj_ == b.adj_;
  }

 private:
  std::vector<std::string> nodes_;
  std::vector<std::uint8_t> adj_;
  std::size_t arc_count_ = 0;
};

Dag set_arc(const Dag& dag, std::string_view from, std::string_view to);

struct ParseOptions {
  /// Accept the alias MOD for MD.
  bool lenient = false;
};

/// Grammar: ('[' node ('|' parent (':' parent)*)? ']')+, no whitespace.
Dag parse_model_string(std::string_view text, const Schema& schema, ParseOptions options = {});
Dag parse_model_string(std::string_view text, const std::vector<std::string>& nodes,
                       ParseOptions options = {});

/// Canonical form: topological order with alphabetical tie-breaking, parents
/// sorted alphabetically.
std::string to_model_string(const Dag& dag);

struct DagConstraints {
  std::string sink_variable = "CE";
  std::size_t min_arcs = 5;
  std::size_t require_sink_in_degree = 1;
  bool forbid_sink_out_arcs = true;
};

struct ConstraintCheck {
  bool ok = true;
  std::vector<std::string> violations;
  explicit operator bool() const noexcept { return ok; }
};

ConstraintCheck check_constraints(const Dag& dag, const DagConstraints& constraints);

struct RandomDagOptions {
  double arc_probability = 0.25;
  std::size_t max_tries = 10000;
};

/// Random topological order plus independent forward arcs, resampled until
/// `constraints` hold. Throws GenerationExhausted after `max_tries` draws.
Dag random_dag(const Schema& schema, const DagConstraints& constraints, std::uint64_t seed,
               RandomDagOptions options = {});

}  // namespace facade_bn
