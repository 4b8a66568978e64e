#include "facade_bn/graph.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>

#include "facade_bn/error.hpp"
#include "facade_bn/rng.hpp"

namespace facade_bn {

Dag::Dag(std::vector<std::string> nodes) : nodes_(std::move(nodes)), adj_(nodes_.size() * nodes_.size(), 0) {
  std::set<std::string> seen;
  for (const auto& n : nodes_) {
    if (!seen.insert(n).second) throw Error(ErrorKind::MalformedModelString, "duplicate node '" + n + "'");
  }
}

std::size_t Dag::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i] == name) return i;
  }
  throw Error(ErrorKind::UnknownVariable, "'" + std::string(name) + "' is not a node");
}

std::vector<std::size_t> Dag::parents(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t p = 0; p < size(); ++p) {
    if (has_arc(p, node)) out.push_back(p);
  }
  return out;
}

std::vector<std::size_t> Dag::children(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < size(); ++c) {
    if (has_arc(node, c)) out.push_back(c);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Dag::arcs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t f = 0; f < size(); ++f) {
    for (std::size_t t = 0; t < size(); ++t) {
      if (has_arc(f, t)) out.emplace_back(f, t);
    }
  }
  return out;
}

bool Dag::reachable(std::size_t from, std::size_t to) const {
  std::vector<char> seen(size(), 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    auto n = stack.back();
    stack.pop_back();
    if (n == to) return true;
    for (std::size_t c = 0; c < size(); ++c) {
      if (has_arc(n, c) && !seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return false;
}

std::vector<std::size_t> Dag::topological_order() const {
  auto by_name = [this](std::size_t a, std::size_t b) { return nodes_[a] > nodes_[b]; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(by_name)> ready(by_name);
  std::vector<std::size_t> indegree(size());
  for (std::size_t n = 0; n < size(); ++n) {
    indegree[n] = in_degree(n);
    if (indegree[n] == 0) ready.push(n);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    auto n = ready.top();
    ready.pop();
    order.push_back(n);
    for (auto c : children(n)) {
      if (--indegree[c] == 0) ready.push(c);
    }
  }
  return order;
}

Dag Dag::with_arc(std::size_t from, std::size_t to) const {
  if (from >= size() || to >= size()) throw Error(ErrorKind::UnknownVariable, "arc endpoint out of range");
  if (from == to) throw Error(ErrorKind::CycleDetected, "self-arc on '" + nodes_[from] + "'");
  if (has_arc(from, to)) {
    throw Error(ErrorKind::DuplicateArc, nodes_[from] + " -> " + nodes_[to]);
  }
  if (reachable(to, from)) {
    throw Error(ErrorKind::CycleDetected, nodes_[from] + " -> " + nodes_[to] + " closes a cycle");
  }
  Dag out = *this;
  out.adj_[from * size() + to] = 1;
  ++out.arc_count_;
  return out;
}

Dag Dag::without_arc(std::size_t from, std::size_t to) const {
  Dag out = *this;
  if (out.adj_[from * size() + to]) {
    out.adj_[from * size() + to] = 0;
    --out.arc_count_;
  }
  return out;
}

Dag set_arc(const Dag& dag, std::string_view from, std::string_view to) {
  return dag.with_arc(dag.index_of(from), dag.index_of(to));
}

Dag parse_model_string(std::string_view text, const Schema& schema, ParseOptions options) {
  return parse_model_string(text, schema.names(), options);
}

Dag parse_model_string(std::string_view text, const std::vector<std::string>& nodes,
                       ParseOptions options) {
  auto malformed = [&](const std::string& why) {
    return Error(ErrorKind::MalformedModelString, why + " in \"" + std::string(text) + "\"");
  };
  Dag skeleton(nodes);
  auto resolve = [&](std::string_view token) -> std::size_t {
    if (token.empty()) throw malformed("empty node name");
    if (options.lenient && token == "MOD") token = "MD";
    return skeleton.index_of(token);
  };

  std::vector<char> declared(nodes.size(), 0);
  std::vector<std::pair<std::size_t, std::size_t>> arcs;
  std::size_t pos = 0;
  if (text.empty()) throw malformed("empty model string");
  while (pos < text.size()) {
    if (text[pos] != '[') throw malformed("expected '[' at offset " + std::to_string(pos));
    auto close = text.find(']', pos);
    if (close == std::string_view::npos) throw malformed("unterminated block");
    auto block = text.substr(pos + 1, close - pos - 1);
    if (block.find_first_of("[ \t\r\n") != std::string_view::npos) {
      throw malformed("unexpected character in block");
    }
    auto bar = block.find('|');
    auto head = block.substr(0, bar);
    if (head.find(':') != std::string_view::npos) throw malformed("':' before '|'");
    auto node = resolve(head);
    if (declared[node]) throw malformed("node '" + nodes[node] + "' repeated");
    declared[node] = 1;
    if (bar != std::string_view::npos) {
      auto rest = block.substr(bar + 1);
      if (rest.find('|') != std::string_view::npos) throw malformed("second '|' in block");
      std::size_t start = 0;
      std::set<std::size_t> seen;
      while (true) {
        auto colon = rest.find(':', start);
        auto parent = resolve(rest.substr(start, colon == std::string_view::npos ? rest.npos : colon - start));
        if (!seen.insert(parent).second) throw malformed("parent listed twice for '" + nodes[node] + "'");
        arcs.emplace_back(parent, node);
        if (colon == std::string_view::npos) break;
        start = colon + 1;
      }
    }
    pos = close + 1;
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!declared[i]) throw malformed("node '" + nodes[i] + "' absent");
  }
  Dag dag = skeleton;
  for (auto [from, to] : arcs) dag = dag.with_arc(from, to);
  return dag;
}

std::string to_model_string(const Dag& dag) {
  std::string out;
  for (auto n : dag.topological_order()) {
    out += '[';
    out += dag.name(n);
    auto parents = dag.parents(n);
    std::sort(parents.begin(), parents.end(),
              [&](std::size_t a, std::size_t b) { return dag.name(a) < dag.name(b); });
    for (std::size_t i = 0; i < parents.size(); ++i) {
      out += i == 0 ? '|' : ':';
      out += dag.name(parents[i]);
    }
    out += ']';
  }
  return out;
}

ConstraintCheck check_constraints(const Dag& dag, const DagConstraints& constraints) {
  ConstraintCheck check;
  auto fail = [&](std::string what) {
    check.ok = false;
    check.violations.push_back(std::move(what));
  };
  std::size_t sink = dag.size();
  for (std::size_t i = 0; i < dag.size(); ++i) {
    if (dag.name(i) == constraints.sink_variable) sink = i;
  }
  if (sink == dag.size()) {
    fail("sink variable '" + constraints.sink_variable + "' not in graph");
  } else {
    if (dag.in_degree(sink) < constraints.require_sink_in_degree) fail("sink in-degree too low");
    if (constraints.forbid_sink_out_arcs && dag.out_degree(sink) > 0) fail("sink emits arc");
  }
  if (dag.arc_count() < constraints.min_arcs) fail("too few arcs");
  return check;
}

Dag random_dag(const Schema& schema, const DagConstraints& constraints, std::uint64_t seed,
               RandomDagOptions options) {
  if (options.arc_probability < 0.0 || options.arc_probability > 1.0) {
    throw Error(ErrorKind::DomainError, "arc probability must lie in [0, 1]");
  }
  const std::size_t n = schema.size();
  const auto sink = schema.find(constraints.sink_variable);
  if (!sink) throw Error(ErrorKind::UnknownVariable, "sink '" + constraints.sink_variable + "'");
  if (constraints.min_arcs > n * (n - 1) / 2 || constraints.require_sink_in_degree > n - 1) {
    throw Error(ErrorKind::GenerationExhausted, "constraints cannot be met on " + std::to_string(n) + " nodes");
  }

  Rng rng = make_rng(seed);
  const Dag blank = Dag::empty(schema);
  std::vector<std::size_t> order(n);
  for (std::size_t attempt = 0; attempt < options.max_tries; ++attempt) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = n - 1; i > 0; --i) {
      auto j = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(i + 1));
      std::swap(order[i], order[j]);
    }
    Dag dag = blank;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = a + 1; b < n; ++b) {
        if (uniform01(rng) < options.arc_probability) dag = dag.with_arc(order[a], order[b]);
      }
    }
    if (check_constraints(dag, constraints)) return dag;
  }
  throw Error(ErrorKind::GenerationExhausted,
              "no constraint-satisfying DAG after " + std::to_string(options.max_tries) + " tries");
}

}  // namespace facade_bn
