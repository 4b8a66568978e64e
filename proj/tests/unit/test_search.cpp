#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "facade_bn/error.hpp"
#include "facade_bn/inference.hpp"
#include "facade_bn/search.hpp"
#include "../support/fixtures.hpp"
#include "../support/oracles.hpp"

using namespace facade_bn;
using facade_bn::testing::kReferenceModels;

TEST_CASE("top five of the reference candidates") {
  std::vector<ScoredEntry> entries;
  for (const auto& m : kReferenceModels) entries.push_back({std::string(m.model), m.bic});
  const auto top = top_networks(entries, 5);
  REQUIRE(top.size() == 5);
  const char* want[] = {"M13", "M7", "M4", "M8", "M5"};
  for (std::size_t i = 0; i < 5; ++i) {
    std::string_view label;
    for (const auto& m : kReferenceModels) {
      if (m.model == top[i].model_string) label = m.label;
    }
    CHECK(label == want[i]);
    CHECK(top[i].rank == i + 1);
  }
}

TEST_CASE("equal scores are ordered by model string") {
  const auto top = top_networks({{"[b]", -1.0}, {"[a]", -1.0}, {"[c]", -0.5}}, 3);
  CHECK(top[0].model_string == "[c]");
  CHECK(top[1].model_string == "[a]");
  CHECK(top[2].model_string == "[b]");
  CHECK(top_networks({{"[a]", 0.0}}, 4).size() == 1);
  CHECK_THROWS_AS(top_networks({{"[a]", 0.0}}, 0), Error);
}

TEST_CASE("candidate pool is distinct, valid and reproducible") {
  const auto schema = default_facade_schema();
  const DagConstraints c;
  const auto a = generate_candidates(schema, c, 200, 1234);
  const auto b = generate_candidates(schema, c, 200, 1234);
  REQUIRE(a.size() == 200);
  std::set<std::string> strings;
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(check_constraints(a[i], c).ok);
    strings.insert(to_model_string(a[i]));
  }
  CHECK(strings.size() == 200);
  const auto other = generate_candidates(schema, c, 200, 1235);
  CHECK(to_model_string(other[0]) != to_model_string(a[0]));
}

TEST_CASE("impossible pool sizes exhaust") {
  const Schema tiny({{"A", {"0", "1"}}, {"CE", {"0", "1"}}});
  DagConstraints c;
  c.min_arcs = 1;
  // Only [A][CE|A] satisfies the constraints.
  CHECK(generate_candidates(tiny, c, 1, 3).size() == 1);
  try {
    generate_candidates(tiny, c, 2, 3);
    FAIL("expected exhaustion");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GenerationExhausted);
  }
}

TEST_CASE("scores do not depend on the thread count") {
  std::mt19937_64 rng(77);
  const auto truth = testing::m13_truth();
  const auto data = forward_sample(truth, 150, 8);
  const auto dags = generate_candidates(data.schema(), {}, 40, 9);
  const auto one = score_networks(dags, data, ScoreType::Bic, 1.0, 1);
  const auto four = score_networks(dags, data, ScoreType::Bic, 1.0, 4);
  REQUIRE(one.size() == four.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].model_string == four[i].model_string);
    CHECK(one[i].score == four[i].score);
    CHECK(one[i].score == bic_score(dags[i], data).total);
  }
}

TEST_CASE("run_search ranks only constrained networks") {
  const auto data = forward_sample(testing::m13_truth(), 200, 4);
  SearchConfig config;
  config.pool_size = 30;
  config.top = 5;
  config.seed = 6;
  const auto schema = data.schema();
  const auto truth = parse_model_string(kReferenceModels[12].model, schema);
  const auto empty = Dag::empty(schema);  // violates the sink constraint
  const auto result = run_search(data, config, {truth, empty});
  CHECK(result.pool_size == 32);
  CHECK(result.candidates_satisfying == 31);
  CHECK(result.top.size() == 5);
  for (const auto& t : result.top) CHECK(t.model_string != to_model_string(empty));
  for (std::size_t i = 1; i < result.top.size(); ++i) CHECK(result.top[i - 1].score >= result.top[i].score);

  const auto again = run_search(data, config, {truth, empty});
  for (std::size_t i = 0; i < result.top.size(); ++i) {
    CHECK(again.top[i].model_string == result.top[i].model_string);
    CHECK(again.top[i].score == result.top[i].score);
  }
}

TEST_CASE("façade pool for seed 7 and small edge cases") {
  const auto schema = default_facade_schema();
  const auto pool = generate_candidates(schema, {}, 200, 7);
  std::set<std::string> distinct;
  for (const auto& d : pool) {
    CHECK(check_constraints(d, {}).ok);
    distinct.insert(to_model_string(d));
  }
  CHECK(distinct.size() == 200);
  const auto one = generate_candidates(schema, {}, 1, 7);
  REQUIRE(one.size() == 1);
  CHECK(check_constraints(one[0], {}).ok);
  CHECK_THROWS_AS(generate_candidates(schema, {}, 0, 7), Error);
}

TEST_CASE("duplicates score identically and the empty graph decomposes") {
  const auto data = forward_sample(testing::m13_truth(), 100, 5);
  const auto m13 = parse_model_string(kReferenceModels[12].model, data.schema());
  const auto empty = Dag::empty(data.schema());
  const auto scored = score_networks({m13, empty, m13}, data, ScoreType::Bic, 1.0, 2);
  CHECK(scored[0].score == scored[2].score);
  double marginal = 0.0;
  for (std::size_t v = 0; v < data.schema().size(); ++v) {
    const auto& name = data.schema().variable(v).name;
    const Dag alone(std::vector<std::string>{name});
    const Dataset column(Schema({data.schema().variable(v)}), [&] {
      std::vector<int> cells;
      for (std::size_t r = 0; r < data.rows(); ++r) cells.push_back(data.at(r, v));
      return cells;
    }());
    marginal += bic_score(alone, column).total;
  }
  CHECK(std::fabs(scored[1].score - marginal) <= 1e-9);
}
