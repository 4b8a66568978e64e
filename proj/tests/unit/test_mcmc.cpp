#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "facade_bn/error.hpp"
#include "facade_bn/estimation.hpp"
#include "facade_bn/inference.hpp"
#include "facade_bn/mcmc.hpp"
#include "../support/oracles.hpp"

using namespace facade_bn;
using doctest::Approx;

namespace {

std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double mean = 0.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(mean, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = z(rng);
  return x;
}

const ChainSet& find_set(const McmcRun& run, const std::string& label) {
  for (const auto& s : run.coefficients) {
    if (s.coefficient.label == label) return s;
  }
  FAIL("no coefficient " << label);
  return run.coefficients.front();
}

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::DomainError;
}

}  // namespace

TEST_CASE("ESS of white noise and AR(1)") {
  const double white = ess(white_noise(10000, 1));
  CHECK(white >= 8000);
  CHECK(white <= 12000);

  const double want = 10000.0 * 0.1 / 1.9;
  for (std::uint64_t seed : {2, 3, 4}) {
    const double got = ess(testing::ar1(10000, 0.9, seed));
    CHECK(got >= 0.7 * want);
    CHECK(got <= 1.3 * want);
  }
}

TEST_CASE("antithetic traces may exceed N") {
  auto x = white_noise(2000, 5);
  std::vector<double> alt(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) alt[i] = (i % 2 ? -1.0 : 1.0) + 0.1 * x[i];
  CHECK(ess(alt) > 2000.0);
}

TEST_CASE("ESS and ACF argument errors") {
  CHECK(kind_of([] { ess(std::vector<double>(500, 2.0)); }) == ErrorKind::ConstantTrace);
  CHECK(kind_of([] { ess(std::vector<double>(50, 0.0)); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { acf(white_noise(200, 1), 200); }) == ErrorKind::DomainError);
}

TEST_CASE("ACF of white noise and AR(1)") {
  const auto noise = acf(white_noise(10000, 7), 20);
  CHECK(noise[0] == 1.0);
  for (std::size_t k = 1; k <= 20; ++k) CHECK(std::fabs(noise[k]) < 0.05);

  const auto ar = acf(testing::ar1(100000, 0.9, 8), 10);
  for (std::size_t k = 0; k <= 10; ++k) CHECK(std::fabs(ar[k] - std::pow(0.9, static_cast<double>(k))) <= 0.05);
}

TEST_CASE("mcse is sd over root ESS") {
  const auto x = testing::ar1(5000, 0.5, 9);
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  const double sd = std::sqrt(ss / static_cast<double>(x.size() - 1));
  CHECK(std::fabs(mcse(x) - sd / std::sqrt(ess(x))) <= 1e-12);
}

TEST_CASE("psrf") {
  std::vector<std::vector<double>> same;
  for (std::uint64_t c = 0; c < 4; ++c) same.push_back(white_noise(5000, 10 + c));
  CHECK(psrf(same) < 1.05);

  const std::vector<std::vector<double>> apart{white_noise(1000, 20, 0.0), white_noise(1000, 21, 10.0)};
  CHECK(psrf(apart) > 1.5);

  std::vector<double> medians;
  for (std::uint64_t trial = 0; trial < 20; ++trial) {
    medians.push_back(psrf({testing::ar1(10000, 0.5, 100 + trial), testing::ar1(10000, 0.5, 200 + trial)}));
  }
  std::nth_element(medians.begin(), medians.begin() + 10, medians.end());
  CHECK(medians[10] < 1.02);

  const auto copy = white_noise(500, 30);
  CHECK(kind_of([&] { psrf({copy, copy, copy, copy}); }) == ErrorKind::DegenerateChains);
  CHECK(kind_of([] { psrf({std::vector<double>(200, 1.0), std::vector<double>(200, 2.0)}); }) ==
        ErrorKind::DegenerateChains);
  CHECK(kind_of([] { psrf({white_noise(200, 1)}); }) == ErrorKind::DomainError);
  CHECK(kind_of([] { psrf({white_noise(200, 1), white_noise(300, 2)}); }) == ErrorKind::DomainError);
}

TEST_CASE("identical chains are reported, not thrown") {
  const auto copy = white_noise(500, 31);
  ChainSet set{{"X", "X"}, {copy, copy, copy, copy}, 0, 0};
  const auto report = diagnostics_report({set});
  REQUIRE(report.size() == 1);
  CHECK_FALSE(report[0].pass);
  CHECK_FALSE(report[0].diagnostics.has_value());
  REQUIRE_FALSE(report[0].failures.empty());
  CHECK(report[0].failures[0].find("DegenerateChains") != std::string::npos);
}

TEST_CASE("diagnose pools chains") {
  ChainSet set{{"X", "X"}, {white_noise(2000, 40), white_noise(2000, 41)}, 0, 0};
  const auto d = diagnose(set, 30);
  CHECK(d.ess == Approx(ess(set.chains[0]) + ess(set.chains[1])));
  CHECK(std::fabs(d.mcse - d.sd / std::sqrt(d.ess)) <= 1e-12);
  CHECK(d.acf.size() == 31);
  CHECK(d.acf[0] == Approx(1.0));
  CHECK(d.running_mean.size() == 2);
  CHECK(d.running_mean[0].back() == Approx(std::accumulate(set.chains[0].begin(), set.chains[0].end(), 0.0) / 2000));
}

TEST_CASE("conjugate binary node") {
  const Schema schema({{"X", {"a", "b"}}});
  const Dataset data(schema, {0, 0, 0, 1});
  McmcConfig config{2.0, 4, 5000, 1000, 17, true};
  const auto run = sample_posterior(Dag::empty(schema), data, config);
  const auto& cell = find_set(run, "X[a]");
  const auto d = diagnose(cell);
  CHECK(std::fabs(d.mean - 4.0 / 6.0) <= 3.0 * d.mcse);
  const auto report = diagnostics_report(run.coefficients);
  for (const auto& r : report) {
    CHECK_MESSAGE(r.pass, r.coefficient.label);
  }
  for (double a : run.acceptance) {
    CHECK(a > 0.15);
    CHECK(a < 0.5);
  }
}

TEST_CASE("cell means match Dirichlet posteriors on a small network") {
  std::mt19937_64 rng(50);
  const auto schema = testing::toy_schema(3, rng);
  const auto dag = testing::toy_dag(schema, rng, 1.0);
  const auto data = forward_sample(testing::toy_network(dag, schema, rng, 2.0), 300, 3);
  McmcConfig config{1.0, 4, 3000, 1000, 5, true};
  const auto run = sample_posterior(dag, data, config);
  std::size_t cells = 0;
  std::size_t inside = 0;
  for (std::size_t v = 0; v < dag.size(); ++v) {
    std::vector<std::size_t> pcols;
    for (auto p : dag.parents(v)) pcols.push_back(p);
    const auto counts = family_counts(data, v, pcols);
    const std::size_t r = schema.cardinality(v);
    const std::size_t q = counts.size() / r;
    const double prior = 1.0 / static_cast<double>(r * q);
    std::size_t idx = 0;
    for (const auto& set : run.coefficients) {
      if (set.coefficient.child != dag.name(v) || set.coefficient.label.find('[') == std::string::npos) continue;
      const std::size_t j = idx / r;
      double nj = 0.0;
      for (std::size_t k = 0; k < r; ++k) nj += static_cast<double>(counts[j * r + k]);
      const double want = (static_cast<double>(counts[idx]) + prior) / (nj + prior * static_cast<double>(r));
      const auto d = diagnose(set);
      ++cells;
      if (std::fabs(d.mean - want) <= 3.0 * d.mcse) ++inside;
      ++idx;
    }
    CHECK(idx == r * q);
  }
  CHECK(static_cast<double>(inside) >= 0.9 * static_cast<double>(cells));
}

TEST_CASE("coefficient labels") {
  const Schema schema({{"A", {"a0", "a1"}}, {"B", {"b0", "b1", "b2"}}});
  const Dataset data(schema, {0, 0, 0, 1, 1, 2, 1, 2, 0, 1});
  McmcConfig config{1.0, 2, 100, 50, 1, true};
  const auto run = sample_posterior(parse_model_string("[A][B|A]", schema), data, config);
  std::vector<std::string> labels;
  for (const auto& s : run.coefficients) labels.push_back(s.coefficient.label);
  CHECK(std::find(labels.begin(), labels.end(), "A") != labels.end());
  CHECK(std::find(labels.begin(), labels.end(), "B\xC2\xB7" "A") != labels.end());
  CHECK(std::find(labels.begin(), labels.end(), "B[b2|A=a1]") != labels.end());
  CHECK(std::find(labels.begin(), labels.end(), "A[a0]") != labels.end());
}

TEST_CASE("sampler is deterministic per seed and chain") {
  const auto data = forward_sample(testing::m13_truth(), 120, 2);
  const auto dag = parse_model_string("[B][C][DO][PL][T][DC|B][CE|DC][RF|DC][TR|RF][MD|TR]", data.schema());
  McmcConfig config{1.0, 2, 300, 100, 9, false};
  const auto a = sample_posterior(dag, data, config);
  const auto b = sample_posterior(dag, data, config);
  REQUIRE(a.coefficients.size() == b.coefficients.size());
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) CHECK(a.coefficients[i].chains == b.coefficients[i].chains);

  config.chains = 3;
  const auto c = sample_posterior(dag, data, config);
  for (std::size_t i = 0; i < a.coefficients.size(); ++i) {
    CHECK(c.coefficients[i].chains[0] == a.coefficients[i].chains[0]);
    CHECK(c.coefficients[i].chains[1] == a.coefficients[i].chains[1]);
  }
  config.seed = 10;
  CHECK(sample_posterior(dag, data, config).coefficients[0].chains[0] != a.coefficients[0].chains[0]);
}

TEST_CASE("short runs fail the ESS threshold") {
  const auto data = forward_sample(testing::m13_truth(), 200, 12);
  const auto dag = parse_model_string("[B][C][DO][PL][T][DC|B][CE|DC][RF|DC][TR|RF][MD|TR]", data.schema());
  McmcConfig config{1.0, 4, 200, 200, 3, false};
  const auto report = diagnostics_report(sample_posterior(dag, data, config).coefficients);
  bool ess_failure = false;
  for (const auto& r : report) {
    for (const auto& f : r.failures) ess_failure = ess_failure || f.find("ess") != std::string::npos;
  }
  CHECK(ess_failure);
}

TEST_CASE("sampler preconditions") {
  const Schema schema({{"X", {"a", "b"}}});
  const auto dag = Dag::empty(schema);
  const Dataset data(schema, {0, 1});
  CHECK(kind_of([&] { sample_posterior(dag, Dataset(schema, {}), {}); }) == ErrorKind::NoData);
  CHECK(kind_of([&] { sample_posterior(dag, data, {0.0, 4, 200, 10, 1, false}); }) == ErrorKind::DomainError);
  CHECK(kind_of([&] { sample_posterior(dag, data, {1.0, 1, 200, 10, 1, false}); }) == ErrorKind::DomainError);
  CHECK(kind_of([&] { sample_posterior(dag, data, {1.0, 2, 50, 10, 1, false}); }) == ErrorKind::DomainError);
}
