#include <doctest.h>

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <random>

#include "facade_bn/error.hpp"
#include "facade_bn/independence.hpp"
#include "facade_bn/inference.hpp"
#include "../support/fixtures.hpp"

using namespace facade_bn;
using doctest::Approx;

namespace {

Dataset two_by_two(int a, int b, int c, int d) {
  const Schema schema({{"X", {"x0", "x1"}}, {"Y", {"y0", "y1"}}});
  std::vector<int> cells;
  auto add = [&](int times, int x, int y) {
    for (int i = 0; i < times; ++i) cells.insert(cells.end(), {x, y});
  };
  add(a, 0, 0);
  add(b, 0, 1);
  add(c, 1, 0);
  add(d, 1, 1);
  return Dataset(schema, cells);
}

}  // namespace

TEST_CASE("chi-square tail agrees with the reference incomplete gamma") {
  const double dfs[] = {1, 2, 3, 4, 5, 8, 12, 20, 36, 72};
  const double xs[] = {0.01, 0.5, 1.0, 3.84, 7.5, 15.0, 21.477, 40.0, 90.0};
  int points = 0;
  for (double df : dfs) {
    for (double x : xs) {
      const double want = boost::math::gamma_q(df / 2.0, x / 2.0);
      const double got = chi2_sf(x, df);
      if (want > 1e-300) CHECK(std::fabs(got - want) <= 1e-10 * std::max(want, 1e-10));
      ++points;
    }
  }
  CHECK(points >= 50);
  CHECK(chi2_sf(0.0, 4) == 1.0);
  CHECK(regularized_gamma_p(2.5, 1.7) + regularized_gamma_q(2.5, 1.7) == Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(chi2_sf(-1.0, 2), Error);
  CHECK_THROWS_AS(chi2_sf(1.0, 0), Error);
}

TEST_CASE("reference statistics map to their p-values") {
  using namespace facade_bn::testing;
  for (const auto& t : {kMiCeDcGivenB, kX2CeDcGivenB, kMiCeRfGivenDc, kX2CeRfGivenDc}) {
    CHECK(std::fabs(chi2_sf(t.statistic, t.df) - t.p_value) <= t.p_tolerance);
  }
}

TEST_CASE("perfect 2x2 association") {
  const auto data = two_by_two(10, 0, 0, 10);
  const auto x2 = x2_test(data, "X", "Y");
  CHECK(x2.statistic == Approx(20.0).epsilon(1e-12));
  CHECK(x2.df == 1);
  CHECK(x2.p_value == Approx(boost::math::gamma_q(0.5, 10.0)).epsilon(1e-10));
  const auto mi = mi_test(data, "X", "Y");
  CHECK(mi.statistic == Approx(40.0 * std::log(2.0)).epsilon(1e-12));
  CHECK(mi.df == 1);
}

TEST_CASE("independent table gives zero statistics") {
  const auto data = two_by_two(5, 5, 5, 5);
  CHECK(x2_test(data, "X", "Y").statistic == Approx(0.0));
  CHECK(mi_test(data, "X", "Y").statistic == Approx(0.0));
  CHECK(mi_test(data, "X", "Y").p_value == Approx(1.0));
}

TEST_CASE("G2 by hand on a skewed table") {
  const auto data = two_by_two(8, 2, 3, 7);
  // Expected counts: rows 10, 10; cols 11, 9; n = 20.
  const double obs[] = {8, 2, 3, 7};
  const double exp[] = {5.5, 4.5, 5.5, 4.5};
  double g2 = 0.0;
  double x2 = 0.0;
  for (int i = 0; i < 4; ++i) {
    g2 += 2.0 * obs[i] * std::log(obs[i] / exp[i]);
    x2 += (obs[i] - exp[i]) * (obs[i] - exp[i]) / exp[i];
  }
  CHECK(mi_test(data, "X", "Y").statistic == Approx(g2).epsilon(1e-12));
  CHECK(x2_test(data, "X", "Y").statistic == Approx(x2).epsilon(1e-12));
}

TEST_CASE("degrees of freedom keep empty strata") {
  const Schema schema({{"X", {"a", "b", "c"}}, {"Y", {"a", "b"}}, {"Z", {"z0", "z1", "z2", "z3"}}});
  // Z only ever takes z0.
  const Dataset data(schema, {0, 0, 0, 1, 1, 0, 2, 0, 0, 0, 1, 0});
  const auto r = mi_test(data, "X", "Y", {"Z"});
  CHECK(r.df == 2 * 1 * 4);
  CHECK(r.given == std::vector<std::string>{"Z"});
}

TEST_CASE("bad variable names are rejected") {
  const auto data = two_by_two(1, 1, 1, 1);
  CHECK_THROWS_AS(mi_test(data, "X", "Q"), Error);
  CHECK_THROWS_AS(mi_test(data, "X", "X"), Error);
  CHECK_THROWS_AS(mi_test(data, "X", "Y", {"X"}), Error);
}

TEST_CASE("p-values are roughly uniform under independence") {
  const Schema schema({{"X", {"a", "b", "c"}}, {"Y", {"a", "b", "c"}}});
  std::mt19937_64 rng(41);
  std::uniform_int_distribution<int> level(0, 2);
  int rejections = 0;
  const int trials = 2000;
  for (int t = 0; t < trials; ++t) {
    std::vector<int> cells;
    for (int i = 0; i < 300; ++i) cells.insert(cells.end(), {level(rng), level(rng)});
    if (x2_test(Dataset(schema, cells), "X", "Y").p_value < 0.05) ++rejections;
  }
  const double rate = static_cast<double>(rejections) / trials;
  CHECK(rate > 0.03);
  CHECK(rate < 0.07);
}

TEST_CASE("arc strength conditions on the other parents") {
  const Schema schema({{"A", {"0", "1"}}, {"B", {"0", "1"}}, {"C", {"0", "1"}}});
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.5);
  std::bernoulli_distribution noise(0.1);
  std::vector<int> cells;
  for (int i = 0; i < 400; ++i) {
    const int a = coin(rng);
    const int b = coin(rng);
    const int c = noise(rng) ? 1 - a : a;
    cells.insert(cells.end(), {a, b, c});
  }
  const Dataset data(schema, cells);
  const auto dag = parse_model_string("[A][B][C|A:B]", schema);
  const auto report = arc_strength(dag, data, CITestKind::PearsonX2);
  REQUIRE(report.entries.size() == 2);
  for (const auto& e : report.entries) {
    const auto other = e.from == "A" ? std::vector<std::string>{"B"} : std::vector<std::string>{"A"};
    CHECK(e.p_value == Approx(x2_test(data, e.from, "C", other).p_value).epsilon(1e-14));
  }
  CHECK(report.entries[0].from == "A");
  CHECK(report.entries[0].p_value < 1e-10);
}

TEST_CASE("chi-square tail is decreasing and stays in (0, 1]") {
  for (double df : {1.0, 4.0, 12.0, 30.0}) {
    double prev = 1.0;
    for (double x = 0.25; x < 80.0; x += 0.25) {
      const double p = chi2_sf(x, df);
      CHECK(p > 0.0);
      CHECK(p <= 1.0);
      CHECK((p < prev || p == 1.0));
      prev = p;
    }
  }
}

TEST_CASE("G2 and X2 agree on large dependent samples") {
  const Schema schema({{"X", {"a", "b", "c"}}, {"Y", {"a", "b", "c"}}});
  std::mt19937_64 rng(43);
  std::uniform_int_distribution<int> level(0, 2);
  std::bernoulli_distribution copy(0.15);
  std::vector<int> cells;
  for (int i = 0; i < 100000; ++i) {
    const int x = level(rng);
    cells.insert(cells.end(), {x, copy(rng) ? x : level(rng)});
  }
  const Dataset data(schema, cells);
  const double g2 = mi_test(data, "X", "Y").statistic;
  const double x2 = x2_test(data, "X", "Y").statistic;
  CHECK(std::fabs(g2 - x2) / x2 < 0.05);
}
