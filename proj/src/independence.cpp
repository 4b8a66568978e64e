#include "facade_bn/independence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "facade_bn/error.hpp"

namespace facade_bn {

namespace {

constexpr int kMaxIterations = 100000;
constexpr double kEpsilon = 1e-16;

// e^{-x} x^a / Γ(a), computed in log space.
double gamma_prefix(double a, double x) { return std::exp(a * std::log(x) - x - std::lgamma(a)); }

double lower_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  for (int n = 1; n < kMaxIterations; ++n) {
    term *= x / (a + n);
    sum += term;
    if (std::fabs(term) < std::fabs(sum) * kEpsilon) break;
  }
  return sum * gamma_prefix(a, x);
}

// Modified Lentz evaluation of the continued fraction for Q(a, x).
double upper_fraction(double a, double x) {
  constexpr double tiny = std::numeric_limits<double>::min() / kEpsilon;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxIterations; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::fabs(delta - 1.0) < kEpsilon) break;
  }
  return h * gamma_prefix(a, x);
}

void check_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isinf(x)) {
    throw Error(ErrorKind::DomainError, "incomplete gamma needs a > 0 and finite x >= 0");
  }
}

}  // namespace

double regularized_gamma_p(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return lower_series(a, x);
  return 1.0 - upper_fraction(a, x);
}

double regularized_gamma_q(double a, double x) {
  check_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - lower_series(a, x);
  return upper_fraction(a, x);
}

double chi2_sf(double statistic, double df) {
  if (!(df >= 1.0) || !(statistic >= 0.0) || std::isinf(statistic)) {
    throw Error(ErrorKind::DomainError, "chi2_sf needs df >= 1 and finite statistic >= 0");
  }
  return std::clamp(regularized_gamma_q(0.5 * df, 0.5 * statistic), 0.0, 1.0);
}

const char* to_string(CITestKind kind) {
  return kind == CITestKind::MutualInformation ? "mi" : "x2";
}

CITestKind parse_ci_test_kind(std::string_view text) {
  if (text == "mi") return CITestKind::MutualInformation;
  if (text == "x2") return CITestKind::PearsonX2;
  throw Error(ErrorKind::DomainError, "unknown test '" + std::string(text) + "'");
}

CITestResult ci_test(const Dataset& data, std::string_view x, std::string_view y,
                     const std::vector<std::string>& given, CITestKind kind) {
  const auto& schema = data.schema();
  const auto xi = schema.index_of(x);
  const auto yi = schema.index_of(y);
  if (xi == yi) throw Error(ErrorKind::DomainError, "X and Y must differ");
  std::vector<std::size_t> zs;
  std::size_t strata = 1;
  for (const auto& name : given) {
    const auto z = schema.index_of(name);
    if (z == xi || z == yi || std::find(zs.begin(), zs.end(), z) != zs.end()) {
      throw Error(ErrorKind::DomainError, "conditioning set must be distinct from X and Y");
    }
    zs.push_back(z);
    strata *= schema.cardinality(z);
  }
  if (data.rows() == 0) throw Error(ErrorKind::EmptyData, "test requires at least one row");

  const std::size_t rx = schema.cardinality(xi);
  const std::size_t ry = schema.cardinality(yi);
  std::vector<double> counts(strata * rx * ry, 0.0);
  for (std::size_t r = 0; r < data.rows(); ++r) {
    std::size_t s = 0;
    for (auto z : zs) s = s * schema.cardinality(z) + static_cast<std::size_t>(data.at(r, z));
    counts[(s * rx + static_cast<std::size_t>(data.at(r, xi))) * ry + static_cast<std::size_t>(data.at(r, yi))] += 1.0;
  }

  double statistic = 0.0;
  std::vector<double> row_sum(rx), col_sum(ry);
  for (std::size_t s = 0; s < strata; ++s) {
    const double* cell = counts.data() + s * rx * ry;
    std::fill(row_sum.begin(), row_sum.end(), 0.0);
    std::fill(col_sum.begin(), col_sum.end(), 0.0);
    double total = 0.0;
    for (std::size_t i = 0; i < rx; ++i) {
      for (std::size_t j = 0; j < ry; ++j) {
        row_sum[i] += cell[i * ry + j];
        col_sum[j] += cell[i * ry + j];
        total += cell[i * ry + j];
      }
    }
    if (total == 0.0) continue;
    for (std::size_t i = 0; i < rx; ++i) {
      for (std::size_t j = 0; j < ry; ++j) {
        const double observed = cell[i * ry + j];
        const double expected = row_sum[i] * col_sum[j] / total;
        if (kind == CITestKind::MutualInformation) {
          if (observed > 0.0) statistic += 2.0 * observed * std::log(observed / expected);
        } else if (expected > 0.0) {
          statistic += (observed - expected) * (observed - expected) / expected;
        }
      }
    }
  }
  // Rounding can leave a tiny negative G² on perfectly independent tables.
  statistic = std::max(statistic, 0.0);

  CITestResult result;
  result.x = std::string(x);
  result.y = std::string(y);
  result.given = given;
  result.kind = kind;
  result.statistic = statistic;
  result.df = static_cast<int>((rx - 1) * (ry - 1) * strata);
  result.p_value = chi2_sf(statistic, result.df);
  return result;
}

ArcStrengthReport arc_strength(const Dag& dag, const Dataset& data, CITestKind criterion) {
  ArcStrengthReport report;
  report.criterion = criterion;
  for (auto [from, to] : dag.arcs()) {
    std::vector<std::string> given;
    for (auto p : dag.parents(to)) {
      if (p != from) given.push_back(dag.name(p));
    }
    const auto test = ci_test(data, dag.name(from), dag.name(to), given, criterion);
    report.entries.push_back({dag.name(from), dag.name(to), test.p_value});
  }
  return report;
}

}  // namespace facade_bn
