#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "facade_bn/data_model.hpp"
#include "facade_bn/graph.hpp"

namespace facade_bn {

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);
/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

/// Upper tail of the chi-square distribution, Q(df/2, statistic/2).
double chi2_sf(double statistic, double df);

enum class CITestKind { MutualInformation, PearsonX2 };

const char* to_string(CITestKind kind);
CITestKind parse_ci_test_kind(std::string_view text);

struct CITestResult {
  std::string x;
  std::string y;
  std::vector<std::string> given;
  double statistic = 0.0;
  int df = 0;
  double p_value = 1.0;
  CITestKind kind = CITestKind::MutualInformation;
};

/// Tests X independent of Y given Z over the stratified contingency tables.
/// Empty strata contribute nothing to the statistic but keep their share of
/// the degrees of freedom.
CITestResult ci_test(const Dataset& data, std::string_view x, std::string_view y,
                     const std::vector<std::string>& given, CITestKind kind);

/// G² = 2 N I(X;Y|Z) in nats.
inline CITestResult mi_test(const Dataset& data, std::string_view x, std::string_view y,
                            const std::vector<std::string>& given = {}) {
  return ci_test(data, x, y, given, CITestKind::MutualInformation);
}

/// Pearson X² with expected counts taken within each stratum.
inline CITestResult x2_test(const Dataset& data, std::string_view x, std::string_view y,
                            const std::vector<std::string>& given = {}) {
  return ci_test(data, x, y, given, CITestKind::PearsonX2);
}

struct ArcStrength {
  std::string from;
  std::string to;
  double p_value = 1.0;
};

struct ArcStrengthReport {
  CITestKind criterion = CITestKind::PearsonX2;
  std::vector<ArcStrength> entries;
};

/// p-value of from ⟂ to given the other parents of `to`, for every arc.
ArcStrengthReport arc_strength(const Dag& dag, const Dataset& data, CITestKind criterion);

}  // namespace facade_bn
