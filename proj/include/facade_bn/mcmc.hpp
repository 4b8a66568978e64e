#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "facade_bn/data_model.hpp"
#include "facade_bn/graph.hpp"

namespace facade_bn {

/// Names one sampled quantity. Labels are "child·parent" for arc
/// coefficients, "child" for parentless nodes and "child[level|config]" for
/// individual CPT cells.
struct CoefficientId {
  std::string child;
  std::string label;

  friend bool operator==(const CoefficientId&, const CoefficientId&) = default;
  friend auto operator<=>(const CoefficientId&, const CoefficientId&) = default;
};

struct ChainSet {
  CoefficientId coefficient;
  std::vector<std::vector<double>> chains;
  std::size_t warmup_dropped = 0;
  std::uint64_t seed = 0;
};

struct McmcConfig {
  double prior_iss = 1.0;
  std::size_t chains = 4;
  /// Post-warmup draws kept per chain.
  std::size_t iters = 5000;
  std::size_t warmup = 1000;
  std::uint64_t seed = 0;
  /// Also trace every CPT cell probability.
  bool include_cells = false;
};

struct McmcRun {
  McmcConfig config;
  std::vector<ChainSet> coefficients;
  /// Post-warmup acceptance rate per chain, averaged over CPT rows.
  std::vector<double> acceptance;
};

/// Random-walk Metropolis over additive log-odds coordinates of every CPT row,
/// each row carrying a symmetric Dirichlet(prior_iss / (r q)) prior. Step
/// sizes adapt per row during warmup toward 30% acceptance and are frozen
/// afterwards. Chain c draws from an RNG stream derived from (seed, c).
///
/// The arc coefficient child·parent is the log-odds of the child's modal
/// level when the parent sits at its last level minus the same log-odds at
/// its first level; other parents are averaged with their empirical
/// conditional frequencies.
McmcRun sample_posterior(const Dag& dag, const Dataset& data, const McmcConfig& config);

/// Geyer initial-positive-sequence effective sample size.
double ess(std::span<const double> trace);
/// Split-chain potential scale reduction factor.
double psrf(const std::vector<std::vector<double>>& chains);
double mcse(std::span<const double> trace);
/// Biased autocorrelation estimates for lags 0..max_lag.
std::vector<double> acf(std::span<const double> trace, std::size_t max_lag);

struct Diagnostics {
  double mean = 0.0;
  double sd = 0.0;
  double ess = 0.0;
  double psrf = 0.0;
  double mcse = 0.0;
  /// Chain-averaged autocorrelation by lag.
  std::vector<double> acf;
  /// Per-chain running means, thinned for plotting.
  std::vector<std::vector<double>> running_mean;
  std::size_t running_mean_stride = 1;
};

/// Pooled diagnostics of one coefficient; ess sums per-chain estimates and
/// mcse = sd / sqrt(ess).
Diagnostics diagnose(const ChainSet& chains, std::size_t max_lag = 40);

struct DiagnosticThresholds {
  double max_psrf = 1.1;
  double min_ess = 400.0;
};

struct CoefficientReport {
  CoefficientId coefficient;
  std::optional<Diagnostics> diagnostics;
  bool pass = false;
  std::vector<std::string> failures;
};

/// Per-coefficient diagnostics with pass/fail. Degenerate or constant chains
/// are reported as failures, never thrown.
std::vector<CoefficientReport> diagnostics_report(const std::vector<ChainSet>& chain_sets,
                                                  DiagnosticThresholds thresholds = {});

}  // namespace facade_bn
