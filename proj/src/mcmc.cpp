#include "facade_bn/mcmc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numeric>
#include <thread>

#include <boost/math/special_functions/trigamma.hpp>

#include "facade_bn/error.hpp"
#include "facade_bn/estimation.hpp"
#include "facade_bn/rng.hpp"

namespace facade_bn {

namespace {

constexpr double kTargetAcceptance = 0.3;

// Posterior Dirichlet parameters of every CPT row of one node.
struct NodeModel {
  std::string name;
  std::size_t r = 0;
  std::size_t q = 0;
  std::vector<double> alpha;        // q * r, counts + prior
  std::vector<double> coord_scale;  // q * (r - 1), sd of each log-odds coordinate
  std::vector<std::string> config_labels;
};

// Coefficient evaluated from the current CPT state.
struct Coefficient {
  enum class Kind { Arc, Marginal, Cell } kind;
  std::size_t node;
  int level;
  std::size_t cell;
  std::vector<std::pair<std::size_t, double>> first;  // (config, weight)
  std::vector<std::pair<std::size_t, double>> last;
};

double clamped_logit(double p) {
  p = std::clamp(p, 1e-300, 1.0 - 1e-16);
  return std::log(p) - std::log1p(-p);
}

class Normal {
 public:
  explicit Normal(Rng& rng) : rng_(rng) {}
  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = uniform01(rng_);
    const double u2 = uniform01(rng_);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    spare_ = radius * std::sin(2.0 * M_PI * u2);
    has_spare_ = true;
    return radius * std::cos(2.0 * M_PI * u2);
  }

 private:
  Rng& rng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// Log density of one row in log-odds coordinates (last level is the
// reference); includes the softmax Jacobian, so it is sum_k a_k ln theta_k.
double row_log_target(std::span<const double> alpha, std::span<const double> eta) {
  double max_eta = 0.0;
  for (double e : eta) max_eta = std::max(max_eta, e);
  double z = std::exp(-max_eta);
  for (double e : eta) z += std::exp(e - max_eta);
  const double lse = max_eta + std::log(z);
  double total_alpha = 0.0;
  double out = 0.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    total_alpha += alpha[k];
    if (k < eta.size()) out += alpha[k] * eta[k];
  }
  return out - total_alpha * lse;
}

void softmax_row(std::span<const double> eta, std::span<double> theta) {
  double max_eta = 0.0;
  for (double e : eta) max_eta = std::max(max_eta, e);
  double z = 0.0;
  for (std::size_t k = 0; k < theta.size(); ++k) {
    theta[k] = std::exp((k < eta.size() ? eta[k] : 0.0) - max_eta);
    z += theta[k];
  }
  for (auto& t : theta) t /= z;
}

struct Model {
  std::vector<NodeModel> nodes;
  std::vector<Coefficient> coefficients;
  std::vector<CoefficientId> ids;
};

Model build_model(const Dag& dag, const Dataset& data, const McmcConfig& config) {
  const auto& schema = data.schema();
  std::vector<std::size_t> cols;
  for (const auto& name : dag.nodes()) {
    auto c = schema.find(name);
    if (!c) throw Error(ErrorKind::SchemaMismatch, "data lacks DAG node '" + name + "'");
    cols.push_back(*c);
  }

  Model model;
  for (std::size_t node = 0; node < dag.size(); ++node) {
    NodeModel nm;
    nm.name = dag.name(node);
    nm.r = schema.cardinality(cols[node]);
    std::vector<std::size_t> parent_cols;
    for (auto p : dag.parents(node)) parent_cols.push_back(cols[p]);
    const auto counts = family_counts(data, cols[node], parent_cols);
    nm.q = counts.size() / nm.r;
    const double prior = config.prior_iss / static_cast<double>(nm.r * nm.q);
    nm.alpha.resize(counts.size());
    for (std::size_t i = 0; i < counts.size(); ++i) nm.alpha[i] = static_cast<double>(counts[i]) + prior;
    for (std::size_t j = 0; j < nm.q; ++j) {
      const double ref = boost::math::trigamma(nm.alpha[j * nm.r + nm.r - 1]);
      for (std::size_t k = 0; k + 1 < nm.r; ++k) {
        nm.coord_scale.push_back(std::sqrt(boost::math::trigamma(nm.alpha[j * nm.r + k]) + ref));
      }
    }
    for (std::size_t j = 0; j < nm.q; ++j) {
      std::string label;
      std::size_t rest = j;
      std::vector<std::string> parts(parent_cols.size());
      for (std::size_t i = parent_cols.size(); i-- > 0;) {
        const auto& var = schema.variable(parent_cols[i]);
        parts[i] = var.name + "=" + var.levels[rest % var.cardinality()];
        rest /= var.cardinality();
      }
      for (std::size_t i = 0; i < parts.size(); ++i) label += (i ? "," : "") + parts[i];
      nm.config_labels.push_back(label);
    }

    // Modal child level in the data, first level on ties.
    std::vector<std::int64_t> marginal(nm.r, 0);
    for (std::size_t i = 0; i < counts.size(); ++i) marginal[i % nm.r] += counts[i];
    const int modal = static_cast<int>(std::max_element(marginal.begin(), marginal.end()) - marginal.begin());

    const auto parents = dag.parents(node);
    if (parents.empty()) {
      model.coefficients.push_back({Coefficient::Kind::Marginal, node, modal, 0, {{0, 1.0}}, {}});
      model.ids.push_back({nm.name, nm.name});
    }
    for (std::size_t ip = 0; ip < parents.size(); ++ip) {
      // Weight each parent configuration by its empirical frequency given the
      // arc parent's level; unseen parent levels fall back to uniform.
      const std::size_t rp = schema.cardinality(parent_cols[ip]);
      auto weights_for = [&](int parent_level) {
        std::vector<std::pair<std::size_t, double>> w;
        std::int64_t total = 0;
        for (std::size_t j = 0; j < nm.q; ++j) {
          std::size_t stride = 1;
          for (std::size_t i = ip + 1; i < parent_cols.size(); ++i) stride *= schema.cardinality(parent_cols[i]);
          if (static_cast<int>((j / stride) % rp) != parent_level) continue;
          std::int64_t nj = 0;
          for (std::size_t k = 0; k < nm.r; ++k) nj += counts[j * nm.r + k];
          w.emplace_back(j, static_cast<double>(nj));
          total += nj;
        }
        for (auto& [j, weight] : w) {
          weight = total > 0 ? weight / static_cast<double>(total) : 1.0 / static_cast<double>(w.size());
        }
        return w;
      };
      model.coefficients.push_back({Coefficient::Kind::Arc, node, modal, 0, weights_for(0),
                                    weights_for(static_cast<int>(rp) - 1)});
      model.ids.push_back({nm.name, nm.name + "\xC2\xB7" + dag.name(parents[ip])});
    }
    if (config.include_cells) {
      const auto& levels = schema.variable(cols[node]).levels;
      for (std::size_t j = 0; j < nm.q; ++j) {
        for (std::size_t k = 0; k < nm.r; ++k) {
          model.coefficients.push_back({Coefficient::Kind::Cell, node, static_cast<int>(k), j * nm.r + k, {}, {}});
          std::string label = nm.name + "[" + levels[k];
          if (!nm.config_labels[j].empty()) label += "|" + nm.config_labels[j];
          model.ids.push_back({nm.name, label + "]"});
        }
      }
    }
    model.nodes.push_back(std::move(nm));
  }
  return model;
}

struct ChainOutput {
  std::vector<std::vector<double>> traces;  // per coefficient
  double acceptance = 0.0;
};

ChainOutput run_chain(const Model& model, const McmcConfig& config, std::size_t chain) {
  Rng rng = make_rng(config.seed, chain);
  Normal normal(rng);

  std::vector<std::vector<double>> eta(model.nodes.size());
  std::vector<std::vector<double>> theta(model.nodes.size());
  std::vector<std::vector<double>> log_step(model.nodes.size());
  std::vector<std::vector<double>> log_target(model.nodes.size());
  for (std::size_t n = 0; n < model.nodes.size(); ++n) {
    const auto& nm = model.nodes[n];
    const std::size_t dim = nm.r - 1;
    eta[n].resize(nm.q * dim);
    theta[n].resize(nm.q * nm.r);
    log_step[n].assign(nm.q, std::log(2.38 / std::sqrt(static_cast<double>(dim))));
    log_target[n].resize(nm.q);
    for (std::size_t j = 0; j < nm.q; ++j) {
      const double ref = nm.alpha[j * nm.r + dim];
      for (std::size_t k = 0; k < dim; ++k) {
        // Dispersed start around the posterior log-odds of the means.
        eta[n][j * dim + k] = std::log(nm.alpha[j * nm.r + k] / ref) + nm.coord_scale[j * dim + k] * normal();
      }
      std::span<const double> row_eta(eta[n].data() + j * dim, dim);
      log_target[n][j] = row_log_target({nm.alpha.data() + j * nm.r, nm.r}, row_eta);
      softmax_row(row_eta, {theta[n].data() + j * nm.r, nm.r});
    }
  }

  ChainOutput out;
  out.traces.assign(model.coefficients.size(), std::vector<double>(config.iters));
  std::size_t accepted = 0;
  std::size_t proposed = 0;
  std::vector<double> proposal;
  const std::size_t total = config.warmup + config.iters;
  for (std::size_t it = 0; it < total; ++it) {
    const bool warming = it < config.warmup;
    const double gain = warming ? 1.0 / std::pow(static_cast<double>(it) + 1.0, 0.6) : 0.0;
    for (std::size_t n = 0; n < model.nodes.size(); ++n) {
      const auto& nm = model.nodes[n];
      const std::size_t dim = nm.r - 1;
      proposal.resize(dim);
      for (std::size_t j = 0; j < nm.q; ++j) {
        const double step = std::exp(log_step[n][j]);
        for (std::size_t k = 0; k < dim; ++k) {
          proposal[k] = eta[n][j * dim + k] + step * nm.coord_scale[j * dim + k] * normal();
        }
        const double candidate = row_log_target({nm.alpha.data() + j * nm.r, nm.r}, proposal);
        const double u = uniform01(rng);
        const bool accept = u > 0.0 && std::log(u) < candidate - log_target[n][j];
        if (accept) {
          std::copy(proposal.begin(), proposal.end(), eta[n].begin() + static_cast<std::ptrdiff_t>(j * dim));
          log_target[n][j] = candidate;
          softmax_row(proposal, {theta[n].data() + j * nm.r, nm.r});
        }
        if (warming) {
          log_step[n][j] += gain * ((accept ? 1.0 : 0.0) - kTargetAcceptance);
        } else {
          ++proposed;
          accepted += accept ? 1 : 0;
        }
      }
    }
    if (warming) continue;
    const std::size_t draw = it - config.warmup;
    for (std::size_t c = 0; c < model.coefficients.size(); ++c) {
      const auto& coef = model.coefficients[c];
      const auto& th = theta[coef.node];
      const std::size_t r = model.nodes[coef.node].r;
      double value = 0.0;
      switch (coef.kind) {
        case Coefficient::Kind::Cell:
          value = th[coef.cell];
          break;
        case Coefficient::Kind::Marginal:
          value = clamped_logit(th[coef.level]);
          break;
        case Coefficient::Kind::Arc: {
          auto mix = [&](const std::vector<std::pair<std::size_t, double>>& w) {
            double p = 0.0;
            for (const auto& [j, weight] : w) p += weight * th[j * r + coef.level];
            return p;
          };
          value = clamped_logit(mix(coef.last)) - clamped_logit(mix(coef.first));
          break;
        }
      }
      out.traces[c][draw] = value;
    }
  }
  out.acceptance = proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
  return out;
}

double mean_of(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

double variance_of(std::span<const double> x, double mean) {
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  return ss / static_cast<double>(x.size() - 1);
}

void require_length(std::span<const double> trace) {
  if (trace.size() < 100) throw Error(ErrorKind::DomainError, "trace needs at least 100 draws");
}

}  // namespace

McmcRun sample_posterior(const Dag& dag, const Dataset& data, const McmcConfig& config) {
  if (data.rows() == 0) throw Error(ErrorKind::NoData, "posterior sampling needs data");
  if (!(config.prior_iss > 0.0)) throw Error(ErrorKind::DomainError, "prior_iss must be positive");
  if (config.chains < 2) throw Error(ErrorKind::DomainError, "at least two chains required");
  if (config.iters < 100) throw Error(ErrorKind::DomainError, "at least 100 post-warmup iterations required");

  const Model model = build_model(dag, data, config);
  std::vector<ChainOutput> outputs(config.chains);
  std::vector<std::exception_ptr> errors(config.chains);
  std::vector<std::thread> workers;
  const unsigned lanes = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t first = 0; first < config.chains; first += lanes) {
    workers.clear();
    for (std::size_t c = first; c < std::min<std::size_t>(config.chains, first + lanes); ++c) {
      workers.emplace_back([&, c] {
        try {
          outputs[c] = run_chain(model, config, c);
        } catch (...) {
          errors[c] = std::current_exception();
        }
      });
    }
    for (auto& w : workers) w.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  McmcRun run;
  run.config = config;
  for (std::size_t c = 0; c < model.ids.size(); ++c) {
    ChainSet set{model.ids[c], {}, config.warmup, config.seed};
    for (auto& out : outputs) set.chains.push_back(std::move(out.traces[c]));
    run.coefficients.push_back(std::move(set));
  }
  for (const auto& out : outputs) run.acceptance.push_back(out.acceptance);
  return run;
}

std::vector<double> acf(std::span<const double> trace, std::size_t max_lag) {
  require_length(trace);
  if (max_lag >= trace.size()) throw Error(ErrorKind::DomainError, "max_lag must be below the trace length");
  const double m = mean_of(trace);
  const std::size_t n = trace.size();
  double c0 = 0.0;
  for (double v : trace) c0 += (v - m) * (v - m);
  if (c0 == 0.0) throw Error(ErrorKind::ConstantTrace, "autocorrelation of a constant trace");
  std::vector<double> out(max_lag + 1);
  for (std::size_t k = 0; k <= max_lag; ++k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += (trace[t] - m) * (trace[t + k] - m);
    out[k] = ck / c0;
  }
  return out;
}

double ess(std::span<const double> trace) {
  require_length(trace);
  const std::size_t n = trace.size();
  const double m = mean_of(trace);
  std::vector<double> centered(n);
  double c0 = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    centered[t] = trace[t] - m;
    c0 += centered[t] * centered[t];
  }
  if (c0 == 0.0) throw Error(ErrorKind::ConstantTrace, "effective sample size of a constant trace");
  auto rho = [&](std::size_t k) {
    double ck = 0.0;
    for (std::size_t t = 0; t + k < n; ++t) ck += centered[t] * centered[t + k];
    return ck / c0;
  };
  // Sum pairs Γ_k = ρ_2k + ρ_2k+1 while they stay positive; Γ_0 is always kept.
  double pair_sum = 1.0 + rho(1);
  for (std::size_t k = 1; 2 * k + 1 < n; ++k) {
    const double pair = rho(2 * k) + rho(2 * k + 1);
    if (pair <= 0.0) break;
    pair_sum += pair;
  }
  const double log_n = std::log10(static_cast<double>(n));
  const double tau = std::max(-1.0 + 2.0 * pair_sum, 1.0 / log_n);
  return static_cast<double>(n) / tau;
}

double mcse(std::span<const double> trace) {
  const double e = ess(trace);
  return std::sqrt(variance_of(trace, mean_of(trace))) / std::sqrt(e);
}

double psrf(const std::vector<std::vector<double>>& chains) {
  if (chains.size() < 2) throw Error(ErrorKind::DomainError, "psrf needs at least two chains");
  const std::size_t len = chains.front().size();
  for (const auto& c : chains) {
    if (c.size() != len) throw Error(ErrorKind::DomainError, "chains must have equal length");
    require_length(c);
  }
  for (std::size_t a = 0; a < chains.size(); ++a) {
    for (std::size_t b = a + 1; b < chains.size(); ++b) {
      if (chains[a] == chains[b]) throw Error(ErrorKind::DegenerateChains, "identical chains");
    }
  }
  const std::size_t half = len / 2;
  std::vector<double> means;
  double within = 0.0;
  for (const auto& c : chains) {
    for (std::size_t part = 0; part < 2; ++part) {
      std::span<const double> s(c.data() + (part == 0 ? 0 : len - half), half);
      const double m = mean_of(s);
      means.push_back(m);
      within += variance_of(s, m);
    }
  }
  within /= static_cast<double>(means.size());
  if (!(within > 0.0)) throw Error(ErrorKind::DegenerateChains, "zero within-chain variance");
  const double grand = mean_of(means);
  const double between = static_cast<double>(half) * variance_of(means, grand);
  const double n = static_cast<double>(half);
  return std::sqrt((n - 1.0) / n + between / (n * within));
}

Diagnostics diagnose(const ChainSet& set, std::size_t max_lag) {
  Diagnostics d;
  if (set.chains.empty()) throw Error(ErrorKind::DomainError, "no chains");
  std::vector<double> pooled;
  for (const auto& c : set.chains) pooled.insert(pooled.end(), c.begin(), c.end());
  d.mean = mean_of(pooled);
  d.sd = std::sqrt(variance_of(pooled, d.mean));
  d.psrf = psrf(set.chains);
  const std::size_t len = set.chains.front().size();
  max_lag = std::min(max_lag, len - 1);
  d.acf.assign(max_lag + 1, 0.0);
  for (const auto& c : set.chains) {
    d.ess += ess(c);
    const auto a = acf(c, max_lag);
    for (std::size_t k = 0; k <= max_lag; ++k) d.acf[k] += a[k] / static_cast<double>(set.chains.size());
  }
  d.mcse = d.sd / std::sqrt(d.ess);
  d.running_mean_stride = std::max<std::size_t>(1, len / 200);
  for (const auto& c : set.chains) {
    std::vector<double> rm;
    double sum = 0.0;
    for (std::size_t t = 0; t < len; ++t) {
      sum += c[t];
      if ((t + 1) % d.running_mean_stride == 0) rm.push_back(sum / static_cast<double>(t + 1));
    }
    d.running_mean.push_back(std::move(rm));
  }
  return d;
}

std::vector<CoefficientReport> diagnostics_report(const std::vector<ChainSet>& chain_sets,
                                                  DiagnosticThresholds thresholds) {
  std::vector<CoefficientReport> out;
  for (const auto& set : chain_sets) {
    CoefficientReport report;
    report.coefficient = set.coefficient;
    try {
      report.diagnostics = diagnose(set);
      if (!(report.diagnostics->psrf < thresholds.max_psrf)) report.failures.push_back("psrf above threshold");
      if (!(report.diagnostics->ess > thresholds.min_ess)) report.failures.push_back("ess below threshold");
    } catch (const Error& e) {
      report.failures.push_back(std::string(to_string(e.kind())) + ": " + e.what());
    }
    report.pass = report.failures.empty();
    out.push_back(std::move(report));
  }
  return out;
}

}  // namespace facade_bn
